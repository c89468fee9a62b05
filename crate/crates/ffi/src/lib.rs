//! C ABI over the olfactory toolkit.
//!
//! Every fallible function returns an [`OlfStatus`] and writes its result
//! through an out pointer. On failure a message is kept per thread and can be
//! read with [`olf_last_error`]. Handles are opaque; free each with its own
//! `_free` function. Strings returned to the caller are owned by the caller
//! and released with [`olf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use olfactory::corpus::{parse_tagged, Corpus};
use olfactory::eval::{band, cohens_kappa, mcnemar_p, Band};
use olfactory::lexicon::Lexicon;
use olfactory::matcher::{write_match_dump, CompiledPattern};
use olfactory::pattern::parse_pattern;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OlfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Corpus or lexicon text could not be parsed.
    Parse = 3,
    /// Pattern syntax error; the message carries the column.
    Syntax = 4,
    /// Pattern refers to an unknown synonym group.
    Unresolved = 5,
    InvalidArgument = 6,
    Io = 7,
    Panic = 8,
}

/// Landis-Koch agreement band.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OlfBand {
    Poor = 0,
    Slight = 1,
    Fair = 2,
    Moderate = 3,
    Substantial = 4,
    NearPerfect = 5,
}

impl From<Band> for OlfBand {
    fn from(b: Band) -> Self {
        match b {
            Band::Poor => OlfBand::Poor,
            Band::Slight => OlfBand::Slight,
            Band::Fair => OlfBand::Fair,
            Band::Moderate => OlfBand::Moderate,
            Band::Substantial => OlfBand::Substantial,
            Band::NearPerfect => OlfBand::NearPerfect,
        }
    }
}

/// A tagged corpus.
pub struct OlfCorpus(Corpus);

/// Synonym groups used to resolve `<name>` references.
pub struct OlfLexicon(Lexicon);

/// A pattern compiled against a lexicon.
pub struct OlfPattern(CompiledPattern);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

type Failure = (OlfStatus, String);

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OlfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OlfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OlfStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((OlfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (OlfStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| (OlfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err((OlfStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(v);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn olf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn olf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn olf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses tagged corpus text (`# doc_id = ...` headers, `FORM LEMMA UPOS DEP`
/// token lines).
///
/// # Safety
/// `name` and `tsv` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn olf_corpus_parse(name: *const c_char, tsv: *const c_char, out: *mut *mut OlfCorpus) -> OlfStatus {
    guard(|| {
        let corpus = parse_tagged(text(name, "name")?, text(tsv, "corpus text")?)
            .map_err(|e| (OlfStatus::Parse, e.to_string()))?;
        put(out, Box::into_raw(Box::new(OlfCorpus(corpus))))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn olf_corpus_load(path: *const c_char, out: *mut *mut OlfCorpus) -> OlfStatus {
    guard(|| {
        let path = text(path, "path")?;
        let corpus = olfactory::corpus::load_tagged(path).map_err(|e| match e {
            olfactory::corpus::CorpusError::Io { .. } => (OlfStatus::Io, e.to_string()),
            other => (OlfStatus::Parse, format!("{path}: {other}")),
        })?;
        put(out, Box::into_raw(Box::new(OlfCorpus(corpus))))
    })
}

/// # Safety
/// `corpus` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn olf_corpus_sentence_count(corpus: *const OlfCorpus, out: *mut usize) -> OlfStatus {
    guard(|| put(out, handle(corpus, "corpus")?.0.sentence_count()))
}

/// # Safety
/// `corpus` must come from this library; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn olf_corpus_free(corpus: *mut OlfCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// The bundled `smell_noun`, `smell_verb` and `smell_adj` groups.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn olf_lexicon_default(out: *mut *mut OlfLexicon) -> OlfStatus {
    guard(|| put(out, Box::into_raw(Box::new(OlfLexicon(Lexicon::with_default_groups())))))
}

/// Parses a lexicon file.
///
/// # Safety
/// `tsv` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn olf_lexicon_parse(tsv: *const c_char, out: *mut *mut OlfLexicon) -> OlfStatus {
    guard(|| {
        let lex = Lexicon::from_tsv(text(tsv, "lexicon text")?).map_err(|e| (OlfStatus::Parse, e.to_string()))?;
        put(out, Box::into_raw(Box::new(OlfLexicon(lex))))
    })
}

/// # Safety
/// `lexicon` must come from this library; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn olf_lexicon_free(lexicon: *mut OlfLexicon) {
    if !lexicon.is_null() {
        drop(Box::from_raw(lexicon));
    }
}

/// Canonical rendering of a pattern string.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable. Free
/// the result with `olf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn olf_pattern_render(source: *const c_char, out: *mut *mut c_char) -> OlfStatus {
    guard(|| {
        let ast = parse_pattern(text(source, "pattern")?).map_err(|e| (OlfStatus::Syntax, e.to_string()))?;
        put(out, owned_string(ast.render()))
    })
}

/// Parses a pattern and resolves its synonym groups.
///
/// # Safety
/// `id` and `source` must be NUL-terminated strings, `lexicon` a live
/// handle and `out` writable. The pattern does not borrow the lexicon.
#[no_mangle]
pub unsafe extern "C" fn olf_pattern_compile(
    id: *const c_char,
    source: *const c_char,
    lexicon: *const OlfLexicon,
    out: *mut *mut OlfPattern,
) -> OlfStatus {
    guard(|| {
        let id = text(id, "id")?;
        let ast = parse_pattern(text(source, "pattern")?)
            .map_err(|e| (OlfStatus::Syntax, format!("pattern `{id}`: {e}")))?;
        let compiled = CompiledPattern::compile(id, &ast, &handle(lexicon, "lexicon")?.0)
            .map_err(|e| (OlfStatus::Unresolved, e.to_string()))?;
        put(out, Box::into_raw(Box::new(OlfPattern(compiled))))
    })
}

/// # Safety
/// `pattern` must come from this library; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn olf_pattern_free(pattern: *mut OlfPattern) {
    if !pattern.is_null() {
        drop(Box::from_raw(pattern));
    }
}

/// Number of matches of `pattern` over the whole corpus.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn olf_pattern_count_matches(
    pattern: *const OlfPattern,
    corpus: *const OlfCorpus,
    out: *mut usize,
) -> OlfStatus {
    guard(|| {
        let p = &handle(pattern, "pattern")?.0;
        let n = handle(corpus, "corpus")?.0.sentences().map(|s| p.match_sentence(s).len()).sum();
        put(out, n)
    })
}

/// Match dump as TSV, one row per match with its captures.
///
/// # Safety
/// Handles must be live; `out` must be writable. Free the result with
/// `olf_string_free`.
#[no_mangle]
pub unsafe extern "C" fn olf_pattern_match_tsv(
    pattern: *const OlfPattern,
    corpus: *const OlfCorpus,
    out: *mut *mut c_char,
) -> OlfStatus {
    guard(|| {
        let p = &handle(pattern, "pattern")?.0;
        let matches: Vec<_> = handle(corpus, "corpus")?.0.sentences().flat_map(|s| p.match_sentence(s)).collect();
        put(out, owned_string(write_match_dump(&matches)))
    })
}

/// Cohen's kappa of two equal-length label arrays.
///
/// # Safety
/// `a` and `b` must point to `len` readable integers; out pointers must be
/// writable. `out_band` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn olf_kappa(
    a: *const i32,
    b: *const i32,
    len: usize,
    out_kappa: *mut f64,
    out_band: *mut OlfBand,
) -> OlfStatus {
    guard(|| {
        if a.is_null() || b.is_null() {
            return Err((OlfStatus::NullPointer, "label array is null".into()));
        }
        let (a, b) = (std::slice::from_raw_parts(a, len), std::slice::from_raw_parts(b, len));
        let k = cohens_kappa(a, b).map_err(|e| (OlfStatus::InvalidArgument, e.to_string()))?;
        put(out_kappa, k.kappa)?;
        if !out_band.is_null() {
            out_band.write(k.band.into());
        }
        Ok(())
    })
}

/// Landis-Koch band of a kappa value.
#[no_mangle]
pub extern "C" fn olf_kappa_band(kappa: f64) -> OlfBand {
    band(kappa).into()
}

/// Two-sided exact McNemar p-value for discordant counts `b` and `c`.
///
/// # Safety
/// `out_p` must be writable.
#[no_mangle]
pub unsafe extern "C" fn olf_mcnemar_exact(b: u64, c: u64, out_p: *mut f64) -> OlfStatus {
    guard(|| {
        let (b, c) = (usize::try_from(b), usize::try_from(c));
        let (Ok(b), Ok(c)) = (b, c) else {
            return Err((OlfStatus::InvalidArgument, "count does not fit in usize".into()));
        };
        put(out_p, mcnemar_p(b, c))
    })
}

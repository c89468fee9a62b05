//! Tagged TSV corpus format.
//!
//! ```text
//! # doc_id = novel-01
//! An	an	DET	_
//! odd	_	ADJ	amod
//!
//! ```
//!
//! Token lines carry `FORM LEMMA UPOS DEP` separated by tabs, `_` marking an
//! absent lemma or dependency label. A blank line closes a sentence and a
//! `# doc_id = <id>` line opens a new document. Other `#` lines are ignored.

// the format example needs literal tabs
#![allow(clippy::tabs_in_doc_comments)]

use std::fmt::Write as _;
use std::path::Path;

use super::{Corpus, CorpusError, Document, Pos, TaggedSentence, Token};

const DOC_PREFIX: &str = "# doc_id =";

pub fn load_tagged(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_tagged(&name, &text)
}

pub fn parse_tagged(name: &str, text: &str) -> Result<Corpus, CorpusError> {
    let mut documents: Vec<Document> = Vec::new();
    let mut current: Vec<Token> = Vec::new();

    fn close(documents: &mut [Document], tokens: &mut Vec<Token>) {
        if tokens.is_empty() {
            return;
        }
        // a document always exists once tokens have been accepted
        let doc = documents.last_mut().expect("open document");
        let idx = doc.sentences.len();
        doc.sentences.push(TaggedSentence::new(
            doc.doc_id.clone(),
            idx,
            std::mem::take(tokens),
        ));
    }

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            close(&mut documents, &mut current);
            continue;
        }
        if let Some(rest) = line.strip_prefix(DOC_PREFIX) {
            close(&mut documents, &mut current);
            let id = rest.trim();
            if id.is_empty() {
                return Err(CorpusError::Parse {
                    line: line_no,
                    message: "empty doc_id".into(),
                });
            }
            documents.push(Document {
                doc_id: id.to_string(),
                sentences: Vec::new(),
            });
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(CorpusError::Parse {
                line: line_no,
                message: format!("expected 4 tab-separated columns, found {}", cols.len()),
            });
        }
        if documents.is_empty() {
            return Err(CorpusError::Parse {
                line: line_no,
                message: "token line before any `# doc_id = ...` header".into(),
            });
        }
        let form = cols[0];
        if form.is_empty() {
            return Err(CorpusError::Parse {
                line: line_no,
                message: "empty FORM".into(),
            });
        }
        let pos: Pos = cols[2].parse().map_err(|_| CorpusError::UnknownPos {
            line: line_no,
            tag: cols[2].to_string(),
        })?;
        let lemma = (cols[1] != "_" && !cols[1].is_empty()).then_some(cols[1]);
        let mut tok = Token::new(current.len(), form, lemma, pos);
        if cols[3] != "_" && !cols[3].is_empty() {
            tok.dep = Some(cols[3].to_string());
        }
        current.push(tok);
    }
    close(&mut documents, &mut current);
    Corpus::new(name, documents)
}

/// Serializes a corpus so that [`parse_tagged`] reproduces it.
pub fn write_tagged(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        let _ = writeln!(out, "{DOC_PREFIX} {}", doc.doc_id);
        for s in &doc.sentences {
            for t in &s.tokens {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    t.text,
                    t.lemma,
                    t.pos,
                    t.dep.as_deref().unwrap_or("_")
                );
            }
            out.push('\n');
        }
    }
    out
}

//! Sentence-level evaluation against a gold standard.

mod gold;
mod kappa;
mod significance;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gold::{
    annotators_by_doc, gold_positive, load_gold, parse_gold, positives_by_annotator, tag_counts, GoldAnnotation,
    GoldSpan, PositiveClass, Tag,
};
pub use kappa::{band, cohens_kappa, kappa_matrix, Band, Kappa, PairwiseKappa};
pub use significance::{bootstrap_recall_test, mcnemar_exact, mcnemar_p, McNemar, RecallDifference};

use crate::corpus::{keyword_scan, Corpus, KeywordLexicon, SentenceRef};
use crate::lexicon::Lexicon;
use crate::matcher::{compile_all, CompiledPattern, MatchError};
use crate::pattern::PatternRecord;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown tag `{tag}` (expected one of d, o, v, s, a, n)")]
    UnknownTag { line: usize, tag: String },
    #[error("line {line}: span {start}..{end} out of bounds{}", .len.map(|l| format!(" for a sentence of {l} tokens")).unwrap_or_default())]
    SpanOutOfBounds {
        line: usize,
        start: usize,
        end: usize,
        len: Option<usize>,
    },
    #[error("label sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no labels to compare")]
    EmptyInput,
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Sentences matched by any of the patterns.
pub fn predict_sentences(patterns: &[CompiledPattern], corpus: &Corpus) -> BTreeSet<SentenceRef> {
    corpus
        .sentences()
        .filter(|s| patterns.iter().any(|p| p.matches(s)))
        .map(|s| s.reference())
        .collect()
}

pub fn predict_records(
    patterns: &[PatternRecord],
    lexicon: &Lexicon,
    corpus: &Corpus,
) -> Result<BTreeSet<SentenceRef>, MatchError> {
    Ok(predict_sentences(&compile_all(patterns, lexicon)?, corpus))
}

/// Sentences flagged by the keyword scan.
pub fn keyword_baseline(corpus: &Corpus, kw: &KeywordLexicon) -> BTreeSet<SentenceRef> {
    corpus
        .sentences()
        .filter(|s| keyword_scan(s, kw))
        .map(|s| s.reference())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    /// `None` when nothing was predicted.
    pub precision: Option<f64>,
    /// 1 by convention when the gold set is empty.
    pub recall: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// Both sets are restricted to `universe` first.
pub fn precision_recall(
    predicted: &BTreeSet<SentenceRef>,
    gold: &BTreeSet<SentenceRef>,
    universe: &[SentenceRef],
) -> PrecisionRecall {
    let universe: BTreeSet<&SentenceRef> = universe.iter().collect();
    let pred: BTreeSet<&SentenceRef> = predicted.iter().filter(|r| universe.contains(r)).collect();
    let gold: BTreeSet<&SentenceRef> = gold.iter().filter(|r| universe.contains(r)).collect();
    let tp = pred.intersection(&gold).count();
    let fp = pred.len() - tp;
    let fn_ = gold.len() - tp;
    PrecisionRecall {
        precision: (!pred.is_empty()).then(|| tp as f64 / pred.len() as f64),
        recall: if gold.is_empty() {
            1.0
        } else {
            tp as f64 / gold.len() as f64
        },
        tp,
        fp,
        fn_,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub cutoff: f64,
    pub precision: Option<f64>,
    pub recall: f64,
    pub active_patterns: usize,
}

/// Patterns without an estimate count as precision 0.
pub fn is_active(pattern: &PatternRecord, cutoff: f64) -> bool {
    pattern.estimated_precision.unwrap_or(0.0) >= cutoff
}

/// One point per cutoff; the active set at cutoff `c` holds the patterns
/// whose estimated precision is at least `c`.
pub fn pr_curve(
    patterns: &[PatternRecord],
    lexicon: &Lexicon,
    corpus: &Corpus,
    gold: &BTreeSet<SentenceRef>,
    cutoffs: &[f64],
) -> Result<Vec<PrPoint>, MatchError> {
    let compiled = compile_all(patterns, lexicon)?;
    let per_pattern: Vec<BTreeSet<SentenceRef>> = compiled
        .iter()
        .map(|p| predict_sentences(std::slice::from_ref(p), corpus))
        .collect();
    let universe = corpus.universe();
    Ok(cutoffs
        .iter()
        .map(|&cutoff| {
            let mut pred = BTreeSet::new();
            let mut active = 0;
            for (p, set) in patterns.iter().zip(&per_pattern) {
                if is_active(p, cutoff) {
                    active += 1;
                    pred.extend(set.iter().cloned());
                }
            }
            let pr = precision_recall(&pred, gold, &universe);
            PrPoint {
                cutoff,
                precision: pr.precision,
                recall: pr.recall,
                active_patterns: active,
            }
        })
        .collect())
}

/// Cutoffs 0, 0.05, ..., 1.
pub fn default_cutoffs() -> Vec<f64> {
    (0..=20).map(|i| f64::from(i) / 20.0).collect()
}

/// `NA` for undefined values.
pub fn format_fraction(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"))
}

pub fn write_pr_table(points: &[PrPoint]) -> String {
    let mut out = String::from("cutoff\tprecision\trecall\tactive_patterns\n");
    for p in points {
        let _ = writeln!(
            out,
            "{:.2}\t{}\t{}\t{}",
            p.cutoff,
            format_fraction(p.precision),
            format_fraction(Some(p.recall)),
            p.active_patterns
        );
    }
    out
}

pub fn write_kappa_matrix(rows: &[PairwiseKappa]) -> String {
    let mut out = String::from("doc_id\tannotator_a\tannotator_b\tsentences\tkappa\tband\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.4}\t{}",
            r.doc_id, r.annotator_a, r.annotator_b, r.sentences, r.kappa.kappa, r.kappa.band
        );
    }
    out
}

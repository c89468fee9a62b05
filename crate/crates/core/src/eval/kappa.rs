//! Pairwise Cohen's kappa.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::gold::{annotators_by_doc, positives_by_annotator, GoldAnnotation, PositiveClass};
use super::EvalError;
use crate::corpus::{Corpus, SentenceRef};

/// Landis and Koch agreement bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    Poor,
    Slight,
    Fair,
    Moderate,
    Substantial,
    NearPerfect,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::Poor => "poor",
            Band::Slight => "slight",
            Band::Fair => "fair",
            Band::Moderate => "moderate",
            Band::Substantial => "substantial",
            Band::NearPerfect => "near-perfect",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const EPS: f64 = 1e-12;

/// Upper-closed bands: 0.6 is moderate, 0.8 substantial, 0.41 moderate.
pub fn band(kappa: f64) -> Band {
    let within = |hi: f64| kappa <= hi + EPS;
    if kappa <= EPS {
        Band::Poor
    } else if within(0.20) {
        Band::Slight
    } else if within(0.40) {
        Band::Fair
    } else if within(0.60) {
        Band::Moderate
    } else if within(0.80) {
        Band::Substantial
    } else {
        Band::NearPerfect
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kappa {
    pub kappa: f64,
    pub observed: f64,
    pub expected: f64,
    pub band: Band,
}

/// `(p_o - p_e) / (1 - p_e)` over paired labels. When chance agreement is
/// 1 (both raters constant and equal) kappa is 1.
pub fn cohens_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<Kappa, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let n = a.len() as f64;
    let observed = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let mut margins: BTreeMap<&T, (usize, usize)> = BTreeMap::new();
    for x in a {
        margins.entry(x).or_default().0 += 1;
    }
    for y in b {
        margins.entry(y).or_default().1 += 1;
    }
    let expected: f64 = margins
        .values()
        .map(|&(ca, cb)| (ca as f64 / n) * (cb as f64 / n))
        .sum();
    let kappa = if 1.0 - expected < EPS {
        1.0
    } else {
        (observed - expected) / (1.0 - expected)
    };
    Ok(Kappa {
        kappa,
        observed,
        expected,
        band: band(kappa),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseKappa {
    pub doc_id: String,
    pub annotator_a: String,
    pub annotator_b: String,
    pub sentences: usize,
    pub kappa: Kappa,
}

/// Kappa of binary sentence labels for every annotator pair of every
/// document with two or more annotators. All sentences of the document in
/// `corpus` take part, so unmarked sentences count as agreed negatives.
pub fn kappa_matrix(gold: &[GoldAnnotation], corpus: &Corpus, class: PositiveClass) -> Vec<PairwiseKappa> {
    let positives = positives_by_annotator(gold, class);
    let empty = Default::default();
    let mut out = Vec::new();
    for (doc_id, annotators) in annotators_by_doc(gold) {
        let Some(doc) = corpus.documents.iter().find(|d| d.doc_id == doc_id) else {
            continue;
        };
        let refs: Vec<SentenceRef> = doc.sentences.iter().map(|s| s.reference()).collect();
        if refs.is_empty() {
            continue;
        }
        let names: Vec<&String> = annotators.iter().collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                let pa = positives.get(*a).unwrap_or(&empty);
                let pb = positives.get(*b).unwrap_or(&empty);
                let la: Vec<bool> = refs.iter().map(|r| pa.contains(r)).collect();
                let lb: Vec<bool> = refs.iter().map(|r| pb.contains(r)).collect();
                let kappa = cohens_kappa(&la, &lb).expect("non-empty, equal lengths");
                out.push(PairwiseKappa {
                    doc_id: doc_id.clone(),
                    annotator_a: (*a).clone(),
                    annotator_b: (*b).clone(),
                    sentences: refs.len(),
                    kappa,
                });
            }
        }
    }
    out
}

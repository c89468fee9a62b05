//! Gold-standard span annotations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::{Corpus, SentenceRef};

/// The six-tag span schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    /// A smell description.
    #[serde(rename = "d")]
    D,
    /// A smell alluded to without expansion.
    #[serde(rename = "o")]
    O,
    #[serde(rename = "v")]
    V,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "n")]
    N,
}

impl Tag {
    pub const ALL: [Tag; 6] = [Tag::D, Tag::O, Tag::V, Tag::S, Tag::A, Tag::N];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::D => "d",
            Tag::O => "o",
            Tag::V => "v",
            Tag::S => "s",
            Tag::A => "a",
            Tag::N => "n",
        }
    }
}

impl FromStr for Tag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSpan {
    pub start: usize,
    pub end: usize,
    pub tag: Tag,
    pub annotator: String,
}

/// All spans recorded for one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub doc_id: String,
    pub sent_index: usize,
    pub spans: Vec<GoldSpan>,
}

impl GoldAnnotation {
    pub fn reference(&self) -> SentenceRef {
        SentenceRef::new(self.doc_id.clone(), self.sent_index)
    }
}

/// Which sentences count as positive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositiveClass {
    /// A span tagged `d` or `o`.
    #[default]
    SmellExperience,
    /// A span tagged `d`.
    SmellDescription,
}

impl PositiveClass {
    pub fn admits(self, tag: Tag) -> bool {
        match self {
            PositiveClass::SmellExperience => matches!(tag, Tag::D | Tag::O),
            PositiveClass::SmellDescription => tag == Tag::D,
        }
    }
}

impl FromStr for PositiveClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "experience" | "smell_experience" => Ok(PositiveClass::SmellExperience),
            "description" | "smell_description" => Ok(PositiveClass::SmellDescription),
            other => Err(format!("unknown positive class `{other}` (expected experience or description)")),
        }
    }
}

/// Parses gold records `doc_id sent_index start end tag annotator`. With a
/// corpus, spans are checked against sentence bounds; without one, only
/// `start < end` is enforced. A leading `doc_id` header and `#` lines are
/// skipped.
pub fn parse_gold(text: &str, corpus: Option<&Corpus>) -> Result<Vec<GoldAnnotation>, EvalError> {
    let mut by_sentence: BTreeMap<SentenceRef, Vec<GoldSpan>> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || line.starts_with("doc_id\t") {
            continue;
        }
        let err = |message: String| EvalError::Parse {
            line: line_no,
            message,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 {
            return Err(err(format!("expected 6 tab-separated columns, found {}", cols.len())));
        }
        let num = |i: usize| -> Result<usize, EvalError> {
            cols[i]
                .parse()
                .map_err(|_| err(format!("expected a non-negative integer, found `{}`", cols[i])))
        };
        let (sent_index, start, end) = (num(1)?, num(2)?, num(3)?);
        let tag: Tag = cols[4].parse().map_err(|tag| EvalError::UnknownTag { line: line_no, tag })?;
        let r = SentenceRef::new(cols[0], sent_index);
        let len = match corpus {
            Some(c) => Some(
                c.get(&r)
                    .ok_or_else(|| err(format!("no sentence {}#{} in the corpus", r.doc_id, r.sent_index)))?
                    .len(),
            ),
            None => None,
        };
        if start >= end || len.is_some_and(|l| end > l) {
            return Err(EvalError::SpanOutOfBounds {
                line: line_no,
                start,
                end,
                len,
            });
        }
        by_sentence.entry(r).or_default().push(GoldSpan {
            start,
            end,
            tag,
            annotator: cols[5].to_string(),
        });
    }
    Ok(by_sentence
        .into_iter()
        .map(|(r, spans)| GoldAnnotation {
            doc_id: r.doc_id,
            sent_index: r.sent_index,
            spans,
        })
        .collect())
}

pub fn load_gold(path: impl AsRef<Path>, corpus: Option<&Corpus>) -> Result<Vec<GoldAnnotation>, EvalError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| EvalError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_gold(&text, corpus)
}

/// Span counts per tag; every tag is present, possibly with 0.
pub fn tag_counts(gold: &[GoldAnnotation]) -> BTreeMap<Tag, usize> {
    let mut out: BTreeMap<Tag, usize> = Tag::ALL.into_iter().map(|t| (t, 0)).collect();
    for s in gold.iter().flat_map(|g| &g.spans) {
        *out.entry(s.tag).or_default() += 1;
    }
    out
}

/// Annotators that recorded at least one span in each document.
pub fn annotators_by_doc(gold: &[GoldAnnotation]) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for g in gold {
        for s in &g.spans {
            out.entry(g.doc_id.clone()).or_default().insert(s.annotator.clone());
        }
    }
    out
}

/// Positive sentences per annotator.
pub fn positives_by_annotator(gold: &[GoldAnnotation], class: PositiveClass) -> BTreeMap<String, BTreeSet<SentenceRef>> {
    let mut out: BTreeMap<String, BTreeSet<SentenceRef>> = BTreeMap::new();
    for g in gold {
        for s in g.spans.iter().filter(|s| class.admits(s.tag)) {
            out.entry(s.annotator.clone()).or_default().insert(g.reference());
        }
    }
    out
}

/// One label per sentence. A sentence is positive when at least half of the
/// document's annotators marked it positive, so ties count as positive.
pub fn gold_positive(gold: &[GoldAnnotation], class: PositiveClass) -> BTreeSet<SentenceRef> {
    let annotators = annotators_by_doc(gold);
    gold.iter()
        .filter(|g| {
            let voters: BTreeSet<&str> = g
                .spans
                .iter()
                .filter(|s| class.admits(s.tag))
                .map(|s| s.annotator.as_str())
                .collect();
            let total = annotators.get(&g.doc_id).map_or(0, BTreeSet::len);
            !voters.is_empty() && 2 * voters.len() >= total
        })
        .map(GoldAnnotation::reference)
        .collect()
}

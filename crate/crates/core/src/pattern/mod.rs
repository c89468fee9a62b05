//! The pattern language: AST, parser, canonical rendering, and pattern
//! records with their identification/extraction classification.

mod ast;
mod parser;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{Atom, ChunkClass, Element, InvalidAst, PatternAst, Quantifier};
pub use parser::{parse_pattern, SyntaxError, SyntaxErrorKind};

#[derive(Debug, Error, PartialEq)]
pub enum PatternError {
    #[error("pattern `{id}`: {error}")]
    Syntax { id: String, error: SyntaxError },
    #[error("pattern `{id}` is not an extraction pattern for {approach}: {reason}")]
    NotExtractable {
        id: String,
        approach: Approach,
        reason: String,
    },
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
}

/// Which complement pair an extraction pattern targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    AdjNoun,
    VerbNoun,
    None,
}

impl Approach {
    pub fn as_str(self) -> &'static str {
        match self {
            Approach::AdjNoun => "adj_noun",
            Approach::VerbNoun => "verb_noun",
            Approach::None => "none",
        }
    }

    /// Complement classes in the order pairs are stored.
    pub fn complement_classes(self) -> Option<(ChunkClass, ChunkClass)> {
        match self {
            Approach::AdjNoun => Some((ChunkClass::Adj, ChunkClass::Noun)),
            Approach::VerbNoun => Some((ChunkClass::Noun, ChunkClass::Verb)),
            Approach::None => None,
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Approach {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adj_noun" => Ok(Approach::AdjNoun),
            "verb_noun" => Ok(Approach::VerbNoun),
            "none" => Ok(Approach::None),
            other => Err(format!("unknown approach `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Identification,
    Extraction,
}

impl PatternKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::Identification => "identification",
            PatternKind::Extraction => "extraction",
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identification" => Ok(PatternKind::Identification),
            "extraction" => Ok(PatternKind::Extraction),
            other => Err(format!("unknown pattern kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternStatus {
    Hypothesized,
    Validated,
    Rejected,
    Removed,
}

impl PatternStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternStatus::Hypothesized => "hypothesized",
            PatternStatus::Validated => "validated",
            PatternStatus::Rejected => "rejected",
            PatternStatus::Removed => "removed",
        }
    }
}

impl fmt::Display for PatternStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternStatus {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hypothesized" => Ok(PatternStatus::Hypothesized),
            "validated" => Ok(PatternStatus::Validated),
            "rejected" => Ok(PatternStatus::Rejected),
            "removed" => Ok(PatternStatus::Removed),
            other => Err(format!("unknown pattern status `{other}`")),
        }
    }
}

/// Outcome of [`classify_pattern`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "assessment")]
pub enum KindAssessment {
    /// Capture indices holding the approach's first and second complement.
    ExtractionEligible { first: usize, second: usize },
    IdentificationOnly,
}

/// The single complement class (adj, noun or verb chunk) a capture holds,
/// or `None` when it holds none or several.
pub fn capture_classes(ast: &PatternAst) -> Vec<Option<ChunkClass>> {
    fn chunks(els: &[Element], out: &mut Vec<ChunkClass>) {
        for e in els {
            match &e.atom {
                Atom::Chunk(c) if *c != ChunkClass::Pronoun => out.push(*c),
                Atom::Group(inner) | Atom::Capture { elements: inner, .. } => chunks(inner, out),
                _ => {}
            }
        }
    }
    fn walk(els: &[Element], out: &mut Vec<Option<ChunkClass>>) {
        for e in els {
            match &e.atom {
                Atom::Capture { elements, .. } => {
                    let mut found = Vec::new();
                    chunks(elements, &mut found);
                    found.sort();
                    found.dedup();
                    out.push((found.len() == 1).then(|| found[0]));
                }
                Atom::Group(inner) => walk(inner, out),
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    walk(ast.elements(), &mut out);
    out
}

pub fn classify_pattern(ast: &PatternAst, approach: Approach) -> KindAssessment {
    let Some((a, b)) = approach.complement_classes() else {
        return KindAssessment::IdentificationOnly;
    };
    let classes = capture_classes(ast);
    if classes.len() != 2 {
        return KindAssessment::IdentificationOnly;
    }
    let find = |c| classes.iter().position(|x| *x == Some(c));
    match (find(a), find(b)) {
        (Some(first), Some(second)) if first != second => {
            KindAssessment::ExtractionEligible { first, second }
        }
        _ => KindAssessment::IdentificationOnly,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRecord {
    pub id: String,
    pub source: String,
    pub ast: PatternAst,
    pub kind: PatternKind,
    pub approach: Approach,
    pub estimated_precision: Option<f64>,
    pub status: PatternStatus,
}

impl PatternRecord {
    /// Parses `source` and checks that an extraction pattern really carries
    /// the approach's two complement captures.
    pub fn new(
        id: impl Into<String>,
        source: &str,
        kind: PatternKind,
        approach: Approach,
    ) -> Result<Self, PatternError> {
        let id = id.into();
        let ast = parse_pattern(source).map_err(|error| PatternError::Syntax {
            id: id.clone(),
            error,
        })?;
        if kind == PatternKind::Extraction {
            let ok = matches!(
                classify_pattern(&ast, approach),
                KindAssessment::ExtractionEligible { .. }
            );
            if !ok {
                return Err(PatternError::NotExtractable {
                    id,
                    approach,
                    reason: format!(
                        "needs exactly two captures holding the {} complements",
                        approach.as_str()
                    ),
                });
            }
        }
        Ok(PatternRecord {
            id,
            source: source.to_string(),
            ast,
            kind,
            approach,
            estimated_precision: None,
            status: PatternStatus::Hypothesized,
        })
    }

    pub fn with_precision(mut self, p: Option<f64>) -> Self {
        self.estimated_precision = p;
        self
    }

    /// Capture indices of the (first, second) complement when this is an
    /// extraction pattern.
    pub fn complement_captures(&self) -> Option<(usize, usize)> {
        if self.kind != PatternKind::Extraction {
            return None;
        }
        match classify_pattern(&self.ast, self.approach) {
            KindAssessment::ExtractionEligible { first, second } => Some((first, second)),
            KindAssessment::IdentificationOnly => None,
        }
    }
}

/// Reads a pattern file: `id<TAB>kind<TAB>approach<TAB>pattern`, with an
/// optional fifth column holding an estimated precision. `#` starts a
/// comment line.
pub fn parse_pattern_file(text: &str) -> Result<Vec<PatternRecord>, PatternError> {
    let mut out: Vec<PatternRecord> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let file_err = |message: String| PatternError::File {
            line: n + 1,
            message,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if !(4..=5).contains(&cols.len()) {
            return Err(file_err(format!(
                "expected 4 or 5 tab-separated columns, found {}",
                cols.len()
            )));
        }
        let kind: PatternKind = cols[1].parse().map_err(file_err)?;
        let approach: Approach = cols[2].parse().map_err(file_err)?;
        let precision = match cols.get(4).map(|s| s.trim()) {
            None | Some("") | Some("NA") => None,
            Some(p) => {
                let v: f64 = p
                    .parse()
                    .map_err(|_| file_err(format!("bad precision `{p}`")))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(file_err(format!("precision {v} outside [0, 1]")));
                }
                Some(v)
            }
        };
        if out.iter().any(|r| r.id == cols[0]) {
            return Err(file_err(format!("duplicate pattern id `{}`", cols[0])));
        }
        out.push(PatternRecord::new(cols[0], cols[3], kind, approach)?.with_precision(precision));
    }
    Ok(out)
}

pub fn write_pattern_file(records: &[PatternRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}",
            r.id,
            r.kind,
            r.approach,
            r.ast.render()
        ));
        if let Some(p) = r.estimated_precision {
            out.push_str(&format!("\t{p}"));
        }
        out.push('\n');
    }
    out
}

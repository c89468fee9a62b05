//! Tokens, tagged sentences, documents and corpora.
//!
//! Corpora are immutable once loaded. Ingestion goes through the tagged TSV
//! format in [`tsv`]; [`plain`] offers a naive untagged ingester for smoke
//! tests.

mod keywords;
pub mod plain;
mod split;
pub mod tsv;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use keywords::{inflections, keyword_scan, KeywordEntry, KeywordFlag, KeywordLexicon};
pub use split::split_corpus;
pub use tsv::{load_tagged, parse_tagged, write_tagged};

#[derive(Debug, Error, PartialEq)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown POS tag `{tag}`")]
    UnknownPos { line: usize, tag: String },
    #[error("split sizes {h}+{v}+{e} do not sum to {total} documents")]
    SplitMismatch {
        h: usize,
        v: usize,
        e: usize,
        total: usize,
    },
    #[error("duplicate document id `{0}`")]
    DuplicateDoc(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Universal part-of-speech tags. Anything outside this set is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Adj,
    Adv,
    Adp,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl Pos {
    pub const ALL: [Pos; 17] = [
        Pos::Adj,
        Pos::Adv,
        Pos::Adp,
        Pos::Aux,
        Pos::Cconj,
        Pos::Det,
        Pos::Intj,
        Pos::Noun,
        Pos::Num,
        Pos::Part,
        Pos::Pron,
        Pos::Propn,
        Pos::Punct,
        Pos::Sconj,
        Pos::Sym,
        Pos::Verb,
        Pos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Adp => "ADP",
            Pos::Aux => "AUX",
            Pos::Cconj => "CCONJ",
            Pos::Det => "DET",
            Pos::Intj => "INTJ",
            Pos::Noun => "NOUN",
            Pos::Num => "NUM",
            Pos::Part => "PART",
            Pos::Pron => "PRON",
            Pos::Propn => "PROPN",
            Pos::Punct => "PUNCT",
            Pos::Sconj => "SCONJ",
            Pos::Sym => "SYM",
            Pos::Verb => "VERB",
            Pos::X => "X",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownPos(pub String);

impl FromStr for Pos {
    type Err = UnknownPos;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::ALL
            .iter()
            .copied()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| UnknownPos(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub index: usize,
    pub text: String,
    pub lemma: String,
    pub pos: Pos,
    pub dep: Option<String>,
}

impl Token {
    pub fn new(index: usize, text: impl Into<String>, lemma: Option<&str>, pos: Pos) -> Self {
        let text = text.into();
        let lemma = lemma.map_or_else(|| text.to_lowercase(), str::to_string);
        Token {
            index,
            text,
            lemma,
            pos,
            dep: None,
        }
    }

    pub fn with_dep(mut self, dep: impl Into<String>) -> Self {
        self.dep = Some(dep.into());
        self
    }

    pub fn lower(&self) -> String {
        self.text.to_lowercase()
    }
}

/// Identifies a sentence across a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentenceRef {
    pub doc_id: String,
    pub sent_index: usize,
}

impl SentenceRef {
    pub fn new(doc_id: impl Into<String>, sent_index: usize) -> Self {
        SentenceRef {
            doc_id: doc_id.into(),
            sent_index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedSentence {
    pub doc_id: String,
    pub sent_index: usize,
    pub tokens: Vec<Token>,
}

impl TaggedSentence {
    /// Builds a sentence, reassigning dense token indices.
    pub fn new(doc_id: impl Into<String>, sent_index: usize, mut tokens: Vec<Token>) -> Self {
        for (i, t) in tokens.iter_mut().enumerate() {
            t.index = i;
        }
        TaggedSentence {
            doc_id: doc_id.into(),
            sent_index,
            tokens,
        }
    }

    /// Quick constructor from `(text, POS)` pairs with lowercased lemmas.
    pub fn from_pairs(doc_id: &str, sent_index: usize, pairs: &[(&str, Pos)]) -> Self {
        let tokens = pairs
            .iter()
            .enumerate()
            .map(|(i, (w, p))| Token::new(i, *w, None, *p))
            .collect();
        TaggedSentence::new(doc_id, sent_index, tokens)
    }

    pub fn reference(&self) -> SentenceRef {
        SentenceRef::new(self.doc_id.clone(), self.sent_index)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Space-joined surface text of the whole sentence.
    pub fn text(&self) -> String {
        self.span_text(0, self.tokens.len())
    }

    pub fn span_text(&self, start: usize, end: usize) -> String {
        self.tokens[start..end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn has_dependencies(&self) -> bool {
        self.tokens.iter().any(|t| t.dep.is_some())
    }

    /// Lowercased surface forms, used for contiguous-subsequence lookups.
    pub fn lowered(&self) -> Vec<String> {
        self.tokens.iter().map(Token::lower).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub sentences: Vec<TaggedSentence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CorpusRole {
    Harvesting,
    Validation,
    Evaluation,
    #[default]
    Unassigned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub documents: Vec<Document>,
    pub role: CorpusRole,
}

impl Corpus {
    pub fn new(name: impl Into<String>, documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut ids = std::collections::HashSet::new();
        for d in &documents {
            if !ids.insert(d.doc_id.as_str()) {
                return Err(CorpusError::DuplicateDoc(d.doc_id.clone()));
            }
        }
        Ok(Corpus {
            name: name.into(),
            documents,
            role: CorpusRole::Unassigned,
        })
    }

    pub fn with_role(mut self, role: CorpusRole) -> Self {
        self.role = role;
        self
    }

    pub fn sentences(&self) -> impl Iterator<Item = &TaggedSentence> {
        self.documents.iter().flat_map(|d| d.sentences.iter())
    }

    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }

    pub fn get(&self, r: &SentenceRef) -> Option<&TaggedSentence> {
        self.documents
            .iter()
            .find(|d| d.doc_id == r.doc_id)
            .and_then(|d| d.sentences.get(r.sent_index))
    }

    /// Every sentence reference in corpus order.
    pub fn universe(&self) -> Vec<SentenceRef> {
        self.sentences().map(TaggedSentence::reference).collect()
    }
}

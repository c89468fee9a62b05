//! Synonym groups, bootstrapped features and the seen-extract ledger.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, KeywordLexicon, Pos, SentenceRef, TaggedSentence, Token};
use crate::matcher::Capture;
use crate::pattern::{Approach, ChunkClass};

#[derive(Debug, Error, PartialEq)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("synonym group `{0}` has no members")]
    EmptyGroup(String),
    #[error("complement text must be non-empty")]
    EmptyComplement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynonymGroup {
    pub name: String,
    pub members: BTreeSet<(String, Pos)>,
}

impl SynonymGroup {
    pub fn new(name: &str, members: impl IntoIterator<Item = (String, Pos)>) -> Result<Self, LexiconError> {
        let members: BTreeSet<_> = members
            .into_iter()
            .map(|(l, p)| (l.to_lowercase(), p))
            .collect();
        if members.is_empty() {
            return Err(LexiconError::EmptyGroup(name.to_string()));
        }
        Ok(SynonymGroup {
            name: name.to_string(),
            members,
        })
    }

    /// Lemma or lowercased surface form, with the member's POS.
    pub fn matches(&self, tok: &Token) -> bool {
        self.members.contains(&(tok.lemma.clone(), tok.pos))
            || self.members.contains(&(tok.lower(), tok.pos))
    }
}

/// One complement of a feature pair: a lowercased, space-joined token
/// sequence and the chunk class it was captured as.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Complement {
    pub text: String,
    pub class: ChunkClass,
}

impl Complement {
    pub fn new(text: &str, class: ChunkClass) -> Result<Self, LexiconError> {
        let text = text
            .split_whitespace()
            .map(str::to_lowercase)
            .collect::<Vec<_>>()
            .join(" ");
        if text.is_empty() {
            return Err(LexiconError::EmptyComplement);
        }
        Ok(Complement { text, class })
    }

    pub fn words(&self) -> Vec<&str> {
        self.text.split(' ').collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Feature {
    Single { lemma: String, pos: Pos },
    Pair { approach: Approach, a: Complement, b: Complement },
}

impl Feature {
    pub fn single(lemma: &str, pos: Pos) -> Self {
        Feature::Single {
            lemma: lemma.to_lowercase(),
            pos,
        }
    }

    /// Builds an adj/noun or noun/verb pair, taking the complement classes
    /// from the approach.
    pub fn pair(approach: Approach, a: &str, b: &str) -> Result<Self, LexiconError> {
        let (ca, cb) = approach
            .complement_classes()
            .ok_or(LexiconError::EmptyComplement)?;
        Ok(Feature::Pair {
            approach,
            a: Complement::new(a, ca)?,
            b: Complement::new(b, cb)?,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            Feature::Single { lemma, pos } => format!("_{lemma}_{pos}"),
            Feature::Pair { a, b, .. } => format!("{} + {}", a.text, b.text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub form: Feature,
    pub origin_cycle: usize,
    pub origin_pattern: Option<String>,
}

impl LexiconEntry {
    pub fn seed(form: Feature) -> Self {
        LexiconEntry {
            form,
            origin_cycle: 0,
            origin_pattern: None,
        }
    }
}

/// Where an extract came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum ExtractSource {
    Feature(String),
    Pattern(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extract {
    pub doc_id: String,
    pub sent_index: usize,
    pub text: String,
    pub tokens: Vec<String>,
    pub source: ExtractSource,
    pub span: Option<(usize, usize)>,
    pub captures: Vec<Capture>,
    /// True when the sentence had already been surfaced before this request.
    pub seen: bool,
}

impl Extract {
    pub fn from_sentence(s: &TaggedSentence, source: ExtractSource) -> Self {
        Extract {
            doc_id: s.doc_id.clone(),
            sent_index: s.sent_index,
            text: s.text(),
            tokens: s.tokens.iter().map(|t| t.text.clone()).collect(),
            source,
            span: None,
            captures: Vec::new(),
            seen: false,
        }
    }

    pub fn reference(&self) -> SentenceRef {
        SentenceRef::new(self.doc_id.clone(), self.sent_index)
    }
}

/// Every sentence ever returned as an extract.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractLedger {
    seen: BTreeSet<SentenceRef>,
}

impl ExtractLedger {
    pub fn contains(&self, r: &SentenceRef) -> bool {
        self.seen.contains(r)
    }

    /// Returns false when already present.
    pub fn insert(&mut self, r: SentenceRef) -> bool {
        self.seen.insert(r)
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SentenceRef> {
        self.seen.iter()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.seen {
            let _ = writeln!(out, "{}\t{}", r.doc_id, r.sent_index);
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, LexiconError> {
        let mut ledger = ExtractLedger::default();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let parsed = (cols.len() == 2)
                .then(|| cols[1].parse::<usize>().ok())
                .flatten();
            let Some(idx) = parsed else {
                return Err(LexiconError::Parse {
                    line: n + 1,
                    message: "expected `doc_id<TAB>sent_index`".into(),
                });
            };
            ledger.insert(SentenceRef::new(cols[0], idx));
        }
        Ok(ledger)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    groups: BTreeMap<String, SynonymGroup>,
    entries: Vec<LexiconEntry>,
    keys: HashSet<Feature>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    /// `smell_noun`, `smell_verb` and `smell_adj` built from the keyword list.
    pub fn with_default_groups() -> Self {
        let mut lex = Lexicon::new();
        let kw = KeywordLexicon::bundled();
        for (name, pos) in [
            ("smell_noun", Pos::Noun),
            ("smell_verb", Pos::Verb),
            ("smell_adj", Pos::Adj),
        ] {
            let members = kw
                .lemmas_with_pos(pos)
                .into_iter()
                .map(|l| (l.to_string(), pos));
            lex.add_group(SynonymGroup::new(name, members).expect("non-empty keyword class"));
        }
        lex
    }

    /// Inserts or replaces a synonym group.
    pub fn add_group(&mut self, group: SynonymGroup) {
        self.groups.insert(group.name.clone(), group);
    }

    pub fn group(&self, name: &str) -> Option<&SynonymGroup> {
        self.groups.get(name)
    }

    pub fn groups(&self) -> impl Iterator<Item = &SynonymGroup> {
        self.groups.values()
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, f: &Feature) -> bool {
        self.keys.contains(f)
    }

    /// Adds entries whose feature is not already present; returns how many
    /// were new.
    pub fn add_entries(&mut self, entries: impl IntoIterator<Item = LexiconEntry>) -> usize {
        let mut added = 0;
        for e in entries {
            if self.keys.insert(e.form.clone()) {
                self.entries.push(e);
                added += 1;
            }
        }
        added
    }

    fn rebuild_keys(&mut self) {
        self.keys = self.entries.iter().map(|e| e.form.clone()).collect();
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for g in self.groups.values() {
            let members: Vec<String> = g.members.iter().map(|(l, p)| format!("{l}/{p}")).collect();
            let _ = writeln!(out, "G\t{}\t{}", g.name, members.join(","));
        }
        for e in &self.entries {
            match &e.form {
                Feature::Single { lemma, pos } => {
                    let _ = writeln!(out, "S\t{lemma}\t{pos}\t{}", e.origin_cycle);
                }
                Feature::Pair { approach, a, b } => {
                    let _ = writeln!(
                        out,
                        "P\t{approach}\t{}\t{}\t{}\t{}",
                        a.text,
                        b.text,
                        e.origin_cycle,
                        e.origin_pattern.as_deref().unwrap_or("_")
                    );
                }
            }
        }
        out
    }

    /// Reads lexicon lines: `S lemma POS cycle`, `P approach a b cycle
    /// pattern_id`, and `G name lemma/POS,...` synonym groups.
    pub fn from_tsv(text: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| LexiconError::Parse {
                line: n + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            let cycle = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad cycle `{s}`")));
            match (cols[0], cols.len()) {
                ("G", 3) => {
                    let mut members = Vec::new();
                    for m in cols[2].split(',').filter(|m| !m.is_empty()) {
                        let (l, p) = m
                            .rsplit_once('/')
                            .ok_or_else(|| err(format!("bad group member `{m}`")))?;
                        let pos: Pos = p.parse().map_err(|_| err(format!("unknown POS `{p}`")))?;
                        members.push((l.to_string(), pos));
                    }
                    lex.add_group(SynonymGroup::new(cols[1], members)?);
                }
                ("S", 4) => {
                    let pos: Pos = cols[2]
                        .parse()
                        .map_err(|_| err(format!("unknown POS `{}`", cols[2])))?;
                    lex.add_entries([LexiconEntry {
                        form: Feature::single(cols[1], pos),
                        origin_cycle: cycle(cols[3])?,
                        origin_pattern: None,
                    }]);
                }
                ("P", 6) => {
                    let approach: Approach = cols[1].parse().map_err(err)?;
                    let form = Feature::pair(approach, cols[2], cols[3])
                        .map_err(|e| err(e.to_string()))?;
                    lex.add_entries([LexiconEntry {
                        form,
                        origin_cycle: cycle(cols[4])?,
                        origin_pattern: (cols[5] != "_").then(|| cols[5].to_string()),
                    }]);
                }
                _ => return Err(err(format!("unrecognized lexicon line `{line}`"))),
            }
        }
        lex.rebuild_keys();
        Ok(lex)
    }
}

fn contains_seq(hay: &[String], needle: &[&str]) -> bool {
    !needle.is_empty()
        && hay.len() >= needle.len()
        && hay
            .windows(needle.len())
            .any(|w| w.iter().zip(needle).all(|(a, b)| a == b))
}

/// Lookup structure for matching lexicon features against sentences.
struct FeatureIndex<'a> {
    singles: HashMap<&'a str, Vec<(Pos, &'a Feature)>>,
    pairs: Vec<(&'a Feature, Vec<&'a str>, Vec<&'a str>)>,
}

impl<'a> FeatureIndex<'a> {
    fn new(lex: &'a Lexicon) -> Self {
        let mut singles: HashMap<&str, Vec<(Pos, &Feature)>> = HashMap::new();
        let mut pairs = Vec::new();
        // sorted so that the reported source does not depend on insertion order
        let mut forms: Vec<&Feature> = lex.entries.iter().map(|e| &e.form).collect();
        forms.sort();
        for f in forms {
            match f {
                Feature::Single { lemma, pos } => singles.entry(lemma).or_default().push((*pos, f)),
                Feature::Pair { a, b, .. } => pairs.push((f, a.words(), b.words())),
            }
        }
        FeatureIndex { singles, pairs }
    }

    fn first_match(&self, s: &TaggedSentence) -> Option<&'a Feature> {
        let mut best: Option<&Feature> = None;
        let mut consider = |f: &'a Feature| {
            if best.is_none_or(|b| f < b) {
                best = Some(f);
            }
        };
        for t in &s.tokens {
            for key in [t.lower(), t.lemma.clone()] {
                if let Some(list) = self.singles.get(key.as_str()) {
                    for (p, f) in list {
                        if *p == t.pos {
                            consider(f);
                        }
                    }
                }
            }
        }
        if !self.pairs.is_empty() {
            let lowered = s.lowered();
            for (f, a, b) in &self.pairs {
                if contains_seq(&lowered, a) && contains_seq(&lowered, b) {
                    consider(f);
                }
            }
        }
        best
    }
}

/// Sentences containing a single-word feature, or both complements of a pair,
/// that the ledger has not seen. Every returned sentence is recorded in the
/// ledger.
pub fn find_feature_extracts(
    lexicon: &Lexicon,
    corpus: &Corpus,
    ledger: &mut ExtractLedger,
) -> Vec<Extract> {
    let index = FeatureIndex::new(lexicon);
    let mut out = Vec::new();
    for s in corpus.sentences() {
        let r = s.reference();
        if ledger.contains(&r) {
            continue;
        }
        if let Some(f) = index.first_match(s) {
            ledger.insert(r);
            out.push(Extract::from_sentence(s, ExtractSource::Feature(f.describe())));
        }
    }
    out
}

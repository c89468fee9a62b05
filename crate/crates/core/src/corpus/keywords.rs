//! Smell keyword lexicon and keyword scanning.
//!
//! The bundled list (`data/keywords.tsv`) is the Cambridge dictionary
//! "smells and smelling" topic list with its typographic connotation marks
//! mapped to flags. Lookup optionally expands regular English inflections:
//! nouns take plural forms, verbs take `-s`, `-ed` and `-ing` forms, adjectives
//! and adverbs stay as listed.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Pos, TaggedSentence, Token};

const BUNDLED: &str = include_str!("../../data/keywords.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeywordFlag {
    Strength,
    Sentiment,
    Characteristic,
}

impl FromStr for KeywordFlag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strength" => Ok(KeywordFlag::Strength),
            "sentiment" => Ok(KeywordFlag::Sentiment),
            "characteristic" => Ok(KeywordFlag::Characteristic),
            other => Err(format!("unknown keyword flag `{other}`")),
        }
    }
}

impl fmt::Display for KeywordFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeywordFlag::Strength => "strength",
            KeywordFlag::Sentiment => "sentiment",
            KeywordFlag::Characteristic => "characteristic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordEntry {
    pub lemma: String,
    pub pos: BTreeSet<Pos>,
    pub flags: BTreeSet<KeywordFlag>,
}

impl KeywordEntry {
    pub fn new(lemma: &str, pos: &[Pos], flags: &[KeywordFlag]) -> Self {
        KeywordEntry {
            lemma: lemma.to_lowercase(),
            pos: pos.iter().copied().collect(),
            flags: flags.iter().copied().collect(),
        }
    }
}

fn pos_letter(s: &str) -> Option<Pos> {
    match s {
        "N" => Some(Pos::Noun),
        "V" => Some(Pos::Verb),
        "A" => Some(Pos::Adj),
        "ADV" => Some(Pos::Adv),
        _ => None,
    }
}

fn pos_code(p: Pos) -> Option<&'static str> {
    match p {
        Pos::Noun => Some("N"),
        Pos::Verb => Some("V"),
        Pos::Adj => Some("A"),
        Pos::Adv => Some("ADV"),
        _ => None,
    }
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn sibilant_end(w: &str) -> bool {
    ["s", "x", "z", "ch", "sh"].iter().any(|e| w.ends_with(e))
}

fn consonant_y(w: &str) -> bool {
    let c: Vec<char> = w.chars().collect();
    c.len() >= 2 && c[c.len() - 1] == 'y' && !is_vowel(c[c.len() - 2])
}

/// Monosyllabic consonant-vowel-consonant ending (`stop` → `stopp-`).
fn doubles_final(w: &str) -> bool {
    let c: Vec<char> = w.chars().collect();
    if c.len() < 3 {
        return false;
    }
    let (a, b, z) = (c[c.len() - 3], c[c.len() - 2], c[c.len() - 1]);
    let vowel_groups = c
        .iter()
        .enumerate()
        .filter(|(i, ch)| is_vowel(**ch) && (*i == 0 || !is_vowel(c[i - 1])))
        .count();
    vowel_groups == 1 && !is_vowel(a) && is_vowel(b) && !is_vowel(z) && !matches!(z, 'w' | 'x' | 'y')
}

fn plural(w: &str) -> String {
    if sibilant_end(w) {
        format!("{w}es")
    } else if consonant_y(w) {
        format!("{}ies", &w[..w.len() - 1])
    } else {
        format!("{w}s")
    }
}

fn past(w: &str) -> String {
    if w.ends_with('e') {
        format!("{w}d")
    } else if consonant_y(w) {
        format!("{}ied", &w[..w.len() - 1])
    } else if doubles_final(w) {
        format!("{w}{}ed", &w[w.len() - 1..])
    } else {
        format!("{w}ed")
    }
}

fn gerund(w: &str) -> String {
    if w.ends_with('e') && !w.ends_with("ee") && !w.ends_with("ye") && !w.ends_with("oe") {
        format!("{}ing", &w[..w.len() - 1])
    } else if doubles_final(w) {
        format!("{w}{}ing", &w[w.len() - 1..])
    } else {
        format!("{w}ing")
    }
}

/// Accepted surface forms of an entry, each with the POS that licenses it.
pub fn inflections(entry: &KeywordEntry) -> Vec<(String, Pos)> {
    let w = entry.lemma.as_str();
    let mut out = Vec::new();
    for &p in &entry.pos {
        out.push((w.to_string(), p));
        match p {
            Pos::Noun => out.push((plural(w), p)),
            Pos::Verb => {
                out.push((plural(w), p));
                out.push((past(w), p));
                out.push((gerund(w), p));
            }
            _ => {}
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct KeywordLexicon {
    entries: Vec<KeywordEntry>,
    expand_inflections: bool,
    base: HashMap<String, BTreeSet<Pos>>,
    inflected: HashMap<String, BTreeSet<Pos>>,
}

impl Default for KeywordLexicon {
    fn default() -> Self {
        KeywordLexicon::new(true)
    }
}

impl KeywordLexicon {
    pub fn new(expand_inflections: bool) -> Self {
        KeywordLexicon {
            entries: Vec::new(),
            expand_inflections,
            base: HashMap::new(),
            inflected: HashMap::new(),
        }
    }

    /// The bundled keyword list, with inflection expansion enabled.
    pub fn bundled() -> Self {
        KeywordLexicon::parse(BUNDLED).expect("bundled keyword list parses")
    }

    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut lex = KeywordLexicon::new(true);
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| CorpusError::Parse {
                line: n + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 columns, found {}", cols.len())));
            }
            let pos = cols[1]
                .split(',')
                .map(|l| pos_letter(l.trim()).ok_or_else(|| err(format!("unknown POS letter `{l}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let flags = if cols[2] == "_" {
                Vec::new()
            } else {
                cols[2]
                    .split(',')
                    .map(|f| f.trim().parse::<KeywordFlag>().map_err(err))
                    .collect::<Result<Vec<_>, _>>()?
            };
            lex.insert(KeywordEntry::new(cols[0].trim(), &pos, &flags));
        }
        Ok(lex)
    }

    pub fn set_expand_inflections(&mut self, on: bool) {
        self.expand_inflections = on;
    }

    pub fn expands_inflections(&self) -> bool {
        self.expand_inflections
    }

    /// Inverse of [`KeywordLexicon::parse`].
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let pos: Vec<&str> = e.pos.iter().filter_map(|p| pos_code(*p)).collect();
            let flags: Vec<String> = e.flags.iter().map(|f| f.to_string()).collect();
            let flags = if flags.is_empty() { "_".to_string() } else { flags.join(",") };
            out.push_str(&format!("{}\t{}\t{}\n", e.lemma, pos.join(","), flags));
        }
        out
    }

    /// Adds an entry; returns false when the (lemma, POS set) pair exists.
    pub fn insert(&mut self, entry: KeywordEntry) -> bool {
        if self
            .entries
            .iter()
            .any(|e| e.lemma == entry.lemma && e.pos == entry.pos)
        {
            return false;
        }
        for &p in &entry.pos {
            self.base.entry(entry.lemma.clone()).or_default().insert(p);
        }
        for (form, p) in inflections(&entry) {
            self.inflected.entry(form).or_default().insert(p);
        }
        self.entries.push(entry);
        true
    }

    pub fn entries(&self) -> &[KeywordEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, lemma: &str) -> Option<&KeywordEntry> {
        self.entries.iter().find(|e| e.lemma == lemma)
    }

    /// Lemmas listed with the given POS.
    pub fn lemmas_with_pos(&self, pos: Pos) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.pos.contains(&pos))
            .map(|e| e.lemma.as_str())
            .collect()
    }

    fn lookup(&self, form: &str) -> Option<&BTreeSet<Pos>> {
        if self.expand_inflections {
            self.inflected.get(form)
        } else {
            self.base.get(form)
        }
    }

    /// Untagged tokens (`X`) match on form alone.
    pub fn matches_token(&self, tok: &Token) -> bool {
        let ok = |set: &BTreeSet<Pos>| tok.pos == Pos::X || set.contains(&tok.pos);
        self.lookup(&tok.lower()).is_some_and(ok) || self.base.get(&tok.lemma).is_some_and(ok)
    }
}

pub fn keyword_scan(sentence: &TaggedSentence, kw: &KeywordLexicon) -> bool {
    sentence.tokens.iter().any(|t| kw.matches_token(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_list_is_complete() {
        let kw = KeywordLexicon::bundled();
        assert_eq!(kw.len(), 37);
        let smell = kw.get("smell").unwrap();
        assert_eq!(smell.pos, [Pos::Noun, Pos::Verb].into_iter().collect());
        assert!(smell.flags.is_empty());
        let acrid = kw.get("acrid").unwrap();
        assert_eq!(acrid.flags.len(), 3);
        assert_eq!(kw.get("pungently").unwrap().pos, [Pos::Adv].into_iter().collect());
        assert_eq!(
            kw.get("whiff").unwrap().flags,
            [KeywordFlag::Strength].into_iter().collect()
        );
    }

    #[test]
    fn tsv_round_trip() {
        let kw = KeywordLexicon::bundled();
        let again = KeywordLexicon::parse(&kw.to_tsv()).unwrap();
        assert_eq!(again.entries(), kw.entries());
    }

    #[test]
    fn scan_finds_aroma_noun() {
        let kw = KeywordLexicon::bundled();
        let s = TaggedSentence::from_pairs(
            "d",
            0,
            &[("the", Pos::Det), ("aroma", Pos::Noun), ("rose", Pos::Verb)],
        );
        assert!(keyword_scan(&s, &kw));
    }

    #[test]
    fn scan_rejects_plain_sentence() {
        let kw = KeywordLexicon::bundled();
        let s = TaggedSentence::from_pairs(
            "d",
            0,
            &[("He", Pos::Pron), ("walked", Pos::Verb), ("home", Pos::Adv), (".", Pos::Punct)],
        );
        assert!(!keyword_scan(&s, &kw));
    }

    #[test]
    fn inflected_verb_needs_expansion() {
        let mut kw = KeywordLexicon::bundled();
        let s = TaggedSentence::from_pairs("d", 0, &[("It", Pos::Pron), ("smells", Pos::Verb)]);
        assert!(keyword_scan(&s, &kw));
        kw.set_expand_inflections(false);
        assert!(!keyword_scan(&s, &kw));
    }

    #[test]
    fn pos_mismatch_blocks_match() {
        let kw = KeywordLexicon::bundled();
        // `ripe` is listed as an adjective only
        let s = TaggedSentence::from_pairs("d", 0, &[("ripe", Pos::Noun)]);
        assert!(!keyword_scan(&s, &kw));
        let s = TaggedSentence::from_pairs("d", 0, &[("ripe", Pos::X)]);
        assert!(keyword_scan(&s, &kw));
    }

    #[test]
    fn regular_inflection_rules() {
        let forms = |lemma: &str, pos: Pos| -> Vec<String> {
            inflections(&KeywordEntry::new(lemma, &[pos], &[]))
                .into_iter()
                .map(|(f, _)| f)
                .collect()
        };
        assert_eq!(forms("smell", Pos::Verb), ["smell", "smells", "smelled", "smelling"]);
        assert_eq!(forms("savour", Pos::Verb), ["savour", "savours", "savoured", "savouring"]);
        assert_eq!(forms("stop", Pos::Verb), ["stop", "stops", "stopped", "stopping"]);
        assert_eq!(forms("waste", Pos::Verb), ["waste", "wastes", "wasted", "wasting"]);
        assert_eq!(forms("stench", Pos::Noun), ["stench", "stenches"]);
        assert_eq!(forms("musk", Pos::Noun), ["musk", "musks"]);
        assert_eq!(forms("fetid", Pos::Adj), ["fetid"]);
        assert_eq!(forms("dry", Pos::Verb), ["dry", "dries", "dried", "drying"]);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(KeywordLexicon::parse("smell\tQ\t_\n").is_err());
        assert!(KeywordLexicon::parse("smell\tN\tloud\n").is_err());
        assert!(KeywordLexicon::parse("smell\tN\n").is_err());
    }

    proptest::proptest! {
        #[test]
        fn adding_entries_is_monotone(extra in "[a-z]{2,7}", word in "[a-z]{2,7}") {
            let mut kw = KeywordLexicon::bundled();
            let s = TaggedSentence::from_pairs("d", 0, &[(word.as_str(), Pos::Noun), ("stench", Pos::Noun)]);
            let t = TaggedSentence::from_pairs("d", 0, &[(word.as_str(), Pos::Noun)]);
            let before = (keyword_scan(&s, &kw), keyword_scan(&t, &kw));
            kw.insert(KeywordEntry::new(&extra, &[Pos::Noun], &[]));
            let after = (keyword_scan(&s, &kw), keyword_scan(&t, &kw));
            proptest::prop_assert!(!before.0 || after.0);
            proptest::prop_assert!(!before.1 || after.1);
        }
    }
}

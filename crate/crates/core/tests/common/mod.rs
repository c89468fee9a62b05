#![allow(dead_code)]

pub mod eval_fixtures;
pub mod oracle;
pub mod synthetic;

use std::path::PathBuf;

use olfactory::corpus::{parse_tagged, Corpus, Document, Pos, TaggedSentence};
use olfactory::pattern::{parse_pattern_file, PatternRecord};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn reference_phrases() -> Corpus {
    let text = std::fs::read_to_string(fixture("reference_phrases.tsv")).unwrap();
    parse_tagged("reference_phrases", &text).unwrap()
}

pub fn reference_patterns() -> Vec<PatternRecord> {
    parse_pattern_file(&std::fs::read_to_string(fixture("reference_patterns.tsv")).unwrap()).unwrap()
}

pub fn reference_pattern(id: &str) -> PatternRecord {
    reference_patterns().into_iter().find(|p| p.id == id).unwrap()
}

/// Raw (tab-stripped) pattern sources from the fixture file.
pub fn reference_pattern_sources() -> Vec<(String, String)> {
    std::fs::read_to_string(fixture("reference_patterns.tsv"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            (cols[0].to_string(), cols[3].to_string())
        })
        .collect()
}

/// `"the/DET aroma/NOUN"` style sentence.
pub fn tagged(doc: &str, i: usize, text: &str) -> TaggedSentence {
    let pairs: Vec<(&str, Pos)> = text
        .split_whitespace()
        .map(|w| {
            let (form, tag) = w.rsplit_once('/').unwrap();
            (form, tag.parse().unwrap())
        })
        .collect();
    TaggedSentence::from_pairs(doc, i, &pairs)
}

pub fn one_doc(doc: &str, lines: &[&str]) -> Corpus {
    Corpus::new(
        doc,
        vec![Document {
            doc_id: doc.into(),
            sentences: lines.iter().enumerate().map(|(i, l)| tagged(doc, i, l)).collect(),
        }],
    )
    .unwrap()
}

//! Untagged plain-text ingestion for smoke tests.
//!
//! Sentences end at `.`, `!` or `?` followed by whitespace and an uppercase
//! letter. Tokens are runs of alphanumerics (plus inner `-` and `'`) or single
//! punctuation characters, all tagged `X`.

use super::{Corpus, CorpusError, Document, Pos, TaggedSentence, Token};

pub fn split_sentences(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        if matches!(c, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < chars.len() && chars[j].1.is_whitespace() {
                j += 1;
            }
            if j > i + 1 && j < chars.len() && chars[j].1.is_uppercase() {
                let end = off + c.len_utf8();
                let s = text[start..end].trim();
                if !s.is_empty() {
                    out.push(s);
                }
                start = chars[j].0;
                i = j;
                continue;
            }
        }
        i += 1;
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

pub fn tokenize(sentence: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut word = String::new();
    let chars: Vec<char> = sentence.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        let inner_joiner = (c == '-' || c == '\'')
            && !word.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() || inner_joiner {
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            out.push(std::mem::take(&mut word));
        }
        if !c.is_whitespace() {
            out.push(c.to_string());
        }
    }
    if !word.is_empty() {
        out.push(word);
    }
    out
}

/// Ingests one plain-text document as an untagged corpus.
pub fn ingest_plain(name: &str, doc_id: &str, text: &str) -> Result<Corpus, CorpusError> {
    let sentences = split_sentences(text)
        .into_iter()
        .map(tokenize)
        .filter(|toks| !toks.is_empty())
        .enumerate()
        .map(|(i, toks)| {
            let tokens = toks
                .into_iter()
                .enumerate()
                .map(|(j, w)| Token::new(j, w, None, Pos::X))
                .collect();
            TaggedSentence::new(doc_id, i, tokens)
        })
        .collect();
    Corpus::new(
        name,
        vec![Document {
            doc_id: doc_id.to_string(),
            sentences,
        }],
    )
}

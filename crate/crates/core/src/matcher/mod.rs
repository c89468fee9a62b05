//! Pattern execution over tagged sentences.
//!
//! Matching is greedy with backtracking: every choice point (chunk length,
//! one more repetition of a `*` element) tries the longest alternative first
//! and falls back only when the rest of the pattern fails. Scanning takes the
//! first match at the leftmost start position and resumes after its end, so
//! matches of one pattern never overlap within a sentence.

mod chunk;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use chunk::chunk_lengths;

use crate::corpus::{Corpus, Pos, TaggedSentence, Token};
use crate::lexicon::{Lexicon, SynonymGroup};
use crate::pattern::{Atom, ChunkClass, Element, PatternAst, PatternRecord};

#[derive(Debug, Error, PartialEq)]
pub enum MatchError {
    #[error("pattern `{pattern}` references unknown synonym group <{group}>")]
    UnresolvedGroup { pattern: String, group: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capture {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub pattern_id: String,
    pub doc_id: String,
    pub sent_index: usize,
    pub start: usize,
    pub end: usize,
    pub captures: Vec<Capture>,
}

impl Match {
    pub fn capture(&self, index: usize) -> Option<&Capture> {
        self.captures.iter().find(|c| c.index == index)
    }
}

#[derive(Debug, Clone)]
enum TokenTest {
    Literal(Vec<String>),
    Syn(SynonymGroup),
    Pos(Pos),
    Dep(String),
}

#[derive(Debug, Clone)]
enum Node {
    Tok(TokenTest),
    Chunk(ChunkClass),
    Cap { index: usize, body: Vec<Node> },
    /// Zero or more repetitions of `body`; `capture` spans all repetitions.
    Star { body: Vec<Node>, capture: Option<usize> },
}

/// A pattern with its synonym groups resolved against a lexicon.
#[derive(Debug, Clone)]
pub struct CompiledPattern {
    id: String,
    nodes: Vec<Node>,
    captures: usize,
}

impl CompiledPattern {
    pub fn compile(id: &str, ast: &PatternAst, lexicon: &Lexicon) -> Result<Self, MatchError> {
        fn lower(id: &str, els: &[Element], lex: &Lexicon) -> Result<Vec<Node>, MatchError> {
            els.iter().map(|e| lower_one(id, e, lex)).collect()
        }
        fn lower_atom(id: &str, atom: &Atom, lex: &Lexicon) -> Result<Node, MatchError> {
            Ok(match atom {
                Atom::Literal(w) => Node::Tok(TokenTest::Literal(w.clone())),
                Atom::Chunk(c) => Node::Chunk(*c),
                Atom::Syn(name) => Node::Tok(TokenTest::Syn(
                    lex.group(name)
                        .cloned()
                        .ok_or_else(|| MatchError::UnresolvedGroup {
                            pattern: id.to_string(),
                            group: name.clone(),
                        })?,
                )),
                Atom::Pos(p) => Node::Tok(TokenTest::Pos(*p)),
                Atom::Dep(l) => Node::Tok(TokenTest::Dep(l.clone())),
                Atom::Capture { index, elements } => Node::Cap {
                    index: *index,
                    body: lower(id, elements, lex)?,
                },
                Atom::Group(inner) => Node::Star {
                    body: lower(id, inner, lex)?,
                    capture: None,
                },
            })
        }
        fn lower_one(id: &str, e: &Element, lex: &Lexicon) -> Result<Node, MatchError> {
            if !e.is_star() {
                return lower_atom(id, &e.atom, lex);
            }
            Ok(match &e.atom {
                Atom::Group(inner) => Node::Star {
                    body: lower(id, inner, lex)?,
                    capture: None,
                },
                Atom::Capture { index, elements } => Node::Star {
                    body: lower(id, elements, lex)?,
                    capture: Some(*index),
                },
                other => Node::Star {
                    body: vec![lower_atom(id, other, lex)?],
                    capture: None,
                },
            })
        }
        Ok(CompiledPattern {
            id: id.to_string(),
            nodes: lower(id, ast.elements(), lexicon)?,
            captures: ast.capture_count(),
        })
    }

    pub fn from_record(record: &PatternRecord, lexicon: &Lexicon) -> Result<Self, MatchError> {
        CompiledPattern::compile(&record.id, &record.ast, lexicon)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn match_sentence(&self, sentence: &TaggedSentence) -> Vec<Match> {
        let ctx = Ctx {
            tokens: &sentence.tokens,
            parsed: sentence.has_dependencies(),
        };
        let n = sentence.tokens.len();
        let mut out = Vec::new();
        let mut start = 0;
        while start < n {
            let mut caps: Caps = vec![None; self.captures];
            let mut found: Option<(usize, Caps)> = None;
            ctx.seq(&self.nodes, start, &mut caps, &mut |end, c| {
                if end > start {
                    found = Some((end, c.clone()));
                    true
                } else {
                    false
                }
            });
            match found {
                Some((end, caps)) => {
                    let captures = caps
                        .iter()
                        .enumerate()
                        .filter_map(|(index, span)| {
                            span.map(|(s, e)| Capture {
                                index,
                                start: s,
                                end: e,
                                text: sentence.span_text(s, e),
                            })
                        })
                        .collect();
                    out.push(Match {
                        pattern_id: self.id.clone(),
                        doc_id: sentence.doc_id.clone(),
                        sent_index: sentence.sent_index,
                        start,
                        end,
                        captures,
                    });
                    start = end;
                }
                None => start += 1,
            }
        }
        out
    }

    pub fn matches(&self, sentence: &TaggedSentence) -> bool {
        !self.match_sentence(sentence).is_empty()
    }
}

type Caps = Vec<Option<(usize, usize)>>;
type Cont<'k> = dyn FnMut(usize, &mut Caps) -> bool + 'k;

struct Ctx<'a> {
    tokens: &'a [Token],
    parsed: bool,
}

impl Ctx<'_> {
    fn test(&self, t: &TokenTest, at: usize) -> bool {
        let tok = &self.tokens[at];
        match t {
            TokenTest::Literal(words) => {
                let low = tok.lower();
                words.contains(&low)
            }
            TokenTest::Syn(g) => g.matches(tok),
            TokenTest::Pos(p) => tok.pos == *p,
            TokenTest::Dep(label) if self.parsed => tok.dep.as_deref() == Some(label.as_str()),
            // unparsed input: a compound modifier is a noun directly before a noun
            TokenTest::Dep(label) => {
                label == "compound"
                    && matches!(tok.pos, Pos::Noun | Pos::Propn)
                    && self.tokens.get(at + 1).is_some_and(|n| n.pos == Pos::Noun)
            }
        }
    }

    fn seq(&self, nodes: &[Node], pos: usize, caps: &mut Caps, k: &mut Cont<'_>) -> bool {
        let Some((node, rest)) = nodes.split_first() else {
            return k(pos, caps);
        };
        match node {
            Node::Tok(t) => pos < self.tokens.len() && self.test(t, pos) && self.seq(rest, pos + 1, caps, k),
            Node::Chunk(c) => chunk_lengths(*c, self.tokens, pos)
                .into_iter()
                .any(|len| self.seq(rest, pos + len, caps, k)),
            Node::Cap { index, body } => {
                let index = *index;
                self.seq(body, pos, caps, &mut |p, c| {
                    let old = c[index].replace((pos, p));
                    if self.seq(rest, p, c, &mut *k) {
                        return true;
                    }
                    c[index] = old;
                    false
                })
            }
            Node::Star { body, capture } => self.star(body, *capture, pos, pos, rest, caps, k),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn star(
        &self,
        body: &[Node],
        capture: Option<usize>,
        start: usize,
        pos: usize,
        rest: &[Node],
        caps: &mut Caps,
        k: &mut Cont<'_>,
    ) -> bool {
        let more = self.seq(body, pos, caps, &mut |p, c| {
            p > pos && self.star(body, capture, start, p, rest, c, &mut *k)
        });
        if more {
            return true;
        }
        match capture {
            Some(index) => {
                let span = (pos > start).then_some((start, pos));
                let old = std::mem::replace(&mut caps[index], span);
                if self.seq(rest, pos, caps, k) {
                    return true;
                }
                caps[index] = old;
                false
            }
            None => self.seq(rest, pos, caps, k),
        }
    }
}

/// Applies a pattern to a sentence after binding it to the lexicon.
pub fn match_sentence(
    record: &PatternRecord,
    lexicon: &Lexicon,
    sentence: &TaggedSentence,
) -> Result<Vec<Match>, MatchError> {
    Ok(CompiledPattern::from_record(record, lexicon)?.match_sentence(sentence))
}

pub fn compile_all(patterns: &[PatternRecord], lexicon: &Lexicon) -> Result<Vec<CompiledPattern>, MatchError> {
    patterns
        .iter()
        .map(|p| CompiledPattern::from_record(p, lexicon))
        .collect()
}

/// Every match of every pattern over the corpus, ordered by
/// (doc_id, sent_index, pattern_id, span).
pub fn match_corpus(
    patterns: &[PatternRecord],
    lexicon: &Lexicon,
    corpus: &Corpus,
) -> Result<Vec<Match>, MatchError> {
    let compiled = compile_all(patterns, lexicon)?;
    Ok(match_compiled(&compiled, corpus))
}

pub fn match_compiled(compiled: &[CompiledPattern], corpus: &Corpus) -> Vec<Match> {
    let mut out: Vec<Match> = corpus
        .sentences()
        .flat_map(|s| compiled.iter().flat_map(move |p| p.match_sentence(s)))
        .collect();
    out.sort_by(|a, b| {
        (&a.doc_id, a.sent_index, &a.pattern_id, a.start, a.end)
            .cmp(&(&b.doc_id, b.sent_index, &b.pattern_id, b.start, b.end))
    });
    out
}

/// `pattern_id doc_id sent_index start end capture0 capture1`, empty fields
/// for absent captures.
pub fn write_match_dump(matches: &[Match]) -> String {
    let mut out = String::new();
    for m in matches {
        let cap = |i| m.capture(i).map(|c| c.text.as_str()).unwrap_or("");
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            m.pattern_id,
            m.doc_id,
            m.sent_index,
            m.start,
            m.end,
            cap(0),
            cap(1)
        );
    }
    out
}

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Pos;

/// Built-in chunk classes available as `<adj>`, `<noun>`, `<verb>` and
/// `<pronoun>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChunkClass {
    Adj,
    Noun,
    Verb,
    Pronoun,
}

impl ChunkClass {
    pub fn from_ident(s: &str) -> Option<Self> {
        match s {
            "adj" => Some(ChunkClass::Adj),
            "noun" => Some(ChunkClass::Noun),
            "verb" => Some(ChunkClass::Verb),
            "pronoun" => Some(ChunkClass::Pronoun),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChunkClass::Adj => "adj",
            ChunkClass::Noun => "noun",
            ChunkClass::Verb => "verb",
            ChunkClass::Pronoun => "pronoun",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    One,
    ZeroOrMore,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Atom {
    /// `_w1|w2_`, compared with the lowercased surface form.
    Literal(Vec<String>),
    Chunk(ChunkClass),
    /// `<name>` naming a synonym group, resolved at compile time.
    Syn(String),
    /// `__TAG`
    Pos(Pos),
    /// `label__`
    Dep(String),
    Capture { index: usize, elements: Vec<Element> },
    Group(Vec<Element>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Element {
    pub atom: Atom,
    pub quantifier: Quantifier,
}

impl Element {
    pub fn one(atom: Atom) -> Self {
        Element {
            atom,
            quantifier: Quantifier::One,
        }
    }

    pub fn star(atom: Atom) -> Self {
        Element {
            atom,
            quantifier: Quantifier::ZeroOrMore,
        }
    }

    pub fn is_star(&self) -> bool {
        self.quantifier == Quantifier::ZeroOrMore
    }
}

/// A parsed pattern. Always holds at least one element, capture indices run
/// densely from 0 in source order, and captures never nest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternAst {
    elements: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidAst(pub &'static str);

impl fmt::Display for InvalidAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl std::error::Error for InvalidAst {}

impl PatternAst {
    /// Validates and normalizes a hand-built element list. Quantifier-one
    /// groups are spliced into their parent.
    pub fn new(elements: Vec<Element>) -> Result<Self, InvalidAst> {
        let elements = normalize(elements);
        if elements.is_empty() {
            return Err(InvalidAst("pattern has no elements"));
        }
        let mut next = 0;
        check(&elements, false, &mut next)?;
        Ok(PatternAst { elements })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn capture_count(&self) -> usize {
        fn count(els: &[Element]) -> usize {
            els.iter()
                .map(|e| match &e.atom {
                    Atom::Capture { elements, .. } => 1 + count(elements),
                    Atom::Group(inner) => count(inner),
                    _ => 0,
                })
                .sum()
        }
        count(&self.elements)
    }

    /// Names of every synonym group referenced.
    pub fn synonym_refs(&self) -> Vec<&str> {
        fn walk<'a>(els: &'a [Element], out: &mut Vec<&'a str>) {
            for e in els {
                match &e.atom {
                    Atom::Syn(n) => out.push(n),
                    Atom::Capture { elements, .. } | Atom::Group(elements) => walk(elements, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.elements, &mut out);
        out
    }

    /// Canonical DSL string.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn normalize(elements: Vec<Element>) -> Vec<Element> {
    let mut out = Vec::with_capacity(elements.len());
    for e in elements {
        match e.atom {
            Atom::Group(inner) if e.quantifier == Quantifier::One => out.extend(normalize(inner)),
            Atom::Group(inner) => out.push(Element {
                atom: Atom::Group(normalize(inner)),
                quantifier: e.quantifier,
            }),
            Atom::Capture { index, elements } => out.push(Element {
                atom: Atom::Capture {
                    index,
                    elements: normalize(elements),
                },
                quantifier: e.quantifier,
            }),
            atom => out.push(Element {
                atom,
                quantifier: e.quantifier,
            }),
        }
    }
    out
}

fn check(els: &[Element], in_capture: bool, next: &mut usize) -> Result<(), InvalidAst> {
    for e in els {
        match &e.atom {
            Atom::Literal(words) => {
                if words.is_empty() || words.iter().any(|w| w.is_empty()) {
                    return Err(InvalidAst("empty literal"));
                }
            }
            Atom::Capture { index, elements } => {
                if in_capture {
                    return Err(InvalidAst("nested capture"));
                }
                if *index != *next {
                    return Err(InvalidAst("capture indices must be dense and ordered"));
                }
                *next += 1;
                if elements.is_empty() {
                    return Err(InvalidAst("empty capture"));
                }
                check(elements, true, next)?;
            }
            Atom::Group(inner) => {
                if inner.is_empty() {
                    return Err(InvalidAst("empty group"));
                }
                check(inner, in_capture, next)?;
            }
            _ => {}
        }
    }
    Ok(())
}

fn write_seq(f: &mut fmt::Formatter<'_>, els: &[Element]) -> fmt::Result {
    for (i, e) in els.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.atom {
            Atom::Literal(words) => write!(f, "_{}_", words.join("|"))?,
            Atom::Chunk(c) => write!(f, "<{}>", c.as_str())?,
            Atom::Syn(n) => write!(f, "<{n}>")?,
            Atom::Pos(p) => write!(f, "__{p}")?,
            Atom::Dep(l) => write!(f, "{l}__")?,
            Atom::Capture { elements, .. } => {
                f.write_str("[")?;
                write_seq(f, elements)?;
                f.write_str("]")?;
            }
            Atom::Group(inner) => {
                f.write_str("{")?;
                write_seq(f, inner)?;
                f.write_str("}")?;
            }
        }
        if self.is_star() {
            f.write_str("*")?;
        }
        Ok(())
    }
}

impl fmt::Display for PatternAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_seq(f, &self.elements)
    }
}

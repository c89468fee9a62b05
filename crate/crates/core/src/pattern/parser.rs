//! Recursive-descent parser for the pattern language.
//!
//! ```text
//! pattern := element+
//! element := atom '*'?
//! atom    := '[' element+ ']'        capture
//!          | '{' element+ '}'        group
//!          | '_' word ('|' word)* '_' literal
//!          | '<' ident '>'           chunk class or synonym group
//!          | '__' TAG                POS wildcard
//!          | ident '__'              dependency wildcard (`prep__` = `__ADP`)
//! ```

use std::fmt;

use thiserror::Error;

use super::ast::{Atom, ChunkClass, Element, PatternAst, Quantifier};
use crate::corpus::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    UnbalancedBracket,
    UnbalancedBrace,
    EmptyLiteral,
    UnterminatedLiteral,
    UnknownPosTag(String),
    NestedCapture,
    EmptyPattern,
    EmptyGroup,
    UnexpectedChar(char),
    BareWord(String),
    DanglingQuantifier,
}

impl fmt::Display for SyntaxErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntaxErrorKind::UnbalancedBracket => f.write_str("unbalanced `[`/`]`"),
            SyntaxErrorKind::UnbalancedBrace => f.write_str("unbalanced `{`/`}`"),
            SyntaxErrorKind::EmptyLiteral => f.write_str("empty literal"),
            SyntaxErrorKind::UnterminatedLiteral => f.write_str("unterminated literal"),
            SyntaxErrorKind::UnknownPosTag(t) => write!(f, "unknown POS tag `{t}`"),
            SyntaxErrorKind::NestedCapture => f.write_str("captures cannot nest"),
            SyntaxErrorKind::EmptyPattern => f.write_str("empty pattern"),
            SyntaxErrorKind::EmptyGroup => f.write_str("empty group or capture"),
            SyntaxErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            SyntaxErrorKind::BareWord(w) => {
                write!(f, "bare word `{w}` (literals are written `_{w}_`)")
            }
            SyntaxErrorKind::DanglingQuantifier => f.write_str("`*` does not follow an element"),
        }
    }
}

/// A parse failure anchored at a 1-based character column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {kind}")]
pub struct SyntaxError {
    pub column: usize,
    pub kind: SyntaxErrorKind,
}

pub fn parse_pattern(source: &str) -> Result<PatternAst, SyntaxError> {
    let mut p = Parser {
        chars: source.chars().collect(),
        pos: 0,
        captures: 0,
        in_capture: false,
    };
    let elements = p.sequence(None)?;
    if elements.is_empty() {
        return Err(p.err_at(0, SyntaxErrorKind::EmptyPattern));
    }
    Ok(PatternAst::new(elements).expect("parser only builds valid trees"))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    captures: usize,
    in_capture: bool,
}

impl Parser {
    fn err_at(&self, pos: usize, kind: SyntaxErrorKind) -> SyntaxError {
        SyntaxError {
            column: pos + 1,
            kind,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, off: usize) -> Option<char> {
        self.chars.get(self.pos + off).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    /// Parses elements until `close` (or end of input when `None`).
    fn sequence(&mut self, close: Option<(char, usize)>) -> Result<Vec<Element>, SyntaxError> {
        let mut out: Vec<Element> = Vec::new();
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else {
                return match close {
                    Some((']', open)) => Err(self.err_at(open, SyntaxErrorKind::UnbalancedBracket)),
                    Some((_, open)) => Err(self.err_at(open, SyntaxErrorKind::UnbalancedBrace)),
                    None => Ok(out),
                };
            };
            match c {
                ']' | '}' => {
                    let expected = close.map(|(ch, _)| ch);
                    if expected == Some(c) {
                        self.pos += 1;
                        return Ok(out);
                    }
                    let kind = match (expected, c) {
                        (Some('}'), _) | (None, '}') => SyntaxErrorKind::UnbalancedBrace,
                        _ => SyntaxErrorKind::UnbalancedBracket,
                    };
                    return Err(self.err_at(self.pos, kind));
                }
                '*' => {
                    let Some(last) = out.last_mut() else {
                        return Err(self.err_at(self.pos, SyntaxErrorKind::DanglingQuantifier));
                    };
                    if last.quantifier == Quantifier::ZeroOrMore {
                        return Err(self.err_at(self.pos, SyntaxErrorKind::DanglingQuantifier));
                    }
                    last.quantifier = Quantifier::ZeroOrMore;
                    self.pos += 1;
                }
                _ => {
                    let atom = self.atom()?;
                    out.push(Element::one(atom));
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Atom, SyntaxError> {
        let start = self.pos;
        match self.peek().expect("caller checked") {
            '[' => {
                if self.in_capture {
                    return Err(self.err_at(start, SyntaxErrorKind::NestedCapture));
                }
                self.pos += 1;
                let index = self.captures;
                self.captures += 1;
                self.in_capture = true;
                let elements = self.sequence(Some((']', start)))?;
                self.in_capture = false;
                if elements.is_empty() {
                    return Err(self.err_at(start, SyntaxErrorKind::EmptyGroup));
                }
                Ok(Atom::Capture { index, elements })
            }
            '{' => {
                self.pos += 1;
                let elements = self.sequence(Some(('}', start)))?;
                if elements.is_empty() {
                    return Err(self.err_at(start, SyntaxErrorKind::EmptyGroup));
                }
                Ok(Atom::Group(elements))
            }
            '<' => {
                self.pos += 1;
                let ident = self.ident();
                if ident.is_empty() || self.peek() != Some('>') {
                    let at = self.pos;
                    return Err(self.err_at(
                        at,
                        SyntaxErrorKind::UnexpectedChar(self.peek().unwrap_or('<')),
                    ));
                }
                self.pos += 1;
                Ok(match ChunkClass::from_ident(&ident) {
                    Some(c) => Atom::Chunk(c),
                    None => Atom::Syn(ident),
                })
            }
            '_' if self.peek_at(1) == Some('_') => {
                self.pos += 2;
                let tag_start = self.pos;
                let tag = self.ident();
                if tag.is_empty() {
                    return Err(self.err_at(start, SyntaxErrorKind::EmptyLiteral));
                }
                tag.parse::<Pos>()
                    .map(Atom::Pos)
                    .map_err(|_| self.err_at(tag_start, SyntaxErrorKind::UnknownPosTag(tag)))
            }
            '_' => {
                self.pos += 1;
                let mut words = vec![String::new()];
                loop {
                    match self.peek() {
                        None => return Err(self.err_at(start, SyntaxErrorKind::UnterminatedLiteral)),
                        Some('_') => {
                            self.pos += 1;
                            break;
                        }
                        Some('|') => {
                            self.pos += 1;
                            words.push(String::new());
                        }
                        Some(c) if c.is_whitespace() => {
                            return Err(self.err_at(start, SyntaxErrorKind::UnterminatedLiteral))
                        }
                        Some(c) => {
                            self.pos += 1;
                            words.last_mut().expect("non-empty").extend(c.to_lowercase());
                        }
                    }
                }
                if words.iter().any(String::is_empty) {
                    return Err(self.err_at(start, SyntaxErrorKind::EmptyLiteral));
                }
                Ok(Atom::Literal(words))
            }
            c if c.is_alphabetic() => {
                let ident = self.ident();
                if self.peek() == Some('_') && self.peek_at(1) == Some('_') {
                    self.pos += 2;
                    if ident == "prep" {
                        Ok(Atom::Pos(Pos::Adp))
                    } else {
                        Ok(Atom::Dep(ident))
                    }
                } else {
                    Err(self.err_at(start, SyntaxErrorKind::BareWord(ident)))
                }
            }
            c => Err(self.err_at(start, SyntaxErrorKind::UnexpectedChar(c))),
        }
    }

    /// Identifier characters: letters, digits, `:` and single `_` not
    /// starting a `__` terminator.
    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            let single_underscore = c == '_'
                && self.peek_at(1) != Some('_')
                && self.peek_at(1).is_some_and(char::is_alphanumeric)
                && !s.is_empty();
            if c.is_alphanumeric() || c == ':' || single_underscore {
                s.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        s
    }
}

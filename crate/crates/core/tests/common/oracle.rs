//! Brute-force reference matcher.
//!
//! Enumerates every way a pattern can consume a sentence, records the
//! choices each way makes (repeat or stop at a `*`, length of a chunk), and
//! picks the way whose choice sequence is lexicographically greatest. Chunk
//! membership is decided with regular expressions over one letter per tag,
//! independently of the crate's chunker.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use regex::Regex;

use olfactory::corpus::{Pos, TaggedSentence, Token};
use olfactory::lexicon::{Lexicon, SynonymGroup};
use olfactory::pattern::{Atom, ChunkClass, Element, PatternAst, Quantifier};

const REP: i64 = i64::MAX;
const STOP: i64 = i64::MIN;

type Caps = BTreeMap<usize, Option<(usize, usize)>>;

#[derive(Clone, Debug)]
struct Way {
    end: usize,
    choices: Vec<i64>,
    caps: Caps,
}

/// (start, end, [(capture index, start, end)])
pub type Found = (usize, usize, Vec<(usize, usize, usize)>);

fn letter(p: Pos) -> char {
    match p {
        Pos::Det => 'D',
        Pos::Adj => 'A',
        Pos::Noun => 'N',
        Pos::Propn => 'P',
        Pos::Cconj => 'C',
        Pos::Adv => 'R',
        Pos::Verb => 'V',
        Pos::Aux => 'X',
        Pos::Adp => 'I',
        Pos::Part => 'T',
        Pos::Pron => 'O',
        _ => 'Z',
    }
}

pub struct Oracle<'a> {
    tokens: &'a [Token],
    letters: String,
    groups: &'a Lexicon,
    chunk_res: [(ChunkClass, Regex); 4],
}

impl<'a> Oracle<'a> {
    pub fn new(sentence: &'a TaggedSentence, groups: &'a Lexicon) -> Self {
        Oracle {
            tokens: &sentence.tokens,
            letters: sentence.tokens.iter().map(|t| letter(t.pos)).collect(),
            groups,
            chunk_res: [
                (ChunkClass::Adj, Regex::new("^R*A$").unwrap()),
                (ChunkClass::Noun, Regex::new("^D?[ANP]*[NP](C[ANP]+)*$").unwrap()),
                (ChunkClass::Verb, Regex::new("^R*[VX]R*[IT]?$").unwrap()),
                (ChunkClass::Pronoun, Regex::new("^O$").unwrap()),
            ],
        }
    }

    fn chunk_lengths(&self, class: ChunkClass, at: usize) -> Vec<usize> {
        let re = &self.chunk_res.iter().find(|(c, _)| *c == class).unwrap().1;
        (1..=self.tokens.len().saturating_sub(at))
            .filter(|&l| re.is_match(&self.letters[at..at + l]))
            .collect()
    }

    fn token_ok(&self, atom: &Atom, at: usize) -> bool {
        let Some(t) = self.tokens.get(at) else {
            return false;
        };
        let low = t.text.to_lowercase();
        match atom {
            Atom::Literal(ws) => ws.contains(&low),
            Atom::Syn(name) => {
                let g: &SynonymGroup = self.groups.group(name).unwrap();
                g.members.contains(&(t.lemma.clone(), t.pos)) || g.members.contains(&(low, t.pos))
            }
            Atom::Pos(p) => t.pos == *p,
            Atom::Dep(label) => {
                assert!(t.dep.is_none(), "oracle sentences carry no dependencies");
                label == "compound"
                    && matches!(t.pos, Pos::Noun | Pos::Propn)
                    && self.tokens.get(at + 1).is_some_and(|n| n.pos == Pos::Noun)
            }
            _ => unreachable!(),
        }
    }

    fn seq(&self, els: &[Element], pos: usize) -> Vec<Way> {
        let mut ways = vec![Way {
            end: pos,
            choices: vec![],
            caps: Caps::new(),
        }];
        for e in els {
            let mut next = Vec::new();
            for w in &ways {
                for r in self.element(e, w.end) {
                    let mut choices = w.choices.clone();
                    choices.extend(r.choices);
                    let mut caps = w.caps.clone();
                    caps.extend(r.caps);
                    next.push(Way {
                        end: r.end,
                        choices,
                        caps,
                    });
                }
            }
            ways = next;
        }
        ways
    }

    fn once(&self, atom: &Atom, pos: usize) -> Vec<Way> {
        match atom {
            Atom::Chunk(c) => self
                .chunk_lengths(*c, pos)
                .into_iter()
                .map(|l| Way {
                    end: pos + l,
                    choices: vec![l as i64],
                    caps: Caps::new(),
                })
                .collect(),
            Atom::Capture { index, elements } => self
                .seq(elements, pos)
                .into_iter()
                .map(|mut w| {
                    w.caps.insert(*index, Some((pos, w.end)));
                    w
                })
                .collect(),
            Atom::Group(inner) => self.seq(inner, pos),
            simple => {
                if self.token_ok(simple, pos) {
                    vec![Way {
                        end: pos + 1,
                        choices: vec![],
                        caps: Caps::new(),
                    }]
                } else {
                    vec![]
                }
            }
        }
    }

    /// Repetitions of a starred body; the body must not itself capture.
    fn reps(&self, body: &Atom, pos: usize) -> Vec<Way> {
        let mut out = Vec::new();
        let body = match body {
            Atom::Capture { elements, .. } => Atom::Group(elements.clone()),
            other => other.clone(),
        };
        for one in self.once(&body, pos).into_iter().filter(|w| w.end > pos) {
            for rest in self.reps(&body, one.end) {
                let mut choices = vec![REP];
                choices.extend(one.choices.iter().copied());
                choices.extend(rest.choices);
                out.push(Way {
                    end: rest.end,
                    choices,
                    caps: Caps::new(),
                });
            }
        }
        out.push(Way {
            end: pos,
            choices: vec![STOP],
            caps: Caps::new(),
        });
        out
    }

    fn element(&self, e: &Element, pos: usize) -> Vec<Way> {
        match e.quantifier {
            Quantifier::One => self.once(&e.atom, pos),
            Quantifier::ZeroOrMore => {
                let mut ways = self.reps(&e.atom, pos);
                if let Atom::Capture { index, .. } = &e.atom {
                    for w in &mut ways {
                        w.caps.insert(*index, (w.end > pos).then_some((pos, w.end)));
                    }
                }
                ways
            }
        }
    }

    /// Greedy-leftmost, non-overlapping matches.
    pub fn matches(&self, ast: &PatternAst) -> Vec<Found> {
        let mut out = Vec::new();
        let mut start = 0;
        while start < self.tokens.len() {
            let best = self
                .seq(ast.elements(), start)
                .into_iter()
                .filter(|w| w.end > start)
                .max_by(|a, b| a.choices.cmp(&b.choices));
            match best {
                Some(w) => {
                    let caps = w
                        .caps
                        .iter()
                        .filter_map(|(i, s)| s.map(|(a, b)| (*i, a, b)))
                        .collect();
                    out.push((start, w.end, caps));
                    start = w.end;
                }
                None => start += 1,
            }
        }
        out
    }
}

pub const VOCAB: [&str; 3] = ["a", "b", "c"];
pub const TAGS: [Pos; 12] = [
    Pos::Det,
    Pos::Adj,
    Pos::Noun,
    Pos::Propn,
    Pos::Adp,
    Pos::Verb,
    Pos::Aux,
    Pos::Pron,
    Pos::Cconj,
    Pos::Adv,
    Pos::Part,
    Pos::Punct,
];

/// Lexicon holding the single group `g` used by random patterns.
pub fn oracle_lexicon() -> Lexicon {
    let mut lex = Lexicon::new();
    lex.add_group(SynonymGroup::new("g", [("a".to_string(), Pos::Noun), ("b".to_string(), Pos::Adj)]).unwrap());
    lex
}

pub fn random_sentence(rng: &mut impl Rng, max_len: usize) -> TaggedSentence {
    let n = rng.gen_range(1..=max_len);
    let pairs: Vec<(&str, Pos)> = (0..n)
        .map(|_| (*VOCAB.choose(rng).unwrap(), *TAGS.choose(rng).unwrap()))
        .collect();
    TaggedSentence::from_pairs("r", 0, &pairs)
}

fn random_simple(rng: &mut impl Rng) -> Atom {
    match rng.gen_range(0..10) {
        0 | 1 => {
            let k = rng.gen_range(1..=2);
            let mut ws: Vec<String> = VOCAB.choose_multiple(rng, k).map(|s| s.to_string()).collect();
            ws.sort();
            Atom::Literal(ws)
        }
        2..=5 => Atom::Chunk(*[ChunkClass::Adj, ChunkClass::Noun, ChunkClass::Verb, ChunkClass::Pronoun].choose(rng).unwrap()),
        6 => Atom::Syn("g".into()),
        7 | 8 => Atom::Pos(*TAGS.choose(rng).unwrap()),
        _ => Atom::Dep("compound".into()),
    }
}

fn quant(rng: &mut impl Rng, p_star: f64) -> Quantifier {
    if rng.gen_bool(p_star) {
        Quantifier::ZeroOrMore
    } else {
        Quantifier::One
    }
}

/// Up to six top-level elements; stars never nest.
pub fn random_pattern(rng: &mut impl Rng) -> PatternAst {
    let n = rng.gen_range(1..=6);
    let mut next_cap = 0;
    let mut els = Vec::new();
    for _ in 0..n {
        let el = match rng.gen_range(0..20) {
            0..=9 => Element {
                atom: random_simple(rng),
                quantifier: quant(rng, 0.35),
            },
            10..=16 => {
                let q = quant(rng, 0.3);
                let inner_n = rng.gen_range(1..=3);
                let inner = (0..inner_n)
                    .map(|_| {
                        if q == Quantifier::One && rng.gen_bool(0.25) {
                            let g: Vec<Element> = (0..rng.gen_range(1..=2)).map(|_| Element::one(random_simple(rng))).collect();
                            Element::star(Atom::Group(g))
                        } else if q == Quantifier::One {
                            Element {
                                atom: random_simple(rng),
                                quantifier: quant(rng, 0.3),
                            }
                        } else {
                            Element::one(random_simple(rng))
                        }
                    })
                    .collect();
                let atom = Atom::Capture {
                    index: next_cap,
                    elements: inner,
                };
                next_cap += 1;
                Element { atom, quantifier: q }
            }
            _ => {
                let g: Vec<Element> = (0..rng.gen_range(1..=3)).map(|_| Element::one(random_simple(rng))).collect();
                Element::star(Atom::Group(g))
            }
        };
        els.push(el);
    }
    PatternAst::new(els).unwrap()
}

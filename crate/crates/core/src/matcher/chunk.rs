//! Built-in chunk grammars.
//!
//! ```text
//! adj     := ADV* ADJ
//! noun    := DET? (ADJ|NOUN|PROPN)* (NOUN|PROPN) (CCONJ (ADJ|NOUN|PROPN)+)*
//! verb    := ADV* (VERB|AUX) ADV* (ADP|PART)?
//! pronoun := PRON
//! ```

use std::collections::BTreeSet;

use crate::corpus::{Pos, Token};
use crate::pattern::ChunkClass;

fn is_nominal(p: Pos) -> bool {
    matches!(p, Pos::Adj | Pos::Noun | Pos::Propn)
}

fn is_head(p: Pos) -> bool {
    matches!(p, Pos::Noun | Pos::Propn)
}

fn run(tokens: &[Token], from: usize, pred: impl Fn(Pos) -> bool) -> usize {
    tokens[from.min(tokens.len())..]
        .iter()
        .take_while(|t| pred(t.pos))
        .count()
}

fn noun_ends(tokens: &[Token], at: usize, ends: &mut BTreeSet<usize>) {
    let mut starts = vec![at];
    if tokens.get(at).is_some_and(|t| t.pos == Pos::Det) {
        starts.push(at + 1);
    }
    let mut frontier = Vec::new();
    for j in starts {
        let k = run(tokens, j, is_nominal);
        for e in j + 1..=j + k {
            if is_head(tokens[e - 1].pos) {
                frontier.push(e);
            }
        }
    }
    // coordination tails
    while let Some(e) = frontier.pop() {
        if !ends.insert(e) {
            continue;
        }
        if tokens.get(e).is_some_and(|t| t.pos == Pos::Cconj) {
            let m = run(tokens, e + 1, is_nominal);
            frontier.extend((1..=m).map(|i| e + 1 + i));
        }
    }
}

fn verb_ends(tokens: &[Token], at: usize, ends: &mut BTreeSet<usize>) {
    let r = run(tokens, at, |p| p == Pos::Adv);
    if !tokens
        .get(at + r)
        .is_some_and(|t| matches!(t.pos, Pos::Verb | Pos::Aux))
    {
        return;
    }
    let e0 = at + r + 1;
    let s = run(tokens, e0, |p| p == Pos::Adv);
    for e in e0..=e0 + s {
        ends.insert(e);
        if tokens
            .get(e)
            .is_some_and(|t| matches!(t.pos, Pos::Adp | Pos::Part))
        {
            ends.insert(e + 1);
        }
    }
}

/// Every length the chunk can take starting at `at`, longest first.
pub fn chunk_lengths(class: ChunkClass, tokens: &[Token], at: usize) -> Vec<usize> {
    if at >= tokens.len() {
        return Vec::new();
    }
    let mut ends = BTreeSet::new();
    match class {
        ChunkClass::Adj => {
            let r = run(tokens, at, |p| p == Pos::Adv);
            if tokens.get(at + r).is_some_and(|t| t.pos == Pos::Adj) {
                ends.insert(at + r + 1);
            }
        }
        ChunkClass::Noun => noun_ends(tokens, at, &mut ends),
        ChunkClass::Verb => verb_ends(tokens, at, &mut ends),
        ChunkClass::Pronoun => {
            if tokens[at].pos == Pos::Pron {
                ends.insert(at + 1);
            }
        }
    }
    ends.into_iter().rev().map(|e| e - at).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Pos::*;
    use crate::corpus::TaggedSentence;

    fn lens(class: ChunkClass, tags: &[Pos]) -> Vec<usize> {
        let pairs: Vec<(&str, Pos)> = tags.iter().map(|p| ("w", *p)).collect();
        let s = TaggedSentence::from_pairs("d", 0, &pairs);
        chunk_lengths(class, &s.tokens, 0)
    }

    #[test]
    fn noun_group_with_coordination() {
        // the newly-sawn timber and saw dust mingled
        assert_eq!(
            lens(ChunkClass::Noun, &[Det, Adj, Noun, Cconj, Noun, Noun, Verb]),
            vec![6, 5, 3]
        );
    }

    #[test]
    fn noun_group_requires_a_head() {
        assert!(lens(ChunkClass::Noun, &[Det, Adj, Verb]).is_empty());
        assert_eq!(lens(ChunkClass::Noun, &[Propn]), vec![1]);
    }

    #[test]
    fn verb_group_absorbs_particle() {
        assert_eq!(lens(ChunkClass::Verb, &[Verb, Adp, Det]), vec![2, 1]);
        assert_eq!(lens(ChunkClass::Verb, &[Adv, Verb, Adv, Part]), vec![4, 3, 2]);
        assert!(lens(ChunkClass::Verb, &[Adv, Noun]).is_empty());
    }

    #[test]
    fn adjective_group() {
        assert_eq!(lens(ChunkClass::Adj, &[Adv, Adv, Adj, Noun]), vec![3]);
        assert!(lens(ChunkClass::Adj, &[Adv, Noun]).is_empty());
    }
}

//! Generated corpus with planted smell templates and a scripted judge.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use olfactory::bootstrap::{BootstrapConfig, Engine, Label, ValidationJudgment};
use olfactory::corpus::{split_corpus, Corpus, Document, Pos, SentenceRef, TaggedSentence};
use olfactory::lexicon::{Feature, Lexicon};
use olfactory::pattern::{Approach, PatternKind};

use Pos::*;

type Words = &'static [(&'static str, Pos)];

const ADJS: &[Words] = &[
    &[("sweet", Adj)],
    &[("faint", Adj)],
    &[("rich", Adj)],
    &[("acrid", Adj)],
    &[("musty", Adj)],
    &[("pungent", Adj)],
    &[("sour", Adj)],
    &[("bitter", Adj)],
    &[("warm", Adj)],
    &[("very", Adv), ("faint", Adj)],
    &[("oddly", Adv), ("familiar", Adj)],
];

const NOUNS: &[Words] = &[
    &[("lavender", Noun)],
    &[("roses", Noun)],
    &[("tobacco", Noun)],
    &[("coffee", Noun)],
    &[("woodsmoke", Noun)],
    &[("wet", Adj), ("earth", Noun)],
    &[("pine", Noun), ("needles", Noun)],
    &[("old", Adj), ("leather", Noun)],
    &[("burnt", Adj), ("toast", Noun)],
    &[("the", Det), ("sea", Noun)],
    &[("oranges", Noun), ("and", Cconj), ("cloves", Noun)],
];

const FILLERS: &[Words] = &[
    &[("He", Pron), ("walked", Verb), ("to", Adp), ("the", Det), ("station", Noun), (".", Punct)],
    &[("They", Pron), ("spoke", Verb), ("quietly", Adv), ("about", Adp), ("the", Det), ("war", Noun), (".", Punct)],
    &[("The", Det), ("rain", Noun), ("had", Aux), ("stopped", Verb), (".", Punct)],
    &[("She", Pron), ("laughed", Verb), ("and", Cconj), ("turned", Verb), ("away", Adv), (".", Punct)],
    &[("Nobody", Pron), ("answered", Verb), ("the", Det), ("letter", Noun), (".", Punct)],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Template {
    AromaOf,
    ScentOf,
    OdourComma,
}

pub struct Synthetic {
    pub corpus: Corpus,
    /// Sentences generated from a smell template.
    pub smell: BTreeMap<SentenceRef, (Template, String, String)>,
}

fn push(out: &mut Vec<(&'static str, Pos)>, words: Words) {
    out.extend_from_slice(words);
}

fn text(words: Words) -> String {
    words.iter().map(|(w, _)| w.to_lowercase()).collect::<Vec<_>>().join(" ")
}

pub fn generate(seed: u64, docs: usize, per_doc: usize) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut documents = Vec::new();
    let mut smell = BTreeMap::new();
    for d in 0..docs {
        let doc_id = format!("doc{d:03}");
        let mut sentences = Vec::new();
        for i in 0..per_doc {
            let adj = *ADJS.choose(&mut rng).unwrap();
            let noun = *NOUNS.choose(&mut rng).unwrap();
            let mut w = Vec::new();
            let roll: f64 = rng.gen();
            if roll < 0.35 {
                let t = *[Template::AromaOf, Template::ScentOf, Template::OdourComma]
                    .choose(&mut rng)
                    .unwrap();
                match t {
                    Template::AromaOf => {
                        push(&mut w, &[("The", Det)]);
                        push(&mut w, adj);
                        push(&mut w, &[("aroma", Noun), ("of", Adp)]);
                        push(&mut w, noun);
                        push(&mut w, &[("filled", Verb), ("the", Det), ("room", Noun), (".", Punct)]);
                    }
                    Template::ScentOf => {
                        push(&mut w, &[("She", Pron), ("noticed", Verb), ("a", Det)]);
                        push(&mut w, adj);
                        push(&mut w, &[("scent", Noun), ("of", Adp)]);
                        push(&mut w, noun);
                        push(&mut w, &[("near", Adp), ("the", Det), ("door", Noun), (".", Punct)]);
                    }
                    Template::OdourComma => {
                        push(&mut w, &[("A", Det)]);
                        push(&mut w, adj);
                        push(&mut w, &[("odour", Noun), (",", Punct), ("of", Adp)]);
                        push(&mut w, noun);
                        push(&mut w, &[(",", Punct), ("hung", Verb), ("about", Adp), ("him", Pron), (".", Punct)]);
                    }
                }
                smell.insert(SentenceRef::new(&doc_id, i), (t, text(adj), text(noun)));
            } else if roll < 0.55 {
                push(&mut w, &[("The", Det)]);
                push(&mut w, adj);
                push(&mut w, &[("colour", Noun), ("of", Adp)]);
                push(&mut w, noun);
                push(&mut w, &[("faded", Verb), ("in", Adp), ("the", Det), ("light", Noun), (".", Punct)]);
            } else {
                push(&mut w, FILLERS.choose(&mut rng).unwrap());
            }
            sentences.push(TaggedSentence::from_pairs(&doc_id, i, &w));
        }
        documents.push(Document { doc_id, sentences });
    }
    Synthetic {
        corpus: Corpus::new("synthetic", documents).unwrap(),
        smell,
    }
}

impl Synthetic {
    pub fn split(&self, sizes: (usize, usize, usize), seed: u64) -> (Corpus, Corpus, Corpus) {
        split_corpus(&self.corpus, sizes, seed).unwrap()
    }

    /// tp exactly when the sentence came from a smell template.
    pub fn judge(&self, r: &SentenceRef) -> Label {
        if self.smell.contains_key(r) {
            Label::Tp
        } else {
            Label::Fp
        }
    }

    /// (adjective, noun group) pairs planted in the given corpus.
    pub fn planted_pairs(&self, corpus: &Corpus) -> BTreeSet<(String, String)> {
        corpus
            .universe()
            .iter()
            .filter_map(|r| self.smell.get(r))
            .map(|(_, a, n)| (a.clone(), n.clone()))
            .collect()
    }
}

const AROMA_ONLY: &str = "[<adj>] _aroma_ _of_ [<noun>]";
const LISTING: &str = "[<adj>] <smell_noun> _,_* _of_ <pronoun>* [<noun> {_of_ <noun>}*]";
const IDENT: &str = "<adj> <smell_noun>";

pub struct Run {
    pub synthetic: Synthetic,
    pub engine: Engine,
    pub recovered_after: Vec<f64>,
    pub drafts: Vec<Vec<SentenceRef>>,
    pub subset_ok: bool,
}

fn judge_all(engine: &mut Engine, syn: &Synthetic, id: &str) {
    let sample = engine.candidate(id).unwrap().sample.clone();
    assert!(!sample.is_empty(), "{id} has no validation sample");
    for x in sample {
        let label = syn.judge(&x.reference());
        engine
            .submit_judgment(ValidationJudgment {
                pattern_id: id.into(),
                doc_id: x.doc_id,
                sent_index: x.sent_index,
                label,
                judge: "script".into(),
                timestamp: 0,
            })
            .unwrap();
    }
}

fn lexicon_pairs(engine: &Engine) -> BTreeSet<(String, String)> {
    engine
        .lexicon()
        .entries()
        .iter()
        .filter_map(|e| match &e.form {
            Feature::Pair { a, b, .. } => Some((a.text.clone(), b.text.clone())),
            Feature::Single { .. } => None,
        })
        .collect()
}

fn subset(engine: &Engine) -> bool {
    let ident: BTreeSet<&str> = engine.identification_patterns().iter().map(|p| p.id.as_str()).collect();
    engine.extraction_patterns().iter().all(|p| ident.contains(p.id.as_str()))
}

/// Two scripted cycles: an aroma-only extraction pattern, then the general
/// listing plus an identification pattern.
pub fn scripted_run(seed: u64) -> Run {
    let syn = generate(seed, 50, 10);
    let (h, v, _e) = syn.split((30, 10, 10), seed);
    let planted = syn.planted_pairs(&h);
    let mut engine = Engine::new(BootstrapConfig::default(), h, v, Lexicon::with_default_groups()).unwrap();
    let mut recovered_after = Vec::new();
    let mut drafts = Vec::new();
    let mut subset_ok = true;

    let scripts: [&[(&str, &str, PatternKind)]; 2] = [
        &[("aroma", AROMA_ONLY, PatternKind::Extraction)],
        &[("listing", LISTING, PatternKind::Extraction), ("ident", IDENT, PatternKind::Identification)],
    ];
    for script in scripts {
        let draft = engine.start_cycle().unwrap();
        drafts.push(draft.extracts.iter().map(|x| x.reference()).collect());
        for (id, src, kind) in script {
            engine.hypothesize(Some(id), src, *kind, Approach::AdjNoun).unwrap();
            judge_all(&mut engine, &syn, id);
        }
        engine.advance(&[]).unwrap();
        subset_ok &= subset(&engine);
        let have = lexicon_pairs(&engine);
        let hit = planted.iter().filter(|p| have.contains(*p)).count();
        recovered_after.push(hit as f64 / planted.len() as f64);
    }
    Run {
        synthetic: syn,
        engine,
        recovered_after,
        drafts,
        subset_ok,
    }
}


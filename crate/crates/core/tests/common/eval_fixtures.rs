//! Randomized pattern sets, corpora and gold sets for evaluation checks.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::{oracle_lexicon, random_pattern, random_sentence};
use olfactory::corpus::{Corpus, Document, SentenceRef, TaggedSentence};
use olfactory::eval::{default_cutoffs, pr_curve, predict_records, PrPoint};
use olfactory::lexicon::Lexicon;
use olfactory::pattern::{Approach, PatternKind, PatternRecord};

pub struct EvalCase {
    pub corpus: Corpus,
    pub lexicon: Lexicon,
    pub a: Vec<PatternRecord>,
    pub b: Vec<PatternRecord>,
    pub gold: BTreeSet<SentenceRef>,
}

fn patterns(rng: &mut ChaCha8Rng, prefix: &str) -> Vec<PatternRecord> {
    (0..rng.gen_range(1..=4))
        .map(|i| {
            let src = random_pattern(rng).render();
            // some patterns carry no estimate at all
            let precision = (!rng.gen_bool(0.15)).then(|| (rng.gen_range(0..=20) as f64) / 20.0);
            PatternRecord::new(format!("{prefix}{i}"), &src, PatternKind::Identification, Approach::None)
                .unwrap()
                .with_precision(precision)
        })
        .collect()
}

pub fn random_case(seed: u64) -> EvalCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = (0..3)
        .map(|d| {
            let id = format!("d{d}");
            let sentences = (0..8)
                .map(|i| {
                    let s = random_sentence(&mut rng, 7);
                    TaggedSentence::new(&id, i, s.tokens)
                })
                .collect();
            Document { doc_id: id, sentences }
        })
        .collect();
    let corpus = Corpus::new("rand", docs).unwrap();
    let mut gold: BTreeSet<SentenceRef> = corpus.universe().into_iter().filter(|_| rng.gen_bool(0.4)).collect();
    if gold.is_empty() {
        gold.insert(SentenceRef::new("d0", 0));
    }
    EvalCase {
        a: patterns(&mut rng, "a"),
        b: patterns(&mut rng, "b"),
        corpus,
        lexicon: oracle_lexicon(),
        gold,
    }
}

impl EvalCase {
    pub fn curve(&self, pats: &[PatternRecord]) -> Vec<PrPoint> {
        pr_curve(pats, &self.lexicon, &self.corpus, &self.gold, &default_cutoffs()).unwrap()
    }

    pub fn union(&self) -> Vec<PatternRecord> {
        self.a.iter().chain(&self.b).cloned().collect()
    }

    pub fn predict(&self, pats: &[PatternRecord]) -> BTreeSet<SentenceRef> {
        predict_records(pats, &self.lexicon, &self.corpus).unwrap()
    }
}

/// Every algebraic property the curve must satisfy; returns the first
/// violation.
pub fn check_case(case: &EvalCase) -> Result<(), String> {
    let (ca, cb, cu) = (case.curve(&case.a), case.curve(&case.b), case.curve(&case.union()));
    for ((a, b), u) in ca.iter().zip(&cb).zip(&cu) {
        if u.recall + 1e-12 < a.recall || u.recall + 1e-12 < b.recall {
            return Err(format!("union recall {} below parts {} / {} at {}", u.recall, a.recall, b.recall, u.cutoff));
        }
        if u.active_patterns != a.active_patterns + b.active_patterns {
            return Err(format!("active pattern counts do not add up at {}", u.cutoff));
        }
    }
    for c in [&ca, &cb, &cu] {
        for w in c.windows(2) {
            if w[1].recall > w[0].recall + 1e-12 {
                return Err(format!("recall rises from {} to {} at {}", w[0].recall, w[1].recall, w[1].cutoff));
            }
            if w[1].active_patterns > w[0].active_patterns {
                return Err("active patterns grow with the cutoff".into());
            }
        }
        for p in c.iter() {
            if p.active_patterns == 0 && (p.precision.is_some() || p.recall != 0.0) {
                return Err(format!("empty pattern set scored {:?}/{} at {}", p.precision, p.recall, p.cutoff));
            }
        }
    }
    // union of pattern sets predicts exactly the union of their predictions
    let pa = case.predict(&case.a);
    let pb = case.predict(&case.b);
    let pu = case.predict(&case.union());
    if pu != pa.union(&pb).cloned().collect() {
        return Err("union predictions differ from the union of predictions".into());
    }
    // precision is undefined exactly when nothing is predicted
    for p in &cu {
        let active: Vec<PatternRecord> = case
            .union()
            .into_iter()
            .filter(|r| r.estimated_precision.unwrap_or(0.0) >= p.cutoff)
            .collect();
        let pred = case.predict(&active);
        if pred.is_empty() != p.precision.is_none() {
            return Err(format!("precision {:?} with {} predictions at {}", p.precision, pred.len(), p.cutoff));
        }
        let tp = pred.intersection(&case.gold).count() as f64;
        let recall = tp / case.gold.len() as f64;
        if (recall - p.recall).abs() > 1e-12 {
            return Err(format!("recall {} but oracle says {recall} at {}", p.recall, p.cutoff));
        }
        if let Some(prec) = p.precision {
            if (prec - tp / pred.len() as f64).abs() > 1e-12 {
                return Err(format!("precision {prec} disagrees with oracle at {}", p.cutoff));
            }
        }
    }
    Ok(())
}

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Corpus, CorpusError, CorpusRole};

/// Partitions whole documents into harvesting, validation and evaluation
/// corpora. The same seed always yields the same partition; each output keeps
/// the input document order.
pub fn split_corpus(
    corpus: &Corpus,
    sizes: (usize, usize, usize),
    seed: u64,
) -> Result<(Corpus, Corpus, Corpus), CorpusError> {
    let (h, v, e) = sizes;
    let total = corpus.documents.len();
    if h + v + e != total {
        return Err(CorpusError::SplitMismatch { h, v, e, total });
    }
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let take = |idx: &[usize], role: CorpusRole, suffix: &str| {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        Corpus {
            name: format!("{}-{suffix}", corpus.name),
            documents: idx.iter().map(|&i| corpus.documents[i].clone()).collect(),
            role,
        }
    };
    Ok((
        take(&order[..h], CorpusRole::Harvesting, "harvesting"),
        take(&order[h..h + v], CorpusRole::Validation, "validation"),
        take(&order[h + v..], CorpusRole::Evaluation, "evaluation"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use std::collections::BTreeSet;

    fn docs(n: usize) -> Corpus {
        let documents = (0..n)
            .map(|i| Document {
                doc_id: format!("text{i:03}"),
                sentences: vec![],
            })
            .collect();
        Corpus::new("gutenberg", documents).unwrap()
    }

    fn ids(c: &Corpus) -> BTreeSet<String> {
        c.documents.iter().map(|d| d.doc_id.clone()).collect()
    }

    #[test]
    fn study_sized_split() {
        let (h, v, e) = split_corpus(&docs(139), (99, 20, 20), 7).unwrap();
        assert_eq!(
            (h.documents.len(), v.documents.len(), e.documents.len()),
            (99, 20, 20)
        );
        assert_eq!(h.role, CorpusRole::Harvesting);
        assert_eq!(v.role, CorpusRole::Validation);
        assert_eq!(e.role, CorpusRole::Evaluation);
    }

    #[test]
    fn deterministic_under_seed() {
        let c = docs(10);
        let a = split_corpus(&c, (8, 1, 1), 42).unwrap();
        let b = split_corpus(&c, (8, 1, 1), 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn size_mismatch_errors() {
        assert!(matches!(
            split_corpus(&docs(10), (8, 1, 2), 42),
            Err(CorpusError::SplitMismatch { total: 10, .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn partition_is_disjoint_and_complete(n in 0usize..40, seed in 0u64..1000, a in 0usize..40, b in 0usize..40) {
            let h = a.min(n);
            let v = b.min(n - h);
            let e = n - h - v;
            let c = docs(n);
            let (hc, vc, ec) = split_corpus(&c, (h, v, e), seed).unwrap();
            let (hi, vi, ei) = (ids(&hc), ids(&vc), ids(&ec));
            proptest::prop_assert!(hi.is_disjoint(&vi) && hi.is_disjoint(&ei) && vi.is_disjoint(&ei));
            let all: BTreeSet<String> = hi.union(&vi).chain(ei.iter()).cloned().collect();
            proptest::prop_assert_eq!(all, ids(&c));
        }
    }
}

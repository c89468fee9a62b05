//! Paired significance tests for two sentence classifiers.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::SentenceRef;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McNemar {
    /// A right, B wrong.
    pub b: usize,
    /// B right, A wrong.
    pub c: usize,
    pub p_value: f64,
}

/// Exact two-sided p-value: `min(1, 2 P(X <= min(b, c)))` with
/// `X ~ Binomial(b + c, 1/2)`.
pub fn mcnemar_p(b: usize, c: usize) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    let k = b.min(c);
    // log C(n, i) built incrementally
    let mut log_c = 0.0f64;
    let mut logs = Vec::with_capacity(k + 1);
    for i in 0..=k {
        if i > 0 {
            log_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        logs.push(log_c);
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    let p = 2.0 * (log_sum - n as f64 * std::f64::consts::LN_2).exp();
    p.min(1.0)
}

/// Compares per-sentence correctness of two prediction sets over `universe`.
pub fn mcnemar_exact(
    pred_a: &BTreeSet<SentenceRef>,
    pred_b: &BTreeSet<SentenceRef>,
    gold: &BTreeSet<SentenceRef>,
    universe: &[SentenceRef],
) -> McNemar {
    let (mut b, mut c) = (0, 0);
    for r in universe {
        let truth = gold.contains(r);
        let a_ok = pred_a.contains(r) == truth;
        let b_ok = pred_b.contains(r) == truth;
        match (a_ok, b_ok) {
            (true, false) => b += 1,
            (false, true) => c += 1,
            _ => {}
        }
    }
    McNemar {
        b,
        c,
        p_value: mcnemar_p(b, c),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecallDifference {
    pub recall_a: f64,
    pub recall_b: f64,
    /// `recall_a - recall_b`.
    pub difference: f64,
    pub p_value: f64,
    pub iterations: usize,
}

/// Paired bootstrap over gold positives. The p-value is two-sided, from the
/// resampled differences recentred on the observed one.
pub fn bootstrap_recall_test(
    pred_a: &BTreeSet<SentenceRef>,
    pred_b: &BTreeSet<SentenceRef>,
    gold: &BTreeSet<SentenceRef>,
    iterations: usize,
    seed: u64,
) -> RecallDifference {
    let hits: Vec<(bool, bool)> = gold
        .iter()
        .map(|r| (pred_a.contains(r), pred_b.contains(r)))
        .collect();
    let n = hits.len();
    if n == 0 {
        return RecallDifference {
            recall_a: 1.0,
            recall_b: 1.0,
            difference: 0.0,
            p_value: 1.0,
            iterations,
        };
    }
    let diff = |idx: &mut dyn Iterator<Item = usize>| {
        let (mut a, mut b) = (0i64, 0i64);
        for i in idx {
            a += i64::from(hits[i].0);
            b += i64::from(hits[i].1);
        }
        (a - b) as f64 / n as f64
    };
    let recall_a = hits.iter().filter(|h| h.0).count() as f64 / n as f64;
    let recall_b = hits.iter().filter(|h| h.1).count() as f64 / n as f64;
    let observed = recall_a - recall_b;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut extreme = 0usize;
    for _ in 0..iterations {
        let d = diff(&mut (0..n).map(|_| rng.gen_range(0..n)));
        if (d - observed).abs() >= observed.abs() - 1e-12 {
            extreme += 1;
        }
    }
    RecallDifference {
        recall_a,
        recall_b,
        difference: observed,
        p_value: (extreme + 1) as f64 / (iterations + 1) as f64,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom_oracle(b: u64, c: u64) -> f64 {
        let n = b + c;
        let choose = |n: u64, k: u64| (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1));
        let tail: u128 = (0..=b.min(c)).map(|i| choose(n, i)).sum();
        (2.0 * tail as f64 / 2f64.powi(n as i32)).min(1.0)
    }

    #[test]
    fn exact_values() {
        assert!((mcnemar_p(8, 2) - 112.0 / 1024.0).abs() < 1e-12);
        assert!((mcnemar_p(10, 0) - 2.0 / 1024.0).abs() < 1e-12);
        assert_eq!(mcnemar_p(5, 5), 1.0);
        assert_eq!(mcnemar_p(0, 0), 1.0);
        for b in 0..30 {
            for c in 0..30 {
                assert!((mcnemar_p(b, c) - binom_oracle(b as u64, c as u64)).abs() < 1e-9, "{b} {c}");
            }
        }
    }

    #[test]
    fn large_counts_stay_finite() {
        let p = mcnemar_p(5000, 4000);
        assert!(p.is_finite() && p < 1e-10);
    }

    #[test]
    fn counts_discordant_pairs() {
        let r = |i| SentenceRef::new("d", i);
        let universe: Vec<_> = (0..4).map(r).collect();
        let gold: BTreeSet<_> = [r(0), r(1)].into_iter().collect();
        let a: BTreeSet<_> = [r(0), r(1)].into_iter().collect();
        let b: BTreeSet<_> = [r(0), r(2)].into_iter().collect();
        let m = mcnemar_exact(&a, &b, &gold, &universe);
        assert_eq!((m.b, m.c), (2, 0));
    }

    #[test]
    fn bootstrap_is_seeded() {
        let r = |i| SentenceRef::new("d", i);
        let gold: BTreeSet<_> = (0..40).map(r).collect();
        let a: BTreeSet<_> = (0..36).map(r).collect();
        let b: BTreeSet<_> = (0..10).map(r).collect();
        let x = bootstrap_recall_test(&a, &b, &gold, 500, 3);
        assert_eq!(x, bootstrap_recall_test(&a, &b, &gold, 500, 3));
        assert!((x.difference - 0.65).abs() < 1e-12);
        assert!(x.p_value < 0.05);
        let same = bootstrap_recall_test(&a, &a, &gold, 200, 3);
        assert_eq!(same.p_value, 1.0);
    }
}

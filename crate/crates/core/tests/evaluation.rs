mod common;

use proptest::prelude::*;

use common::eval_fixtures::{check_case, random_case};
use common::reference_phrases;
use olfactory::eval::{cohens_kappa, mcnemar_p, precision_recall, Band};

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn curve_algebra_holds(seed in any::<u64>()) {
        let case = random_case(seed);
        if let Err(e) = check_case(&case) {
            return Err(TestCaseError::fail(e));
        }
    }
}

#[test]
fn fixtures_are_not_degenerate() {
    let mut any_match = 0;
    for seed in 0..50 {
        let case = random_case(seed);
        if !case.predict(&case.union()).is_empty() {
            any_match += 1;
        }
    }
    assert!(any_match >= 25, "{any_match}");
}

#[test]
fn gold_outside_the_corpus_is_ignored() {
    let corpus = reference_phrases();
    let universe = corpus.universe();
    let gold = [universe[0].clone(), olfactory::corpus::SentenceRef::new("elsewhere", 0)].into();
    let pred = [universe[0].clone(), universe[1].clone()].into();
    let pr = precision_recall(&pred, &gold, &universe);
    assert_eq!((pr.tp, pr.fp, pr.fn_), (1, 1, 0));
    assert_eq!(pr.recall, 1.0);
}

#[test]
fn worked_kappa_examples() {
    let k = cohens_kappa(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap();
    assert!((k.kappa - 0.0).abs() < 1e-9);
    let a = [1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
    let b = [1, 1, 0, 1, 0, 0, 0, 0, 0, 0];
    let k = cohens_kappa(&a, &b).unwrap();
    assert!((k.observed - 0.8).abs() < 1e-12 && (k.expected - 0.58).abs() < 1e-12);
    assert!((k.kappa - 0.22 / 0.42).abs() < 1e-9);
    assert_eq!(k.band, Band::Moderate);
}

#[test]
fn mcnemar_reference_values() {
    assert!((mcnemar_p(8, 2) - 0.109375).abs() < 1e-6);
    assert!(mcnemar_p(10, 0) < 0.05);
}

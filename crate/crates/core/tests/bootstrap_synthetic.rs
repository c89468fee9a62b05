mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::synthetic::scripted_run;
use olfactory::lexicon::Feature;

#[test]
fn planted_pairs_are_recovered_within_two_cycles() {
    let t = Instant::now();
    let run = scripted_run(11);
    assert!(run.recovered_after[1] >= 0.95, "{:?}", run.recovered_after);
    // the aroma-only pattern alone cannot see the other two templates
    assert!(run.recovered_after[0] < run.recovered_after[1]);
    assert!(run.subset_ok);
    assert!(t.elapsed().as_secs() < 30);
}

#[test]
fn ledger_and_lexicon_stay_duplicate_free() {
    let run = scripted_run(3);
    let mut all = Vec::new();
    for d in &run.drafts {
        all.extend(d.iter().cloned());
    }
    let unique: BTreeSet<_> = all.iter().cloned().collect();
    assert_eq!(unique.len(), all.len());
    assert!(run.drafts[1].iter().all(|r| !run.drafts[0].contains(r)));
    assert_eq!(run.engine.ledger().len(), unique.len());

    let forms: Vec<&Feature> = run.engine.lexicon().entries().iter().map(|e| &e.form).collect();
    let distinct: BTreeSet<&Feature> = forms.iter().copied().collect();
    assert_eq!(distinct.len(), forms.len());
}

#[test]
fn every_validated_pattern_meets_threshold() {
    let run = scripted_run(5);
    let ids: Vec<&str> = run.engine.identification_patterns().iter().map(|p| p.id.as_str()).collect();
    assert_eq!(ids, ["aroma", "listing", "ident"]);
    for c in run.engine.candidates() {
        assert!(c.record.estimated_precision.unwrap() >= 0.7, "{}", c.record.id);
        assert_eq!(c.sample.len(), 10);
    }
    assert_eq!(run.engine.cycles().len(), 2);
    assert!(run.engine.cycles()[1].lexicon_entries > run.engine.cycles()[0].lexicon_entries);
}

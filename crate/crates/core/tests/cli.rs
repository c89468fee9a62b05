mod common;

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

use common::synthetic::generate;
use olfactory::bootstrap::STATE_FILES;
use olfactory::corpus::{write_tagged, SentenceRef};

const LISTING: &str = "[<adj>] <smell_noun> _,_* _of_ <pronoun>* [<noun> {_of_ <noun>}*]";

fn olf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_olfactory")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn kappa_of_identical_files_is_one() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("a.labels");
    std::fs::write(&f, "d\no\nnone\nd\nnone\n").unwrap();
    let o = olf(&["eval", "kappa", "--a", p(&f), "--b", p(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("kappa\t1.0\n"), "{}", stdout(&o));
    assert!(stdout(&o).contains("band\tnear-perfect"));
}

#[test]
fn kappa_json_output() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    std::fs::write(&a, "1\n1\n0\n0\n").unwrap();
    std::fs::write(&b, "1\n0\n1\n0\n").unwrap();
    let o = olf(&["--format", "json", "eval", "kappa", "--a", p(&a), "--b", p(&b)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kappa"], 0.0);
    assert_eq!(v["band"], "poor");
}

#[test]
fn bad_pattern_names_its_id() {
    let dir = TempDir::new().unwrap();
    let pats = dir.path().join("p.tsv");
    std::fs::write(&pats, "good\tidentification\tnone\t<adj> <smell_noun>\nbroken\tidentification\tnone\t[<adj>\n").unwrap();
    let o = olf(&["match", "--patterns", p(&pats), "--corpus", p(&common::fixture("reference_phrases.tsv"))]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert!(e.starts_with("error: "), "{e}");
    assert!(e.contains("broken"), "{e}");
    assert!(o.stdout.is_empty());
}

#[test]
fn match_dumps_reference_captures() {
    let o = olf(&[
        "match",
        "--patterns",
        p(&common::fixture("reference_patterns.tsv")),
        "--corpus",
        p(&common::fixture("reference_phrases.tsv")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("multitudinous exotics"));
    assert!(out.contains("mingled in"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(olf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(olf(&["eval", "kappa"]).status.code(), Some(2));
    assert_eq!(olf(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_input_exits_one() {
    let o = olf(&["ingest", "/nonexistent/corpus.tsv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/corpus.tsv"));
}

#[test]
fn split_is_seed_deterministic() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("all.tsv");
    std::fs::write(&corpus, write_tagged(&generate(1, 12, 3).corpus)).unwrap();
    let run = |seed: &str, out: &str| {
        let out = dir.path().join(out);
        let o = olf(&["--seed", seed, "split", "--corpus", p(&corpus), "--sizes", "6,3,3", "--out-dir", p(&out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        ["harvesting", "validation", "evaluation"]
            .map(|r| std::fs::read(out.join(format!("all-{r}.tsv"))).unwrap())
    };
    assert_eq!(run("9", "a"), run("9", "b"));
    assert_ne!(run("9", "a"), run("10", "c"));
    let o = olf(&["split", "--corpus", p(&corpus), "--sizes", "1,1,1", "--out-dir", p(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(1));
}

/// Runs one scripted cycle through the binary and returns the state files.
fn headless_cycle(root: &Path, seed: &str) -> Vec<(String, Vec<u8>)> {
    let syn = generate(4, 30, 10);
    let (h, v, e) = syn.split((16, 8, 6), 4);
    let files = root.join("in");
    std::fs::create_dir_all(&files).unwrap();
    for (name, c) in [("h.tsv", &h), ("v.tsv", &v), ("e.tsv", &e)] {
        std::fs::write(files.join(name), write_tagged(c)).unwrap();
    }
    let state = root.join("state");
    let o = olf(&[
        "--seed",
        seed,
        "cycle",
        "start",
        "--state-dir",
        p(&state),
        "--harvesting",
        p(&files.join("h.tsv")),
        "--validation",
        p(&files.join("v.tsv")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).lines().count() > 1);

    let pats = files.join("p.tsv");
    std::fs::write(&pats, format!("listing\textraction\tadj_noun\t{LISTING}\n")).unwrap();
    let o = olf(&["cycle", "hypothesize", "--state-dir", p(&state), "--patterns", p(&pats)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), stdout(&olf(&["cycle", "samples", "--state-dir", p(&state)])));

    let blocked = olf(&["cycle", "advance", "--state-dir", p(&state)]);
    assert_eq!(blocked.status.code(), Some(1));
    assert!(stderr(&blocked).contains("listing"));

    let mut judgments = String::new();
    for line in stdout(&o).lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        let r = SentenceRef::new(cols[1], cols[2].parse().unwrap());
        judgments.push_str(&format!("{}\t{}\t{}\t{}\tscript\t1\n", cols[0], cols[1], cols[2], syn.judge(&r)));
    }
    let jf = files.join("j.tsv");
    std::fs::write(&jf, judgments).unwrap();
    let o = olf(&["cycle", "advance", "--state-dir", p(&state), "--judgments", p(&jf)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = olf(&["cycle", "status", "--state-dir", p(&state)]);
    assert!(stdout(&o).contains("phase\tidle"));

    STATE_FILES
        .iter()
        .map(|f| (f.to_string(), std::fs::read(state.join(f)).unwrap()))
        .collect()
}

#[test]
fn headless_cycle_replays_byte_identically() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let first = headless_cycle(a.path(), "3");
    let second = headless_cycle(b.path(), "3");
    for ((name, x), (_, y)) in first.iter().zip(&second) {
        assert_eq!(x, y, "{name} differs between runs");
    }
    let cycles = String::from_utf8(first.iter().find(|(n, _)| n == "cycles.tsv").unwrap().1.clone()).unwrap();
    assert_eq!(cycles.lines().count(), 2, "{cycles}");
    let lexicon = String::from_utf8(first.iter().find(|(n, _)| n == "lexicon.tsv").unwrap().1.clone()).unwrap();
    assert!(lexicon.lines().count() > 5, "{lexicon}");
}

#[test]
fn significance_and_baseline_run() {
    let dir = TempDir::new().unwrap();
    let syn = generate(8, 10, 10);
    let corpus = dir.path().join("c.tsv");
    std::fs::write(&corpus, write_tagged(&syn.corpus)).unwrap();
    let mut gold = String::new();
    for r in syn.smell.keys() {
        gold.push_str(&format!("{}\t{}\t1\t3\td\tann\n", r.doc_id, r.sent_index));
    }
    let gf = dir.path().join("g.tsv");
    std::fs::write(&gf, gold).unwrap();
    let pats = dir.path().join("p.tsv");
    std::fs::write(&pats, format!("listing\textraction\tadj_noun\t{LISTING}\t0.9\n")).unwrap();

    let o = olf(&["eval", "baseline", "--corpus", p(&corpus), "--gold", p(&gf)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("recall\t1.0000"), "{}", stdout(&o));

    let o = olf(&["eval", "pr", "--corpus", p(&corpus), "--gold", p(&gf), "--patterns", p(&pats), "--cutoffs", "0,0.95"]);
    assert_eq!(stdout(&o), "cutoff\tprecision\trecall\tactive_patterns\n0.00\t1.0000\t1.0000\t1\n0.95\tNA\t0.0000\t0\n");

    let sig = |test: &str| {
        let o = olf(&[
            "--seed", "2", "eval", "significance", "--corpus", p(&corpus), "--gold", p(&gf), "--a", p(&pats), "--b",
            "keywords", "--test", test, "--iterations", "200",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        stdout(&o)
    };
    // the baseline also fires on distractors, which the pattern gets right
    let m = sig("mcnemar");
    let field = |k: &str| m.lines().find_map(|l| l.strip_prefix(&format!("{k}\t"))).unwrap().to_string();
    let b: i32 = field("b").parse().unwrap();
    assert!(b > 0);
    assert_eq!(field("c"), "0");
    let p_value: f64 = field("p_value").parse().unwrap();
    assert!((p_value - 2.0 * 0.5f64.powi(b)).abs() < 1e-12, "{m}");
    assert_eq!(sig("bootstrap"), sig("bootstrap"));

    let o = olf(&["eval", "gold", "--gold", p(&gf)]);
    assert_eq!(stdout(&o), format!("d\t{}\no\t0\nv\t0\ns\t0\na\t0\nn\t0\n", syn.smell.len()));
}

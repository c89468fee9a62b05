//! Command-line interface.
//!
//! Data goes to stdout, diagnostics to stderr. Exit status is 0 on success,
//! 1 on an operational error and 2 on a usage error.

use std::collections::BTreeSet;
use std::error::Error;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bootstrap::{load_judgment_file, BootstrapConfig, Engine};
use crate::corpus::{load_tagged, plain::ingest_plain, split_corpus, write_tagged, Corpus, KeywordLexicon, Pos, SentenceRef};
use crate::eval::{
    bootstrap_recall_test, cohens_kappa, default_cutoffs, format_fraction, gold_positive, is_active, kappa_matrix,
    keyword_baseline, load_gold, mcnemar_exact, pr_curve, precision_recall, predict_records, tag_counts,
    write_kappa_matrix, write_pr_table, PositiveClass,
};
use crate::lexicon::{Feature, Lexicon, LexiconEntry};
use crate::matcher::{match_corpus, write_match_dump};
use crate::pattern::{parse_pattern_file, Approach, PatternRecord};
use crate::service;

type CliResult = Result<(), Box<dyn Error>>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Tsv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "olfactory", version, about = "Detect smell experiences in tagged literary text")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "tsv")]
    pub format: Format,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a tagged corpus, or tokenize plain text, and print tagged TSV.
    Ingest(IngestArgs),
    /// Split a corpus by document into harvesting, validation and evaluation sets.
    Split(SplitArgs),
    /// Apply a pattern file to a corpus and dump the matches.
    Match(MatchArgs),
    /// Drive the bootstrapping cycle.
    #[command(subcommand)]
    Cycle(CycleCommand),
    /// Run the review service.
    #[command(subcommand)]
    Validate(ValidateCommand),
    /// Evaluate against a gold standard.
    #[command(subcommand)]
    Eval(EvalCommand),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    pub input: PathBuf,
    /// Treat the input as plain text.
    #[arg(long)]
    pub plain: bool,
    /// Document id for plain text input (defaults to the file stem).
    #[arg(long)]
    pub doc_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Document counts `harvesting,validation,evaluation`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct LexiconArg {
    /// Lexicon file with synonym groups; the bundled groups are used otherwise.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub patterns: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub lexicon: LexiconArg,
}

#[derive(Debug, Args)]
pub struct StateDir {
    #[arg(long)]
    pub state_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum CycleCommand {
    /// Open a cycle, initializing the state directory on first use, and
    /// print the new unseen extracts.
    Start(StartArgs),
    /// Show the phase, cycle log and candidates.
    Status(StateDir),
    /// Register hypothesized patterns from a pattern file and print their
    /// validation samples.
    Hypothesize(HypothesizeArgs),
    /// Print the validation samples of the open cycle.
    Samples(StateDir),
    /// Apply judgments, decide candidates and close the cycle.
    Advance(AdvanceArgs),
}

#[derive(Debug, Args)]
pub struct StartArgs {
    #[command(flatten)]
    pub dir: StateDir,
    #[arg(long)]
    pub harvesting: Option<PathBuf>,
    #[arg(long)]
    pub validation: Option<PathBuf>,
    /// Evaluation corpus and gold file, copied in for service metrics.
    #[arg(long, requires = "gold")]
    pub evaluation: Option<PathBuf>,
    #[arg(long, requires = "evaluation")]
    pub gold: Option<PathBuf>,
    #[arg(long, default_value = "adj_noun", value_parser = parse_approach)]
    pub approach: Approach,
    #[arg(long, default_value_t = 10)]
    pub sample_size: usize,
    #[arg(long, default_value_t = 0.7)]
    pub threshold: f64,
    /// Seed feature `lemma/POS`; repeatable. Defaults to aroma/NOUN.
    #[arg(long = "seed-word")]
    pub seed_words: Vec<String>,
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    /// Sift extracts through the keyword list.
    #[arg(long)]
    pub sift: bool,
    #[command(flatten)]
    pub lexicon: LexiconArg,
}

#[derive(Debug, Args)]
pub struct HypothesizeArgs {
    #[command(flatten)]
    pub dir: StateDir,
    #[arg(long)]
    pub patterns: PathBuf,
}

#[derive(Debug, Args)]
pub struct AdvanceArgs {
    #[command(flatten)]
    pub dir: StateDir,
    /// Judgment file `pattern_id doc_id sent_index label [judge [timestamp]]`.
    #[arg(long)]
    pub judgments: Option<PathBuf>,
    /// Pattern ids accepted without validation.
    #[arg(long, value_delimiter = ',')]
    pub exempt: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum ValidateCommand {
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub dir: StateDir,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
}

#[derive(Debug, Args)]
pub struct GoldArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    /// `experience` (d or o spans) or `description` (d spans).
    #[arg(long, default_value = "experience")]
    pub positive: PositiveClass,
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Precision-recall curve over pattern-precision cutoffs.
    Pr(PrArgs),
    /// Cohen's kappa of two label files, or the per-document matrix of a gold file.
    Kappa(KappaArgs),
    /// Keyword baseline predictions, scored when a gold file is given.
    Baseline(BaselineArgs),
    /// Paired significance test between two predictors.
    Significance(SignificanceArgs),
    /// Per-tag span counts of a gold file.
    Gold(GoldCountArgs),
}

#[derive(Debug, Args)]
pub struct PrArgs {
    #[command(flatten)]
    pub gold: GoldArgs,
    /// Pattern file with estimated precisions.
    #[arg(long, conflicts_with = "state_dir", required_unless_present = "state_dir")]
    pub patterns: Option<PathBuf>,
    /// Use the accepted patterns of a bootstrap state.
    #[arg(long)]
    pub state_dir: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Vec<f64>,
    #[command(flatten)]
    pub lexicon: LexiconArg,
}

#[derive(Debug, Args)]
pub struct KappaArgs {
    /// One label per line.
    #[arg(long, requires = "b", conflicts_with = "gold")]
    pub a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    #[arg(long, requires = "corpus", required_unless_present = "a")]
    pub gold: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value = "experience")]
    pub positive: PositiveClass,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long, default_value = "experience")]
    pub positive: PositiveClass,
    #[arg(long)]
    pub keywords: Option<PathBuf>,
    /// Match keyword lemmas only, without inflected forms.
    #[arg(long)]
    pub no_inflections: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Test {
    Mcnemar,
    Bootstrap,
}

#[derive(Debug, Args)]
pub struct SignificanceArgs {
    #[command(flatten)]
    pub gold: GoldArgs,
    /// Pattern file, or `keywords` for the keyword baseline.
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    /// Only patterns with estimated precision at least this are used.
    #[arg(long, default_value_t = 0.0)]
    pub cutoff: f64,
    #[arg(long, value_enum, default_value = "mcnemar")]
    pub test: Test,
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    #[command(flatten)]
    pub lexicon: LexiconArg,
}

#[derive(Debug, Args)]
pub struct GoldCountArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

fn parse_approach(s: &str) -> Result<Approach, String> {
    s.parse()
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

struct Ctx<'a> {
    format: Format,
    seed: u64,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn text(&mut self, s: &str) -> CliResult {
        self.out.write_all(s.as_bytes())?;
        Ok(())
    }

    fn json<T: Serialize>(&mut self, v: &T) -> CliResult {
        let s = serde_json::to_string_pretty(v)?;
        writeln!(self.out, "{s}")?;
        Ok(())
    }

    fn emit<T: Serialize>(&mut self, v: &T, tsv: impl FnOnce() -> String) -> CliResult {
        match self.format {
            Format::Json => self.json(v),
            Format::Tsv => {
                let s = tsv();
                self.text(&s)
            }
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let mut ctx = Ctx {
        format: cli.format,
        seed: cli.seed,
        out,
    };
    match &cli.command {
        Command::Ingest(a) => ingest(&mut ctx, a),
        Command::Split(a) => split(&mut ctx, a),
        Command::Match(a) => run_match(&mut ctx, a),
        Command::Cycle(c) => match c {
            CycleCommand::Start(a) => cycle_start(&mut ctx, a),
            CycleCommand::Status(a) => cycle_status(&mut ctx, &a.state_dir),
            CycleCommand::Hypothesize(a) => cycle_hypothesize(&mut ctx, a),
            CycleCommand::Samples(a) => {
                let engine = Engine::load(&a.state_dir)?;
                print_samples(&mut ctx, &engine)
            }
            CycleCommand::Advance(a) => cycle_advance(&mut ctx, a),
        },
        Command::Validate(ValidateCommand::Serve(a)) => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(service::serve(&a.dir.state_dir, a.port))?;
            Ok(())
        }
        Command::Eval(e) => match e {
            EvalCommand::Pr(a) => eval_pr(&mut ctx, a),
            EvalCommand::Kappa(a) => eval_kappa(&mut ctx, a),
            EvalCommand::Baseline(a) => eval_baseline(&mut ctx, a),
            EvalCommand::Significance(a) => eval_significance(&mut ctx, a),
            EvalCommand::Gold(a) => eval_gold(&mut ctx, a),
        },
    }
}

fn read(path: &Path) -> Result<String, Box<dyn Error>> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_corpus(path: &Path) -> Result<Corpus, Box<dyn Error>> {
    load_tagged(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_patterns(path: &Path) -> Result<Vec<PatternRecord>, Box<dyn Error>> {
    parse_pattern_file(&read(path)?).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_lexicon(arg: &LexiconArg) -> Result<Lexicon, Box<dyn Error>> {
    match &arg.lexicon {
        Some(p) => Lexicon::from_tsv(&read(p)?).map_err(|e| format!("{}: {e}", p.display()).into()),
        None => Ok(Lexicon::with_default_groups()),
    }
}

fn load_keywords(path: Option<&PathBuf>) -> Result<KeywordLexicon, Box<dyn Error>> {
    match path {
        Some(p) => KeywordLexicon::parse(&read(p)?).map_err(|e| format!("{}: {e}", p.display()).into()),
        None => Ok(KeywordLexicon::bundled()),
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into())
}

fn corpus_summary(c: &Corpus) -> serde_json::Value {
    json!({
        "name": c.name,
        "documents": c.documents.len(),
        "sentences": c.sentence_count(),
        "tokens": c.sentences().map(|s| s.len()).sum::<usize>(),
    })
}

fn ingest(ctx: &mut Ctx, a: &IngestArgs) -> CliResult {
    let corpus = if a.plain {
        let name = file_stem(&a.input);
        let doc = a.doc_id.clone().unwrap_or_else(|| name.clone());
        ingest_plain(&name, &doc, &read(&a.input)?)?
    } else {
        load_corpus(&a.input)?
    };
    ctx.emit(&corpus_summary(&corpus), || write_tagged(&corpus))
}

fn split(ctx: &mut Ctx, a: &SplitArgs) -> CliResult {
    let [hs, vs, es] = a.sizes[..] else {
        return Err(format!("--sizes takes three counts, got {}", a.sizes.len()).into());
    };
    let corpus = load_corpus(&a.corpus)?;
    let (h, v, e) = split_corpus(&corpus, (hs, vs, es), ctx.seed)?;
    std::fs::create_dir_all(&a.out_dir)?;
    let mut rows = Vec::new();
    for part in [&h, &v, &e] {
        let path = a.out_dir.join(format!("{}.tsv", part.name));
        std::fs::write(&path, write_tagged(part))?;
        rows.push((path.display().to_string(), part.documents.len(), part.sentence_count()));
    }
    let json: Vec<_> = rows
        .iter()
        .map(|(p, d, s)| json!({ "path": p, "documents": d, "sentences": s }))
        .collect();
    ctx.emit(&json, || {
        let mut s = String::from("path\tdocuments\tsentences\n");
        for (p, d, n) in &rows {
            let _ = writeln!(s, "{p}\t{d}\t{n}");
        }
        s
    })
}

fn run_match(ctx: &mut Ctx, a: &MatchArgs) -> CliResult {
    let patterns = load_patterns(&a.patterns)?;
    let lexicon = load_lexicon(&a.lexicon)?;
    let corpus = load_corpus(&a.corpus)?;
    let matches = match_corpus(&patterns, &lexicon, &corpus)?;
    ctx.emit(&matches, || write_match_dump(&matches))
}

fn parse_seed_word(s: &str) -> Result<Feature, Box<dyn Error>> {
    let (lemma, pos) = s
        .rsplit_once('/')
        .ok_or_else(|| format!("seed word `{s}` must be written lemma/POS"))?;
    let pos: Pos = pos
        .parse()
        .map_err(|e: crate::corpus::UnknownPos| format!("seed word `{s}`: unknown POS tag `{}`", e.0))?;
    Ok(Feature::single(lemma, pos))
}

fn cycle_start(ctx: &mut Ctx, a: &StartArgs) -> CliResult {
    let dir = &a.dir.state_dir;
    let mut engine = if Engine::state_exists(dir) {
        let mut e = Engine::load(dir)?;
        if a.sift {
            e.set_sift(true);
        }
        e
    } else {
        let (Some(h), Some(v)) = (&a.harvesting, &a.validation) else {
            return Err(format!(
                "{} holds no bootstrap state; pass --harvesting and --validation to initialize it",
                dir.display()
            )
            .into());
        };
        let mut config = BootstrapConfig::for_approach(a.approach);
        config.validation_sample_size = a.sample_size;
        config.acceptance_threshold = a.threshold;
        config.sift_with_keywords = a.sift;
        config.seed = ctx.seed;
        if !a.seed_words.is_empty() {
            config.seed_entries = a
                .seed_words
                .iter()
                .map(|w| parse_seed_word(w).map(LexiconEntry::seed))
                .collect::<Result<_, _>>()?;
        }
        let engine = Engine::new(config, load_corpus(h)?, load_corpus(v)?, load_lexicon(&a.lexicon)?)?
            .with_keywords(load_keywords(a.keywords.as_ref())?);
        if let (Some(ev), Some(g)) = (&a.evaluation, &a.gold) {
            std::fs::create_dir_all(dir)?;
            let corpus = load_corpus(ev)?;
            load_gold(g, Some(&corpus)).map_err(|e| format!("{}: {e}", g.display()))?;
            std::fs::write(dir.join(service::EVALUATION_CORPUS), write_tagged(&corpus))?;
            std::fs::copy(g, dir.join(service::EVALUATION_GOLD))?;
        }
        engine
    };
    engine.start_cycle()?;
    engine.save(dir)?;
    let draft = engine.draft().expect("cycle just opened");
    let extracts = engine.draft_extracts(draft.sifted);
    let view = json!({
        "cycle": draft.cycle,
        "lexicon_entries": draft.lexicon_entries,
        "new_unseen_extracts": draft.new_unseen_extracts,
        "sifted": draft.sifted,
        "extracts": extracts,
    });
    ctx.emit(&view, || {
        let mut s = String::from("doc_id\tsent_index\tsource\ttext\n");
        for e in &extracts {
            let src = match &e.source {
                crate::lexicon::ExtractSource::Feature(f) | crate::lexicon::ExtractSource::Pattern(f) => f,
            };
            let _ = writeln!(s, "{}\t{}\t{}\t{}", e.doc_id, e.sent_index, src, e.text);
        }
        s
    })
}

fn cycle_status(ctx: &mut Ctx, dir: &Path) -> CliResult {
    let engine = Engine::load(dir)?;
    let candidates: Vec<_> = engine
        .candidates()
        .iter()
        .map(|c| {
            json!({
                "id": c.record.id,
                "cycle": c.cycle,
                "kind": c.record.kind,
                "status": c.record.status,
                "precision": engine.precision_of(&c.record.id),
                "sample": c.sample.len(),
                "exempt": c.exempt,
            })
        })
        .collect();
    let view = json!({
        "phase": engine.phase(),
        "cycle": engine.cycle_number(),
        "lexicon_size": engine.lexicon().len(),
        "ledger_size": engine.ledger().len(),
        "cycles": engine.cycles(),
        "candidates": candidates,
    });
    ctx.emit(&view, || {
        let mut s = format!(
            "phase\t{}\ncycle\t{}\nlexicon_size\t{}\nledger_size\t{}\n\n{}",
            engine.phase(),
            engine.cycle_number(),
            engine.lexicon().len(),
            engine.ledger().len(),
            engine.cycles_tsv()
        );
        s.push_str("\nid\tcycle\tkind\tstatus\tprecision\tsample\texempt\n");
        for c in engine.candidates() {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                c.record.id,
                c.cycle,
                c.record.kind,
                c.record.status,
                format_fraction(engine.precision_of(&c.record.id)),
                c.sample.len(),
                c.exempt
            );
        }
        s
    })
}

fn print_samples(ctx: &mut Ctx, engine: &Engine) -> CliResult {
    let rows: Vec<_> = engine
        .current_candidates()
        .flat_map(|c| c.sample.iter().map(move |e| (c, e)))
        .collect();
    let json: Vec<_> = rows
        .iter()
        .map(|(c, e)| {
            json!({
                "pattern_id": c.record.id,
                "status": c.record.status,
                "doc_id": e.doc_id,
                "sent_index": e.sent_index,
                "span": e.span,
                "captures": e.captures,
                "text": e.text,
            })
        })
        .collect();
    ctx.emit(&json, || {
        let mut s = String::from("pattern_id\tdoc_id\tsent_index\tstart\tend\ttext\n");
        for (c, e) in &rows {
            let (st, en) = e.span.unwrap_or((0, 0));
            let _ = writeln!(s, "{}\t{}\t{}\t{st}\t{en}\t{}", c.record.id, e.doc_id, e.sent_index, e.text);
        }
        s
    })
}

fn cycle_hypothesize(ctx: &mut Ctx, a: &HypothesizeArgs) -> CliResult {
    let dir = &a.dir.state_dir;
    let mut engine = Engine::load(dir)?;
    for p in load_patterns(&a.patterns)? {
        engine.hypothesize(Some(&p.id), &p.source, p.kind, p.approach)?;
    }
    engine.save(dir)?;
    print_samples(ctx, &engine)
}

fn cycle_advance(ctx: &mut Ctx, a: &AdvanceArgs) -> CliResult {
    let dir = &a.dir.state_dir;
    let mut engine = Engine::load(dir)?;
    if let Some(j) = &a.judgments {
        let judgments = load_judgment_file(&read(j)?).map_err(|e| format!("{}: {e}", j.display()))?;
        for judgment in judgments {
            engine.submit_judgment(judgment)?;
        }
    }
    let record = engine.advance(&a.exempt)?;
    engine.save(dir)?;
    ctx.emit(&record, || {
        format!("{}\n{}\n", crate::bootstrap::CycleRecord::HEADER, record.to_tsv_row())
    })
}

fn gold_inputs(g: &GoldArgs) -> Result<(Corpus, BTreeSet<SentenceRef>), Box<dyn Error>> {
    let corpus = load_corpus(&g.corpus)?;
    let gold = load_gold(&g.gold, Some(&corpus)).map_err(|e| format!("{}: {e}", g.gold.display()))?;
    Ok((corpus, gold_positive(&gold, g.positive)))
}

fn eval_pr(ctx: &mut Ctx, a: &PrArgs) -> CliResult {
    let (corpus, gold) = gold_inputs(&a.gold)?;
    let (patterns, lexicon) = match (&a.patterns, &a.state_dir) {
        (Some(p), _) => (load_patterns(p)?, load_lexicon(&a.lexicon)?),
        (None, Some(d)) => {
            let e = Engine::load(d)?;
            let pats = e.identification_patterns().into_iter().cloned().collect();
            (pats, e.lexicon().clone())
        }
        (None, None) => unreachable!("clap requires one of --patterns/--state-dir"),
    };
    let cutoffs = if a.cutoffs.is_empty() {
        default_cutoffs()
    } else {
        a.cutoffs.clone()
    };
    let points = pr_curve(&patterns, &lexicon, &corpus, &gold, &cutoffs)?;
    ctx.emit(&points, || write_pr_table(&points))
}

fn read_labels(path: &Path) -> Result<Vec<String>, Box<dyn Error>> {
    Ok(read(path)?
        .lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

fn eval_kappa(ctx: &mut Ctx, a: &KappaArgs) -> CliResult {
    if let (Some(pa), Some(pb)) = (&a.a, &a.b) {
        let k = cohens_kappa(&read_labels(pa)?, &read_labels(pb)?)?;
        return ctx.emit(&k, || {
            format!(
                "kappa\t{:?}\nobserved\t{:?}\nexpected\t{:?}\nband\t{}\n",
                k.kappa, k.observed, k.expected, k.band
            )
        });
    }
    let (Some(g), Some(c)) = (&a.gold, &a.corpus) else {
        unreachable!("clap requires --a/--b or --gold/--corpus");
    };
    let corpus = load_corpus(c)?;
    let gold = load_gold(g, Some(&corpus)).map_err(|e| format!("{}: {e}", g.display()))?;
    let rows = kappa_matrix(&gold, &corpus, a.positive);
    ctx.emit(&rows, || write_kappa_matrix(&rows))
}

fn eval_baseline(ctx: &mut Ctx, a: &BaselineArgs) -> CliResult {
    let corpus = load_corpus(&a.corpus)?;
    let mut kw = load_keywords(a.keywords.as_ref())?;
    kw.set_expand_inflections(!a.no_inflections);
    let pred = keyword_baseline(&corpus, &kw);
    match &a.gold {
        Some(g) => {
            let gold = load_gold(g, Some(&corpus)).map_err(|e| format!("{}: {e}", g.display()))?;
            let positive = gold_positive(&gold, a.positive);
            let pr = precision_recall(&pred, &positive, &corpus.universe());
            ctx.emit(&pr, || {
                format!(
                    "predicted\t{}\nprecision\t{}\nrecall\t{}\ntp\t{}\nfp\t{}\nfn\t{}\n",
                    pred.len(),
                    format_fraction(pr.precision),
                    format_fraction(Some(pr.recall)),
                    pr.tp,
                    pr.fp,
                    pr.fn_
                )
            })
        }
        None => ctx.emit(&pred, || {
            let mut s = String::from("doc_id\tsent_index\n");
            for r in &pred {
                let _ = writeln!(s, "{}\t{}", r.doc_id, r.sent_index);
            }
            s
        }),
    }
}

fn predictor(
    spec: &str,
    cutoff: f64,
    lexicon: &Lexicon,
    corpus: &Corpus,
) -> Result<BTreeSet<SentenceRef>, Box<dyn Error>> {
    if spec == "keywords" {
        return Ok(keyword_baseline(corpus, &KeywordLexicon::bundled()));
    }
    let pats: Vec<PatternRecord> = load_patterns(Path::new(spec))?
        .into_iter()
        .filter(|p| is_active(p, cutoff))
        .collect();
    Ok(predict_records(&pats, lexicon, corpus)?)
}

fn eval_significance(ctx: &mut Ctx, a: &SignificanceArgs) -> CliResult {
    let (corpus, gold) = gold_inputs(&a.gold)?;
    let lexicon = load_lexicon(&a.lexicon)?;
    let pa = predictor(&a.a, a.cutoff, &lexicon, &corpus)?;
    let pb = predictor(&a.b, a.cutoff, &lexicon, &corpus)?;
    match a.test {
        Test::Mcnemar => {
            let m = mcnemar_exact(&pa, &pb, &gold, &corpus.universe());
            ctx.emit(&m, || format!("test\tmcnemar\nb\t{}\nc\t{}\np_value\t{:?}\n", m.b, m.c, m.p_value))
        }
        Test::Bootstrap => {
            let r = bootstrap_recall_test(&pa, &pb, &gold, a.iterations, ctx.seed);
            ctx.emit(&r, || {
                format!(
                    "test\tbootstrap\nrecall_a\t{:?}\nrecall_b\t{:?}\ndifference\t{:?}\np_value\t{:?}\niterations\t{}\n",
                    r.recall_a, r.recall_b, r.difference, r.p_value, r.iterations
                )
            })
        }
    }
}

fn eval_gold(ctx: &mut Ctx, a: &GoldCountArgs) -> CliResult {
    let corpus = a.corpus.as_deref().map(load_corpus).transpose()?;
    let gold = load_gold(&a.gold, corpus.as_ref()).map_err(|e| format!("{}: {e}", a.gold.display()))?;
    let counts = tag_counts(&gold);
    let json: std::collections::BTreeMap<String, usize> = counts.iter().map(|(t, n)| (t.to_string(), *n)).collect();
    ctx.emit(&json, || {
        let mut s = String::new();
        for (t, n) in &counts {
            let _ = writeln!(s, "{t}\t{n}");
        }
        s
    })
}

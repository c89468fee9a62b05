//! On-disk state directory.
//!
//! ```text
//! engine.json      config, phase and the open cycle draft
//! harvesting.tsv   tagged corpora, copied in at initialization
//! validation.tsv
//! keywords.tsv
//! lexicon.tsv      synonym groups and bootstrapped features
//! ledger.tsv       sentences already surfaced
//! patterns.tsv     every hypothesized pattern with its status
//! judgments.tsv    validation judgments
//! cycles.tsv       one row per closed cycle
//! ```
//!
//! Validation samples are not stored: they are recomputed on load, which is
//! deterministic given the seed and the corpora.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    sample_validation, BootstrapConfig, BootstrapError, Candidate, CycleDraft, CycleRecord, Engine, Label,
    ValidationJudgment,
};
use crate::corpus::{parse_tagged, write_tagged, KeywordLexicon};
use crate::lexicon::{ExtractLedger, Lexicon};
use crate::matcher::CompiledPattern;
use crate::pattern::{Approach, PatternKind, PatternRecord, PatternStatus};

pub const STATE_FILES: &[&str] = &[
    "engine.json",
    "harvesting.tsv",
    "validation.tsv",
    "keywords.tsv",
    "lexicon.tsv",
    "ledger.tsv",
    "patterns.tsv",
    "judgments.tsv",
    "cycles.tsv",
];

const FORMAT: u32 = 1;

#[derive(Serialize, Deserialize)]
struct EngineFile {
    format: u32,
    config: BootstrapConfig,
    harvesting_name: String,
    validation_name: String,
    expand_inflections: bool,
    draft: Option<CycleDraft>,
}

const PATTERNS_HEADER: &str = "id\tkind\tapproach\tstatus\tprecision\tcycle\texempt\tsource";
const JUDGMENTS_HEADER: &str = "pattern_id\tdoc_id\tsent_index\tlabel\tjudge\ttimestamp";

fn io_err(path: &Path, e: impl std::fmt::Display) -> BootstrapError {
    BootstrapError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn corrupt(file: &str, message: impl Into<String>) -> BootstrapError {
    BootstrapError::Corrupt {
        file: file.to_string(),
        message: message.into(),
    }
}

fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), BootstrapError> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| io_err(&path, e))
}

fn read(dir: &Path, name: &str) -> Result<String, BootstrapError> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| io_err(&path, e))
}

fn patterns_tsv(candidates: &[Candidate]) -> String {
    let mut out = format!("{PATTERNS_HEADER}\n");
    for c in candidates {
        let r = &c.record;
        let p = r.estimated_precision.map_or("NA".to_string(), |p| p.to_string());
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.id, r.kind, r.approach, r.status, p, c.cycle, c.exempt, r.source
        ));
    }
    out
}

fn judgments_tsv(judgments: &[ValidationJudgment]) -> String {
    let mut out = format!("{JUDGMENTS_HEADER}\n");
    for j in judgments {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            j.pattern_id, j.doc_id, j.sent_index, j.label, j.judge, j.timestamp
        ));
    }
    out
}

pub(super) fn cycles_tsv(cycles: &[CycleRecord]) -> String {
    let mut out = format!("{}\n", CycleRecord::HEADER);
    for c in cycles {
        out.push_str(&c.to_tsv_row());
        out.push('\n');
    }
    out
}

fn data_lines<'a>(text: &'a str, header: &str) -> impl Iterator<Item = (usize, String)> + 'a {
    let header = header.to_string();
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim_end_matches('\r').to_string()))
        .filter(move |(_, l)| !l.trim().is_empty() && !l.starts_with('#') && *l != header)
}

fn parse_bool(s: &str) -> Result<bool, String> {
    s.parse().map_err(|_| format!("expected true or false, found `{s}`"))
}

fn parse_patterns(text: &str) -> Result<Vec<(PatternRecord, usize, bool)>, BootstrapError> {
    let mut out = Vec::new();
    for (n, line) in data_lines(text, PATTERNS_HEADER) {
        let err = |m: String| corrupt("patterns.tsv", format!("line {n}: {m}"));
        let cols: Vec<&str> = line.splitn(8, '\t').collect();
        if cols.len() != 8 {
            return Err(err(format!("expected 8 columns, found {}", cols.len())));
        }
        let kind: PatternKind = cols[1].parse().map_err(err)?;
        let approach: Approach = cols[2].parse().map_err(err)?;
        let status: PatternStatus = cols[3].parse().map_err(err)?;
        let precision = match cols[4] {
            "NA" => None,
            p => Some(p.parse::<f64>().map_err(|_| err(format!("bad precision `{p}`")))?),
        };
        let cycle: usize = cols[5].parse().map_err(|_| err(format!("bad cycle `{}`", cols[5])))?;
        let exempt = parse_bool(cols[6]).map_err(err)?;
        let mut record = PatternRecord::new(cols[0], cols[7], kind, approach).map_err(|e| err(e.to_string()))?;
        record.status = status;
        record.estimated_precision = precision;
        out.push((record, cycle, exempt));
    }
    Ok(out)
}

fn parse_judgment_line(n: usize, line: &str, min_cols: usize) -> Result<ValidationJudgment, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() < min_cols || cols.len() > 6 {
        return Err(format!(
            "line {n}: expected {min_cols} to 6 tab-separated columns, found {}",
            cols.len()
        ));
    }
    let sent_index = cols[2]
        .parse()
        .map_err(|_| format!("line {n}: bad sentence index `{}`", cols[2]))?;
    let label: Label = cols[3].parse().map_err(|e| format!("line {n}: {e}"))?;
    let timestamp = match cols.get(5) {
        Some(t) => t.parse().map_err(|_| format!("line {n}: bad timestamp `{t}`"))?,
        None => 0,
    };
    Ok(ValidationJudgment {
        pattern_id: cols[0].to_string(),
        doc_id: cols[1].to_string(),
        sent_index,
        label,
        judge: cols.get(4).unwrap_or(&"cli").to_string(),
        timestamp,
    })
}

/// Reads a headless judgment file:
/// `pattern_id<TAB>doc_id<TAB>sent_index<TAB>label[<TAB>judge[<TAB>timestamp]]`.
/// A header line and `#` comments are skipped.
pub fn load_judgment_file(text: &str) -> Result<Vec<ValidationJudgment>, String> {
    data_lines(text, JUDGMENTS_HEADER)
        .map(|(n, line)| parse_judgment_line(n, &line, 4))
        .collect()
}

impl Engine {
    pub fn state_exists(dir: &Path) -> bool {
        dir.join("engine.json").is_file()
    }

    /// Writes every state file. Each file is replaced atomically.
    pub fn save(&self, dir: &Path) -> Result<(), BootstrapError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let engine = EngineFile {
            format: FORMAT,
            config: self.config.clone(),
            harvesting_name: self.harvesting.name.clone(),
            validation_name: self.validation.name.clone(),
            expand_inflections: self.keywords.expands_inflections(),
            draft: self.draft.clone(),
        };
        let json = serde_json::to_string_pretty(&engine).map_err(|e| io_err(dir, e))?;
        write_atomic(dir, "harvesting.tsv", &write_tagged(&self.harvesting))?;
        write_atomic(dir, "validation.tsv", &write_tagged(&self.validation))?;
        write_atomic(dir, "keywords.tsv", &self.keywords.to_tsv())?;
        write_atomic(dir, "lexicon.tsv", &self.lexicon.to_tsv())?;
        write_atomic(dir, "ledger.tsv", &self.ledger.to_tsv())?;
        write_atomic(dir, "patterns.tsv", &patterns_tsv(&self.candidates))?;
        write_atomic(dir, "judgments.tsv", &judgments_tsv(&self.judgments))?;
        write_atomic(dir, "cycles.tsv", &cycles_tsv(&self.cycles))?;
        write_atomic(dir, "engine.json", &(json + "\n"))
    }

    pub fn load(dir: &Path) -> Result<Self, BootstrapError> {
        let engine: EngineFile =
            serde_json::from_str(&read(dir, "engine.json")?).map_err(|e| corrupt("engine.json", e.to_string()))?;
        if engine.format != FORMAT {
            return Err(corrupt("engine.json", format!("unsupported format {}", engine.format)));
        }
        engine.config.validate()?;
        let harvesting = parse_tagged(&engine.harvesting_name, &read(dir, "harvesting.tsv")?)
            .map_err(|e| corrupt("harvesting.tsv", e.to_string()))?;
        let validation = parse_tagged(&engine.validation_name, &read(dir, "validation.tsv")?)
            .map_err(|e| corrupt("validation.tsv", e.to_string()))?;
        let mut keywords =
            KeywordLexicon::parse(&read(dir, "keywords.tsv")?).map_err(|e| corrupt("keywords.tsv", e.to_string()))?;
        keywords.set_expand_inflections(engine.expand_inflections);
        let lexicon =
            Lexicon::from_tsv(&read(dir, "lexicon.tsv")?).map_err(|e| corrupt("lexicon.tsv", e.to_string()))?;
        let ledger =
            ExtractLedger::from_tsv(&read(dir, "ledger.tsv")?).map_err(|e| corrupt("ledger.tsv", e.to_string()))?;
        let judgments = data_lines(&read(dir, "judgments.tsv")?, JUDGMENTS_HEADER)
            .map(|(n, l)| parse_judgment_line(n, &l, 6))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| corrupt("judgments.tsv", e))?;
        let cycles = parse_cycles(&read(dir, "cycles.tsv")?)?;

        let mut candidates = Vec::new();
        for (record, cycle, exempt) in parse_patterns(&read(dir, "patterns.tsv")?)? {
            let compiled = CompiledPattern::from_record(&record, &lexicon)
                .map_err(|e| corrupt("patterns.tsv", e.to_string()))?;
            let sample = sample_validation(
                &compiled,
                &validation,
                engine.config.validation_sample_size,
                engine.config.seed,
            );
            candidates.push(Candidate {
                record,
                cycle,
                sample,
                exempt,
            });
        }
        let expected_cycle = engine.draft.as_ref().map_or(cycles.len(), |d| d.cycle);
        if expected_cycle != cycles.len() {
            return Err(corrupt(
                "engine.json",
                format!("open cycle {expected_cycle} but {} cycles recorded", cycles.len()),
            ));
        }
        Ok(Engine {
            config: engine.config,
            harvesting,
            validation,
            keywords,
            lexicon,
            ledger,
            candidates,
            judgments,
            cycles,
            draft: engine.draft,
        })
    }

    /// The cycle log as written to `cycles.tsv`.
    pub fn cycles_tsv(&self) -> String {
        cycles_tsv(&self.cycles)
    }
}

fn parse_cycles(text: &str) -> Result<Vec<CycleRecord>, BootstrapError> {
    let mut out = Vec::new();
    for (n, line) in data_lines(text, CycleRecord::HEADER) {
        let err = |m: String| corrupt("cycles.tsv", format!("line {n}: {m}"));
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 8 {
            return Err(err(format!("expected 8 columns, found {}", cols.len())));
        }
        let num = |i: usize| -> Result<usize, BootstrapError> {
            cols[i].parse().map_err(|_| err(format!("bad number `{}`", cols[i])))
        };
        out.push(CycleRecord {
            cycle: num(0)?,
            lexicon_entries: num(1)?,
            new_unseen_extracts: num(2)?,
            hypothesized_patterns: num(3)?,
            new_identification_patterns: num(4)?,
            new_extraction_patterns: num(5)?,
            sifted: parse_bool(cols[6]).map_err(err)?,
            exempt: parse_bool(cols[7]).map_err(err)?,
        });
    }
    Ok(out)
}

//! The iterative bootstrapping cycle.
//!
//! One cycle runs:
//!
//! 1. [`Engine::start_cycle`] retrieves unseen harvesting sentences matching
//!    the lexicon (optionally sifted by the keyword list).
//! 2. The annotator hypothesizes patterns ([`Engine::hypothesize`]). Each one
//!    gets a deterministic validation sample drawn from the validation corpus;
//!    a pattern with no validation match is removed straight away.
//! 3. The annotator labels sample extracts as true positive, false positive
//!    or unknown ([`Engine::submit_judgment`]).
//! 4. [`Engine::advance`] accepts patterns whose estimated precision reaches
//!    the threshold (or that are explicitly exempted), harvests complement
//!    pairs with the accepted extraction patterns and closes the cycle.
//!
//! The engine is a single-writer state machine; callers serialize access.

mod persist;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use persist::{load_judgment_file, STATE_FILES};

use crate::corpus::{keyword_scan, Corpus, KeywordLexicon, Pos, SentenceRef};
use crate::lexicon::{
    find_feature_extracts, Extract, ExtractLedger, ExtractSource, Feature, Lexicon, LexiconEntry,
};
use crate::matcher::{CompiledPattern, MatchError};
use crate::pattern::{Approach, PatternError, PatternKind, PatternRecord, PatternStatus};

#[derive(Debug, Error)]
pub enum BootstrapError {
    #[error("the lexicon is empty; seed it before starting a cycle")]
    EmptyLexicon,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("operation requires the {expected} phase, engine is {actual}")]
    WrongPhase { expected: Phase, actual: Phase },
    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),
    #[error("pattern id `{0}` already exists")]
    DuplicatePattern(String),
    #[error("pattern `{0}` is not open for judgments")]
    PatternClosed(String),
    #[error("sentence {doc_id}#{sent_index} is not in the validation sample of `{pattern}`")]
    NotInSample {
        pattern: String,
        doc_id: String,
        sent_index: usize,
    },
    #[error("candidates without any judgment: {}", .0.join(", "))]
    Blocked(Vec<String>),
    #[error("pattern `{0}` has not been validated and cannot be accepted")]
    NotAcceptable(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error("state file {file}: {message}")]
    Corrupt { file: String, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub approach: Approach,
    pub validation_sample_size: usize,
    pub acceptance_threshold: f64,
    pub sift_with_keywords: bool,
    pub seed_entries: Vec<LexiconEntry>,
    /// Drives validation sampling.
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            approach: Approach::AdjNoun,
            validation_sample_size: 10,
            acceptance_threshold: 0.7,
            sift_with_keywords: false,
            seed_entries: vec![LexiconEntry::seed(Feature::single("aroma", Pos::Noun))],
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn for_approach(approach: Approach) -> Self {
        BootstrapConfig {
            approach,
            ..BootstrapConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), BootstrapError> {
        if !(self.acceptance_threshold > 0.0 && self.acceptance_threshold <= 1.0) {
            return Err(BootstrapError::InvalidConfig(format!(
                "acceptance threshold {} outside (0, 1]",
                self.acceptance_threshold
            )));
        }
        if self.validation_sample_size == 0 {
            return Err(BootstrapError::InvalidConfig(
                "validation sample size must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Tp,
    Fp,
    Unknown,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Tp => "tp",
            Label::Fp => "fp",
            Label::Unknown => "unknown",
        }
    }
}

impl FromStr for Label {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tp" => Ok(Label::Tp),
            "fp" => Ok(Label::Fp),
            "unknown" => Ok(Label::Unknown),
            other => Err(format!("unknown label `{other}` (expected tp, fp or unknown)")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationJudgment {
    pub pattern_id: String,
    pub doc_id: String,
    pub sent_index: usize,
    pub label: Label,
    pub judge: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl ValidationJudgment {
    fn key(&self) -> (&str, &str, usize, &str) {
        (&self.pattern_id, &self.doc_id, self.sent_index, &self.judge)
    }
}

/// `tp / (tp + fp)`; unknown labels abstain. `None` when nothing decisive
/// was recorded.
pub fn estimate_precision<'a>(judgments: impl IntoIterator<Item = &'a ValidationJudgment>) -> Option<f64> {
    let (tp, fp) = judgments
        .into_iter()
        .fold((0usize, 0usize), |(tp, fp), j| match j.label {
            Label::Tp => (tp + 1, fp),
            Label::Fp => (tp, fp + 1),
            Label::Unknown => (tp, fp),
        });
    (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub tp: usize,
    pub fp: usize,
    pub unknown: usize,
}

pub fn tally<'a>(judgments: impl IntoIterator<Item = &'a ValidationJudgment>) -> Tally {
    let mut t = Tally::default();
    for j in judgments {
        match j.label {
            Label::Tp => t.tp += 1,
            Label::Fp => t.fp += 1,
            Label::Unknown => t.unknown += 1,
        }
    }
    t
}

/// One row of the cycle log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub cycle: usize,
    /// Lexicon size when the cycle started.
    pub lexicon_entries: usize,
    pub new_unseen_extracts: usize,
    pub hypothesized_patterns: usize,
    pub new_identification_patterns: usize,
    pub new_extraction_patterns: usize,
    pub sifted: bool,
    /// Some accepted pattern bypassed validation.
    pub exempt: bool,
}

impl CycleRecord {
    pub const HEADER: &'static str = "cycle\tlexicon_entries\tnew_unseen_extracts\thypothesized_patterns\tnew_identification_patterns\tnew_extraction_patterns\tsifted\texempt";

    pub fn to_tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.cycle,
            self.lexicon_entries,
            self.new_unseen_extracts,
            self.hypothesized_patterns,
            self.new_identification_patterns,
            self.new_extraction_patterns,
            self.sifted,
            self.exempt
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Idle,
    Reviewing,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Idle => "idle",
            Phase::Reviewing => "reviewing",
        })
    }
}

/// A hypothesized pattern and its validation sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub record: PatternRecord,
    pub cycle: usize,
    pub sample: Vec<Extract>,
    pub exempt: bool,
}

/// An open cycle. `extracts` holds every newly retrieved sentence; when
/// `sifted` is set, `new_unseen_extracts` counts only those passing the
/// keyword scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleDraft {
    pub cycle: usize,
    pub lexicon_entries: usize,
    pub new_unseen_extracts: usize,
    pub sifted: bool,
    pub extracts: Vec<Extract>,
}

fn stable_hash(s: &str) -> u64 {
    // FNV-1a
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Up to `n` distinct validation sentences matched by the pattern, chosen
/// uniformly under `seed` and returned in corpus order.
pub fn sample_validation(pattern: &CompiledPattern, validation: &Corpus, n: usize, seed: u64) -> Vec<Extract> {
    let matched: Vec<Extract> = validation
        .sentences()
        .filter_map(|s| {
            let m = pattern.match_sentence(s).into_iter().next()?;
            let mut e = Extract::from_sentence(s, ExtractSource::Pattern(pattern.id().to_string()));
            e.span = Some((m.start, m.end));
            e.captures = m.captures;
            Some(e)
        })
        .collect();
    if matched.len() <= n {
        return matched;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stable_hash(pattern.id()));
    let mut picked = rand::seq::index::sample(&mut rng, matched.len(), n).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| matched[i].clone()).collect()
}

#[derive(Debug, Clone)]
pub struct Engine {
    config: BootstrapConfig,
    harvesting: Corpus,
    validation: Corpus,
    keywords: KeywordLexicon,
    lexicon: Lexicon,
    ledger: ExtractLedger,
    candidates: Vec<Candidate>,
    judgments: Vec<ValidationJudgment>,
    cycles: Vec<CycleRecord>,
    draft: Option<CycleDraft>,
}

impl Engine {
    /// `lexicon` supplies synonym groups (and possibly earlier entries); the
    /// configured seed entries are added to it.
    pub fn new(
        config: BootstrapConfig,
        harvesting: Corpus,
        validation: Corpus,
        mut lexicon: Lexicon,
    ) -> Result<Self, BootstrapError> {
        config.validate()?;
        lexicon.add_entries(config.seed_entries.iter().cloned());
        Ok(Engine {
            config,
            harvesting,
            validation,
            keywords: KeywordLexicon::bundled(),
            lexicon,
            ledger: ExtractLedger::default(),
            candidates: Vec::new(),
            judgments: Vec::new(),
            cycles: Vec::new(),
            draft: None,
        })
    }

    pub fn with_keywords(mut self, kw: KeywordLexicon) -> Self {
        self.keywords = kw;
        self
    }

    pub fn config(&self) -> &BootstrapConfig {
        &self.config
    }

    pub fn set_sift(&mut self, on: bool) {
        self.config.sift_with_keywords = on;
    }

    pub fn harvesting(&self) -> &Corpus {
        &self.harvesting
    }

    pub fn validation(&self) -> &Corpus {
        &self.validation
    }

    pub fn keywords(&self) -> &KeywordLexicon {
        &self.keywords
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn ledger(&self) -> &ExtractLedger {
        &self.ledger
    }

    pub fn cycles(&self) -> &[CycleRecord] {
        &self.cycles
    }

    pub fn draft(&self) -> Option<&CycleDraft> {
        self.draft.as_ref()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn judgments(&self) -> &[ValidationJudgment] {
        &self.judgments
    }

    pub fn phase(&self) -> Phase {
        if self.draft.is_some() {
            Phase::Reviewing
        } else {
            Phase::Idle
        }
    }

    /// Index of the next cycle to start, or of the open one.
    pub fn cycle_number(&self) -> usize {
        self.draft.as_ref().map_or(self.cycles.len(), |d| d.cycle)
    }

    pub fn candidate(&self, id: &str) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.record.id == id)
    }

    /// Candidates hypothesized in the open cycle.
    pub fn current_candidates(&self) -> impl Iterator<Item = &Candidate> {
        let cycle = self.draft.as_ref().map(|d| d.cycle);
        self.candidates.iter().filter(move |c| Some(c.cycle) == cycle)
    }

    pub fn judgments_for<'a>(&'a self, pattern_id: &'a str) -> impl Iterator<Item = &'a ValidationJudgment> + 'a {
        self.judgments.iter().filter(move |j| j.pattern_id == pattern_id)
    }

    pub fn precision_of(&self, pattern_id: &str) -> Option<f64> {
        estimate_precision(self.judgments_for(pattern_id))
    }

    /// Accepted patterns: the identification set.
    pub fn identification_patterns(&self) -> Vec<&PatternRecord> {
        self.candidates
            .iter()
            .filter(|c| c.record.status == PatternStatus::Validated)
            .map(|c| &c.record)
            .collect()
    }

    /// Accepted extraction patterns, always a subset of the identification set.
    pub fn extraction_patterns(&self) -> Vec<&PatternRecord> {
        self.identification_patterns()
            .into_iter()
            .filter(|r| r.kind == PatternKind::Extraction)
            .collect()
    }

    fn expect_phase(&self, expected: Phase) -> Result<(), BootstrapError> {
        let actual = self.phase();
        if actual != expected {
            return Err(BootstrapError::WrongPhase { expected, actual });
        }
        Ok(())
    }

    /// Opens a cycle: retrieves unseen harvesting extracts for every lexicon
    /// feature, sifting them through the keyword list when configured.
    pub fn start_cycle(&mut self) -> Result<&CycleDraft, BootstrapError> {
        self.expect_phase(Phase::Idle)?;
        if self.lexicon.is_empty() {
            return Err(BootstrapError::EmptyLexicon);
        }
        let lexicon_entries = self.lexicon.len();
        let extracts = find_feature_extracts(&self.lexicon, &self.harvesting, &mut self.ledger);
        let sifted = self.config.sift_with_keywords;
        let new_unseen_extracts = if sifted {
            extracts.iter().filter(|e| self.passes_sift(e)).count()
        } else {
            extracts.len()
        };
        self.draft = Some(CycleDraft {
            cycle: self.cycles.len(),
            lexicon_entries,
            new_unseen_extracts,
            sifted,
            extracts,
        });
        Ok(self.draft.as_ref().expect("just set"))
    }

    fn passes_sift(&self, e: &Extract) -> bool {
        self.harvesting
            .get(&e.reference())
            .is_some_and(|s| keyword_scan(s, &self.keywords))
    }

    /// Extracts of the open cycle, optionally sifted through the keyword
    /// list. Empty when no cycle is open.
    pub fn draft_extracts(&self, sift: bool) -> Vec<&Extract> {
        self.draft
            .iter()
            .flat_map(|d| d.extracts.iter())
            .filter(|e| !sift || self.passes_sift(e))
            .collect()
    }

    /// Registers a hypothesized pattern for the open cycle and draws its
    /// validation sample. Ids default to `c<cycle>-p<n>`.
    pub fn hypothesize(
        &mut self,
        id: Option<&str>,
        source: &str,
        kind: PatternKind,
        approach: Approach,
    ) -> Result<&Candidate, BootstrapError> {
        self.expect_phase(Phase::Reviewing)?;
        let cycle = self.cycle_number();
        let id = match id {
            Some(id) => id.to_string(),
            None => {
                let mut n = self.current_candidates().count();
                loop {
                    let id = format!("c{cycle}-p{n:02}");
                    if self.candidate(&id).is_none() {
                        break id;
                    }
                    n += 1;
                }
            }
        };
        if self.candidate(&id).is_some() {
            return Err(BootstrapError::DuplicatePattern(id));
        }
        let mut record = PatternRecord::new(id, source, kind, approach)?;
        let compiled = CompiledPattern::from_record(&record, &self.lexicon)?;
        let sample = sample_validation(
            &compiled,
            &self.validation,
            self.config.validation_sample_size,
            self.config.seed,
        );
        if sample.is_empty() {
            record.status = PatternStatus::Removed;
        }
        self.candidates.push(Candidate {
            record,
            cycle,
            sample,
            exempt: false,
        });
        Ok(self.candidates.last().expect("just pushed"))
    }

    /// Records a judgment on a sample extract. A later judgment by the same
    /// judge on the same extract replaces the earlier one.
    pub fn submit_judgment(&mut self, j: ValidationJudgment) -> Result<(), BootstrapError> {
        self.expect_phase(Phase::Reviewing)?;
        let cycle = self.cycle_number();
        let cand = self
            .candidate(&j.pattern_id)
            .ok_or_else(|| BootstrapError::UnknownPattern(j.pattern_id.clone()))?;
        if cand.cycle != cycle || cand.record.status != PatternStatus::Hypothesized {
            return Err(BootstrapError::PatternClosed(j.pattern_id.clone()));
        }
        if !cand
            .sample
            .iter()
            .any(|e| e.doc_id == j.doc_id && e.sent_index == j.sent_index)
        {
            return Err(BootstrapError::NotInSample {
                pattern: j.pattern_id.clone(),
                doc_id: j.doc_id.clone(),
                sent_index: j.sent_index,
            });
        }
        match self.judgments.iter_mut().find(|x| x.key() == j.key()) {
            Some(existing) => *existing = j,
            None => self.judgments.push(j),
        }
        Ok(())
    }

    /// Open-cycle candidates that still lack any judgment and are not in
    /// `exempt`.
    pub fn blocking_candidates(&self, exempt: &[String]) -> Vec<String> {
        self.current_candidates()
            .filter(|c| c.record.status == PatternStatus::Hypothesized)
            .filter(|c| !exempt.contains(&c.record.id))
            .filter(|c| self.judgments_for(&c.record.id).next().is_none())
            .map(|c| c.record.id.clone())
            .collect()
    }

    /// Decides every open candidate and closes the cycle. Patterns listed in
    /// `exempt` are accepted without validation.
    pub fn advance(&mut self, exempt: &[String]) -> Result<CycleRecord, BootstrapError> {
        self.expect_phase(Phase::Reviewing)?;
        for id in exempt {
            let c = self
                .candidate(id)
                .ok_or_else(|| BootstrapError::UnknownPattern(id.clone()))?;
            if c.cycle != self.cycle_number() || c.record.status != PatternStatus::Hypothesized {
                return Err(BootstrapError::PatternClosed(id.clone()));
            }
        }
        let blocking = self.blocking_candidates(exempt);
        if !blocking.is_empty() {
            return Err(BootstrapError::Blocked(blocking));
        }
        let cycle = self.cycle_number();
        let threshold = self.config.acceptance_threshold;
        let mut accepted = Vec::new();
        for i in 0..self.candidates.len() {
            if self.candidates[i].cycle != cycle
                || self.candidates[i].record.status != PatternStatus::Hypothesized
            {
                continue;
            }
            let id = self.candidates[i].record.id.clone();
            let precision = self.precision_of(&id);
            let c = &mut self.candidates[i];
            c.record.estimated_precision = precision;
            if exempt.contains(&id) {
                c.exempt = true;
                c.record.status = PatternStatus::Validated;
            } else if precision.is_some_and(|p| p >= threshold) {
                c.record.status = PatternStatus::Validated;
            } else {
                c.record.status = PatternStatus::Rejected;
            }
            if c.record.status == PatternStatus::Validated {
                accepted.push(id);
            }
        }
        self.finalize_cycle(&accepted)
    }

    /// Harvests complement pairs with the accepted extraction patterns,
    /// grows the lexicon and records the cycle.
    pub fn finalize_cycle(&mut self, accepted: &[String]) -> Result<CycleRecord, BootstrapError> {
        self.expect_phase(Phase::Reviewing)?;
        let cycle = self.cycle_number();
        let threshold = self.config.acceptance_threshold;
        let mut chosen: Vec<&Candidate> = Vec::new();
        for id in accepted {
            let c = self
                .candidate(id)
                .ok_or_else(|| BootstrapError::UnknownPattern(id.clone()))?;
            let validated = c.record.status == PatternStatus::Validated
                && (c.exempt || c.record.estimated_precision.is_some_and(|p| p >= threshold));
            if !validated || c.cycle != cycle {
                return Err(BootstrapError::NotAcceptable(id.clone()));
            }
            if !chosen.iter().any(|x| x.record.id == c.record.id) {
                chosen.push(c);
            }
        }

        let mut harvested: Vec<LexiconEntry> = Vec::new();
        for c in chosen.iter().filter(|c| c.record.kind == PatternKind::Extraction) {
            let Some((first, second)) = c.record.complement_captures() else {
                continue;
            };
            let compiled = CompiledPattern::from_record(&c.record, &self.lexicon)?;
            for s in self.harvesting.sentences() {
                for m in compiled.match_sentence(s) {
                    let (Some(a), Some(b)) = (m.capture(first), m.capture(second)) else {
                        continue;
                    };
                    if let Ok(form) = Feature::pair(c.record.approach, &a.text, &b.text) {
                        harvested.push(LexiconEntry {
                            form,
                            origin_cycle: cycle,
                            origin_pattern: Some(c.record.id.clone()),
                        });
                    }
                }
            }
        }
        let new_identification_patterns = chosen.len();
        let new_extraction_patterns = chosen
            .iter()
            .filter(|c| c.record.kind == PatternKind::Extraction)
            .count();
        let exempt = chosen.iter().any(|c| c.exempt);
        self.lexicon.add_entries(harvested);

        let draft = self.draft.take().expect("reviewing phase has a draft");
        let record = CycleRecord {
            cycle,
            lexicon_entries: draft.lexicon_entries,
            new_unseen_extracts: draft.new_unseen_extracts,
            hypothesized_patterns: self.candidates.iter().filter(|c| c.cycle == cycle).count(),
            new_identification_patterns,
            new_extraction_patterns,
            sifted: draft.sifted,
            exempt,
        };
        self.cycles.push(record.clone());
        Ok(record)
    }

    /// Sentences surfaced so far, as references.
    pub fn seen(&self) -> BTreeSet<SentenceRef> {
        self.ledger.iter().cloned().collect()
    }
}

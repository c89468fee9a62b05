//! HTTP + JSON facade over a persisted bootstrap engine.
//!
//! Mutations run against a copy of the engine, are written to the state
//! directory, and only then become visible. Every POST accepts an optional
//! `request_id`; repeating a request id replays the stored response without
//! applying the mutation again. Replies are kept in `requests.jsonl` so this
//! survives restarts.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;
use tokio::sync::RwLock;

use crate::bootstrap::{
    tally, BootstrapError, Candidate, CycleRecord, Engine, Label, Phase, Tally, ValidationJudgment,
};
use crate::corpus::{parse_tagged, Corpus};
use crate::eval::{
    default_cutoffs, gold_positive, kappa_matrix, parse_gold, pr_curve, GoldAnnotation, PairwiseKappa,
    PositiveClass, PrPoint,
};
use crate::lexicon::Extract;
use crate::matcher::Capture;
use crate::pattern::{Approach, PatternError, PatternKind, PatternStatus};

pub const REQUEST_LOG: &str = "requests.jsonl";
/// Optional evaluation inputs inside the state directory, used by
/// `/api/metrics`.
pub const EVALUATION_CORPUS: &str = "evaluation.tsv";
pub const EVALUATION_GOLD: &str = "gold.tsv";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("cannot load state from {dir}: {source}")]
    State { dir: String, source: BootstrapError },
    #[error("{0}")]
    Evaluation(String),
    #[error("cannot bind port {port}: {message}")]
    Bind { port: u16, message: String },
    #[error("server error: {0}")]
    Server(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StoredReply {
    request_id: String,
    status: u16,
    body: Value,
}

struct Inner {
    engine: Engine,
    replies: HashMap<String, (StatusCode, Value)>,
}

/// Shared service state.
pub struct AppState {
    dir: PathBuf,
    inner: RwLock<Inner>,
    evaluation: Option<(Corpus, Vec<GoldAnnotation>)>,
}

impl AppState {
    /// Loads the engine and any evaluation inputs from `dir`. Corrupt state
    /// is an error.
    pub fn load(dir: &Path) -> Result<Self, ServiceError> {
        let engine = Engine::load(dir).map_err(|source| ServiceError::State {
            dir: dir.display().to_string(),
            source,
        })?;
        let mut replies = HashMap::new();
        if let Ok(text) = std::fs::read_to_string(dir.join(REQUEST_LOG)) {
            for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let r: StoredReply = serde_json::from_str(line).map_err(|e| ServiceError::State {
                    dir: dir.display().to_string(),
                    source: BootstrapError::Corrupt {
                        file: REQUEST_LOG.into(),
                        message: format!("line {}: {e}", n + 1),
                    },
                })?;
                let status = StatusCode::from_u16(r.status).unwrap_or(StatusCode::OK);
                replies.insert(r.request_id, (status, r.body));
            }
        }
        let evaluation = load_evaluation(dir)?;
        Ok(AppState {
            dir: dir.to_path_buf(),
            inner: RwLock::new(Inner { engine, replies }),
            evaluation,
        })
    }
}

fn load_evaluation(dir: &Path) -> Result<Option<(Corpus, Vec<GoldAnnotation>)>, ServiceError> {
    let (cp, gp) = (dir.join(EVALUATION_CORPUS), dir.join(EVALUATION_GOLD));
    if !cp.is_file() || !gp.is_file() {
        return Ok(None);
    }
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| ServiceError::Evaluation(format!("{}: {e}", p.display())));
    let corpus = parse_tagged("evaluation", &read(&cp)?)
        .map_err(|e| ServiceError::Evaluation(format!("{EVALUATION_CORPUS}: {e}")))?;
    let gold = parse_gold(&read(&gp)?, Some(&corpus))
        .map_err(|e| ServiceError::Evaluation(format!("{EVALUATION_GOLD}: {e}")))?;
    Ok(Some((corpus, gold)))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/cycle", get(get_cycle))
        .route("/api/cycle/start", post(post_start))
        .route("/api/cycle/advance", post(post_advance))
        .route("/api/extracts", get(get_extracts))
        .route("/api/patterns", post(post_pattern))
        .route("/api/candidates", get(get_candidates))
        .route("/api/candidates/{id}", get(get_candidate))
        .route("/api/judgments", post(post_judgment))
        .route("/api/metrics", get(get_metrics))
        .with_state(state)
}

/// Serves the state directory on `127.0.0.1:port` until the process ends.
pub async fn serve(state_dir: &Path, port: u16) -> Result<(), ServiceError> {
    let state = Arc::new(AppState::load(state_dir)?);
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
        .await
        .map_err(|e| ServiceError::Bind {
            port,
            message: e.to_string(),
        })?;
    axum::serve(listener, router(state))
        .await
        .map_err(|e| ServiceError::Server(e.to_string()))
}

struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<BootstrapError> for ApiError {
    fn from(e: BootstrapError) -> Self {
        let message = e.to_string();
        match e {
            BootstrapError::Pattern(PatternError::Syntax { id, error }) => ApiError {
                status: StatusCode::BAD_REQUEST,
                body: json!({
                    "error": message,
                    "pattern_id": id,
                    "column": error.column,
                    "diagnostic": error.kind.to_string(),
                }),
            },
            BootstrapError::Blocked(ids) => ApiError {
                status: StatusCode::CONFLICT,
                body: json!({ "error": message, "blocking": ids }),
            },
            BootstrapError::Pattern(_)
            | BootstrapError::Match(_)
            | BootstrapError::NotInSample { .. }
            | BootstrapError::InvalidConfig(_) => ApiError::new(StatusCode::BAD_REQUEST, message),
            BootstrapError::UnknownPattern(_) => ApiError::new(StatusCode::NOT_FOUND, message),
            BootstrapError::WrongPhase { .. }
            | BootstrapError::DuplicatePattern(_)
            | BootstrapError::PatternClosed(_)
            | BootstrapError::NotAcceptable(_)
            | BootstrapError::EmptyLexicon => ApiError::new(StatusCode::CONFLICT, message),
            BootstrapError::Corrupt { .. } | BootstrapError::Io { .. } => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, message)
            }
        }
    }
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    let body: &[u8] = if body.is_empty() { b"{}" } else { body };
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")))
}

#[derive(Deserialize)]
struct RequestId {
    request_id: Option<String>,
}

/// Runs `apply` on a copy of the engine, persists it and records the reply
/// under the request id.
async fn mutate(
    state: &AppState,
    body: &Bytes,
    apply: impl FnOnce(&mut Engine) -> Result<(StatusCode, Value), ApiError>,
) -> Response {
    let request_id = parse_body::<RequestId>(body).ok().and_then(|r| r.request_id);
    let mut inner = state.inner.write().await;
    if let Some((status, body)) = request_id.as_ref().and_then(|id| inner.replies.get(id)) {
        return (*status, Json(body.clone())).into_response();
    }
    let mut engine = inner.engine.clone();
    let (status, body) = match apply(&mut engine) {
        Ok(ok) => ok,
        Err(e) => (e.status, e.body),
    };
    if status.is_success() {
        if let Err(e) = engine.save(&state.dir) {
            return ApiError::from(e).into_response();
        }
        inner.engine = engine;
    }
    if let Some(id) = request_id {
        let line = serde_json::to_string(&StoredReply {
            request_id: id.clone(),
            status: status.as_u16(),
            body: body.clone(),
        })
        .expect("reply serializes");
        let logged = OpenOptions::new()
            .create(true)
            .append(true)
            .open(state.dir.join(REQUEST_LOG))
            .and_then(|mut f| writeln!(f, "{line}"));
        if let Err(e) = logged {
            return ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("cannot record request: {e}"))
                .into_response();
        }
        inner.replies.insert(id, (status, body.clone()));
    }
    (status, Json(body)).into_response()
}

#[derive(Serialize)]
struct SampleView<'a> {
    doc_id: &'a str,
    sent_index: usize,
    text: &'a str,
    tokens: &'a [String],
    span: Option<(usize, usize)>,
    captures: &'a [Capture],
    judgments: Vec<JudgmentView<'a>>,
}

#[derive(Serialize)]
struct JudgmentView<'a> {
    judge: &'a str,
    label: Label,
}

/// A candidate pattern as shown to the reviewer.
#[derive(Serialize)]
struct CandidateView<'a> {
    pattern_id: &'a str,
    source: &'a str,
    canonical: String,
    approach: Approach,
    kind: PatternKind,
    cycle: usize,
    status: PatternStatus,
    exempt: bool,
    samples: Vec<SampleView<'a>>,
    tally: Tally,
    precision: Option<f64>,
    accept_eligible: bool,
}

fn candidate_view<'a>(engine: &'a Engine, c: &'a Candidate) -> CandidateView<'a> {
    let id = c.record.id.as_str();
    let precision = engine.precision_of(id);
    let samples = c
        .sample
        .iter()
        .map(|e: &Extract| SampleView {
            doc_id: &e.doc_id,
            sent_index: e.sent_index,
            text: &e.text,
            tokens: &e.tokens,
            span: e.span,
            captures: &e.captures,
            judgments: engine
                .judgments_for(id)
                .filter(|j| j.doc_id == e.doc_id && j.sent_index == e.sent_index)
                .map(|j| JudgmentView {
                    judge: &j.judge,
                    label: j.label,
                })
                .collect(),
        })
        .collect();
    CandidateView {
        pattern_id: id,
        source: &c.record.source,
        canonical: c.record.ast.render(),
        approach: c.record.approach,
        kind: c.record.kind,
        cycle: c.cycle,
        status: c.record.status,
        exempt: c.exempt,
        samples,
        tally: tally(engine.judgments_for(id)),
        precision,
        accept_eligible: precision.is_some_and(|p| p >= engine.config().acceptance_threshold),
    }
}

fn cycle_view(engine: &Engine) -> Value {
    let draft = engine.draft().map(|d| {
        json!({
            "cycle": d.cycle,
            "lexicon_entries": d.lexicon_entries,
            "new_unseen_extracts": d.new_unseen_extracts,
            "hypothesized_patterns": engine.current_candidates().count(),
            "sifted": d.sifted,
        })
    });
    json!({
        "phase": engine.phase(),
        "cycle": engine.cycle_number(),
        "draft": draft,
        "history": engine.cycles(),
        "lexicon_size": engine.lexicon().len(),
        "acceptance_threshold": engine.config().acceptance_threshold,
        "validation_sample_size": engine.config().validation_sample_size,
    })
}

async fn get_cycle(State(state): State<Arc<AppState>>) -> Json<Value> {
    Json(cycle_view(&state.inner.read().await.engine))
}

async fn post_start(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    mutate(&state, &body, |engine| {
        engine.start_cycle()?;
        Ok((StatusCode::OK, cycle_view(engine)))
    })
    .await
}

#[derive(Deserialize)]
struct ExtractQuery {
    sift: Option<bool>,
    page: Option<usize>,
    page_size: Option<usize>,
}

async fn get_extracts(State(state): State<Arc<AppState>>, Query(q): Query<ExtractQuery>) -> Response {
    let inner = state.inner.read().await;
    let engine = &inner.engine;
    if engine.phase() != Phase::Reviewing {
        return ApiError::new(StatusCode::CONFLICT, "no cycle is open").into_response();
    }
    let sift = q.sift.unwrap_or(engine.config().sift_with_keywords);
    let page = q.page.unwrap_or(0);
    let size = q.page_size.unwrap_or(50).clamp(1, 1000);
    let all = engine.draft_extracts(sift);
    let items: Vec<&Extract> = all.iter().skip(page * size).take(size).copied().collect();
    Json(json!({
        "cycle": engine.cycle_number(),
        "sift": sift,
        "page": page,
        "page_size": size,
        "total": all.len(),
        "extracts": items,
    }))
    .into_response()
}

#[derive(Deserialize)]
struct PatternBody {
    id: Option<String>,
    source: String,
    approach: Approach,
    kind: PatternKind,
}

async fn post_pattern(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let parsed = parse_body::<PatternBody>(&body);
    mutate(&state, &body, |engine| {
        let p = parsed?;
        let c = engine.hypothesize(p.id.as_deref(), &p.source, p.kind, p.approach)?;
        let id = c.record.id.clone();
        let c = engine.candidate(&id).expect("just added");
        Ok((StatusCode::CREATED, serde_json::to_value(candidate_view(engine, c)).expect("view serializes")))
    })
    .await
}

#[derive(Deserialize)]
struct CandidatesQuery {
    all: Option<bool>,
}

async fn get_candidates(State(state): State<Arc<AppState>>, Query(q): Query<CandidatesQuery>) -> Json<Value> {
    let inner = state.inner.read().await;
    let engine = &inner.engine;
    let views: Vec<CandidateView> = if q.all.unwrap_or(false) {
        engine.candidates().iter().map(|c| candidate_view(engine, c)).collect()
    } else {
        engine.current_candidates().map(|c| candidate_view(engine, c)).collect()
    };
    Json(serde_json::to_value(views).expect("views serialize"))
}

async fn get_candidate(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Response {
    let inner = state.inner.read().await;
    match inner.engine.candidate(&id) {
        Some(c) => Json(serde_json::to_value(candidate_view(&inner.engine, c)).expect("view serializes")).into_response(),
        None => ApiError::from(BootstrapError::UnknownPattern(id)).into_response(),
    }
}

#[derive(Deserialize)]
struct JudgmentBody {
    pattern_id: String,
    doc_id: String,
    sent_index: usize,
    label: Label,
    judge: String,
}

async fn post_judgment(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let parsed = parse_body::<JudgmentBody>(&body);
    mutate(&state, &body, |engine| {
        let j = parsed?;
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        engine.submit_judgment(ValidationJudgment {
            pattern_id: j.pattern_id.clone(),
            doc_id: j.doc_id,
            sent_index: j.sent_index,
            label: j.label,
            judge: j.judge,
            timestamp,
        })?;
        let c = engine.candidate(&j.pattern_id).expect("judged pattern exists");
        Ok((StatusCode::OK, serde_json::to_value(candidate_view(engine, c)).expect("view serializes")))
    })
    .await
}

#[derive(Deserialize)]
struct AdvanceBody {
    #[serde(default)]
    exempt_pattern_ids: Vec<String>,
}

async fn post_advance(State(state): State<Arc<AppState>>, body: Bytes) -> Response {
    let parsed = parse_body::<AdvanceBody>(&body);
    mutate(&state, &body, |engine| {
        let b = parsed?;
        let record: CycleRecord = engine.advance(&b.exempt_pattern_ids)?;
        Ok((StatusCode::OK, serde_json::to_value(record).expect("record serializes")))
    })
    .await
}

#[derive(Deserialize)]
struct MetricsQuery {
    positive: Option<String>,
}

async fn get_metrics(State(state): State<Arc<AppState>>, Query(q): Query<MetricsQuery>) -> Response {
    let class = match q.positive.as_deref().map(str::parse::<PositiveClass>).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => return ApiError::new(StatusCode::BAD_REQUEST, e).into_response(),
    };
    let inner = state.inner.read().await;
    let engine = &inner.engine;
    let growth: Vec<Value> = engine
        .cycles()
        .iter()
        .map(|c| json!({ "cycle": c.cycle, "lexicon_entries": c.lexicon_entries }))
        .collect();
    let (curve, kappas): (Option<Vec<PrPoint>>, Vec<PairwiseKappa>) = match &state.evaluation {
        Some((corpus, gold)) => {
            let patterns: Vec<_> = engine.identification_patterns().into_iter().cloned().collect();
            let positive = gold_positive(gold, class);
            match pr_curve(&patterns, engine.lexicon(), corpus, &positive, &default_cutoffs()) {
                Ok(points) => (Some(points), kappa_matrix(gold, corpus, class)),
                Err(e) => return ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
            }
        }
        None => (None, Vec::new()),
    };
    Json(json!({
        "pr_curve": curve,
        "kappa_matrix": kappas,
        "lexicon_growth": growth,
        "lexicon_size": engine.lexicon().len(),
    }))
    .into_response()
}

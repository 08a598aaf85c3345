//! Routes and request handling. Every mutating request runs as one
//! transaction under the state lock: replay a stored idempotent reply if
//! there is one, otherwise validate against the store, compute, log the
//! resulting event, and apply it.

use std::io;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use famsec_core::delivery::{build_mdp, sample_admissible, DeliveryTask, RandomTaskSampler, TaskDocument};
use famsec_core::outcome::{assess_outcome, OutcomeStandard};
use famsec_core::rollout::{simulate_episode, summarize, RewardSamples, TerminalKind};
use famsec_core::seed;
use famsec_core::solver::SolverSpec;
use famsec_core::solver_quality::{x_s_from_samples, SolverQualityConfig, Trusted};
use famsec_core::surrogate::{SurrogateError, SurrogateModel};
use famsec_harness::experiments::{measure, pooled_config, REPORT_BINS};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;
use tokio::sync::{Mutex, OwnedMutexGuard};

use crate::config::{ConfigError, ServiceConfig};
use crate::error::ApiError;
use crate::events::{Event, EventLog};
use crate::labels::{x_o_label, x_s_label};
use crate::openapi;
use crate::store::{Decision, HistoryEntry, Store, TaskRecord, TaskState};

/// Node-count bounds accepted by task generation.
pub const N_BOUNDS: (usize, usize) = (8, 35);
/// Sub-indices tried when drawing an admissible task.
const GENERATION_ATTEMPTS: u64 = 100;
const IDEMPOTENCY_HEADER: &str = "idempotency-key";
const MAX_KEY_LEN: usize = 255;

/// Seed streams: assessment and execution draw from disjoint streams of
/// the task seed, so the executed episode is never one of the assessed ones.
const ASSESS_STREAM: u64 = 1;
const EXECUTE_STREAM: u64 = 2;

/// Candidate policy, candidate episodes, trusted policy, trusted episodes.
pub fn assess_seeds(task_seed: u64) -> [u64; 4] {
    [1, 2, 3, 4].map(|i| seed::mix_all(task_seed, &[ASSESS_STREAM, i]))
}

/// Policy and episode seeds of the executed run.
pub fn execute_seeds(task_seed: u64) -> [u64; 2] {
    [1, 2].map(|i| seed::mix_all(task_seed, &[EXECUTE_STREAM, i]))
}

#[derive(Debug, Error)]
pub enum StartupError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot load surrogate model: {0}")]
    Model(#[from] SurrogateError),
    #[error("event log: {0}")]
    Log(#[from] io::Error),
}

struct Inner {
    store: Store,
    log: EventLog,
}

struct Shared {
    config: ServiceConfig,
    model: Option<SurrogateModel>,
    inner: Arc<Mutex<Inner>>,
}

#[derive(Clone)]
pub struct AppState {
    shared: Arc<Shared>,
}

impl AppState {
    /// Loads the surrogate (if configured) and replays the event log.
    pub fn new(config: ServiceConfig) -> Result<Self, StartupError> {
        config.validate()?;
        let model = config.model_path.as_deref().map(SurrogateModel::load).transpose()?;
        let (log, events) = match &config.event_log {
            Some(path) => EventLog::open(path)?,
            None => (EventLog::in_memory(), Vec::new()),
        };
        let store = Store::replay(&events);
        Ok(AppState {
            shared: Arc::new(Shared {
                config,
                model,
                inner: Arc::new(Mutex::new(Inner { store, log })),
            }),
        })
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.shared.config
    }

    /// A copy of the current state.
    pub async fn store(&self) -> Store {
        self.shared.inner.lock().await.store.clone()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/spec", get(spec))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(get_session))
        .route("/v1/tasks", post(create_task))
        .route("/v1/tasks/generate", post(generate_task))
        .route("/v1/tasks/{id}", get(get_task))
        .route("/v1/tasks/{id}/assess", post(assess_task))
        .route("/v1/tasks/{id}/decision", post(decide_task))
        .route("/v1/tasks/{id}/execute", post(execute_task))
        .with_state(state)
}

/// A successful mutation: the reply and the event that records it.
struct Done {
    status: StatusCode,
    body: Value,
    event: Option<Event>,
}

fn parse_body<T: DeserializeOwned + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::invalid(format!("invalid request body: {e}")))
}

fn idempotency_key(headers: &HeaderMap) -> Result<Option<String>, ApiError> {
    let Some(v) = headers.get(IDEMPOTENCY_HEADER) else {
        return Ok(None);
    };
    match v.to_str() {
        Ok(k) if !k.is_empty() && k.len() <= MAX_KEY_LEN => Ok(Some(k.to_string())),
        _ => Err(ApiError::invalid(format!(
            "Idempotency-Key must be 1 to {MAX_KEY_LEN} visible ASCII characters"
        ))),
    }
}

fn commit(inner: &mut Inner, event: &Event) -> Result<(), ApiError> {
    inner
        .log
        .append(event)
        .map_err(|e| ApiError::internal(format!("cannot append to event log: {e}")))?;
    inner.store.apply(event);
    Ok(())
}

fn run<F>(mut inner: OwnedMutexGuard<Inner>, shared: &Shared, route: String, key: Option<String>, op: F) -> Response
where
    F: FnOnce(&Shared, &Store) -> Result<Done, ApiError>,
{
    if let Some(k) = &key {
        if let Some((status, body)) = inner.store.response(&route, k) {
            let status = StatusCode::from_u16(*status).unwrap_or(StatusCode::OK);
            return (status, Json(body.clone())).into_response();
        }
    }
    let (status, body) = match op(shared, &inner.store) {
        Ok(done) => match done.event.as_ref().map(|e| commit(&mut inner, e)).transpose() {
            Ok(_) => (done.status, done.body),
            Err(e) => (e.status, e.body()),
        },
        Err(e) => (e.status, e.body()),
    };
    if let Some(key) = key.filter(|_| !status.is_server_error()) {
        let stored = Event::Response {
            route,
            key,
            status: status.as_u16(),
            body: body.clone(),
        };
        if let Err(e) = commit(&mut inner, &stored) {
            return e.into_response();
        }
    }
    (status, Json(body)).into_response()
}

/// Runs `op` as a transaction on a blocking worker, so Monte-Carlo work
/// does not stall the async runtime.
async fn transact<F>(state: AppState, route: String, headers: HeaderMap, op: F) -> Response
where
    F: FnOnce(&Shared, &Store) -> Result<Done, ApiError> + Send + 'static,
{
    let key = match idempotency_key(&headers) {
        Ok(k) => k,
        Err(e) => return e.into_response(),
    };
    let shared = state.shared;
    let guard = shared.inner.clone().lock_owned().await;
    tokio::task::spawn_blocking(move || run(guard, &shared, route, key, op))
        .await
        .unwrap_or_else(|e| ApiError::internal(format!("request worker failed: {e}")).into_response())
}

async fn spec() -> Json<Value> {
    Json(openapi::document())
}

async fn create_session(State(state): State<AppState>, headers: HeaderMap) -> Response {
    transact(state, "POST /v1/sessions".into(), headers, |shared, store| {
        let session_id = store.next_session_id();
        let scoring = shared.config.scoring;
        Ok(Done {
            status: StatusCode::CREATED,
            body: json!({"session_id": session_id, "score": 0.0, "history": [], "scoring": scoring}),
            event: Some(Event::SessionCreated { session_id, scoring }),
        })
    })
    .await
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    let inner = state.shared.inner.lock().await;
    match inner.store.session(&id) {
        Ok(s) => Json(json!(s)).into_response(),
        Err(e) => e.into_response(),
    }
}

async fn get_task(State(state): State<AppState>, Path(id): Path<String>) -> Response {
    let inner = state.shared.inner.lock().await;
    match inner.store.task(&id) {
        Ok(t) => Json(json!(t)).into_response(),
        Err(e) => e.into_response(),
    }
}

fn created(store: &Store, session_id: Option<String>, task: &DeliveryTask, seed: u64, rejections: Vec<String>) -> Done {
    let record = TaskRecord {
        task_id: store.next_task_id(),
        session_id,
        seed,
        state: TaskState::Generated,
        task: TaskDocument::new(task, seed),
        rejections,
        assessment: None,
        decision: None,
        outcome: None,
    };
    Done {
        status: StatusCode::CREATED,
        body: json!(record),
        event: Some(Event::TaskCreated { record }),
    }
}

fn check_session(store: &Store, session_id: Option<&str>) -> Result<(), ApiError> {
    session_id.map(|s| store.session(s)).transpose().map(|_| ())
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateRequest {
    pub seed: Option<u64>,
    pub n_range: Option<(usize, usize)>,
    pub p_trans_range: Option<(f64, f64)>,
    pub session_id: Option<String>,
}

impl GenerateRequest {
    fn sampler(&self) -> Result<RandomTaskSampler, ApiError> {
        let mut sampler = RandomTaskSampler::default();
        if let Some((lo, hi)) = self.n_range {
            if !(N_BOUNDS.0 <= lo && lo <= hi && hi <= N_BOUNDS.1) {
                return Err(ApiError::invalid(format!(
                    "n_range [{lo}, {hi}] must lie within [{}, {}]",
                    N_BOUNDS.0, N_BOUNDS.1
                )));
            }
            sampler.n_range = (lo, hi);
        }
        if let Some((lo, hi)) = self.p_trans_range {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(ApiError::invalid(format!("p_trans_range [{lo}, {hi}] must lie within [0, 1]")));
            }
            sampler.p_trans_range = (lo, hi);
        }
        Ok(sampler)
    }
}

async fn generate_task(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    let req: GenerateRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    transact(state, "POST /v1/tasks/generate".into(), headers, move |_, store| {
        let sampler = req.sampler()?;
        check_session(store, req.session_id.as_deref())?;
        let seed = req.seed.unwrap_or(store.task_count() as u64 + 1);
        let (task, rejected) = sample_admissible(&sampler, 0, seed, GENERATION_ATTEMPTS)
            .map_err(|e| ApiError::internal(format!("task generation failed: {e}")))?;
        let rejections = rejected.iter().map(|r| r.as_str().to_string()).collect();
        Ok(created(store, req.session_id, &task, seed, rejections))
    })
    .await
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreateTaskRequest {
    pub task: Option<TaskDocument>,
    pub session_id: Option<String>,
}

/// Registers a hand-made task document as-is, without the admissibility
/// filter applied to generated tasks.
async fn create_task(State(state): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    let req: CreateTaskRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    transact(state, "POST /v1/tasks".into(), headers, move |_, store| {
        let doc = req.task.ok_or_else(|| ApiError::invalid("missing task document"))?;
        check_session(store, req.session_id.as_deref())?;
        let seed = doc.seed;
        let task = doc.into_task().map_err(|e| ApiError::invalid(e.to_string()))?;
        Ok(created(store, req.session_id, &task, seed, Vec::new()))
    })
    .await
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssessRequest {
    pub zstar: Option<f64>,
    pub runs: Option<usize>,
    /// `model` for the configured surrogate, `none`, or a solver.
    pub trusted: Option<String>,
    pub candidate: Option<String>,
}

enum TrustedChoice {
    None,
    Surrogate,
    Solver(SolverSpec),
}

fn parse_solver(s: &str) -> Result<SolverSpec, ApiError> {
    s.parse().map_err(|e: famsec_core::solver::SolverError| ApiError::invalid(e.to_string()))
}

fn terminals(samples: &RewardSamples) -> Value {
    json!({
        "caught": samples.count(TerminalKind::Caught),
        "delivered": samples.count(TerminalKind::Delivered),
        "timeout": samples.count(TerminalKind::Timeout),
    })
}

fn assess(shared: &Shared, store: &Store, id: &str, req: AssessRequest) -> Result<Done, ApiError> {
    let record = store.task(id)?;
    if record.state != TaskState::Generated {
        return Err(ApiError::conflict(format!("task {id} is {:?}, not generated", record.state)));
    }
    let config = &shared.config;
    let z_star = req.zstar.unwrap_or(0.0);
    let runs = req.runs.unwrap_or(config.default_runs);
    if !(2..=config.max_runs).contains(&runs) {
        return Err(ApiError::invalid(format!("runs {runs} outside [2, {}]", config.max_runs)));
    }
    let standard = OutcomeStandard::new(z_star, 1, 1.0).map_err(|e| ApiError::invalid(e.to_string()))?;
    let candidate = parse_solver(req.candidate.as_deref().unwrap_or(&config.default_candidate))?;
    let trusted = match req.trusted.as_deref() {
        None if shared.model.is_some() => TrustedChoice::Surrogate,
        None | Some("none") => TrustedChoice::None,
        Some("model") if shared.model.is_some() => TrustedChoice::Surrogate,
        Some("model") => return Err(ApiError::invalid("no surrogate model is configured")),
        Some(s) => TrustedChoice::Solver(parse_solver(s)?),
    };

    let task = record.task.clone().into_task()?;
    let mdp = build_mdp(&task)?;
    let [cand_policy, cand_episodes, trusted_policy, trusted_episodes] = assess_seeds(record.seed);
    let samples = measure(&mdp, &candidate, runs, cand_policy, cand_episodes)?;
    let outcome = assess_outcome(&samples.values, &standard)?;
    let mut flags = vec!["timeout_episodes_included"];
    let mut seeds = json!({"candidate_policy": cand_policy, "candidate_episodes": cand_episodes});

    let (quality, trusted_json) = match trusted {
        TrustedChoice::None => (None, Value::Null),
        TrustedChoice::Surrogate => {
            let model = shared.model.as_ref().expect("checked above");
            let predicted = model.predict_task(&task, &candidate)?;
            let cfg = SolverQualityConfig::new(model.r_low, model.r_high);
            flags.push("trusted_predicted_by_surrogate");
            let q = x_s_from_samples(&samples.values, Trusted::Summary(predicted), &cfg)?;
            let source = json!({
                "source": "surrogate",
                "model": config.model_path.as_ref().map(|p| p.display().to_string()),
                "features": model.feature_schema,
                "prediction": predicted,
            });
            (Some(q), source)
        }
        TrustedChoice::Solver(spec) => {
            let t = measure(&mdp, &spec, runs, trusted_policy, trusted_episodes)?;
            let cfg = pooled_config(&task, [samples.values.as_slice(), t.values.as_slice()]);
            flags.push("reward_range_pooled_over_both_solvers");
            seeds["trusted_policy"] = json!(trusted_policy);
            seeds["trusted_episodes"] = json!(trusted_episodes);
            let q = x_s_from_samples(&samples.values, Trusted::Samples(&t.values), &cfg)?;
            let source = json!({
                "source": "solver",
                "solver": spec,
                "summary": summarize(&t.values, REPORT_BINS)?,
                "terminals": terminals(&t),
            });
            (Some(q), source)
        }
    };
    if quality.is_some() {
        flags.push("delta_mu_is_candidate_minus_trusted");
    }
    let x_s = quality.as_ref().map(|q| q.x_s);
    let assessment = json!({
        "task_id": id,
        "zstar": z_star,
        "runs": runs,
        "candidate": candidate,
        "trusted": trusted_json,
        "indicators": {"x_o": outcome.x_o, "x_s": x_s},
        "labels": {"x_o": x_o_label(outcome.x_o), "x_s": x_s.map(x_s_label)},
        "x_o": outcome,
        "x_s": quality,
        "candidate_summary": summarize(&samples.values, REPORT_BINS)?,
        "terminals": terminals(&samples),
        "seeds": seeds,
        "flags": flags,
    });
    Ok(Done {
        status: StatusCode::OK,
        body: assessment.clone(),
        event: Some(Event::TaskAssessed {
            task_id: id.to_string(),
            assessment,
        }),
    })
}

async fn assess_task(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    let req: AssessRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    let route = format!("POST /v1/tasks/{id}/assess");
    transact(state, route, headers, move |shared, store| assess(shared, store, &id, req)).await
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionRequest {
    pub decision: Option<Decision>,
    pub session_id: Option<String>,
}

fn indicators(record: &TaskRecord) -> (f64, Option<f64>) {
    let ind = record.assessment.as_ref().map(|a| &a["indicators"]);
    let x_o = ind.and_then(|i| i["x_o"].as_f64()).unwrap_or(f64::NAN);
    let x_s = ind.and_then(|i| i["x_s"].as_f64());
    (x_o, x_s)
}

fn decide(store: &Store, id: &str, req: DecisionRequest) -> Result<Done, ApiError> {
    let record = store.task(id)?;
    let decision = req.decision.ok_or_else(|| ApiError::invalid("decision must be 'authorize' or 'cancel'"))?;
    match record.state {
        TaskState::Generated => return Err(ApiError::conflict(format!("task {id} has not been assessed"))),
        TaskState::Decided | TaskState::Executed => {
            return Err(ApiError::conflict(format!("task {id} already has a decision")))
        }
        TaskState::Assessed => {}
    }
    let session_id = match (&req.session_id, &record.session_id) {
        (Some(a), Some(b)) if a != b => {
            return Err(ApiError::invalid(format!("task {id} belongs to session {b}, not {a}")))
        }
        (Some(s), _) | (None, Some(s)) => s.clone(),
        (None, None) => return Err(ApiError::invalid("session_id is required for a task without a session")),
    };
    let session = store.session(&session_id)?;
    let entry = (decision == Decision::Cancel).then(|| {
        let (x_o, x_s) = indicators(record);
        HistoryEntry {
            task_id: id.to_string(),
            decision,
            x_o,
            x_s,
            outcome: "cancelled".into(),
            score_delta: -session.scoring.penalty_cancel,
        }
    });
    let delta = entry.as_ref().map_or(0.0, |e| e.score_delta);
    Ok(Done {
        status: StatusCode::OK,
        body: json!({
            "task_id": id,
            "session_id": session_id,
            "decision": decision,
            "state": TaskState::Decided,
            "score_delta": delta,
            "session_score": session.score + delta,
        }),
        event: Some(Event::TaskDecided {
            task_id: id.to_string(),
            session_id,
            decision,
            entry,
        }),
    })
}

async fn decide_task(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    let req: DecisionRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return e.into_response(),
    };
    let route = format!("POST /v1/tasks/{id}/decision");
    transact(state, route, headers, move |_, store| decide(store, &id, req)).await
}

fn execute(store: &Store, id: &str) -> Result<Done, ApiError> {
    let record = store.task(id)?;
    match record.state {
        TaskState::Decided => {}
        TaskState::Executed => return Err(ApiError::conflict(format!("task {id} was already executed"))),
        _ => return Err(ApiError::conflict(format!("task {id} has no decision yet"))),
    }
    let session_id = record.session_id.clone().expect("decided tasks have a session");
    let session = store.session(&session_id)?;
    let decision = record.decision.expect("decided tasks have a decision");
    let done = |outcome: Value, entry: Option<HistoryEntry>| {
        let delta = entry.as_ref().map_or(0.0, |e| e.score_delta);
        let mut body = outcome.clone();
        body["session_score"] = json!(session.score + delta);
        Done {
            status: StatusCode::OK,
            body,
            event: Some(Event::TaskExecuted {
                task_id: id.to_string(),
                outcome,
                entry,
            }),
        }
    };
    if decision == Decision::Cancel {
        let outcome = json!({
            "task_id": id,
            "session_id": session_id,
            "decision": decision,
            "executed": false,
            "outcome": "cancelled",
            "cumulative_reward": null,
            "trace": null,
            "score_delta": 0.0,
        });
        return Ok(done(outcome, None));
    }

    let assessment = record.assessment.as_ref().expect("decided tasks were assessed");
    let candidate: SolverSpec = serde_json::from_value(assessment["candidate"].clone())
        .map_err(|e| ApiError::internal(format!("stored assessment has no candidate: {e}")))?;
    let task = record.task.clone().into_task()?;
    let mdp = build_mdp(&task)?;
    let [policy_seed, episode_seed] = execute_seeds(record.seed);
    let policy = candidate.policy(&mdp, policy_seed)?;
    let (log, reward) = simulate_episode(&mdp, &policy, episode_seed)?;
    let scoring = session.scoring;
    let delta = match log.terminal_kind {
        TerminalKind::Delivered => scoring.reward_success,
        TerminalKind::Caught => -scoring.penalty_approved_capture,
        TerminalKind::Timeout => -scoring.penalty_timeout,
    };
    let steps: Vec<Value> = log
        .steps
        .iter()
        .map(|s| {
            let pair = match mdp.decode(s.state) {
                Some(famsec_core::delivery::JointState::Pair { adt, mg }) => json!({"adt": adt, "mg": mg}),
                _ => Value::Null,
            };
            json!({"state": s.state, "position": pair, "action": s.action, "reward": s.reward})
        })
        .collect();
    let (x_o, x_s) = indicators(record);
    let entry = HistoryEntry {
        task_id: id.to_string(),
        decision,
        x_o,
        x_s,
        outcome: log.terminal_kind.as_str().to_string(),
        score_delta: delta,
    };
    let outcome = json!({
        "task_id": id,
        "session_id": session_id,
        "decision": decision,
        "executed": true,
        "outcome": log.terminal_kind.as_str(),
        "cumulative_reward": reward,
        "trace": {"steps": steps, "terminal": log.terminal_kind.as_str()},
        "seeds": {"policy": policy_seed, "episode": episode_seed},
        "score_delta": delta,
    });
    Ok(done(outcome, Some(entry)))
}

async fn execute_task(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> Response {
    let route = format!("POST /v1/tasks/{id}/execute");
    transact(state, route, headers, move |_, store| execute(store, &id)).await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assessment_and_execution_seeds_are_disjoint() {
        for s in 0..1000 {
            let a = assess_seeds(s);
            for e in execute_seeds(s) {
                assert!(!a.contains(&e));
            }
        }
    }
}

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use famsec_core::delivery::{DeliveryTask, GeneratorKind, RoadNetwork, TaskDocument, TaskParams};
use famsec_service::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn config() -> ServiceConfig {
    ServiceConfig {
        default_runs: 50,
        ..ServiceConfig::default()
    }
}

fn state(config: ServiceConfig) -> AppState {
    AppState::new(config).unwrap()
}

async fn call(state: &AppState, method: Method, uri: &str, body: Option<Value>, key: Option<&str>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(k) = key {
        req = req.header("Idempotency-Key", k);
    }
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = router(state.clone()).oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn post(state: &AppState, uri: &str, body: Value) -> (StatusCode, Value) {
    call(state, Method::POST, uri, Some(body), None).await
}

async fn get(state: &AppState, uri: &str) -> (StatusCode, Value) {
    call(state, Method::GET, uri, None, None).await
}

async fn session(state: &AppState) -> String {
    let (status, body) = post(state, "/v1/sessions", json!({})).await;
    assert_eq!(status, StatusCode::CREATED);
    body["session_id"].as_str().unwrap().to_string()
}

fn manual_task(n: usize, edges: &[(usize, usize)], params: TaskParams) -> Value {
    let network = RoadNetwork::new(n, edges, GeneratorKind::Manual).unwrap();
    json!(TaskDocument::new(&DeliveryTask::new(network, params).unwrap(), 7))
}

/// The pursuer starts next to the truck, always pursues, and the goal is
/// unreachable.
fn capture_task() -> Value {
    manual_task(
        3,
        &[(0, 1)],
        TaskParams {
            adt_start: 0,
            mg_start: 1,
            goal: 2,
            p_trans: 1.0,
            mg_pursue_prob: 1.0,
            ..TaskParams::default()
        },
    )
}

/// The goal is adjacent to the truck and the pursuer is in another component.
fn trivial_task() -> Value {
    manual_task(
        4,
        &[(0, 1), (2, 3)],
        TaskParams {
            adt_start: 0,
            mg_start: 2,
            goal: 1,
            p_trans: 1.0,
            ..TaskParams::default()
        },
    )
}

async fn create(state: &AppState, task: Value, session_id: &str) -> String {
    let (status, body) = post(state, "/v1/tasks", json!({"task": task, "session_id": session_id})).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body["task_id"].as_str().unwrap().to_string()
}

async fn assess(state: &AppState, id: &str) -> Value {
    let (status, body) = post(state, &format!("/v1/tasks/{id}/assess"), json!({"trusted": "vi"})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    body
}

async fn decide(state: &AppState, id: &str, decision: &str) -> (StatusCode, Value) {
    post(state, &format!("/v1/tasks/{id}/decision"), json!({"decision": decision})).await
}

async fn execute(state: &AppState, id: &str) -> (StatusCode, Value) {
    post(state, &format!("/v1/tasks/{id}/execute"), json!({})).await
}

#[tokio::test]
async fn cancel_costs_the_cancel_penalty() {
    let s = state(config());
    let sid = session(&s).await;
    let tid = create(&s, trivial_task(), &sid).await;
    assess(&s, &tid).await;
    let (status, body) = decide(&s, &tid, "cancel").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["session_score"], json!(-0.25));
    let (status, body) = execute(&s, &tid).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["executed"], json!(false));
    assert_eq!(body["outcome"], json!("cancelled"));
    let (_, session) = get(&s, &format!("/v1/sessions/{sid}")).await;
    assert_eq!(session["score"], json!(-0.25));
    assert_eq!(session["history"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn authorized_capture_costs_two() {
    let s = state(config());
    let sid = session(&s).await;
    let tid = create(&s, capture_task(), &sid).await;
    let assessment = assess(&s, &tid).await;
    assert_eq!(assessment["indicators"]["x_o"], json!(-1.0));
    assert_eq!(decide(&s, &tid, "authorize").await.0, StatusCode::OK);
    let (status, body) = execute(&s, &tid).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["outcome"], json!("caught"));
    assert_eq!(body["score_delta"], json!(-2.0));
    assert_eq!(body["session_score"], json!(-2.0));
}

#[tokio::test]
async fn authorized_trivial_delivery_scores_one() {
    let s = state(config());
    let sid = session(&s).await;
    let tid = create(&s, trivial_task(), &sid).await;
    let assessment = assess(&s, &tid).await;
    assert_eq!(assessment["indicators"]["x_o"], json!(1.0));
    assert_eq!(assessment["terminals"]["delivered"], json!(50));
    assert_eq!(decide(&s, &tid, "authorize").await.0, StatusCode::OK);
    let (status, body) = execute(&s, &tid).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["outcome"], json!("delivered"));
    assert_eq!(body["cumulative_reward"], json!(2000.0));
    assert_eq!(body["trace"]["steps"].as_array().unwrap().len(), 1);
    let (_, session) = get(&s, &format!("/v1/sessions/{sid}")).await;
    assert_eq!(session["score"], json!(1.0));
    assert_eq!(session["history"][0]["outcome"], json!("delivered"));
}

#[tokio::test]
async fn same_seed_generates_identical_task() {
    let s = state(config());
    let req = json!({"seed": 11, "n_range": [10, 14]});
    let (a_status, a) = post(&s, "/v1/tasks/generate", req.clone()).await;
    let (b_status, b) = post(&s, "/v1/tasks/generate", req).await;
    assert_eq!((a_status, b_status), (StatusCode::CREATED, StatusCode::CREATED));
    assert_ne!(a["task_id"], b["task_id"]);
    assert_eq!(a["task"], b["task"]);
    assert_eq!(a["rejections"], b["rejections"]);
    let n = a["task"]["network"]["n"].as_u64().unwrap();
    assert!((10..=14).contains(&n));
}

#[tokio::test]
async fn generated_sizes_stay_within_bounds() {
    let s = state(config());
    for seed in 0..10 {
        let (status, body) = post(&s, "/v1/tasks/generate", json!({"seed": seed})).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        let n = body["task"]["network"]["n"].as_u64().unwrap();
        assert!((8..=35).contains(&n), "n = {n}");
    }
}

#[tokio::test]
async fn invalid_ranges_are_422() {
    let s = state(config());
    for body in [
        json!({"n_range": [5, 10]}),
        json!({"n_range": [20, 40]}),
        json!({"n_range": [20, 10]}),
        json!({"p_trans_range": [-0.1, 0.5]}),
        json!({"p_trans_range": [0.9, 0.5]}),
        json!({"bogus": 1}),
    ] {
        let (status, reply) = post(&s, "/v1/tasks/generate", body.clone()).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body} -> {reply}");
        assert!(reply["error"]["message"].is_string());
    }
    let (status, _) = call(&s, Method::POST, "/v1/tasks/generate", None, Some("")).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn assess_parameters_are_validated() {
    let s = state(config());
    let sid = session(&s).await;
    let tid = create(&s, trivial_task(), &sid).await;
    let uri = format!("/v1/tasks/{tid}/assess");
    for body in [
        json!({"runs": 1}),
        json!({"runs": 1_000_000}),
        json!({"candidate": "magic"}),
        json!({"trusted": "model"}),
    ] {
        let (status, reply) = post(&s, &uri, body.clone()).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body} -> {reply}");
    }
    let (status, _) = post(&s, "/v1/tasks", json!({"task": {"schema_version": 1}})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn unknown_ids_are_404() {
    let s = state(config());
    assert_eq!(get(&s, "/v1/sessions/s-999999").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get(&s, "/v1/tasks/t-999999").await.0, StatusCode::NOT_FOUND);
    assert_eq!(post(&s, "/v1/tasks/t-999999/assess", json!({})).await.0, StatusCode::NOT_FOUND);
    assert_eq!(decide(&s, "t-999999", "cancel").await.0, StatusCode::NOT_FOUND);
    assert_eq!(execute(&s, "t-999999").await.0, StatusCode::NOT_FOUND);
    let (status, _) = post(&s, "/v1/tasks/generate", json!({"session_id": "s-424242"})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn out_of_order_and_repeated_steps_are_409() {
    let s = state(config());
    let sid = session(&s).await;
    let tid = create(&s, trivial_task(), &sid).await;
    assert_eq!(decide(&s, &tid, "authorize").await.0, StatusCode::CONFLICT);
    assert_eq!(execute(&s, &tid).await.0, StatusCode::CONFLICT);
    assess(&s, &tid).await;
    assert_eq!(post(&s, &format!("/v1/tasks/{tid}/assess"), json!({})).await.0, StatusCode::CONFLICT);
    assert_eq!(execute(&s, &tid).await.0, StatusCode::CONFLICT);
    assert_eq!(decide(&s, &tid, "authorize").await.0, StatusCode::OK);
    assert_eq!(decide(&s, &tid, "cancel").await.0, StatusCode::CONFLICT);
    assert_eq!(execute(&s, &tid).await.0, StatusCode::OK);
    assert_eq!(execute(&s, &tid).await.0, StatusCode::CONFLICT);
    let (_, task) = get(&s, &format!("/v1/tasks/{tid}")).await;
    assert_eq!(task["state"], json!("executed"));
}

#[tokio::test]
async fn decision_needs_a_matching_session() {
    let s = state(config());
    let sid = session(&s).await;
    let other = session(&s).await;
    let (_, body) = post(&s, "/v1/tasks", json!({"task": trivial_task()})).await;
    let tid = body["task_id"].as_str().unwrap().to_string();
    assess(&s, &tid).await;
    let uri = format!("/v1/tasks/{tid}/decision");
    assert_eq!(decide(&s, &tid, "cancel").await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(
        post(&s, &uri, json!({"decision": "maybe", "session_id": sid})).await.0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    assert_eq!(post(&s, &uri, json!({"decision": "cancel", "session_id": "s-777777"})).await.0, StatusCode::NOT_FOUND);
    assert_eq!(post(&s, &uri, json!({"decision": "cancel", "session_id": sid})).await.0, StatusCode::OK);

    let tid2 = create(&s, trivial_task(), &sid).await;
    assess(&s, &tid2).await;
    let uri2 = format!("/v1/tasks/{tid2}/decision");
    let (status, _) = post(&s, &uri2, json!({"decision": "cancel", "session_id": other})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn idempotency_key_replays_the_first_reply() {
    let s = state(config());
    let (a_status, a) = call(&s, Method::POST, "/v1/sessions", None, Some("k1")).await;
    let (b_status, b) = call(&s, Method::POST, "/v1/sessions", None, Some("k1")).await;
    assert_eq!(a_status, b_status);
    assert_eq!(a, b);
    let (_, c) = call(&s, Method::POST, "/v1/sessions", None, Some("k2")).await;
    assert_ne!(a["session_id"], c["session_id"]);

    let sid = a["session_id"].as_str().unwrap();
    let tid = create(&s, trivial_task(), sid).await;
    assess(&s, &tid).await;
    let uri = format!("/v1/tasks/{tid}/decision");
    let body = json!({"decision": "cancel"});
    let first = call(&s, Method::POST, &uri, Some(body.clone()), Some("d")).await;
    let again = call(&s, Method::POST, &uri, Some(body.clone()), Some("d")).await;
    assert_eq!(first, again);
    assert_eq!(first.0, StatusCode::OK);
    let (_, session) = get(&s, &format!("/v1/sessions/{sid}")).await;
    assert_eq!(session["score"], json!(-0.25));
    assert_eq!(call(&s, Method::POST, &uri, Some(body), Some("e")).await.0, StatusCode::CONFLICT);
}

#[tokio::test]
async fn assessment_is_deterministic_per_task_seed() {
    let a = state(config());
    let b = state(config());
    for s in [&a, &b] {
        let (status, _) = post(s, "/v1/tasks/generate", json!({"seed": 3, "n_range": [8, 10]})).await;
        assert_eq!(status, StatusCode::CREATED);
    }
    let req = json!({"trusted": "mcts:depth=2,its=20,explore=1000", "candidate": "vi", "runs": 40});
    let (sa, ra) = post(&a, "/v1/tasks/t-000001/assess", req.clone()).await;
    let (sb, rb) = post(&b, "/v1/tasks/t-000001/assess", req).await;
    assert_eq!((sa, sb), (StatusCode::OK, StatusCode::OK), "{ra}");
    assert_eq!(ra, rb);
    let x_s = ra["indicators"]["x_s"].as_f64().unwrap();
    assert!((0.0..=2.0).contains(&x_s));
    assert!(ra["labels"]["x_s"].is_string());
    let x_o = ra["indicators"]["x_o"].as_f64().unwrap();
    assert!((-1.0..=1.0).contains(&x_o));
}

#[tokio::test]
async fn restart_restores_identical_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ServiceConfig {
        event_log: Some(dir.path().join("events").join("log.jsonl")),
        ..config()
    };
    let first = state(cfg.clone());
    let sid = session(&first).await;
    let tid = create(&first, trivial_task(), &sid).await;
    assess(&first, &tid).await;
    decide(&first, &tid, "authorize").await;
    execute(&first, &tid).await;
    let generated = post(&first, "/v1/tasks/generate", json!({"seed": 4, "session_id": sid})).await.1;
    call(&first, Method::POST, "/v1/sessions", None, Some("again")).await;
    let before = first.store().await;
    let session_before = get(&first, &format!("/v1/sessions/{sid}")).await;
    drop(first);

    let second = state(cfg);
    assert_eq!(second.store().await, before);
    assert_eq!(get(&second, &format!("/v1/sessions/{sid}")).await, session_before);
    let gid = generated["task_id"].as_str().unwrap();
    assert_eq!(get(&second, &format!("/v1/tasks/{gid}")).await.1, generated);
    let (_, next) = post(&second, "/v1/sessions", json!({})).await;
    assert_eq!(next["session_id"], json!("s-000003"));
}

#[tokio::test]
async fn spec_lists_every_route() {
    let s = state(config());
    let (status, doc) = get(&s, "/v1/spec").await;
    assert_eq!(status, StatusCode::OK);
    assert!(doc["openapi"].as_str().unwrap().starts_with("3."));
    for path in [
        "/v1/sessions",
        "/v1/sessions/{id}",
        "/v1/tasks/generate",
        "/v1/tasks/{id}/assess",
        "/v1/tasks/{id}/decision",
        "/v1/tasks/{id}/execute",
        "/v1/spec",
    ] {
        assert!(doc["paths"][path].is_object(), "{path}");
    }
}

#[tokio::test]
async fn configured_surrogate_is_the_default_trusted_solver() {
    use famsec_harness::commands::surrogate_train;
    use famsec_harness::experiments::{RunOptions, SurrogatePreset};

    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        seed: 2,
        runs: Some(10),
        tasks: Some(12),
        trusted_depth: Some(2),
        ..RunOptions::default()
    };
    let (_, model) = surrogate_train(SurrogatePreset::Exp3, &opts, Some(10)).unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();

    let s = state(ServiceConfig {
        model_path: Some(path),
        default_candidate: "mcts:depth=2,its=20,explore=1000".into(),
        ..config()
    });
    let (_, task) = post(&s, "/v1/tasks/generate", json!({"seed": 9, "n_range": [8, 10]})).await;
    let tid = task["task_id"].as_str().unwrap();
    let (status, body) = post(&s, &format!("/v1/tasks/{tid}/assess"), json!({"runs": 20})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["trusted"]["source"], json!("surrogate"));
    let x_s = body["indicators"]["x_s"].as_f64().unwrap();
    assert!((0.0..=2.0).contains(&x_s));
    assert!(body["flags"].as_array().unwrap().contains(&json!("trusted_predicted_by_surrogate")));
}

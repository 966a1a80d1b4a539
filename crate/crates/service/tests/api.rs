use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use zeck_core::game::{GameState, Move};
use zeck_core::sequence::SequenceSpec;
use zeck_core::solver::{Label, Solver};
use zeck_service::{router, AppState, Config};

fn app() -> Router {
    app_with(Config::default())
}

fn app_with(config: Config) -> Router {
    router(Arc::new(AppState::new(config)))
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes)
        .unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, value)
}

async fn create(app: &Router, body: Value) -> Value {
    let (status, v) = call(app, Method::POST, "/games", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v
}

async fn play(app: &Router, id: &str, mv: &Value) -> (StatusCode, Value) {
    call(
        app,
        Method::POST,
        &format!("/games/{id}/moves"),
        Some(mv.clone()),
    )
    .await
}

fn id_of(v: &Value) -> String {
    v["id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn health_check() {
    let (status, v) = call(&app(), Method::GET, "/healthz", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["status"], "ok");
}

#[tokio::test]
async fn fresh_game_and_first_move() {
    let app = app();
    let g = create(&app, json!({"n": 5})).await;
    assert_eq!(g["state"], json!({"c": 1, "k": 1, "counts": [[1, 5]]}));
    assert_eq!(g["turn"], 1);
    assert_eq!(g["status"], "in_progress");
    assert_eq!(g["legal_moves"], json!([{"kind": "Reduce", "pivot": 1}]));
    assert_eq!(g["id"].as_str().unwrap().len(), 32);

    let id = id_of(&g);
    let (status, v) = play(&app, &id, &json!({"kind": "Reduce", "pivot": 1})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["turn"], 2);
    assert_eq!(v["state"]["counts"], json!([[1, 3], [2, 1]]));
    assert_eq!(v["legal_moves"].as_array().unwrap().len(), 2);
    assert_eq!(v["history"][0]["player"], 1);

    // GETs do not change anything.
    let (_, a) = call(&app, Method::GET, &format!("/games/{id}"), None).await;
    let (_, b) = call(&app, Method::GET, &format!("/games/{id}"), None).await;
    assert_eq!(a, b);
    assert_eq!(a["state"], v["state"]);
}

#[tokio::test]
async fn invalid_parameters_are_422() {
    let app = app();
    for body in [
        json!({"n": 0}),
        json!({"n": 5, "c": 0}),
        json!({"n": 5000}),
        json!({"m": 3}),
        json!({"n": 5, "mode": "chess"}),
    ] {
        let (status, v) = call(&app, Method::POST, "/games", Some(body.clone())).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
        assert_eq!(v["error"], "invalid_params");
        assert!(v["message"].is_string());
    }
}

#[tokio::test]
async fn n1_is_already_finished() {
    let g = create(&app(), json!({"n": 1, "mode": "optimal"})).await;
    assert_eq!(g["status"], "finished");
    assert_eq!(g["winner"], 2);
    assert_eq!(g["trivial"], true);
    assert_eq!(g["legal_moves"], json!([]));
}

#[tokio::test]
async fn unknown_id_illegal_move_and_finished_game() {
    let app = app();
    let (status, v) = call(&app, Method::GET, "/games/nope", None).await;
    assert_eq!(
        (status, v["error"].as_str()),
        (StatusCode::NOT_FOUND, Some("not_found"))
    );

    let id = id_of(&create(&app, json!({"n": 5})).await);
    let (status, v) = play(&app, &id, &json!({"kind": "Reduce", "pivot": 3})).await;
    assert_eq!(
        (status, v["error"].as_str()),
        (StatusCode::CONFLICT, Some("illegal_move"))
    );
    let (status, _) = play(&app, &id, &json!({"kind": "Sideways", "pivot": 1})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let id = id_of(&create(&app, json!({"n": 2})).await);
    let (status, v) = play(&app, &id, &json!({"kind": "Reduce", "pivot": 1})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        (v["status"].as_str(), v["winner"].as_u64()),
        (Some("finished"), Some(1))
    );
    let (status, v) = play(&app, &id, &json!({"kind": "Reduce", "pivot": 1})).await;
    assert_eq!(
        (status, v["error"].as_str()),
        (StatusCode::GONE, Some("game_finished"))
    );
    let (status, _) = call(&app, Method::GET, &format!("/games/{id}/hint"), None).await;
    assert_eq!(status, StatusCode::GONE);
}

#[tokio::test]
async fn n4_optimal_engine_wins_immediately() {
    let app = app();
    let id = id_of(&create(&app, json!({"n": 4, "mode": "optimal"})).await);
    let (status, v) = play(&app, &id, &json!({"kind": "Reduce", "pivot": 1})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["engine_move"], json!({"kind": "FullCombine", "pivot": 2}));
    assert_eq!(v["state"]["counts"], json!([[1, 1], [3, 1]]));
    assert_eq!(v["status"], "finished");
    assert_eq!(v["winner"], 2);
    assert_eq!(v["history"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn hints_at_root_and_after_first_move() {
    let app = app();
    let id = id_of(&create(&app, json!({"n": 9})).await);
    let (status, h) = call(&app, Method::GET, &format!("/games/{id}/hint"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(h, json!({"player": 1, "winning": false}));

    let id = id_of(&create(&app, json!({"n": 4})).await);
    play(&app, &id, &json!({"kind": "Reduce", "pivot": 1})).await;
    let (_, h) = call(&app, Method::GET, &format!("/games/{id}/hint"), None).await;
    assert_eq!(
        h,
        json!({"player": 2, "winning": true, "move": {"kind": "FullCombine", "pivot": 2}})
    );
}

/// Plays n = 10 against the optimal engine, always taking the first listed move,
/// checking the solver's prediction and hint soundness along the way.
#[tokio::test]
async fn full_n10_game_against_optimal_engine() {
    let app = app();
    let fib = SequenceSpec::fibonacci();
    let table = Solver::default().solve(&fib, 10).unwrap();
    let id = id_of(&create(&app, json!({"n": 10, "mode": "optimal"})).await);
    let mut view = call(&app, Method::GET, &format!("/games/{id}"), None)
        .await
        .1;
    while view["status"] == "in_progress" {
        let (_, hint) = call(&app, Method::GET, &format!("/games/{id}/hint"), None).await;
        let state: GameState = serde_json::from_value(view["state"].clone()).unwrap();
        assert_eq!(
            hint["winning"],
            table.record(&state).unwrap().label == Label::N
        );
        if hint["winning"] == true {
            let mv: Move = serde_json::from_value(hint["move"].clone()).unwrap();
            assert_eq!(
                table.record(&state.apply(mv).unwrap()).unwrap().label,
                Label::P
            );
        }
        let mv = view["legal_moves"][0].clone();
        let (status, next) = play(&app, &id, &mv).await;
        assert_eq!(status, StatusCode::OK, "{next}");
        view = next;
    }
    assert_eq!(view["winner"], 2);
    assert_eq!(view["state"]["counts"], json!([[2, 1], [5, 1]]));
    let history = view["history"].as_array().unwrap();
    for (i, entry) in history.iter().enumerate() {
        assert_eq!(entry["player"], 1 + (i % 2));
    }
}

#[tokio::test]
async fn random_engine_is_reproducible_from_seed() {
    let app = app();
    let mut finals = Vec::new();
    for _ in 0..2 {
        let id = id_of(&create(&app, json!({"n": 15, "mode": "random", "seed": 42})).await);
        let mut view = call(&app, Method::GET, &format!("/games/{id}"), None)
            .await
            .1;
        while view["status"] == "in_progress" {
            let mv = view["legal_moves"][0].clone();
            view = play(&app, &id, &mv).await.1;
        }
        assert_eq!(view["seed"], 42);
        finals.push(view["history"].clone());
    }
    assert_eq!(finals[0], finals[1]);
}

#[tokio::test]
async fn sessions_are_isolated() {
    let app = app();
    let a = id_of(&create(&app, json!({"n": 6})).await);
    let b = id_of(&create(&app, json!({"n": 6})).await);
    assert_ne!(a, b);
    play(&app, &a, &json!({"kind": "Reduce", "pivot": 1})).await;
    let (_, vb) = call(&app, Method::GET, &format!("/games/{b}"), None).await;
    assert_eq!(vb["history"], json!([]));
}

#[tokio::test]
async fn concurrent_moves_on_one_session_are_serialized() {
    let app = app();
    let id = id_of(&create(&app, json!({"n": 30})).await);
    let mut handles = Vec::new();
    for _ in 0..8 {
        let (app, id) = (app.clone(), id.clone());
        handles.push(tokio::spawn(async move {
            play(&app, &id, &json!({"kind": "Reduce", "pivot": 1}))
                .await
                .0
        }));
    }
    let ok = futures_count(handles).await;
    let (_, v) = call(&app, Method::GET, &format!("/games/{id}"), None).await;
    assert_eq!(v["history"].as_array().unwrap().len(), ok);
    assert_eq!(v["turn"], 1 + (ok % 2));
}

async fn futures_count(handles: Vec<tokio::task::JoinHandle<StatusCode>>) -> usize {
    let mut ok = 0;
    for h in handles {
        if h.await.unwrap() == StatusCode::OK {
            ok += 1;
        }
    }
    ok
}

#[tokio::test]
async fn budget_exceeded_is_507() {
    let app = app_with(Config {
        budget: 50,
        ..Config::default()
    });
    let (status, v) = call(
        &app,
        Method::POST,
        "/games",
        Some(json!({"n": 30, "mode": "optimal"})),
    )
    .await;
    assert_eq!(
        (status, v["error"].as_str()),
        (StatusCode::INSUFFICIENT_STORAGE, Some("budget_exceeded"))
    );
    let (status, _) = call(&app, Method::GET, "/tree?n=30", None).await;
    assert_eq!(status, StatusCode::INSUFFICIENT_STORAGE);
}

#[tokio::test]
async fn tree_endpoint() {
    let app = app();
    let (status, t) = call(&app, Method::GET, "/tree?n=5&depth=2", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(t["state"]["counts"], json!([[1, 5]]));
    assert_eq!(t["winner"], 2);
    let child = &t["children"][0];
    assert_eq!(child["move"], json!({"kind": "Reduce", "pivot": 1}));
    for grandchild in child["children"].as_array().unwrap() {
        assert_eq!(grandchild["depth"], 2);
        assert_eq!(grandchild["truncated"], true);
    }

    let (status, dot) = call(&app, Method::GET, "/tree?n=9&format=dot", None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(dot.as_str().unwrap().starts_with("digraph"));

    let (status, one) = call(&app, Method::GET, "/tree?n=1", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(one["children"], json!([]));

    for bad in ["/tree?n=0", "/tree?n=5&format=png", "/tree"] {
        let (status, _) = call(&app, Method::GET, bad, None).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{bad}");
    }
}

#[tokio::test]
async fn snapshot_survives_restart() {
    let dir = tempfile::tempdir().unwrap();
    let config = Config {
        snapshot: Some(dir.path().join("sessions.json")),
        ..Config::default()
    };
    let first = router(Arc::new(AppState::restore(config.clone()).unwrap()));
    let id = id_of(&create(&first, json!({"n": 12, "mode": "random", "seed": 9})).await);
    let mut after = play(&first, &id, &json!({"kind": "Reduce", "pivot": 1}))
        .await
        .1;
    after.as_object_mut().unwrap().remove("engine_move");

    let state = AppState::restore(config).unwrap();
    assert_eq!(state.session_count(), 1);
    let second = router(Arc::new(state));
    let (status, back) = call(&second, Method::GET, &format!("/games/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(back, after);
}

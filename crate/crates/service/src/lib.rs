//! JSON-over-HTTP play service for the Zeckendorf game.
//!
//! Sessions live in memory and may be mirrored to a JSON snapshot file. Requests on
//! different sessions run in parallel; requests on one session are serialized.

pub mod error;
pub mod session;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex as StdMutex, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::header::CONTENT_TYPE;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::Mutex;
use zeck_core::export::{build_export, TreeFormat};
use zeck_core::game::Move;
use zeck_core::sequence::SequenceSpec;
use zeck_core::solver::{Solver, DEFAULT_STATE_BUDGET};

pub use error::ApiError;
pub use session::{Hint, Mode, Session, SessionRecord, SessionView, Status};

#[derive(Debug, Clone)]
pub struct Config {
    /// Position budget for every solve.
    pub budget: usize,
    /// Largest `n` accepted for games and trees.
    pub max_n: u64,
    /// Node cap for tree layouts.
    pub tree_node_budget: usize,
    /// Sessions are written here after every change and read back on startup.
    pub snapshot: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            budget: DEFAULT_STATE_BUDGET,
            max_n: 1000,
            tree_node_budget: 200_000,
            snapshot: None,
        }
    }
}

type SessionRef = Arc<Mutex<Session>>;

pub struct AppState {
    config: Config,
    solver: Solver,
    sessions: RwLock<HashMap<String, SessionRef>>,
    records: StdMutex<BTreeMap<String, SessionRecord>>,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        AppState {
            solver: Solver::with_budget(config.budget),
            config,
            sessions: RwLock::new(HashMap::new()),
            records: StdMutex::new(BTreeMap::new()),
        }
    }

    /// Loads sessions from the snapshot file, if one is configured and exists.
    pub fn restore(config: Config) -> Result<Self, ApiError> {
        let state = AppState::new(config);
        let Some(path) = state.config.snapshot.clone() else {
            return Ok(state);
        };
        if !path.exists() {
            return Ok(state);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| ApiError::internal(e.to_string()))?;
        let records: Vec<SessionRecord> =
            serde_json::from_str(&text).map_err(|e| ApiError::invalid(format!("snapshot: {e}")))?;
        for record in records {
            let session = Session::restore(&record, &state.solver)?;
            state.insert(session);
        }
        tracing::info!(sessions = state.session_count(), path = %path.display(), "restored snapshot");
        Ok(state)
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().unwrap().len()
    }

    fn insert(&self, session: Session) {
        let id = session.id().to_string();
        self.records
            .lock()
            .unwrap()
            .insert(id.clone(), session.record());
        self.sessions
            .write()
            .unwrap()
            .insert(id, Arc::new(Mutex::new(session)));
    }

    fn session(&self, id: &str) -> Result<SessionRef, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    /// Records the session and rewrites the snapshot file.
    fn persist(&self, session: &Session) -> Result<(), ApiError> {
        let mut records = self.records.lock().unwrap();
        records.insert(session.id().to_string(), session.record());
        match &self.config.snapshot {
            Some(path) => write_snapshot(path, records.values()),
            None => Ok(()),
        }
    }
}

fn write_snapshot<'a>(
    path: &Path,
    records: impl Iterator<Item = &'a SessionRecord>,
) -> Result<(), ApiError> {
    let list: Vec<&SessionRecord> = records.collect();
    let text = serde_json::to_string(&list).map_err(|e| ApiError::internal(e.to_string()))?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, text)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| ApiError::internal(format!("snapshot write failed: {e}")))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game))
        .route("/games/{id}/moves", post(apply_move))
        .route("/games/{id}/hint", get(hint))
        .route("/tree", get(tree))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: Config) -> std::io::Result<()> {
    let state = AppState::restore(config)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.message))?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateGame {
    n: u64,
    #[serde(default = "one")]
    c: u32,
    #[serde(default = "one")]
    k: u32,
    #[serde(default)]
    mode: Mode,
    seed: Option<u64>,
}

fn one() -> u32 {
    1
}

fn check_params(config: &Config, n: u64, c: u32, k: u32) -> Result<SequenceSpec, ApiError> {
    if n == 0 {
        return Err(ApiError::invalid("n must be at least 1"));
    }
    if n > config.max_n {
        return Err(ApiError::invalid(format!(
            "n = {n} exceeds the limit of {}",
            config.max_n
        )));
    }
    SequenceSpec::new(c, k).map_err(ApiError::invalid)
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

async fn create_game(
    State(app): State<Arc<AppState>>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(req) = body.map_err(|e| ApiError::invalid(e.body_text()))?;
    let spec = check_params(&app.config, req.n, req.c, req.k)?;
    let seed = req.seed.unwrap_or_else(rand::random);
    let id = format!("{:032x}", rand::random::<u128>());
    let solver = app.solver;
    let session =
        blocking(move || Session::create(id, &spec, req.n, req.mode, seed, &solver)).await?;
    let view = session.view(None);
    app.persist(&session)?;
    app.insert(session);
    tracing::info!(id = %view.id, n = view.n, c = view.c, k = view.k, mode = ?view.mode, "created game");
    Ok((axum::http::StatusCode::CREATED, Json(view)).into_response())
}

async fn get_game(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionView>, ApiError> {
    let session = app.session(&id)?;
    let guard = session.lock().await;
    Ok(Json(guard.view(None)))
}

async fn apply_move(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<Move>, JsonRejection>,
) -> Result<Json<SessionView>, ApiError> {
    let session = app.session(&id)?;
    let Json(mv) = body.map_err(|e| ApiError::invalid(e.body_text()))?;
    let mut guard = session.lock().await;
    let reply = guard.play(mv)?;
    app.persist(&guard)?;
    Ok(Json(guard.view(reply)))
}

async fn hint(
    State(app): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<Hint>, ApiError> {
    let session = app.session(&id)?;
    let mut guard = session.lock_owned().await;
    let solver = app.solver;
    let hint = blocking(move || guard.hint(&solver)).await?;
    Ok(Json(hint))
}

#[derive(Debug, Deserialize)]
struct TreeQuery {
    n: u64,
    #[serde(default = "one")]
    c: u32,
    #[serde(default = "one")]
    k: u32,
    depth: Option<u32>,
    format: Option<String>,
}

async fn tree(
    State(app): State<Arc<AppState>>,
    query: Result<Query<TreeQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query.map_err(|e| ApiError::invalid(e.body_text()))?;
    let spec = check_params(&app.config, q.n, q.c, q.k)?;
    let format: TreeFormat = q
        .format
        .as_deref()
        .unwrap_or("json")
        .parse()
        .map_err(ApiError::invalid)?;
    let solver = app.solver;
    let node_budget = app.config.tree_node_budget;
    let export = blocking(move || {
        let table = solver.solve(&spec, q.n).map_err(ApiError::from_core)?;
        build_export(&table, q.depth, node_budget).map_err(ApiError::from_core)
    })
    .await?;
    Ok(match format {
        TreeFormat::Json => Json(export.to_json()).into_response(),
        TreeFormat::Dot => ([(CONTENT_TYPE, "text/vnd.graphviz")], export.to_dot()).into_response(),
    })
}

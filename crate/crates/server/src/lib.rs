//! HTTP/JSON session service.
//!
//! Every state change is delegated to [`bublz_core::Session`]; this crate
//! only routes requests, stores sessions in memory and appends completed
//! sessions to the trace log.
//!
//! | method | path | success | errors |
//! |---|---|---|---|
//! | GET | `/api/campaign` | 200 levels | |
//! | POST | `/api/sessions` | 201 state | 400 |
//! | GET | `/api/sessions/{id}` | 200 state | 404 |
//! | DELETE | `/api/sessions/{id}` | 204 | 404 |
//! | POST | `/api/sessions/{id}/moves` | 200 state | 400, 404, 409 `guard_violation` |
//! | GET | `/api/sessions/{id}/feedback` | 200 report | 404, 409 `not_complete` |
//! | POST | `/api/sessions/{id}/transition` | 201 state | 400, 404, 409 `not_complete` / `no_next_level` |

pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use bublz_core::engine::{EngineError, GuardViolation};
use bublz_core::trace::TraceWriter;
use bublz_core::{
    optimal_table, Campaign, ClickTriplet, MoveKind, OptimalTable, ScoringRule, Session, SessionId,
    TargetPicker, TargetRange, TransitionChoice,
};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

pub use store::SessionStore;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("campaign {path}: {source}")]
    Campaign {
        path: PathBuf,
        source: bublz_core::CampaignError,
    },
    #[error("solver disagrees with validator: {0}")]
    Table(#[from] bublz_core::solver::SolverError),
    #[error("binding {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error("server: {0}")]
    Serve(std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub addr: SocketAddr,
    pub campaign_path: PathBuf,
    pub trace_log: Option<PathBuf>,
    pub seed: Option<u64>,
    pub static_dir: Option<PathBuf>,
}

/// Shared state behind every handler.
pub struct AppState {
    campaign: Campaign,
    tables: Vec<OptimalTable>,
    store: SessionStore,
    picker: Mutex<TargetPicker>,
    trace: Option<TraceWriter>,
}

impl AppState {
    /// Validates `campaign` (every level playable) and precomputes the
    /// optimal tables.
    pub fn new(
        campaign: Campaign,
        seed: u64,
        trace: Option<TraceWriter>,
    ) -> Result<Self, ServerError> {
        campaign
            .check_playable()
            .map_err(|source| ServerError::Campaign {
                path: PathBuf::new(),
                source,
            })?;
        let tables = campaign
            .levels
            .iter()
            .map(optimal_table)
            .collect::<Result<_, _>>()?;
        Ok(Self {
            campaign,
            tables,
            store: SessionStore::new(),
            picker: Mutex::new(TargetPicker::new(seed, TargetRange::default())),
            trace,
        })
    }

    pub fn from_config(config: &ServerConfig) -> Result<Self, ServerError> {
        let path = &config.campaign_path;
        let text = std::fs::read_to_string(path).map_err(|source| ServerError::Io {
            path: path.clone(),
            source,
        })?;
        let campaign = Campaign::from_json(&text).map_err(|source| ServerError::Campaign {
            path: path.clone(),
            source,
        })?;
        let trace = match &config.trace_log {
            Some(p) => Some(TraceWriter::open(p).map_err(|source| ServerError::Io {
                path: p.clone(),
                source,
            })?),
            None => None,
        };
        let seed = config.seed.unwrap_or_else(entropy_seed);
        Self::new(campaign, seed, trace).map_err(|e| match e {
            ServerError::Campaign { source, .. } => ServerError::Campaign {
                path: path.clone(),
                source,
            },
            other => other,
        })
    }

    pub fn store(&self) -> &SessionStore {
        &self.store
    }

    fn table(&self, level: u32) -> &OptimalTable {
        &self.tables[level as usize - 1]
    }

    fn log_if_complete(&self, session: &Session) {
        if let (Some(writer), Some(record)) = (&self.trace, session.to_trace()) {
            if let Err(e) = writer.append(&record) {
                eprintln!("trace log append failed for {}: {e}", session.id());
            }
        }
    }
}

fn entropy_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

/// Wire shape of a session.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionView {
    pub id: String,
    pub level: u32,
    pub triplet: ClickTriplet,
    pub target: i64,
    pub count: i64,
    pub moves_made: u32,
    pub legal_moves: Vec<MoveKind>,
    pub complete: bool,
}

impl From<&Session> for SessionView {
    fn from(s: &Session) -> Self {
        Self {
            id: s.id().to_string(),
            level: s.level().index(),
            triplet: s.level().triplet(),
            target: s.target(),
            count: s.count(),
            moves_made: s.moves_made(),
            legal_moves: s.legal_moves(),
            complete: s.is_complete(),
        }
    }
}

#[derive(Debug, Serialize)]
struct LevelView {
    index: u32,
    triplet: ClickTriplet,
    bounds: bublz_core::BoardBounds,
    targets: TargetRange,
    scoring: ScoringRule,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub level: u32,
    pub target: Option<i64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    #[serde(rename = "move")]
    pub kind: MoveKind,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRequest {
    pub choice: TransitionChoice,
}

/// Error responses: `{"error": <code>, "message": ...}` plus `kind` for guards.
#[derive(Debug)]
enum ApiError {
    BadRequest(String),
    NotFound,
    Guard(GuardViolation),
    Conflict(&'static str, String),
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::BadRequest(r.body_text())
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::NotComplete => ApiError::Conflict("not_complete", e.to_string()),
            EngineError::NoNextLevel(_) => ApiError::Conflict("no_next_level", e.to_string()),
            EngineError::TargetOutOfRange { .. } | EngineError::UnreachableTarget { .. } => {
                ApiError::BadRequest(e.to_string())
            }
            EngineError::Scoring(_) => ApiError::Conflict("scoring", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::BadRequest(message) => (
                StatusCode::BAD_REQUEST,
                json!({"error": "bad_request", "message": message}),
            ),
            ApiError::NotFound => (
                StatusCode::NOT_FOUND,
                json!({"error": "not_found", "message": "unknown session"}),
            ),
            ApiError::Guard(v) => (
                StatusCode::CONFLICT,
                json!({"error": "guard_violation", "kind": v.kind.as_str(), "message": v.message}),
            ),
            ApiError::Conflict(code, message) => (
                StatusCode::CONFLICT,
                json!({"error": code, "message": message}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Shared, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/campaign", get(campaign))
        .route("/api/sessions", post(create_session))
        .route(
            "/api/sessions/{id}",
            get(get_session).delete(delete_session),
        )
        .route("/api/sessions/{id}/moves", post(post_move))
        .route("/api/sessions/{id}/feedback", get(feedback))
        .route("/api/sessions/{id}/transition", post(transition))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

async fn campaign(State(app): State<Shared>) -> Json<Vec<LevelView>> {
    Json(
        app.campaign
            .levels
            .iter()
            .map(|l| LevelView {
                index: l.index(),
                triplet: l.triplet(),
                bounds: l.bounds(),
                targets: l.targets(),
                scoring: l.scoring(),
            })
            .collect(),
    )
}

async fn create_session(
    State(app): State<Shared>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let Json(req) = body?;
    let level = app
        .campaign
        .level(req.level)
        .ok_or_else(|| ApiError::BadRequest(format!("unknown level {}", req.level)))?;
    let target = match (req.target, req.seed) {
        (Some(t), _) => t,
        (None, Some(seed)) => TargetPicker::new(seed, level.targets()).pick(),
        (None, None) => app
            .picker
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .pick_in(&level.targets()),
    };
    let session = Session::with_table(
        app.store.allocate_id(),
        level,
        target,
        app.table(level.index()),
    )?;
    let view = SessionView::from(&session);
    app.log_if_complete(&session);
    app.store.insert(session);
    Ok((StatusCode::CREATED, Json(view)))
}

fn lookup(app: &AppState, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
    app.store
        .get(&SessionId(id.to_string()))
        .ok_or(ApiError::NotFound)
}

async fn get_session(
    State(app): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    let slot = lookup(&app, &id)?;
    let session = slot.lock().unwrap_or_else(|e| e.into_inner());
    Ok(Json(SessionView::from(&*session)))
}

async fn delete_session(
    State(app): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<StatusCode> {
    if app.store.remove(&SessionId(id)) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(ApiError::NotFound)
    }
}

async fn post_move(
    State(app): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> ApiResult<Json<SessionView>> {
    let slot = lookup(&app, &id)?;
    let Json(req) = body?;
    let mut session = slot.lock().unwrap_or_else(|e| e.into_inner());
    session.apply_move(req.kind).map_err(ApiError::Guard)?;
    app.log_if_complete(&session);
    Ok(Json(SessionView::from(&*session)))
}

async fn feedback(
    State(app): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<Json<bublz_core::FeedbackReport>> {
    let slot = lookup(&app, &id)?;
    let session = slot.lock().unwrap_or_else(|e| e.into_inner());
    Ok(Json(session.feedback()?))
}

async fn transition(
    State(app): State<Shared>,
    Path(id): Path<String>,
    body: Result<Json<TransitionRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let slot = lookup(&app, &id)?;
    let Json(req) = body?;
    let next = {
        let session = slot.lock().unwrap_or_else(|e| e.into_inner());
        let mut picker = app.picker.lock().unwrap_or_else(|e| e.into_inner());
        session.transition(
            req.choice,
            &app.campaign,
            &mut picker,
            app.store.allocate_id(),
        )?
    };
    let view = SessionView::from(&next);
    app.store.insert(next);
    Ok((StatusCode::CREATED, Json(view)))
}

/// Serves on an already-bound listener until the future is dropped.
pub async fn serve_on(
    listener: TcpListener,
    state: Shared,
    static_dir: Option<PathBuf>,
) -> Result<(), ServerError> {
    axum::serve(listener, router(state, static_dir))
        .await
        .map_err(ServerError::Serve)
}

/// Validates the campaign, binds and serves until Ctrl-C.
pub async fn run(config: ServerConfig) -> Result<(), ServerError> {
    let state = Arc::new(AppState::from_config(&config)?);
    let listener = TcpListener::bind(config.addr)
        .await
        .map_err(|source| ServerError::Bind {
            addr: config.addr,
            source,
        })?;
    if let Ok(addr) = listener.local_addr() {
        eprintln!("listening on http://{addr}");
    }
    axum::serve(listener, router(state, config.static_dir.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(ServerError::Serve)
}

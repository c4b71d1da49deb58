//! HTTP front end for interactive stratification sessions.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/sessions` | `{matrix_a, matrix_b, clinical, modality_a?, modality_b?, log_transform?, zscore?}` (CSV texts) |
//! | GET | `/sessions/{id}` | |
//! | DELETE | `/sessions/{id}` | |
//! | GET | `/sessions/{id}/features/{a,b}?offset&limit` | |
//! | POST | `/sessions/{id}/features/{a,b}` | `{features: [..]}` or a plain-text id list |
//! | POST | `/sessions/{id}/cluster/{a,b}` | `{method, k?, seed, metric?, threshold?}` |
//! | GET | `/sessions/{id}/views/{view}` | |
//! | POST | `/sessions/{id}/selections` | `{name, atoms: [..]}` |
//! | DELETE | `/sessions/{id}/selections/{name}` | |
//! | POST | `/sessions/{id}/survival` | `{selections: [..]}` |
//! | GET | `/sessions/{id}/export/{view}?format={svg_data,csv}` | |
//! | GET | `/sessions/{id}/snapshot` | |
//! | POST | `/sessions/{id}/snapshot` | writes `{id}.json` into the snapshot directory |
//! | POST | `/sessions/restore` | a snapshot document |
//!
//! Views: `heatmap_a`, `heatmap_b`, `silhouette_a`, `silhouette_b`,
//! `graph_a`, `graph_b`, `parallel_sets`, `survival`. View bodies are the
//! exact payload strings of `stratix::analysis`; every response carries the
//! session revision in the `x-stratix-revision` header.

pub mod error;
pub mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use serde_json::Value;
use stratix::analysis::{to_json_string, ClusteringRequest};
use stratix::integrate::{SelectionSpec, Side};

pub use error::ServiceError;
pub use session::{CreateRequest, ExportFormat, Phase, Session, Snapshot, ViewName};

pub const DEFAULT_PORT: u16 = 8080;
pub const REVISION_HEADER: &str = "x-stratix-revision";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub request_timeout: Duration,
    pub snapshot_dir: Option<PathBuf>,
    pub max_body_bytes: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            request_timeout: Duration::from_secs(60),
            snapshot_dir: None,
            max_body_bytes: 256 * 1024 * 1024,
        }
    }
}

type SessionRef = Arc<Mutex<Session>>;

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, SessionRef>>>,
    config: Arc<ServiceConfig>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            sessions: Default::default(),
            config: Arc::new(config),
        }
    }

    fn get(&self, id: &str) -> Result<SessionRef, ServiceError> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::unknown_session(id))
    }

    fn insert(&self, session: Session) -> SessionRef {
        let id = session.id.clone();
        let s = Arc::new(Mutex::new(session));
        self.sessions.write().expect("session map lock").insert(id, s.clone());
        s
    }

    /// Runs `f` on a blocking thread with exclusive access to the session,
    /// bounded by the request timeout. Requests to one session serialize;
    /// different sessions proceed in parallel.
    async fn with_session<T, F>(&self, id: &str, f: F) -> Result<(u64, T), ServiceError>
    where
        T: Send + 'static,
        F: FnOnce(&mut Session) -> Result<T, ServiceError> + Send + 'static,
    {
        let s = self.get(id)?;
        self.blocking(move || {
            let mut guard = s.lock().unwrap_or_else(|p| p.into_inner());
            let out = f(&mut guard)?;
            Ok((guard.revision(), out))
        })
        .await
    }

    async fn blocking<T, F>(&self, f: F) -> Result<T, ServiceError>
    where
        T: Send + 'static,
        F: FnOnce() -> Result<T, ServiceError> + Send + 'static,
    {
        let limit = self.config.request_timeout;
        match tokio::time::timeout(limit, tokio::task::spawn_blocking(f)).await {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => Err(ServiceError::new(500, "internal", format!("worker failed: {e}"))),
            Err(_) => Err(ServiceError::new(
                504,
                "timeout",
                format!("request exceeded {} s", limit.as_secs_f64()),
            )),
        }
    }
}

fn json_response(status: StatusCode, revision: u64, body: String, content_type: &str) -> Response {
    let mut headers = HeaderMap::new();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_str(content_type).expect("ascii"));
    headers.insert(REVISION_HEADER, HeaderValue::from(revision));
    (status, headers, body).into_response()
}

fn ok_json(revision: u64, v: &Value) -> Response {
    json_response(StatusCode::OK, revision, to_json_string(v), "application/json")
}

fn parse_json<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ServiceError> {
    serde_json::from_slice(body).map_err(|e| ServiceError::bad_request(format!("invalid JSON body: {e}")))
}

fn parse_side(s: &str) -> Result<Side, ServiceError> {
    s.parse::<Side>()
        .map_err(|_| ServiceError::new(404, "unknown_modality", format!("modality must be a or b, got `{s}`")))
}

pub fn router(state: AppState) -> Router {
    let limit = state.config.max_body_bytes;
    Router::new()
        .route("/health", get(|| async { "ok" }))
        .route("/sessions", post(create_session))
        .route("/sessions/restore", post(restore_session))
        .route("/sessions/{id}", get(session_status).delete(delete_session))
        .route("/sessions/{id}/features/{side}", get(list_features).post(set_features))
        .route("/sessions/{id}/cluster/{side}", post(run_clustering))
        .route("/sessions/{id}/views/{view}", get(get_view))
        .route("/sessions/{id}/selections", post(define_selection))
        .route("/sessions/{id}/selections/{name}", axum::routing::delete(delete_selection))
        .route("/sessions/{id}/survival", post(run_survival))
        .route("/sessions/{id}/export/{view}", get(export_view))
        .route("/sessions/{id}/snapshot", get(get_snapshot).post(write_snapshot))
        .layer(axum::extract::DefaultBodyLimit::max(limit))
        .with_state(state)
}

async fn create_session(State(st): State<AppState>, body: Bytes) -> Result<Response, ServiceError> {
    let req: CreateRequest = parse_json(&body)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = st.blocking(move || Session::create(id, req)).await?;
    let (rev, status) = (session.revision(), session.status());
    st.insert(session);
    let mut resp = ok_json(rev, &status);
    *resp.status_mut() = StatusCode::CREATED;
    Ok(resp)
}

async fn restore_session(State(st): State<AppState>, body: Bytes) -> Result<Response, ServiceError> {
    let snap: Snapshot = parse_json(&body)?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = st.blocking(move || Session::restore(id, snap)).await?;
    let (rev, status) = (session.revision(), session.status());
    st.insert(session);
    let mut resp = ok_json(rev, &status);
    *resp.status_mut() = StatusCode::CREATED;
    Ok(resp)
}

async fn session_status(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let (rev, v) = st.with_session(&id, |s| Ok(s.status())).await?;
    Ok(ok_json(rev, &v))
}

async fn delete_session(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    st.sessions
        .write()
        .expect("session map lock")
        .remove(&id)
        .ok_or_else(|| ServiceError::unknown_session(&id))?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

#[derive(Deserialize)]
struct Page {
    #[serde(default)]
    offset: usize,
    #[serde(default = "default_limit")]
    limit: usize,
}

fn default_limit() -> usize {
    100
}

async fn list_features(
    State(st): State<AppState>,
    Path((id, side)): Path<(String, String)>,
    Query(page): Query<Page>,
) -> Result<Response, ServiceError> {
    let side = parse_side(&side)?;
    let (rev, v) = st
        .with_session(&id, move |s| Ok(s.list_features(side, page.offset, page.limit)))
        .await?;
    Ok(ok_json(rev, &v))
}

#[derive(Deserialize)]
struct FeaturesBody {
    features: Vec<String>,
}

async fn set_features(
    State(st): State<AppState>,
    Path((id, side)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let side = parse_side(&side)?;
    let is_json = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"));
    let ids = if is_json {
        parse_json::<FeaturesBody>(&body)?.features
    } else {
        let text = std::str::from_utf8(&body).map_err(|_| ServiceError::bad_request("body is not UTF-8"))?;
        stratix::features::parse_feature_list(text)
    };
    let (rev, v) = st.with_session(&id, move |s| s.set_features(side, ids)).await?;
    Ok(ok_json(rev, &v))
}

async fn run_clustering(
    State(st): State<AppState>,
    Path((id, side)): Path<(String, String)>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let side = parse_side(&side)?;
    let req: ClusteringRequest = parse_json(&body)?;
    let (rev, v) = st.with_session(&id, move |s| s.cluster(side, req)).await?;
    Ok(ok_json(rev, &v))
}

async fn get_view(
    State(st): State<AppState>,
    Path((id, view)): Path<(String, String)>,
) -> Result<Response, ServiceError> {
    let view: ViewName = view.parse()?;
    let (rev, body) = st.with_session(&id, move |s| s.view(view)).await?;
    Ok(json_response(StatusCode::OK, rev, body, "application/json"))
}

#[derive(Deserialize)]
struct ExportQuery {
    #[serde(default = "default_format")]
    format: String,
}

fn default_format() -> String {
    "svg_data".into()
}

async fn export_view(
    State(st): State<AppState>,
    Path((id, view)): Path<(String, String)>,
    Query(q): Query<ExportQuery>,
) -> Result<Response, ServiceError> {
    let view: ViewName = view.parse()?;
    let format: ExportFormat = q.format.parse()?;
    let (rev, (ct, body)) = st.with_session(&id, move |s| s.export(view, format)).await?;
    Ok(json_response(StatusCode::OK, rev, body, ct))
}

async fn define_selection(
    State(st): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let spec: SelectionSpec = parse_json(&body)?;
    let (rev, v) = st.with_session(&id, move |s| s.define_selection(spec)).await?;
    Ok(ok_json(rev, &v))
}

async fn delete_selection(
    State(st): State<AppState>,
    Path((id, name)): Path<(String, String)>,
) -> Result<Response, ServiceError> {
    let (rev, v) = st.with_session(&id, move |s| s.delete_selection(&name)).await?;
    Ok(ok_json(rev, &v))
}

#[derive(Deserialize)]
struct SurvivalBody {
    selections: Vec<String>,
}

async fn run_survival(
    State(st): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ServiceError> {
    let req: SurvivalBody = parse_json(&body)?;
    let (rev, body) = st.with_session(&id, move |s| s.survival(req.selections)).await?;
    Ok(json_response(StatusCode::OK, rev, body, "application/json"))
}

async fn get_snapshot(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let (rev, snap) = st.with_session(&id, |s| Ok(s.snapshot())).await?;
    Ok(json_response(StatusCode::OK, rev, to_json_string(&snap), "application/json"))
}

async fn write_snapshot(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    let dir = st
        .config
        .snapshot_dir
        .clone()
        .ok_or_else(|| ServiceError::new(409, "snapshots_disabled", "no snapshot directory configured"))?;
    let (rev, path) = st
        .with_session(&id, move |s| {
            std::fs::create_dir_all(&dir).map_err(stratix::Error::from)?;
            let path = dir.join(format!("{}.json", s.id));
            std::fs::write(&path, to_json_string(&s.snapshot())).map_err(stratix::Error::from)?;
            Ok(path)
        })
        .await?;
    Ok(ok_json(rev, &serde_json::json!({ "path": path })))
}

/// Bind address from `STRATIX_PORT` (all interfaces), falling back to
/// `127.0.0.1:8080`.
pub fn default_bind_addr() -> Result<SocketAddr, String> {
    match std::env::var("STRATIX_PORT") {
        Ok(p) => p
            .trim()
            .parse::<u16>()
            .map(|port| SocketAddr::from(([0, 0, 0, 0], port)))
            .map_err(|_| format!("STRATIX_PORT is not a port number: `{p}`")),
        Err(_) => Ok(SocketAddr::from(([127, 0, 0, 1], DEFAULT_PORT))),
    }
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("stratix service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(config)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

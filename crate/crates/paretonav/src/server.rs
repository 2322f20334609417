//! HTTP session service. One immutable [`Surface`] is shared by many
//! sessions; each session applies its events strictly in order and rejects
//! events stamped with a stale counter.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};
use std::time::SystemTime;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use paretonav_core::navigator::{Event, NavError, NavigationState, SessionSnapshot, Side, Surface};
use serde::{Deserialize, Serialize};

/// Set to `true` when a selector or restrictor value was clamped.
pub const CLAMPED_HEADER: &str = "x-clamped";
/// The value actually used after clamping.
pub const APPLIED_VALUE_HEADER: &str = "x-applied-value";

pub struct SessionRecord {
    pub id: String,
    pub state: NavigationState,
    pub created: SystemTime,
    pub updated: SystemTime,
    /// Accepted events in application order.
    pub log: Vec<Event>,
}

pub struct AppState {
    surface: Arc<Surface>,
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionRecord>>>>,
}

impl AppState {
    pub fn new(surface: Arc<Surface>) -> Self {
        Self {
            surface,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<SessionRecord>>, ApiError> {
        self.sessions
            .read()
            .expect("session table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreatedSession {
    pub id: String,
    pub snapshot: SessionSnapshot,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectorRequest {
    pub dim: usize,
    pub value: f64,
    pub counter: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestrictorRequest {
    pub dim: usize,
    pub side: Side,
    pub value: f64,
    pub counter: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventLog {
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter: Option<u64>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: &str, reason: String) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: error.to_string(),
                reason,
                counter: None,
            },
        }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id}"))
    }

    fn stale(expected: u64, got: u64) -> Self {
        let mut e = Self::new(
            StatusCode::CONFLICT,
            "stale_counter",
            format!("event counter {got} is stale; the session is at {expected}"),
        );
        e.body.counter = Some(expected);
        e
    }
}

impl From<NavError> for ApiError {
    fn from(e: NavError) -> Self {
        let (status, code) = match e {
            NavError::Unattainable { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "unattainable"),
            NavError::EmptySolutionSpace => (StatusCode::UNPROCESSABLE_ENTITY, "empty_solution_space"),
            NavError::DimensionOutOfRange { .. } => (StatusCode::BAD_REQUEST, "bad_dimension"),
            NavError::NonFinite => (StatusCode::BAD_REQUEST, "non_finite"),
            NavError::InvalidBounds { .. } => (StatusCode::BAD_REQUEST, "invalid_bounds"),
            NavError::EmptyTriangulation | NavError::InvalidSession(_) => {
                (StatusCode::INTERNAL_SERVER_ERROR, "internal")
            }
        };
        Self::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

pub fn router(surface: Arc<Surface>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/selector", post(selector))
        .route("/sessions/{id}/restrictor", post(restrictor))
        .route("/sessions/{id}/events", get(events))
        .with_state(Arc::new(AppState::new(surface)))
}

pub async fn serve(surface: Arc<Surface>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(surface))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn create_session(State(app): State<Arc<AppState>>) -> (StatusCode, Json<CreatedSession>) {
    let id = uuid::Uuid::new_v4().to_string();
    let state = NavigationState::new(Arc::clone(&app.surface));
    let snapshot = state.snapshot();
    let now = SystemTime::now();
    let record = SessionRecord {
        id: id.clone(),
        state,
        created: now,
        updated: now,
        log: Vec::new(),
    };
    app.sessions
        .write()
        .expect("session table lock")
        .insert(id.clone(), Arc::new(Mutex::new(record)));
    (StatusCode::CREATED, Json(CreatedSession { id, snapshot }))
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionSnapshot>, ApiError> {
    let session = app.session(&id)?;
    let record = session.lock().expect("session lock");
    Ok(Json(record.state.snapshot()))
}

async fn events(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<EventLog>, ApiError> {
    let session = app.session(&id)?;
    let record = session.lock().expect("session lock");
    Ok(Json(EventLog { events: record.log.clone() }))
}

async fn delete_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    app.sessions
        .write()
        .expect("session table lock")
        .remove(&id)
        .map(|_| StatusCode::NO_CONTENT)
        .ok_or_else(|| ApiError::not_found(&id))
}

fn parse<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))
}

async fn selector(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: SelectorRequest = parse(&body)?;
    apply(&app, &id, req.counter, Event::Selector { dim: req.dim, value: req.value })
}

async fn restrictor(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let req: RestrictorRequest = parse(&body)?;
    apply(
        &app,
        &id,
        req.counter,
        Event::Restrictor {
            dim: req.dim,
            side: req.side,
            value: req.value,
        },
    )
}

fn apply(app: &AppState, id: &str, counter: u64, event: Event) -> Result<Response, ApiError> {
    let session = app.session(id)?;
    let mut record = session.lock().expect("session lock");
    let current = record.state.counter();
    if counter != current {
        return Err(ApiError::stale(current, counter));
    }
    let applied = record.state.apply(&event)?;
    record.log.push(event);
    record.updated = SystemTime::now();
    let mut headers = HeaderMap::new();
    headers.insert(CLAMPED_HEADER, HeaderValue::from_static(if applied.clamped { "true" } else { "false" }));
    headers.insert(
        APPLIED_VALUE_HEADER,
        HeaderValue::from_str(&applied.applied.to_string()).expect("numbers are valid header values"),
    );
    Ok((headers, Json(record.state.snapshot())).into_response())
}

//! Planner service: one session per process, JSON under `/api/v1`.
//!
//! | method | path              | body                      | response                          |
//! |--------|-------------------|---------------------------|-----------------------------------|
//! | GET    | `/scene`          |                           | scene document                    |
//! | PUT    | `/scene`          | scene document            | session                           |
//! | GET    | `/session`        |                           | session                           |
//! | GET    | `/targets`        |                           | `{"targets": [...]}`              |
//! | PUT    | `/targets`        | `{"targets": [...]}`      | session                           |
//! | GET    | `/field`          |                           | sector field, or 202 + job status |
//! | GET    | `/field/status`   |                           | job status                        |
//! | GET    | `/field/export`   |                           | field export, or 202 + job status |
//! | POST   | `/ocp`            | `{"x", "y", "theta"}`     | `{"local", "ocp", "score"}`       |
//! | GET    | `/overlay`        |                           | remote objects in local frame     |
//! | POST   | `/commit`         | `{"x", "y", "theta"}`     | `{"local", "ocp", "score"}`       |
//!
//! Errors are `{"error": {"code", "exit_code", "message"}}` where `exit_code`
//! is the CLI exit status for the same failure.
//!
//! Setting the targets (or the scene) starts a background field job; the
//! previous result is kept when the selection does not change.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use avaplace_core::{transparent_models, OcpError, OcpSolver, Placement, ScenePair, TargetError, TargetSet};
use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::field_io::{FieldExport, SectorField};
use crate::scene_file::{parse_scene, ObjectDoc, SceneDoc, SceneFileError};
use crate::settings::{candidate_count, compute_field, FieldError, Settings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub exit_code: i32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, exit_code: i32, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code: code.into(),
                exit_code,
                message: message.into(),
            },
        }
    }

    fn malformed(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "malformed-request", 2, message)
    }

    fn no_targets() -> Self {
        ApiError::new(StatusCode::CONFLICT, "no-targets", 3, "no interaction targets selected")
    }
}

impl From<SceneFileError> for ApiError {
    fn from(e: SceneFileError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "malformed-scene", 2, e.to_string())
    }
}

impl From<TargetError> for ApiError {
    fn from(e: TargetError) -> Self {
        let code = match e {
            TargetError::Empty => "no-targets",
            TargetError::Unknown(_) => "unknown-target",
            TargetError::Unmapped(_) => "unmapped-target",
            TargetError::NotInteractable(_) => "not-interactable",
            TargetError::Duplicate(_) => "duplicate-target",
        };
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, 3, e.to_string())
    }
}

impl From<OcpError> for ApiError {
    fn from(e: OcpError) -> Self {
        match e {
            OcpError::InfeasibleLocal => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "infeasible-local", 4, e.to_string()),
            OcpError::InfeasibleRemote => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "infeasible-remote", 5, e.to_string()),
            OcpError::Target(t) => t.into(),
        }
    }
}

impl From<FieldError> for ApiError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Target(t) => t.into(),
            FieldError::Step(s) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "invalid-settings", 2, s.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        #[derive(Serialize)]
        struct Wrapper {
            error: ErrorBody,
        }
        (self.status, Json(Wrapper { error: self.body })).into_response()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementDoc {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl From<Placement> for PlacementDoc {
    fn from(p: Placement) -> Self {
        PlacementDoc {
            x: p.x(),
            y: p.y(),
            theta: p.theta(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcpDoc {
    pub local: PlacementDoc,
    pub ocp: PlacementDoc,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsDoc {
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Idle,
    Running,
    Ready,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobStatus {
    pub state: JobState,
    /// Increments with every field job started; 0 before the first.
    pub job: u64,
    pub done: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionDoc {
    pub scene_revision: u64,
    pub targets: Vec<String>,
    pub committed: Option<OcpDoc>,
    pub last_ocp: Option<OcpDoc>,
    pub field: JobStatus,
}

type JobResult = Result<(Arc<SectorField>, Arc<FieldExport>), ApiError>;

struct FieldJob {
    id: u64,
    total: usize,
    done: AtomicUsize,
    result: OnceLock<JobResult>,
}

impl FieldJob {
    fn status(&self) -> JobStatus {
        let state = match self.result.get() {
            None => JobState::Running,
            Some(Ok(_)) => JobState::Ready,
            Some(Err(_)) => JobState::Failed,
        };
        JobStatus {
            state,
            job: self.id,
            done: self.done.load(Ordering::Relaxed).min(self.total),
            total: self.total,
        }
    }
}

struct Session {
    pair: Arc<ScenePair>,
    scene_revision: u64,
    targets: Vec<String>,
    committed: Option<OcpDoc>,
    last_ocp: Option<OcpDoc>,
    job: Option<Arc<FieldJob>>,
    jobs_started: u64,
}

impl Session {
    fn doc(&self) -> SessionDoc {
        SessionDoc {
            scene_revision: self.scene_revision,
            targets: self.targets.clone(),
            committed: self.committed,
            last_ocp: self.last_ocp,
            field: self.job.as_ref().map(|j| j.status()).unwrap_or(JobStatus {
                state: JobState::Idle,
                job: self.jobs_started,
                done: 0,
                total: 0,
            }),
        }
    }
}

pub struct Service {
    settings: Settings,
    session: Mutex<Session>,
}

type Shared = Arc<Service>;

impl Service {
    pub fn new(pair: ScenePair, settings: Settings) -> Shared {
        Arc::new(Service {
            settings,
            session: Mutex::new(Session {
                pair: Arc::new(pair),
                scene_revision: 0,
                targets: Vec::new(),
                committed: None,
                last_ocp: None,
                job: None,
                jobs_started: 0,
            }),
        })
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Session> {
        self.session.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Replaces the current field job with a fresh one for the session's
    /// scene and targets. Must be called with the session locked.
    fn start_job(&self, s: &mut Session) -> Result<(), ApiError> {
        let total = candidate_count(&s.pair, &s.targets, &self.settings)?;
        s.jobs_started += 1;
        let job = Arc::new(FieldJob {
            id: s.jobs_started,
            total,
            done: AtomicUsize::new(0),
            result: OnceLock::new(),
        });
        s.job = Some(job.clone());
        let pair = s.pair.clone();
        let targets = s.targets.clone();
        let settings = self.settings;
        tokio::task::spawn_blocking(move || {
            let out = compute_field(&pair, &targets, &settings, Some(&job.done))
                .map(|o| (Arc::new(o.report.guidance), Arc::new(o.report.field)))
                .map_err(ApiError::from);
            let _ = job.result.set(out);
        });
        Ok(())
    }
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ApiError::malformed(format!("{path}: {}", e.into_inner()))
    })
}

async fn get_scene(State(svc): State<Shared>) -> Json<SceneDoc> {
    Json(SceneDoc::from_pair(&svc.lock().pair))
}

async fn put_scene(State(svc): State<Shared>, body: Bytes) -> Result<Json<SessionDoc>, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::malformed(e.to_string()))?;
    let pair = parse_scene(text)?;
    let mut s = svc.lock();
    if *s.pair == pair {
        return Ok(Json(s.doc()));
    }
    s.pair = Arc::new(pair);
    s.scene_revision += 1;
    s.committed = None;
    s.last_ocp = None;
    s.job = None;
    if TargetSet::resolve(&s.pair, &s.targets).is_err() {
        s.targets.clear();
    }
    if !s.targets.is_empty() {
        svc.start_job(&mut s)?;
    }
    Ok(Json(s.doc()))
}

async fn get_session(State(svc): State<Shared>) -> Json<SessionDoc> {
    Json(svc.lock().doc())
}

async fn get_targets(State(svc): State<Shared>) -> Json<TargetsDoc> {
    Json(TargetsDoc {
        targets: svc.lock().targets.clone(),
    })
}

async fn put_targets(State(svc): State<Shared>, body: Bytes) -> Result<Json<SessionDoc>, ApiError> {
    let req: TargetsDoc = parse_body(&body)?;
    let mut s = svc.lock();
    TargetSet::resolve(&s.pair, &req.targets)?;
    if s.targets != req.targets || s.job.is_none() {
        s.targets = req.targets;
        svc.start_job(&mut s)?;
    }
    Ok(Json(s.doc()))
}

fn current_job(svc: &Service) -> Result<Arc<FieldJob>, ApiError> {
    svc.lock().job.clone().ok_or_else(ApiError::no_targets)
}

fn job_response<T: Serialize>(job: &FieldJob, pick: impl Fn(&(Arc<SectorField>, Arc<FieldExport>)) -> Arc<T>) -> Response {
    match job.result.get() {
        None => (StatusCode::ACCEPTED, Json(job.status())).into_response(),
        Some(Ok(r)) => Json(&*pick(r)).into_response(),
        Some(Err(e)) => e.clone().into_response(),
    }
}

async fn get_field(State(svc): State<Shared>) -> Result<Response, ApiError> {
    Ok(job_response(&*current_job(&svc)?, |r| r.0.clone()))
}

async fn get_field_export(State(svc): State<Shared>) -> Result<Response, ApiError> {
    Ok(job_response(&*current_job(&svc)?, |r| r.1.clone()))
}

async fn get_field_status(State(svc): State<Shared>) -> Json<JobStatus> {
    Json(svc.lock().doc().field)
}

async fn get_overlay(State(svc): State<Shared>) -> Result<Json<Vec<ObjectDoc>>, ApiError> {
    let s = svc.lock();
    if s.targets.is_empty() {
        return Err(ApiError::no_targets());
    }
    let models = transparent_models(&s.pair, &s.targets)?;
    Ok(Json(models.iter().map(ObjectDoc::from_object).collect()))
}

/// Solves outside the session lock; returns the result with the revision and
/// targets it was computed for.
async fn solve(svc: &Shared, body: &Bytes) -> Result<(OcpDoc, u64, Vec<String>), ApiError> {
    let req: PlacementDoc = parse_body(body)?;
    if !(req.x.is_finite() && req.y.is_finite() && req.theta.is_finite()) {
        return Err(ApiError::malformed("placement must be finite"));
    }
    let (pair, targets, revision) = {
        let s = svc.lock();
        if s.targets.is_empty() {
            return Err(ApiError::no_targets());
        }
        (s.pair.clone(), s.targets.clone(), s.scene_revision)
    };
    let params = svc.settings.optimizer;
    let ids = targets.clone();
    let result = tokio::task::spawn_blocking(move || {
        let set = TargetSet::resolve(&pair, &ids)?;
        OcpSolver::new(&pair, set, params).optimize(&Placement::new(req.x, req.y, req.theta))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", 1, e.to_string()))??;
    let ocp = result.ocp.ok_or(OcpError::InfeasibleRemote)?;
    let doc = OcpDoc {
        local: result.local.into(),
        ocp: ocp.into(),
        score: result.score,
    };
    Ok((doc, revision, targets))
}

fn stale() -> ApiError {
    ApiError::new(StatusCode::CONFLICT, "stale-session", 1, "scene or targets changed during the request")
}

async fn post_ocp(State(svc): State<Shared>, body: Bytes) -> Result<Json<OcpDoc>, ApiError> {
    let (doc, revision, targets) = solve(&svc, &body).await?;
    let mut s = svc.lock();
    if s.scene_revision == revision && s.targets == targets {
        s.last_ocp = Some(doc);
    }
    Ok(Json(doc))
}

async fn post_commit(State(svc): State<Shared>, body: Bytes) -> Result<Json<OcpDoc>, ApiError> {
    let (doc, revision, targets) = solve(&svc, &body).await?;
    let mut s = svc.lock();
    if s.scene_revision != revision || s.targets != targets {
        return Err(stale());
    }
    s.committed = Some(doc);
    s.last_ocp = Some(doc);
    Ok(Json(doc))
}

pub fn router(svc: Shared) -> Router {
    let api = Router::new()
        .route("/scene", get(get_scene).put(put_scene))
        .route("/session", get(get_session))
        .route("/targets", get(get_targets).put(put_targets))
        .route("/field", get(get_field))
        .route("/field/status", get(get_field_status))
        .route("/field/export", get(get_field_export))
        .route("/ocp", post(post_ocp))
        .route("/overlay", get(get_overlay))
        .route("/commit", post(post_commit))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not-found", 1, "no such endpoint") });
    Router::new().nest("/api/v1", api).with_state(svc)
}

pub async fn serve(pair: ScenePair, settings: Settings, port: u16) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}/api/v1", listener.local_addr()?);
    axum::serve(listener, router(Service::new(pair, settings))).await
}

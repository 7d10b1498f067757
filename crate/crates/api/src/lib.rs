//! REST service over the scorecard core.
//!
//! | Method | Path | Response |
//! |---|---|---|
//! | GET | `/api/v1/health` | `200 ok` |
//! | GET | `/api/v1/catalog` | `{"catalog": …, "digest": "sha256:…"}` |
//! | POST | `/api/v1/assessments` | `201 {"record_id", "result", "recommendations"}` |
//! | GET | `/api/v1/companies/{company_id}/assessments` | stored records, evolution order |
//! | GET | `/api/v1/companies/{company_id}/evolution` | evolution series |
//!
//! Every non-2xx response carries `{"code", "detail", "path"?}` with `code`
//! drawn from [`ErrorCode`].

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::rejection::PathRejection;
use axum::extract::{Path, State};
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use csre4soc_core::{
    parse_submission, recommend, validate_submission, ActionCatalog, AssessmentRecord,
    AssessmentResult, AssessmentStore, HistoryError, Recommendation, RecordId, SubmissionError,
};
use serde::{Deserialize, Serialize};

pub const API_PREFIX: &str = "/api/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    MalformedDocument,
    SchemaViolation,
    InvariantViolation,
    UnknownActionId,
    EmptyCompanyId,
    DuplicateRecordId,
    StorageFailure,
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: ErrorCode,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: ErrorCode, detail: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code,
                detail: detail.into(),
                path: None,
            },
        }
    }

    pub fn with_path(mut self, path: impl Into<String>) -> Self {
        self.body.path = Some(path.into());
        self
    }

    fn storage(detail: impl Into<String>) -> Self {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            ErrorCode::StorageFailure,
            detail,
        )
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<SubmissionError> for ApiError {
    fn from(e: SubmissionError) -> Self {
        let detail = e.to_string();
        match e {
            SubmissionError::MalformedDocument { .. } => {
                ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::MalformedDocument, detail)
            }
            SubmissionError::SchemaViolation { path, .. } => {
                ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::SchemaViolation, detail)
                    .with_path(path)
            }
            SubmissionError::UnknownActionId(_) => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                ErrorCode::UnknownActionId,
                detail,
            )
            .with_path("$.implemented"),
            SubmissionError::EmptyCompanyId => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                ErrorCode::EmptyCompanyId,
                detail,
            )
            .with_path("$.company_id"),
        }
    }
}

impl From<HistoryError> for ApiError {
    fn from(e: HistoryError) -> Self {
        match e {
            HistoryError::DuplicateRecordId(_) => {
                ApiError::new(StatusCode::CONFLICT, ErrorCode::DuplicateRecordId, e.to_string())
            }
            HistoryError::Storage(_) => ApiError::storage(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogResponse {
    pub catalog: ActionCatalog,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentResponse {
    pub record_id: RecordId,
    pub result: AssessmentResult,
    pub recommendations: Vec<Recommendation>,
}

pub type SharedStore = Arc<RwLock<dyn AssessmentStore + Send + Sync>>;
type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;
type IdSource = Arc<dyn Fn() -> RecordId + Send + Sync>;

/// Everything a request handler needs. One catalog per service instance.
#[derive(Clone)]
pub struct AppState {
    catalog: Arc<ActionCatalog>,
    catalog_body: Arc<Vec<u8>>,
    store: SharedStore,
    clock: Clock,
    ids: IdSource,
}

impl AppState {
    pub fn new(catalog: ActionCatalog, store: SharedStore) -> Self {
        let catalog_body = serde_json::to_vec(&CatalogResponse {
            digest: catalog.digest().to_string(),
            catalog: catalog.clone(),
        })
        .expect("catalog serializes");
        AppState {
            catalog: Arc::new(catalog),
            catalog_body: Arc::new(catalog_body),
            store,
            clock: Arc::new(Utc::now),
            ids: Arc::new(RecordId::generate),
        }
    }

    /// Replaces the `stored_at` source.
    pub fn with_clock(mut self, clock: impl Fn() -> DateTime<Utc> + Send + Sync + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }

    /// Replaces the record id source.
    pub fn with_id_source(mut self, ids: impl Fn() -> RecordId + Send + Sync + 'static) -> Self {
        self.ids = Arc::new(ids);
        self
    }

    pub fn catalog(&self) -> &ActionCatalog {
        &self.catalog
    }
}

/// Validates, scores and stores one submission document. Nothing is written
/// unless the submission is valid.
pub fn submit_assessment(state: &AppState, body: &[u8]) -> Result<AssessmentResponse, ApiError> {
    let submission = parse_submission(body)?;
    let validated = validate_submission(submission, &state.catalog)?;
    let recommendations = recommend(&validated, &state.catalog);
    let record = AssessmentRecord::new((state.ids)(), validated, &state.catalog, (state.clock)());
    let result = record.result.clone();
    let record_id = state
        .store
        .write()
        .map_err(|_| ApiError::storage("store lock poisoned"))?
        .append(record)?;
    Ok(AssessmentResponse {
        record_id,
        result,
        recommendations,
    })
}

async fn health() -> &'static str {
    "ok"
}

async fn get_catalog(State(state): State<AppState>) -> Response {
    (
        [(header::CONTENT_TYPE, "application/json")],
        state.catalog_body.as_ref().clone(),
    )
        .into_response()
}

async fn post_assessment(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<AssessmentResponse>), ApiError> {
    let response = submit_assessment(&state, &body)?;
    tracing::info!(
        record_id = %response.record_id,
        overall = response.result.overall.ordinal,
        "assessment stored"
    );
    Ok((StatusCode::CREATED, Json(response)))
}

async fn get_history(
    State(state): State<AppState>,
    company_id: Result<Path<String>, PathRejection>,
) -> Result<Json<Vec<AssessmentRecord>>, ApiError> {
    let Path(company_id) = company_id.map_err(bad_path)?;
    let store = state
        .store
        .read()
        .map_err(|_| ApiError::storage("store lock poisoned"))?;
    Ok(Json(store.list_assessments(&company_id)?))
}

async fn get_evolution(
    State(state): State<AppState>,
    company_id: Result<Path<String>, PathRejection>,
) -> Result<Response, ApiError> {
    let Path(company_id) = company_id.map_err(bad_path)?;
    let store = state
        .store
        .read()
        .map_err(|_| ApiError::storage("store lock poisoned"))?;
    Ok(Json(store.evolution(&company_id)?).into_response())
}

fn bad_path(rejection: PathRejection) -> ApiError {
    ApiError::new(
        StatusCode::BAD_REQUEST,
        ErrorCode::MalformedDocument,
        rejection.body_text(),
    )
    .with_path("company_id")
}

async fn no_route(method: Method, uri: Uri) -> ApiError {
    ApiError::new(
        StatusCode::NOT_FOUND,
        ErrorCode::NotFound,
        format!("no route for {method} {}", uri.path()),
    )
}

async fn wrong_method(method: Method, uri: Uri) -> ApiError {
    ApiError::new(
        StatusCode::METHOD_NOT_ALLOWED,
        ErrorCode::NotFound,
        format!("{} does not accept {method}", uri.path()),
    )
}

pub fn router(state: AppState) -> Router {
    let at = |path: &str| format!("{API_PREFIX}{path}");
    Router::new()
        .route(&at("/health"), get(health))
        .route(&at("/catalog"), get(get_catalog))
        .route(&at("/assessments"), post(post_assessment))
        .route(&at("/companies/{company_id}/assessments"), get(get_history))
        .route(&at("/companies/{company_id}/evolution"), get(get_evolution))
        .fallback(no_route)
        .method_not_allowed_fallback(wrong_method)
        .with_state(state)
}

/// Runs the service on an already bound listener until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let addr: SocketAddr = listener.local_addr()?;
    tracing::info!(%addr, digest = %state.catalog.digest(), "serving");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

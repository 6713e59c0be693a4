//! HTTP JSON API over a component store.
//!
//! Every handler takes one store snapshot, so a response never mixes data
//! from before and after a concurrent write. Mutations are serialized by
//! the store itself. There is no authentication.

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{FromRequest, FromRequestParts, Path, Query, Request, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use semreg_core::api::{
    self, ApiError, CompatibilityRequest, DraftRequest, ErrorCode, QueryRequest, SolutionRequest,
    StatusRequest,
};
use semreg_core::registry::{ComponentKind, ComponentRecord, SearchFilters, Status, Store};
use semreg_core::skill::SkillGraph;

/// An [`ApiError`] with its HTTP status.
#[derive(Debug)]
pub struct HttpError(pub ApiError);

impl From<ApiError> for HttpError {
    fn from(e: ApiError) -> Self {
        HttpError(e)
    }
}

impl IntoResponse for HttpError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.0.code.http_status())
            .unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.0)).into_response()
    }
}

type Reply<T> = Result<Json<T>, HttpError>;

fn reply<T: Serialize>(r: Result<T, ApiError>) -> Reply<T> {
    r.map(Json).map_err(HttpError)
}

fn bad_request(message: String) -> HttpError {
    HttpError(ApiError::new(ErrorCode::BadRequest, message))
}

/// JSON body whose rejections come back as [`ApiError`]s.
pub struct Body<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for Body<T> {
    type Rejection = HttpError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(Body(v)),
            Err(e) => Err(bad_request(json_rejection(e))),
        }
    }
}

fn json_rejection(e: JsonRejection) -> String {
    e.body_text()
}

/// Query string whose rejections come back as [`ApiError`]s.
pub struct Params<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequestParts<S> for Params<T> {
    type Rejection = HttpError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        match Query::<T>::from_request_parts(parts, state).await {
            Ok(Query(v)) => Ok(Params(v)),
            Err(e) => Err(bad_request(query_rejection(e))),
        }
    }
}

fn query_rejection(e: QueryRejection) -> String {
    e.body_text()
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
}

/// Filters and paging for `GET /api/components`.
#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct ListParams {
    pub status: Option<Status>,
    pub kind: Option<ComponentKind>,
    pub manufacturer: Option<String>,
    pub model: Option<String>,
    pub text: Option<String>,
    pub offset: Option<usize>,
    pub limit: Option<usize>,
}

impl From<ListParams> for QueryRequest {
    fn from(p: ListParams) -> Self {
        QueryRequest {
            expression: None,
            filters: SearchFilters {
                status: p.status,
                kind: p.kind,
                manufacturer: p.manufacturer,
                model: p.model,
                text: p.text,
            },
            offset: p.offset.unwrap_or(0),
            limit: p.limit,
        }
    }
}

async fn list_components(State(s): State<AppState>, Params(p): Params<ListParams>) -> Reply<api::ComponentPage> {
    reply(api::query(&s.store.snapshot(), &p.into()))
}

async fn get_component(State(s): State<AppState>, Path(id): Path<String>) -> Reply<Arc<ComponentRecord>> {
    reply(api::get_component(&s.store.snapshot(), &id))
}

async fn add_component(
    State(s): State<AppState>,
    Body(record): Body<ComponentRecord>,
) -> Result<(StatusCode, Json<api::Created>), HttpError> {
    let created = api::add_component(&s.store, record)?;
    Ok((StatusCode::CREATED, Json(created)))
}

async fn validate_component(State(s): State<AppState>, Body(record): Body<ComponentRecord>) -> Json<api::RecordValidation> {
    Json(api::validate_component(&s.store.ontology(), &record))
}

async fn set_status(
    State(s): State<AppState>,
    Path(id): Path<String>,
    Body(req): Body<StatusRequest>,
) -> Reply<Arc<ComponentRecord>> {
    reply(api::set_status(&s.store, &id, req))
}

async fn skeleton(State(s): State<AppState>, Path(id): Path<String>) -> Reply<semreg_core::codegen::SkeletonDescriptor> {
    reply(api::skeleton(&s.store.snapshot(), &id))
}

async fn manifest(State(s): State<AppState>, Path(id): Path<String>) -> Result<Response, HttpError> {
    let xml = api::manifest(&s.store.snapshot(), &id)?;
    Ok(([(header::CONTENT_TYPE, "application/xml; charset=utf-8")], xml).into_response())
}

async fn query(State(s): State<AppState>, Body(req): Body<QueryRequest>) -> Reply<api::ComponentPage> {
    reply(api::query(&s.store.snapshot(), &req))
}

async fn taxonomy(State(s): State<AppState>, Path(branch): Path<String>) -> Reply<semreg_core::ontology::TaxonomyNode> {
    reply(api::taxonomy(&s.store.ontology(), &branch))
}

async fn ontology_summary(State(s): State<AppState>) -> Json<api::OntologySummary> {
    Json(api::ontology_summary(&s.store.ontology()))
}

async fn classification(State(s): State<AppState>) -> Json<api::Classification> {
    Json(api::classification(&s.store.ontology()))
}

async fn compatibility(
    State(s): State<AppState>,
    Body(req): Body<CompatibilityRequest>,
) -> Reply<semreg_core::matcher::CompatibilityReport> {
    reply(api::compatibility(&s.store.snapshot(), &req))
}

async fn validate_skill(State(s): State<AppState>, Body(skill): Body<SkillGraph>) -> Reply<semreg_core::skill::ValidationReport> {
    reply(api::validate_skill(&s.store.snapshot(), &skill))
}

async fn flatten_skill(State(s): State<AppState>, Path(id): Path<String>) -> Reply<SkillGraph> {
    reply(api::flatten_skill(&s.store.snapshot(), &id))
}

async fn solution(State(s): State<AppState>, Body(req): Body<SolutionRequest>) -> Reply<semreg_core::skill::SolutionDescriptor> {
    reply(api::solution(&s.store.snapshot(), &req))
}

async fn draft(State(s): State<AppState>, Body(req): Body<DraftRequest>) -> Reply<ComponentRecord> {
    reply(api::draft(&s.store.ontology(), &req))
}

async fn fallback() -> HttpError {
    HttpError(ApiError::new(ErrorCode::NotFound, "no such route"))
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/api/components", get(list_components).post(add_component))
        .route("/api/components/validate", post(validate_component))
        .route("/api/components/{id}", get(get_component))
        .route("/api/components/{id}/status", post(set_status))
        .route("/api/components/{id}/skeleton", get(skeleton))
        .route("/api/components/{id}/manifest", get(manifest))
        .route("/api/query", post(query))
        .route("/api/taxonomy/{branch}", get(taxonomy))
        .route("/api/ontology", get(ontology_summary))
        .route("/api/ontology/classification", get(classification))
        .route("/api/compatibility", post(compatibility))
        .route("/api/skills/validate", post(validate_skill))
        .route("/api/skills/solution", post(solution))
        .route("/api/skills/{id}/flatten", post(flatten_skill))
        .route("/api/drafts", post(draft))
        .fallback(fallback)
        .with_state(AppState { store })
}

/// Serves [`router`] on `listener` until the future is dropped.
pub async fn serve(store: Arc<Store>, listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(store)).await
}

//! The HTTP API.
//!
//! | route | methods |
//! |---|---|
//! | `/health` | GET |
//! | `/api/types`, `/api/instances` | GET, POST |
//! | `/api/types/{id}` | GET, PUT, DELETE |
//! | `/api/instances/{id}` | GET, DELETE |
//! | `/api/instances/{id}/metadata` | GET |
//! | `/api/preview/type`, `/api/preview/instance` | POST |
//! | `/api/query` | POST |
//!
//! Errors are JSON bodies `{status, code, message, details?}`.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tower_http::services::ServeDir;

use ssnforge_core::ontology::{instance_to_graph, type_to_graph, SensorInstance, SensorType};
use ssnforge_core::query::{evaluate, parse_query};
use ssnforge_core::rdf::{serialize_turtle, Graph};
use ssnforge_core::registry::{Kind, Registry};

use crate::common::{entry_json, kind_graph, metadata_text, summary_json, Failure, FailureClass};

#[derive(Clone)]
struct AppState {
    registry: Arc<Registry>,
}

pub fn router(registry: Arc<Registry>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/api/types", get(list_types).post(create_type))
        .route(
            "/api/types/{id}",
            get(get_type).put(update_type).delete(delete_type),
        )
        .route("/api/instances", get(list_instances).post(create_instance))
        .route("/api/instances/{id}", get(get_instance).delete(delete_instance))
        .route("/api/instances/{id}/metadata", get(get_metadata))
        .route("/api/preview/type", post(preview_type))
        .route("/api/preview/instance", post(preview_instance))
        .route("/api/query", post(run_query))
        .with_state(AppState { registry });
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until Ctrl-C.
pub async fn serve(
    listener: TcpListener,
    registry: Arc<Registry>,
    static_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    axum::serve(listener, router(registry, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Debug)]
pub struct ApiError(pub Failure);

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self.0.class {
            FailureClass::BadRequest => StatusCode::BAD_REQUEST,
            FailureClass::NotFound => StatusCode::NOT_FOUND,
            FailureClass::Conflict => StatusCode::CONFLICT,
            FailureClass::Unprocessable => StatusCode::UNPROCESSABLE_ENTITY,
            FailureClass::UnsupportedMedia => StatusCode::UNSUPPORTED_MEDIA_TYPE,
            FailureClass::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl<E: Into<Failure>> From<E> for ApiError {
    fn from(e: E) -> Self {
        ApiError(e.into())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.status();
        let mut body = json!({
            "status": status.as_u16(),
            "code": self.0.code,
            "message": self.0.message,
        });
        if !self.0.details.is_empty() {
            body["details"] = serde_json::to_value(&self.0.details).expect("violations serialize");
        }
        (status, Json(body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

#[derive(Clone, Copy)]
enum Format {
    Json,
    Turtle,
}

fn mime_of(value: &str) -> String {
    value.split(';').next().unwrap_or("").trim().to_ascii_lowercase()
}

/// Picks the representation from the Accept header; a missing header
/// means JSON.
fn negotiate(headers: &HeaderMap) -> Result<Format, ApiError> {
    let Some(accept) = headers.get(header::ACCEPT) else {
        return Ok(Format::Json);
    };
    let text = accept.to_str().unwrap_or("");
    let mut best: Option<(f32, Format)> = None;
    for part in text.split(',') {
        let q = part
            .split(';')
            .skip(1)
            .find_map(|p| p.trim().strip_prefix("q=").and_then(|v| v.trim().parse::<f32>().ok()))
            .unwrap_or(1.0);
        let format = match mime_of(part).as_str() {
            "application/json" | "application/*" | "*/*" => Format::Json,
            "text/turtle" | "text/*" => Format::Turtle,
            _ => continue,
        };
        if q > 0.0 && best.is_none_or(|(b, _)| q > b) {
            best = Some((q, format));
        }
    }
    best.map(|(_, f)| f).ok_or_else(|| {
        ApiError(Failure::new(
            FailureClass::UnsupportedMedia,
            "UNSUPPORTED_MEDIA_TYPE",
            format!("cannot produce {text:?}; use application/json or text/turtle"),
        ))
    })
}

fn require_content_type(headers: &HeaderMap, accepted: &[&str]) -> Result<(), ApiError> {
    let mime = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(mime_of)
        .unwrap_or_default();
    if accepted.contains(&mime.as_str()) {
        Ok(())
    } else {
        Err(ApiError(Failure::new(
            FailureClass::UnsupportedMedia,
            "UNSUPPORTED_MEDIA_TYPE",
            format!("content type must be {}", accepted.join(" or ")),
        )))
    }
}

fn json_body<T: DeserializeOwned>(headers: &HeaderMap, body: &[u8]) -> Result<T, ApiError> {
    require_content_type(headers, &["application/json"])?;
    serde_json::from_slice(body).map_err(|e| ApiError(Failure::invalid_json(&e)))
}

fn turtle(graph: &Graph) -> Response {
    (
        [(header::CONTENT_TYPE, "text/turtle; charset=utf-8")],
        serialize_turtle(graph),
    )
        .into_response()
}

/// Runs a registry write off the async workers; writes fsync.
async fn write<T: Send + 'static>(
    registry: &Arc<Registry>,
    f: impl FnOnce(&Registry) -> Result<T, Failure> + Send + 'static,
) -> Result<T, ApiError> {
    let registry = Arc::clone(registry);
    tokio::task::spawn_blocking(move || f(&registry))
        .await
        .map_err(|e| ApiError(Failure::new(FailureClass::Internal, "INTERNAL", e.to_string())))?
        .map_err(ApiError)
}

async fn health(State(app): State<AppState>) -> Json<Value> {
    let snap = app.registry.snapshot();
    Json(json!({
        "status": "ok",
        "types": snap.count(Kind::Type),
        "instances": snap.count(Kind::Instance),
    }))
}

fn list(app: &AppState, kind: Kind, headers: &HeaderMap) -> ApiResult {
    let format = negotiate(headers)?;
    let snap = app.registry.snapshot();
    Ok(match format {
        Format::Json => {
            Json(Value::Array(snap.list(kind).into_iter().map(entry_json).collect())).into_response()
        }
        Format::Turtle => turtle(&kind_graph(&snap, kind, app.registry.namespaces())),
    })
}

fn show(app: &AppState, kind: Kind, id: &str, headers: &HeaderMap) -> ApiResult {
    let format = negotiate(headers)?;
    let entry = app.registry.get(kind, id)?;
    Ok(match format {
        Format::Json => Json(entry_json(&entry)).into_response(),
        Format::Turtle => turtle(&entry.graph),
    })
}

async fn list_types(State(app): State<AppState>, headers: HeaderMap) -> ApiResult {
    list(&app, Kind::Type, &headers)
}

async fn list_instances(State(app): State<AppState>, headers: HeaderMap) -> ApiResult {
    list(&app, Kind::Instance, &headers)
}

async fn get_type(State(app): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    show(&app, Kind::Type, &id, &headers)
}

async fn get_instance(
    State(app): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> ApiResult {
    show(&app, Kind::Instance, &id, &headers)
}

async fn create_type(State(app): State<AppState>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let t: SensorType = json_body(&headers, &body)?;
    let entry = write(&app.registry, move |r| Ok(r.register_type(t)?)).await?;
    Ok((StatusCode::CREATED, Json(summary_json(&entry))).into_response())
}

async fn update_type(
    State(app): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let t: SensorType = json_body(&headers, &body)?;
    if t.id != id {
        return Err(ApiError(Failure::new(
            FailureClass::Unprocessable,
            "ID_MISMATCH",
            format!("body id {:?} does not match path id {id:?}", t.id),
        )));
    }
    let entry = write(&app.registry, move |r| Ok(r.update_type(t)?)).await?;
    Ok(Json(summary_json(&entry)).into_response())
}

async fn create_instance(State(app): State<AppState>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let i: SensorInstance = json_body(&headers, &body)?;
    let entry = write(&app.registry, move |r| Ok(r.register_instance(i)?)).await?;
    Ok((StatusCode::CREATED, Json(summary_json(&entry))).into_response())
}

async fn delete_type(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    write(&app.registry, move |r| Ok(r.remove(Kind::Type, &id)?)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn delete_instance(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    write(&app.registry, move |r| Ok(r.remove(Kind::Instance, &id)?)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

async fn get_metadata(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let text = metadata_text(&app.registry.snapshot(), &id, app.registry.namespaces())?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text).into_response())
}

async fn preview_type(State(app): State<AppState>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let t: SensorType = json_body(&headers, &body)?;
    Ok(turtle(&type_to_graph(&t, app.registry.namespaces())?))
}

async fn preview_instance(State(app): State<AppState>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let i: SensorInstance = json_body(&headers, &body)?;
    let snap = app.registry.snapshot();
    let t = snap.sensor_type(&i.type_id).ok_or_else(|| {
        ApiError(Failure::new(
            FailureClass::Unprocessable,
            "UNKNOWN_TYPE",
            format!("unknown sensor type {:?}", i.type_id),
        ))
    })?;
    Ok(turtle(&instance_to_graph(&i, t, app.registry.namespaces())?))
}

async fn run_query(State(app): State<AppState>, headers: HeaderMap, body: Bytes) -> ApiResult {
    require_content_type(&headers, &["text/plain", "application/sparql-query"])?;
    let text = std::str::from_utf8(&body).map_err(|e| {
        ApiError(Failure::new(FailureClass::BadRequest, "SYNTAX_ERROR", e.to_string()))
    })?;
    let query = parse_query(text)?;
    let snap = app.registry.snapshot();
    Ok(Json(evaluate(&query, snap.dataset())).into_response())
}

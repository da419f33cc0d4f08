//! Stateless HTTP front end for the decision engine.
//!
//! Every response carries `x-request-id`, `x-engine-version` and
//! `x-schema-version` headers. Successful bodies are byte-identical to the
//! CLI's `--format json` output for the same request.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Request, State};
use axum::http::{header, HeaderName, HeaderValue, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Extension, Router};
use secdec_core::api::{self, ApiError};
use secdec_core::report::{render_json, ENGINE_VERSION};
use secdec_core::scenario::SCHEMA_VERSION;
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub const REQUEST_ID: HeaderName = HeaderName::from_static("x-request-id");
pub const ENGINE_VERSION_HEADER: HeaderName = HeaderName::from_static("x-engine-version");
pub const SCHEMA_VERSION_HEADER: HeaderName = HeaderName::from_static("x-schema-version");

/// Caller-supplied request ids longer than this are replaced.
const MAX_REQUEST_ID: usize = 128;

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Origins allowed by CORS. Empty allows any origin.
    pub allowed_origins: Vec<String>,
}

#[derive(Debug, Clone)]
struct RequestId(String);

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: ErrorDetail<'a>,
    request_id: &'a str,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
    paths: Vec<String>,
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(status: StatusCode, code: &str, message: &str, paths: Vec<String>, id: &RequestId) -> Response {
    let body = ErrorBody {
        error: ErrorDetail { code, message, paths },
        request_id: &id.0,
    };
    json_response(status, render_json(&body))
}

fn api_error(e: ApiError, id: &RequestId) -> Response {
    let status = StatusCode::from_u16(e.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    let code = serde_json::to_value(e.code)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| "internal".to_string());
    error_response(status, &code, &e.message, e.paths(), id)
}

/// Runs an engine call off the async workers and renders its outcome.
async fn run<T, F>(id: RequestId, body: Bytes, f: F) -> Response
where
    T: Serialize + Send + 'static,
    F: FnOnce(serde_json::Value) -> Result<T, ApiError> + Send + 'static,
{
    let outcome = tokio::task::spawn_blocking(move || {
        let text = std::str::from_utf8(&body).map_err(|e| ApiError::validation(utf8_error(e)))?;
        let value = api::parse_body(text)?;
        f(value).map(|r| render_json(&r))
    })
    .await;
    match outcome {
        Ok(Ok(body)) => json_response(StatusCode::OK, body),
        Ok(Err(e)) => {
            log::debug!("request {} failed: {}", id.0, e.message);
            api_error(e, &id)
        }
        Err(join) => {
            log::error!("request {} panicked: {join}", id.0);
            api_error(ApiError::internal("engine failure"), &id)
        }
    }
}

fn utf8_error(e: std::str::Utf8Error) -> secdec_core::ValidationErrors {
    secdec_core::ValidationErrors::single(secdec_core::ValidationError::new(
        "",
        secdec_core::ErrorKind::Syntax,
        format!("body is not valid UTF-8: {e}"),
    ))
}

async fn evaluate(Extension(id): Extension<RequestId>, body: Bytes) -> Response {
    run(id, body, api::evaluate).await
}

async fn decide(Extension(id): Extension<RequestId>, body: Bytes) -> Response {
    run(id, body, api::decide).await
}

async fn optimize(Extension(id): Extension<RequestId>, body: Bytes) -> Response {
    run(id, body, api::optimize).await
}

async fn volume(Extension(id): Extension<RequestId>, body: Bytes) -> Response {
    run(id, body, api::volume).await
}

async fn sensitivity(Extension(id): Extension<RequestId>, body: Bytes) -> Response {
    run(id, body, api::sensitivity).await
}

async fn conditions(State(catalog): State<Arc<str>>) -> Response {
    json_response(StatusCode::OK, catalog.to_string())
}

async fn health() -> &'static str {
    "ok"
}

async fn not_found(Extension(id): Extension<RequestId>, req: Request) -> Response {
    let message = format!("no route for {} {}", req.method(), req.uri().path());
    error_response(StatusCode::NOT_FOUND, "not_found", &message, Vec::new(), &id)
}

fn usable_request_id(v: &HeaderValue) -> Option<String> {
    let s = v.to_str().ok()?;
    (!s.is_empty() && s.len() <= MAX_REQUEST_ID).then(|| s.to_string())
}

async fn stamp(mut req: Request, next: Next) -> Response {
    let id = req
        .headers()
        .get(&REQUEST_ID)
        .and_then(usable_request_id)
        .unwrap_or_else(|| uuid::Uuid::new_v4().to_string());
    req.extensions_mut().insert(RequestId(id.clone()));
    let mut res = next.run(req).await;
    let headers = res.headers_mut();
    if let Ok(v) = HeaderValue::from_str(&id) {
        headers.insert(REQUEST_ID, v);
    }
    headers.insert(ENGINE_VERSION_HEADER, HeaderValue::from_static(ENGINE_VERSION));
    headers.insert(SCHEMA_VERSION_HEADER, HeaderValue::from(SCHEMA_VERSION));
    res
}

fn cors(config: &ServiceConfig) -> CorsLayer {
    let origin = if config.allowed_origins.is_empty() {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(
            config
                .allowed_origins
                .iter()
                .filter_map(|o| HeaderValue::from_str(o).ok()),
        )
    };
    CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers([header::CONTENT_TYPE, REQUEST_ID])
        .expose_headers([REQUEST_ID, ENGINE_VERSION_HEADER, SCHEMA_VERSION_HEADER])
}

pub fn router(config: &ServiceConfig) -> Router {
    // The catalog never changes, so it is rendered once.
    let catalog: Arc<str> = render_json(&api::conditions()).into();
    Router::new()
        .route("/api/v1/evaluate", post(evaluate))
        .route("/api/v1/decide", post(decide))
        .route("/api/v1/optimize", post(optimize))
        .route("/api/v1/volume", post(volume))
        .route("/api/v1/sensitivity", post(sensitivity))
        .route("/api/v1/conditions", get(conditions))
        .route("/api/v1/health", get(health))
        .with_state(catalog)
        .fallback(not_found)
        .layer(middleware::from_fn(stamp))
        .layer(cors(config))
}

/// Bind `host:port` and serve until the process is stopped.
pub async fn serve(host: &str, port: u16, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    let addr: SocketAddr = listener.local_addr()?;
    log::info!("listening on http://{addr}");
    axum::serve(listener, router(&config)).await
}

//! Read-only HTTP/JSON API over a loaded engine.

use std::io::Write as _;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Deserialize;
use tower_http::services::ServeDir;
use trailfinder_core::engine::{Engine, SearchOverrides};
use trailfinder_core::potential_gain::StartStrategy;
use trailfinder_core::{Error, Result};

#[derive(Debug, Deserialize)]
struct SearchParams {
    q: Option<String>,
    k: Option<usize>,
    seed: Option<u64>,
    iexplore: Option<usize>,
    iconverge: Option<usize>,
    m: Option<usize>,
    df: Option<f64>,
    strategy: Option<String>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(serde_json::json!({ "error": message.into() }))).into_response()
}

fn status_of(e: &Error) -> StatusCode {
    match e {
        Error::EmptyQuery | Error::QueryTooLong(_) | Error::InvalidParameter { .. } => StatusCode::BAD_REQUEST,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

async fn search(State(engine): State<Arc<Engine>>, Query(p): Query<SearchParams>) -> Response {
    let strategy = match p.strategy.as_deref().map(str::parse::<StartStrategy>).transpose() {
        Ok(s) => s,
        Err(message) => return error(StatusCode::BAD_REQUEST, message),
    };
    let overrides = SearchOverrides {
        k: p.k,
        seed: p.seed,
        explore_iterations: p.iexplore,
        converge_iterations: p.iconverge,
        repetitions: p.m,
        discrimination: p.df,
        strategy,
    };
    let text = p.q.unwrap_or_default();
    let result = tokio::task::spawn_blocking(move || engine.handle_search(&text, &overrides)).await;
    match result {
        Ok(Ok(response)) => Json(response).into_response(),
        Ok(Err(e)) => error(status_of(&e), e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn page(State(engine): State<Arc<Engine>>, Path(id): Path<String>) -> Response {
    let Ok(id) = id.parse::<u32>() else {
        return error(StatusCode::BAD_REQUEST, format!("invalid page id {id:?}"));
    };
    match engine.handle_page(id) {
        Some(info) => Json(info).into_response(),
        None => error(StatusCode::NOT_FOUND, format!("page {id} not found")),
    }
}

pub fn router(engine: Arc<Engine>) -> Router {
    let static_dir = engine.config().static_dir.clone();
    let router = Router::new()
        .route("/api/search", get(search))
        .route("/api/page/{id}", get(page))
        .route("/healthz", get(|| async { "ok" }))
        .with_state(engine);
    match static_dir {
        Some(dir) => router.fallback_service(ServeDir::new(dir)),
        None => router,
    }
}

/// Binds the configured address, prints it and serves until killed.
pub fn serve(engine: Engine) -> Result<()> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&engine.config().listen).await?;
        let addr = listener.local_addr()?;
        let mut stdout = std::io::stdout();
        writeln!(stdout, "listening on http://{addr}")?;
        stdout.flush()?;
        axum::serve(listener, router(Arc::new(engine))).await?;
        Ok(())
    })
}

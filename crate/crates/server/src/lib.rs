//! HTTP JSON API over the shopping assistant.

mod config;
mod error;
mod routes;

pub use config::{ConfigError, ServerConfig};
pub use error::{ApiError, ErrorCode};
pub use routes::{router, AppState, Cancelled, Health, SessionCreated};

use shelftalk_core::orchestrator::{Assistant, LoadError};
use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;
use tower_http::cors::CorsLayer;
use tower_http::trace::TraceLayer;

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("failed to load assistant data: {0}")]
    Load(#[from] LoadError),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// The router with logging and permissive CORS applied.
pub fn app(assistant: Arc<Assistant>) -> axum::Router {
    router(assistant)
        .layer(TraceLayer::new_for_http())
        .layer(CorsLayer::permissive())
}

/// Loads data, binds, and serves until `shutdown` resolves. Idle sessions
/// are swept periodically. `on_bound` receives the actual listening address.
pub async fn serve(
    config: ServerConfig,
    on_bound: impl FnOnce(SocketAddr),
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    let assistant = Arc::new(Assistant::load(&config.data)?);
    if let Some(path) = config.session_snapshot.as_ref().filter(|p| p.exists()) {
        match assistant.sessions().restore(path) {
            Ok(n) => tracing::info!(sessions = n, "restored sessions"),
            Err(e) => tracing::warn!("ignoring session snapshot {}: {e}", path.display()),
        }
    }
    let addr = config.socket_addr();
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })?;
    let bound = listener.local_addr()?;
    tracing::info!(%bound, products = assistant.catalog().len(), "listening");
    on_bound(bound);

    let sweeper = {
        let assistant = Arc::clone(&assistant);
        let (max_idle, every) = (config.max_idle(), config.sweep_interval());
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(every);
            tick.tick().await;
            loop {
                tick.tick().await;
                let n = assistant.expire_sessions(max_idle);
                if n > 0 {
                    tracing::info!(expired = n, "expired idle sessions");
                }
            }
        })
    };

    let result = axum::serve(listener, app(Arc::clone(&assistant)))
        .with_graceful_shutdown(shutdown)
        .await;
    sweeper.abort();
    if let Some(path) = &config.session_snapshot {
        if let Err(e) = assistant.sessions().snapshot(path) {
            tracing::warn!("cannot write session snapshot {}: {e}", path.display());
        }
    }
    result.map_err(ServeError::Io)
}

/// Resolves on Ctrl-C or SIGTERM.
pub async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
    tracing::info!("shutting down");
}

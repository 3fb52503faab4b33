//! HTTP service over editing sessions. Session tokens travel in the path;
//! all bodies are JSON except PNG renders and tar exports.

pub mod bodies;
pub mod error;
pub mod routes;
pub mod script;
pub mod state;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use atelier_core::corpus::MultimodalIndex;

pub use error::{ApiError, ErrorBody};
pub use routes::router;
pub use state::{AppState, ServiceConfig, DEFAULT_IDLE_TIMEOUT};

/// Serves until the listener fails. Idle sessions are swept once a minute.
pub async fn serve(index: Arc<MultimodalIndex>, config: ServiceConfig, addr: SocketAddr) -> std::io::Result<()> {
    let state = Arc::new(AppState::new(index, config));
    let sweep = config.idle_timeout.min(Duration::from_secs(60)).max(Duration::from_millis(100));
    state::spawn_evictor(state.clone(), sweep);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

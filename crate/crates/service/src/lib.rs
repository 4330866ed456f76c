//! HTTP facade over a loaded dataset: meshes, slices, isosurfaces and spill frames
//! under the `/api/v1` prefix.

mod cache;
mod config;
mod routes;
mod state;

pub use config::{ConfigError, ServiceConfig};
pub use routes::router;
pub use state::{AppState, LoadStatus};

use seabedkit_core::geomodel::{load_dataset_dir, LoadError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("dataset failed to load: {0}")]
    Load(#[from] LoadError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Loads the dataset, binds the listener and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    config.validate()?;
    let dir = config.data_dir.clone();
    let dataset = tokio::task::spawn_blocking(move || load_dataset_dir::<f64>(&dir))
        .await
        .expect("loader task")?;
    let state = AppState::new(config.cache_size);
    state.set_dataset(dataset);
    let app = router(state, &config);
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

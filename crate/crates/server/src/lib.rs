//! HTTP API, file store and command-line tools for ethics assurance cases.

pub mod api;
pub mod auth;
pub mod cli;
pub mod config;
pub mod error;
pub mod store;

use std::sync::Arc;

use thiserror::Error;

pub use api::{router, AppState};
pub use config::Config;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Store(#[from] store::StoreError),
    #[error("{path}: {source}")]
    Tokens {
        path: std::path::PathBuf,
        source: auth::TokenFileError,
    },
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: std::net::SocketAddr,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Opens the store and token table named by `config`.
pub fn state(config: &Config) -> Result<AppState, ServeError> {
    let store = store::FileStore::open(&config.data_dir)?;
    let tokens = auth::TokenTable::load(&config.token_file).map_err(|source| ServeError::Tokens {
        path: config.token_file.clone(),
        source,
    })?;
    Ok(AppState {
        store: Arc::new(store),
        tokens: Arc::new(tokens),
    })
}

/// Serves the API until interrupted.
pub async fn serve(config: Config) -> Result<(), ServeError> {
    let app = router(state(&config)?);
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.listen,
            source,
        })?;
    tracing::info!(addr = %listener.local_addr()?, data_dir = %config.data_dir.display(), "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

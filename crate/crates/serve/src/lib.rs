//! HTTP review service over a directory of `.eac` cases and `.snap`
//! snapshots. Reviewers file and resolve challenges; every other route is
//! a read of the current state, filtered by the caller's audience tier.
//!
//! Routes, all under `/api/v1`:
//!
//! | method | path | body |
//! |---|---|---|
//! | GET | `/cases` | |
//! | GET | `/cases/{id}` | |
//! | GET | `/cases/{id}/status?explain=` | |
//! | GET | `/cases/{id}/validate?phase=` | |
//! | GET | `/cases/{id}/report?tier=&goals=&stages=&threshold=` | |
//! | GET | `/cases/{id}/graph.dot?tier=&goals=&stages=` | |
//! | GET | `/cases/{id}/diff?from=&to=` | |
//! | POST | `/cases/{id}/challenges` | `{target, author, text}` |
//! | POST | `/cases/{id}/challenges/{cid}/resolve` | `{outcome, note}` |
//!
//! The tier comes from the `x-eac-tier` header (public when absent); a
//! `tier` query parameter can lower it but never raise it.

use std::io;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::{Arc, RwLock};
use std::thread;

use thiserror::Error;
use tokio::net::TcpListener;
use tokio::sync::{mpsc, oneshot};
use tokio::task::JoinHandle;

mod api;
pub mod journal;
mod problem;
pub mod store;
mod writer;

pub use api::{SEQ_HEADER, TIER_HEADER};
pub use journal::{Entry, Journal, JournalError, Op};
pub use problem::Problem;
pub use store::{ApplyError, State, StoreError};

const QUEUE_DEPTH: usize = 64;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("server: {0}")]
    Io(#[from] io::Error),
}

/// A running service.
pub struct Service {
    addr: SocketAddr,
    shutdown: oneshot::Sender<()>,
    server: JoinHandle<io::Result<()>>,
    writer: thread::JoinHandle<()>,
}

impl Service {
    /// Loads the store in `dir`, replays its journal and starts listening.
    pub async fn start(dir: &Path, addr: &str) -> Result<Service, ServeError> {
        let (state, journal) = store::open(dir)?;
        let listener = TcpListener::bind(addr).await.map_err(|source| ServeError::Bind { addr: addr.to_string(), source })?;
        let local = listener.local_addr()?;
        log::info!("serving {} cases from {} on {local}", state.cases.len(), dir.display());
        let published = Arc::new(RwLock::new(Arc::new(state)));
        let (tx, rx) = mpsc::channel(QUEUE_DEPTH);
        let writer = writer::spawn(published.clone(), journal, rx);
        let app = api::router(api::App { state: published, writer: tx });
        let (shutdown, stop) = oneshot::channel::<()>();
        let server = tokio::spawn(async move {
            axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = stop.await;
                })
                .await
        });
        Ok(Service { addr: local, shutdown, server, writer })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Base URL of the API, e.g. `http://127.0.0.1:8080/api/v1`.
    pub fn base_url(&self) -> String {
        format!("http://{}/api/v1", self.addr)
    }

    /// Stops accepting requests, drains the writer and closes the journal.
    pub async fn stop(self) -> Result<(), ServeError> {
        let _ = self.shutdown.send(());
        self.server.await.map_err(io::Error::other)??;
        let writer = self.writer;
        tokio::task::spawn_blocking(move || writer.join()).await.map_err(io::Error::other)?.ok();
        Ok(())
    }

    /// Runs until the server fails or the process is interrupted.
    pub async fn run_until_interrupted(self) -> Result<(), ServeError> {
        tokio::signal::ctrl_c().await?;
        self.stop().await
    }
}

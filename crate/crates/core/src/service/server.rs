use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;

use super::session::SessionHandler;
use crate::error::{Error, Result};
use crate::features::FeatureCombination;
use crate::learn::{ClassifierKind, TrainedModel};
use crate::stream::{synthetic_default_model, WindowConfig};

pub const DEFAULT_BIND: &str = "127.0.0.1:8765";

/// Immutable models shared by every session.
#[derive(Debug, Default)]
pub struct ModelStore {
    models: BTreeMap<String, Arc<TrainedModel>>,
    default_id: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelInfo {
    pub id: String,
    pub kind: ClassifierKind,
    pub combination: FeatureCombination,
    pub default: bool,
}

impl ModelStore {
    /// Registers a model. The first one registered becomes the default.
    pub fn insert(&mut self, id: impl Into<String>, model: TrainedModel) -> Result<()> {
        model.validate()?;
        let id = id.into();
        if self.default_id.is_none() {
            self.default_id = Some(id.clone());
        }
        self.models.insert(id, Arc::new(model));
        Ok(())
    }

    pub fn set_default(&mut self, id: &str) -> Result<()> {
        if !self.models.contains_key(id) {
            return Err(Error::InvalidInput(format!("unknown model {id:?}")));
        }
        self.default_id = Some(id.to_string());
        Ok(())
    }

    /// Loads every `*.json` model in `dir`, keyed by file stem, in name order.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut store = Self::default();
        for path in paths {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::InvalidInput(format!("bad model file name {}", path.display())))?
                .to_string();
            store.insert(id, TrainedModel::load(&path)?)?;
        }
        Ok(store)
    }

    /// Adds the synthetic C4 KNN streaming model as `synthetic-c4-knn` and
    /// makes it the default.
    pub fn add_synthetic_default(&mut self, seed: u64) -> Result<String> {
        let model = synthetic_default_model(seed, &WindowConfig::default())?;
        let id = "synthetic-c4-knn".to_string();
        self.insert(id.clone(), model)?;
        self.set_default(&id)?;
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Option<Arc<TrainedModel>> {
        self.models.get(id).cloned()
    }

    pub fn default_model(&self) -> Option<(String, Arc<TrainedModel>)> {
        let id = self.default_id.as_ref()?;
        Some((id.clone(), self.models.get(id)?.clone()))
    }

    pub fn list(&self) -> Vec<ModelInfo> {
        self.models
            .iter()
            .map(|(id, m)| ModelInfo {
                id: id.clone(),
                kind: m.kind(),
                combination: m.combination,
                default: self.default_id.as_deref() == Some(id),
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub bind: SocketAddr,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            bind: DEFAULT_BIND.parse().expect("valid default address"),
        }
    }
}

pub fn router(store: Arc<ModelStore>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/models", get(models))
        .route("/ws", get(ws))
        .with_state(store)
}

/// Serves until Ctrl-C.
pub async fn serve(config: ServeConfig, store: Arc<ModelStore>) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(config.bind)
        .await
        .map_err(|e| Error::Session(format!("cannot bind {}: {e}", config.bind)))?;
    let addr = listener
        .local_addr()
        .map_err(|e| Error::Session(format!("cannot read bound address: {e}")))?;
    tracing::info!(%addr, models = store.list().len(), "listening");
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| Error::Session(format!("server error: {e}")))
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn models(State(store): State<Arc<ModelStore>>) -> Json<Vec<ModelInfo>> {
    Json(store.list())
}

async fn ws(upgrade: WebSocketUpgrade, State(store): State<Arc<ModelStore>>) -> Response {
    upgrade.on_upgrade(move |socket| run_session(socket, store))
}

async fn run_session(mut socket: WebSocket, store: Arc<ModelStore>) {
    let mut handler = SessionHandler::new(store);
    while let Some(frame) = socket.recv().await {
        let outcome = match frame {
            Ok(Message::Text(text)) => handler.handle_text(text.as_str()),
            Ok(Message::Binary(_)) => handler.reject("binary frames are not supported"),
            Ok(Message::Close(_)) | Err(_) => break,
            Ok(_) => continue,
        };
        for msg in &outcome.messages {
            let text = match serde_json::to_string(msg) {
                Ok(t) => t,
                Err(e) => {
                    tracing::error!("cannot encode message: {e}");
                    return;
                }
            };
            if socket.send(Message::Text(text.into())).await.is_err() {
                return;
            }
        }
        if outcome.close {
            let _ = socket.send(Message::Close(None)).await;
            break;
        }
    }
    tracing::debug!("session closed");
}

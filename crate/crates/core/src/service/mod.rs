//! Websocket front end hosting streaming sessions.
//!
//! Each connection is one session. Messages are JSON text frames shaped as
//! `{"v": 1, "seq": n, "type": ..., ...payload}`; see [`protocol`] for the
//! full set. `GET /health` and `GET /models` are plain JSON endpoints.

pub mod protocol;
mod server;
mod session;

pub use server::{router, serve, ModelStore, ServeConfig, DEFAULT_BIND};
pub use session::{Outcome, SessionHandler};

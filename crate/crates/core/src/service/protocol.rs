//! Wire messages.
//!
//! Every frame is a JSON object with a protocol version `v`, a per-direction
//! sequence number `seq` and a `type`; the remaining fields depend on the type.
//!
//! Client to server:
//!
//! | type      | fields                                                      |
//! |-----------|-------------------------------------------------------------|
//! | `init`    | `object`, optional `model` (`{"id": ..}` or `{"inline": ..}`), optional `window` overrides |
//! | `samples` | `samples`: array of `{t_ms, x, y, confidence}`              |
//!
//! Server to client:
//!
//! | type        | fields                                      |
//! |-------------|---------------------------------------------|
//! | `ack`       | `ack_seq`: the client `seq` just processed, `model` on init |
//! | `fixation`  | `fixation`: `{t_start_ms, duration_ms, x, y}` |
//! | `features`  | `t_ms`, `features`: `{adf2c, adf2t, adf2i, var, n_fix}` |
//! | `intention` | `t_ms`, `label` (`GRASP`/`VIEW`/`INSUFFICIENT`), `fired` |
//! | `error`     | `message`; the server closes the socket afterwards |
//!
//! Client sequence numbers must strictly increase. Server sequence numbers
//! start at 1 and increase by one per message.

use serde::{Deserialize, Serialize};

use crate::features::FeatureVector;
use crate::gaze::{Fixation, GazeSample, ObjectContext};
use crate::learn::TrainedModel;
use crate::stream::{WindowConfig, WindowLabel};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub v: u32,
    pub seq: u64,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Envelope<T> {
    pub fn new(seq: u64, body: T) -> Self {
        Self {
            v: PROTOCOL_VERSION,
            seq,
            body,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelRef {
    /// A model registered with the server, as listed by `GET /models`.
    Id(String),
    Inline(Box<TrainedModel>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Init {
        object: ObjectContext,
        /// Falls back to the server's default model.
        #[serde(default)]
        model: Option<ModelRef>,
        #[serde(default)]
        window: Option<WindowConfig>,
    },
    Samples {
        samples: Vec<GazeSample>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Ack {
        ack_seq: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<String>,
    },
    Fixation {
        fixation: Fixation,
    },
    Features {
        t_ms: f64,
        features: FeatureVector,
    },
    Intention {
        t_ms: f64,
        label: WindowLabel,
        fired: bool,
    },
    Error {
        message: String,
    },
}

pub type ClientEnvelope = Envelope<ClientMessage>;
pub type ServerEnvelope = Envelope<ServerMessage>;

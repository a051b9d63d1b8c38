use std::sync::Arc;

use super::protocol::{ClientEnvelope, ClientMessage, ModelRef, ServerEnvelope, ServerMessage, PROTOCOL_VERSION};
use super::server::ModelStore;
use crate::error::{Error, Result};
use crate::stream::{IntentionEvent, Session};

/// Replies to one client frame.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub messages: Vec<ServerEnvelope>,
    /// The connection must be closed after sending `messages`.
    pub close: bool,
}

/// Transport-independent protocol state for one connection.
#[derive(Debug)]
pub struct SessionHandler {
    store: Arc<ModelStore>,
    session: Option<Session>,
    last_client_seq: Option<u64>,
    next_seq: u64,
    last_fixation_start: f64,
    closed: bool,
}

impl SessionHandler {
    pub fn new(store: Arc<ModelStore>) -> Self {
        Self {
            store,
            session: None,
            last_client_seq: None,
            next_seq: 1,
            last_fixation_start: f64::NEG_INFINITY,
            closed: false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Processes one text frame.
    pub fn handle_text(&mut self, text: &str) -> Outcome {
        if self.closed {
            return Outcome {
                messages: Vec::new(),
                close: true,
            };
        }
        let mut out = Vec::new();
        match self.dispatch(text, &mut out) {
            Ok(()) => Outcome {
                messages: out,
                close: false,
            },
            Err(e) => {
                self.push(&mut out, ServerMessage::Error { message: e.to_string() });
                self.closed = true;
                self.session = None;
                Outcome {
                    messages: out,
                    close: true,
                }
            }
        }
    }

    /// Reports a frame the transport could not decode as text.
    pub fn reject(&mut self, reason: &str) -> Outcome {
        let mut out = Vec::new();
        self.push(&mut out, ServerMessage::Error { message: reason.to_string() });
        self.closed = true;
        self.session = None;
        Outcome {
            messages: out,
            close: true,
        }
    }

    fn push(&mut self, out: &mut Vec<ServerEnvelope>, body: ServerMessage) {
        out.push(ServerEnvelope::new(self.next_seq, body));
        self.next_seq += 1;
    }

    fn dispatch(&mut self, text: &str, out: &mut Vec<ServerEnvelope>) -> Result<()> {
        let msg: ClientEnvelope = serde_json::from_str(text)
            .map_err(|e| Error::Session(format!("malformed message: {e}")))?;
        if msg.v != PROTOCOL_VERSION {
            return Err(Error::Session(format!(
                "unsupported protocol version {} (expected {PROTOCOL_VERSION})",
                msg.v
            )));
        }
        if let Some(prev) = self.last_client_seq {
            if msg.seq <= prev {
                return Err(Error::Session(format!(
                    "sequence number {} does not follow {prev}",
                    msg.seq
                )));
            }
        }
        self.last_client_seq = Some(msg.seq);

        match msg.body {
            ClientMessage::Init { object, model, window } => {
                if self.session.is_some() {
                    return Err(Error::Session("session already initialized".into()));
                }
                let (id, model) = match model {
                    Some(ModelRef::Id(id)) => {
                        let m = self
                            .store
                            .get(&id)
                            .ok_or_else(|| Error::Session(format!("unknown model {id:?}")))?;
                        (id, m)
                    }
                    Some(ModelRef::Inline(m)) => ("inline".to_string(), Arc::new(*m)),
                    None => self
                        .store
                        .default_model()
                        .ok_or_else(|| Error::Session("no model given and no default model".into()))?,
                };
                self.session = Some(Session::new(object, model, window.unwrap_or_default())?);
                self.push(out, ServerMessage::Ack {
                    ack_seq: msg.seq,
                    model: Some(id),
                });
            }
            ClientMessage::Samples { samples } => {
                let session = self
                    .session
                    .as_mut()
                    .ok_or_else(|| Error::Session("init required before samples".into()))?;
                let mut events = Vec::new();
                let mut failure = None;
                for s in samples {
                    match session.push_sample(s) {
                        Ok(ev) => events.extend(ev),
                        Err(e) => {
                            failure = Some(e);
                            break;
                        }
                    }
                }
                for event in events {
                    self.forward(event, out);
                }
                if let Some(e) = failure {
                    return Err(e);
                }
                self.push(out, ServerMessage::Ack {
                    ack_seq: msg.seq,
                    model: None,
                });
            }
        }
        Ok(())
    }

    /// New fixations first, then the window's features, then its verdict.
    fn forward(&mut self, event: IntentionEvent, out: &mut Vec<ServerEnvelope>) {
        for f in event.fixations {
            if f.t_start_ms > self.last_fixation_start {
                self.last_fixation_start = f.t_start_ms;
                self.push(out, ServerMessage::Fixation { fixation: f });
            }
        }
        if let Some(features) = event.window_features {
            self.push(out, ServerMessage::Features {
                t_ms: event.t_ms,
                features,
            });
        }
        self.push(out, ServerMessage::Intention {
            t_ms: event.t_ms,
            label: event.label,
            fired: event.fired,
        });
    }
}

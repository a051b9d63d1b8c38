//! Hosts the websocket service in-process and streams one replay through it.
//!
//! ```bash
//! cargo run --release --example service_client
//! ```

use std::sync::Arc;

use futures::{SinkExt, StreamExt};
use gaze_intent::rng::derive;
use gaze_intent::service::protocol::{ServerEnvelope, ServerMessage};
use gaze_intent::service::{router, ModelStore};
use gaze_intent::stream::{REPLAY_GAP_MS, REPLAY_RATE_HZ};
use gaze_intent::synth::{rasterize_for, Generator, Shape, SynthConfig};
use gaze_intent::TaskLabel;
use serde_json::json;
use tokio_tungstenite::tungstenite::Message;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut store = ModelStore::default();
    store.add_synthetic_default(1)?;
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    tokio::spawn(async move { axum::serve(listener, router(Arc::new(store))).await });

    let trial = Generator::new(SynthConfig::with_seed(2))?.generate_trial(
        TaskLabel::Grasp,
        Shape::Square,
        &mut derive(2, 0),
    )?;
    let samples = rasterize_for(&trial, REPLAY_RATE_HZ, 5000.0, REPLAY_GAP_MS);

    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/ws")).await?;
    let mut frames = vec![json!({"v": 1, "seq": 1, "type": "init", "object": trial.object})];
    for (i, chunk) in samples.chunks(12).enumerate() {
        frames.push(json!({"v": 1, "seq": i + 2, "type": "samples", "samples": chunk}));
    }

    for frame in frames {
        ws.send(Message::text(frame.to_string())).await?;
        while let Some(msg) = ws.next().await {
            let Message::Text(text) = msg? else { continue };
            let reply: ServerEnvelope = serde_json::from_str(text.as_str())?;
            match reply.body {
                ServerMessage::Ack { model, .. } => {
                    if let Some(model) = model {
                        println!("session uses model {model}");
                    }
                    break;
                }
                ServerMessage::Fixation { fixation } => {
                    println!("fixation ({:.0}, {:.0}) at {:.0} ms", fixation.x, fixation.y, fixation.t_start_ms)
                }
                ServerMessage::Intention { t_ms, label, fired } => {
                    println!("intention {label:?} at {t_ms:.0} ms{}", if fired { " FIRED" } else { "" })
                }
                ServerMessage::Features { .. } => {}
                ServerMessage::Error { message } => return Err(message.into()),
            }
        }
    }
    ws.close(None).await?;
    Ok(())
}

//! Online side of the Vietnamese comment classification system.
//!
//! A topic-based message broker ([`broker`]), a producer/consumer client
//! ([`client`]), a CSV replay producer ([`replay`]) and the classifying
//! consumer pipeline ([`pipeline`]) compose into the streaming system:
//!
//! ```text
//! replay_csv_as_stream ──produce──▶ broker topic ──consume──▶ run_pipeline ──▶ sink CSV
//! ```
//!
//! Frames on the wire are 4-byte big-endian length prefixes followed by
//! UTF-8 JSON (see [`protocol`]). Delivery into the sink is at-least-once:
//! offsets commit only after sink rows are flushed.

pub mod broker;
pub mod client;
pub mod error;
pub mod pipeline;
pub mod protocol;
pub mod replay;

pub use broker::{start_broker, BrokerConfig, BrokerHandle};
pub use client::{BrokerClient, ClientConfig};
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineStats};
pub use protocol::Message;
pub use replay::{replay_csv_as_stream, ReplayStats};

//! Wire protocol shared by broker and clients.
//!
//! Every frame is a 4-byte big-endian length prefix followed by that many
//! bytes of UTF-8 JSON. Requests:
//!
//! ```text
//! {"op":"produce","topic":<str>,"msg":{"id":<str>,"text":<str>,"source":<str>,"ts":<int>}}
//! {"op":"consume","topic":<str>,"from":<int>,"max":<int>}
//! ```
//!
//! Responses:
//!
//! ```text
//! {"ok":true,"offset":<int>}                  (produce)
//! {"ok":true,"msgs":[...],"next":<int>}       (consume)
//! {"ok":false,"err":<str>}                    (any failure)
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Largest message payload a producer may submit (1 MiB).
pub const MAX_MESSAGE_BYTES: usize = 1024 * 1024;
/// Hard cap on a single wire frame; beyond this the connection is dropped.
pub const MAX_FRAME_BYTES: usize = 8 * 1024 * 1024;

/// One streamed comment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub source: String,
    /// Epoch milliseconds at send time.
    #[serde(default)]
    pub ts: i64,
}

impl Message {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Protocol("message id must be non-empty".into()));
        }
        Ok(())
    }
}

/// Requests, JSON-tagged on `op`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Request {
    Produce {
        topic: String,
        /// Kept as raw JSON so the broker stays a dumb log; shape validation
        /// happens in producers (on send) and consumers (on processing).
        msg: Value,
    },
    Consume {
        topic: String,
        from: u64,
        max: u64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Response {
    Produced { ok: bool, offset: u64 },
    Consumed { ok: bool, msgs: Vec<Value>, next: u64 },
    Error { ok: bool, err: String },
}

impl Response {
    pub fn produced(offset: u64) -> Response {
        Response::Produced { ok: true, offset }
    }

    pub fn consumed(msgs: Vec<Value>, next: u64) -> Response {
        Response::Consumed {
            ok: true,
            msgs,
            next,
        }
    }

    pub fn error(err: impl Into<String>) -> Response {
        Response::Error {
            ok: false,
            err: err.into(),
        }
    }
}

/// Writes one length-prefixed JSON frame.
pub fn write_frame<W: Write, T: Serialize>(writer: &mut W, value: &T) -> Result<()> {
    let body = serde_json::to_vec(value).map_err(|e| Error::Protocol(e.to_string()))?;
    if body.len() > MAX_FRAME_BYTES {
        return Err(Error::Protocol(format!(
            "frame of {} bytes exceeds the {} byte cap",
            body.len(),
            MAX_FRAME_BYTES
        )));
    }
    writer
        .write_all(&(body.len() as u32).to_be_bytes())
        .and_then(|_| writer.write_all(&body))
        .and_then(|_| writer.flush())
        .map_err(|e| Error::Transport(e.to_string()))
}

/// Reads one frame; `Ok(None)` on clean EOF at a frame boundary.
pub fn read_frame<R: Read>(reader: &mut R) -> Result<Option<Vec<u8>>> {
    let mut len_buf = [0u8; 4];
    match reader.read_exact(&mut len_buf) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(Error::Transport(e.to_string())),
    }
    let len = u32::from_be_bytes(len_buf) as usize;
    if len > MAX_FRAME_BYTES {
        return Err(Error::Protocol(format!(
            "peer announced a {len} byte frame (cap {MAX_FRAME_BYTES})"
        )));
    }
    let mut body = vec![0u8; len];
    reader
        .read_exact(&mut body)
        .map_err(|e| Error::Transport(e.to_string()))?;
    Ok(Some(body))
}

pub fn parse_request(body: &[u8]) -> Result<Request> {
    serde_json::from_slice(body).map_err(|e| Error::Protocol(format!("bad request: {e}")))
}

pub fn parse_response(body: &[u8]) -> Result<Response> {
    // `untagged` can't tell an error frame from a produce frame by shape
    // alone once `ok` is false, so dispatch on the `ok` field first.
    let value: Value =
        serde_json::from_slice(body).map_err(|e| Error::Protocol(format!("bad response: {e}")))?;
    match value.get("ok").and_then(Value::as_bool) {
        Some(true) => serde_json::from_value(value)
            .map_err(|e| Error::Protocol(format!("bad response: {e}"))),
        Some(false) => {
            let err = value
                .get("err")
                .and_then(Value::as_str)
                .unwrap_or("unspecified broker error")
                .to_string();
            Ok(Response::Error { ok: false, err })
        }
        None => Err(Error::Protocol("response missing `ok` field".into())),
    }
}

pub fn now_millis() -> i64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as i64)
        .unwrap_or(0)
}

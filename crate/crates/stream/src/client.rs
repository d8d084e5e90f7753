//! TCP client for the broker: producing and consuming with bounded
//! reconnect-and-retry on transport failures.

use std::net::TcpStream;
use std::time::Duration;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::protocol::{
    parse_response, read_frame, write_frame, Message, Request, Response, MAX_MESSAGE_BYTES,
};

#[derive(Debug, Clone, Copy)]
pub struct ClientConfig {
    /// Connection/request attempts before giving up.
    pub retries: u32,
    /// First backoff delay; doubles per attempt.
    pub initial_backoff: Duration,
    /// Per-request read timeout.
    pub read_timeout: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            retries: 5,
            initial_backoff: Duration::from_millis(100),
            read_timeout: Duration::from_secs(10),
        }
    }
}

pub struct BrokerClient {
    addr: String,
    config: ClientConfig,
    stream: Option<TcpStream>,
}

impl BrokerClient {
    /// Connects with default retry settings.
    pub fn connect(addr: &str) -> Result<BrokerClient> {
        BrokerClient::with_config(addr, ClientConfig::default())
    }

    pub fn with_config(addr: &str, config: ClientConfig) -> Result<BrokerClient> {
        let mut client = BrokerClient {
            addr: addr.to_string(),
            config,
            stream: None,
        };
        client.ensure_connected()?;
        Ok(client)
    }

    fn ensure_connected(&mut self) -> Result<()> {
        if self.stream.is_some() {
            return Ok(());
        }
        let mut backoff = self.config.initial_backoff;
        let mut last_err = String::new();
        for attempt in 0..self.config.retries.max(1) {
            if attempt > 0 {
                std::thread::sleep(backoff);
                backoff = backoff.saturating_mul(2);
            }
            match TcpStream::connect(&self.addr) {
                Ok(stream) => {
                    let _ = stream.set_read_timeout(Some(self.config.read_timeout));
                    let _ = stream.set_nodelay(true);
                    self.stream = Some(stream);
                    return Ok(());
                }
                Err(e) => last_err = e.to_string(),
            }
        }
        Err(Error::Transport(format!(
            "cannot reach broker at {}: {last_err}",
            self.addr
        )))
    }

    fn request(&mut self, request: &Request) -> Result<Response> {
        let mut last_err: Option<Error> = None;
        for _ in 0..self.config.retries.max(1) {
            self.ensure_connected()?;
            let stream = self.stream.as_mut().expect("connected");
            let outcome = write_frame(stream, request).and_then(|_| match read_frame(stream)? {
                Some(body) => parse_response(&body),
                None => Err(Error::Transport("broker closed the connection".into())),
            });
            match outcome {
                Ok(response) => return Ok(response),
                Err(e) if e.is_retriable() => {
                    self.stream = None; // reconnect on the next attempt
                    last_err = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or_else(|| Error::Transport("request failed".into())))
    }

    /// Appends one message; returns its assigned offset.
    pub fn produce(&mut self, topic: &str, message: &Message) -> Result<u64> {
        message.validate()?;
        let msg = serde_json::to_value(message).map_err(|e| Error::Protocol(e.to_string()))?;
        self.produce_raw(topic, msg)
    }

    /// Produce a raw JSON payload (no shape validation beyond the size cap).
    pub fn produce_raw(&mut self, topic: &str, msg: Value) -> Result<u64> {
        let size = serde_json::to_vec(&msg)
            .map_err(|e| Error::Protocol(e.to_string()))?
            .len();
        if size > MAX_MESSAGE_BYTES {
            return Err(Error::Rejected(format!(
                "message payload of {size} bytes exceeds the {MAX_MESSAGE_BYTES} byte limit"
            )));
        }
        let response = self.request(&Request::Produce {
            topic: topic.to_string(),
            msg,
        })?;
        match response {
            Response::Produced { offset, .. } => Ok(offset),
            Response::Error { err, .. } => Err(Error::Rejected(err)),
            other => Err(Error::Protocol(format!(
                "unexpected response to produce: {other:?}"
            ))),
        }
    }

    /// Reads up to `max` messages starting at `from`; returns them with the
    /// next offset to poll. An empty batch means the consumer is caught up.
    pub fn consume(&mut self, topic: &str, from: u64, max: u64) -> Result<(Vec<Value>, u64)> {
        let response = self.request(&Request::Consume {
            topic: topic.to_string(),
            from,
            max,
        })?;
        match response {
            Response::Consumed { msgs, next, .. } => Ok((msgs, next)),
            Response::Error { err, .. } => Err(Error::Rejected(err)),
            other => Err(Error::Protocol(format!(
                "unexpected response to consume: {other:?}"
            ))),
        }
    }
}

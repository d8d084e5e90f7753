//! Topic-based message broker: an in-memory append-only log per topic,
//! served over TCP with the length-prefixed JSON protocol.
//!
//! Topics auto-create on first produce. Appends to one topic are serialized
//! under the broker lock, so every consumer observes one total order. With a
//! journal configured, each accepted message is appended to a JSONL file and
//! flushed before the ack goes out; on startup the journal is replayed, so a
//! restarted broker resumes with the same offsets.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::protocol::{
    parse_request, read_frame, write_frame, Request, Response, MAX_MESSAGE_BYTES,
};

#[derive(Debug, Clone, Default)]
pub struct BrokerConfig {
    /// Append-only JSONL journal; replayed on startup when the file exists.
    pub journal: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct JournalLine {
    topic: String,
    msg: Value,
}

/// Broker state behind one coarse lock: the per-topic logs plus the journal
/// writer, locked together so journal order always equals log order.
struct State {
    topics: HashMap<String, Vec<Value>>,
    journal: Option<BufWriter<File>>,
}

struct Shared {
    state: Mutex<State>,
    stop: AtomicBool,
}

impl Shared {
    fn produce(&self, topic: &str, msg: Value) -> Result<u64> {
        let body_len = serde_json::to_vec(&msg)
            .map_err(|e| Error::Protocol(e.to_string()))?
            .len();
        if body_len > MAX_MESSAGE_BYTES {
            return Err(Error::Rejected(format!(
                "message payload of {body_len} bytes exceeds the {MAX_MESSAGE_BYTES} byte limit"
            )));
        }
        let mut state = self.state.lock().expect("broker lock");
        if let Some(journal) = state.journal.as_mut() {
            let line = serde_json::to_string(&JournalLine {
                topic: topic.to_string(),
                msg: msg.clone(),
            })
            .map_err(|e| Error::Protocol(e.to_string()))?;
            journal
                .write_all(line.as_bytes())
                .and_then(|_| journal.write_all(b"\n"))
                .and_then(|_| journal.flush())
                .map_err(Error::Io)?;
        }
        let log = state.topics.entry(topic.to_string()).or_default();
        log.push(msg);
        Ok((log.len() - 1) as u64)
    }

    fn consume(&self, topic: &str, from: u64, max: u64) -> (Vec<Value>, u64) {
        let state = self.state.lock().expect("broker lock");
        let log = match state.topics.get(topic) {
            Some(log) => log,
            None => return (Vec::new(), from),
        };
        let len = log.len() as u64;
        if from >= len {
            return (Vec::new(), from);
        }
        let end = len.min(from.saturating_add(max));
        let msgs = log[from as usize..end as usize].to_vec();
        let next = from + msgs.len() as u64;
        (msgs, next)
    }
}

/// A running broker. Dropping the handle (or calling [`shutdown`]) stops the
/// accept loop; connection threads notice within their read timeout.
///
/// [`shutdown`]: BrokerHandle::shutdown
pub struct BrokerHandle {
    addr: SocketAddr,
    shared: Arc<Shared>,
    accept_thread: Option<JoinHandle<()>>,
}

impl BrokerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn shutdown(mut self) {
        self.stop_and_join();
    }

    fn stop_and_join(&mut self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        if let Some(t) = self.accept_thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for BrokerHandle {
    fn drop(&mut self) {
        self.stop_and_join();
    }
}

/// Binds and starts serving. `addr` like `"127.0.0.1:7171"`; port 0 picks a
/// free port (read it back from [`BrokerHandle::addr`]).
pub fn start_broker(addr: &str, config: BrokerConfig) -> Result<BrokerHandle> {
    let listener = TcpListener::bind(addr).map_err(|e| Error::Startup(format!("bind {addr}: {e}")))?;
    let local = listener
        .local_addr()
        .map_err(|e| Error::Startup(e.to_string()))?;
    listener
        .set_nonblocking(true)
        .map_err(|e| Error::Startup(e.to_string()))?;

    let mut topics: HashMap<String, Vec<Value>> = HashMap::new();
    let mut journal = None;
    if let Some(path) = &config.journal {
        replay_journal(path, &mut topics)?;
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        journal = Some(BufWriter::new(file));
    }

    let shared = Arc::new(Shared {
        state: Mutex::new(State { topics, journal }),
        stop: AtomicBool::new(false),
    });

    let accept_shared = Arc::clone(&shared);
    let accept_thread = std::thread::spawn(move || {
        while !accept_shared.stop.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, peer)) => {
                    log::debug!("broker: connection from {peer}");
                    let conn_shared = Arc::clone(&accept_shared);
                    std::thread::spawn(move || serve_connection(stream, conn_shared));
                }
                Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                    std::thread::sleep(Duration::from_millis(5));
                }
                Err(e) => {
                    log::warn!("broker: accept error: {e}");
                    std::thread::sleep(Duration::from_millis(50));
                }
            }
        }
    });

    log::info!("broker listening on {local}");
    Ok(BrokerHandle {
        addr: local,
        shared,
        accept_thread: Some(accept_thread),
    })
}

fn replay_journal(path: &PathBuf, topics: &mut HashMap<String, Vec<Value>>) -> Result<()> {
    if !path.exists() {
        return Ok(());
    }
    let reader = BufReader::new(File::open(path)?);
    let mut replayed = 0u64;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JournalLine>(&line) {
            Ok(entry) => {
                topics.entry(entry.topic).or_default().push(entry.msg);
                replayed += 1;
            }
            // a torn final line from a crash is expected; anything else is not
            Err(e) => log::warn!("broker: skipping unreadable journal line: {e}"),
        }
    }
    log::info!("broker: replayed {replayed} journal entries");
    Ok(())
}

fn serve_connection(stream: TcpStream, shared: Arc<Shared>) {
    let _ = stream.set_read_timeout(Some(Duration::from_millis(250)));
    let mut reader = stream.try_clone().expect("clone stream");
    let mut writer = stream;
    loop {
        if shared.stop.load(Ordering::SeqCst) {
            return;
        }
        let body = match read_frame(&mut reader) {
            Ok(Some(body)) => body,
            Ok(None) => return, // client closed
            Err(Error::Transport(msg))
                if msg.contains("timed out") || msg.contains("would block") =>
            {
                continue; // idle; re-check the stop flag
            }
            Err(e) => {
                log::debug!("broker: dropping connection: {e}");
                return;
            }
        };
        let response = match parse_request(&body) {
            Ok(Request::Produce { topic, msg }) => match shared.produce(&topic, msg) {
                Ok(offset) => Response::produced(offset),
                Err(e) => Response::error(e.to_string()),
            },
            Ok(Request::Consume { topic, from, max }) => {
                let (msgs, next) = shared.consume(&topic, from, max);
                Response::consumed(msgs, next)
            }
            Err(e) => Response::error(e.to_string()),
        };
        if let Err(e) = write_frame(&mut writer, &response) {
            log::debug!("broker: write failed, dropping connection: {e}");
            return;
        }
    }
}

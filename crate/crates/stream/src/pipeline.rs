//! The classifying consumer: consume → preprocess → vectorize → predict →
//! append to the CSV sink → commit the offset.
//!
//! Delivery is at-least-once into the sink: a batch's rows are appended and
//! flushed to disk *before* the consumer offset commits (atomically, via
//! write-temp-then-rename), so a crash between the two re-delivers the batch
//! on restart. Duplicates are possible by id; gaps are not. Malformed
//! payloads go to a dead-letter CSV with a reason instead of stopping the
//! pipeline; a sink write failure halts without committing.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use base64::Engine;
use serde_json::Value;

use vistream_core::classify::Model;
use vistream_core::features::{transform, Vocabulary};
use vistream_core::ingest::Label;
use vistream_core::textprep::{preprocess, NormalizerConfig};

use crate::client::{BrokerClient, ClientConfig};
use crate::error::{Error, Result};
use crate::protocol::{now_millis, Message};

pub const SINK_HEADER: [&str; 10] = [
    "id",
    "ts",
    "source",
    "text",
    "label",
    "p_other",
    "p_discrimination",
    "p_supportive",
    "empty_after_preprocess",
    "processed_at",
];

pub const DEAD_LETTER_HEADER: [&str; 3] = ["raw_frame_base64", "reason", "received_at"];

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub broker_addr: String,
    pub topic: String,
    pub sink_path: PathBuf,
    /// Defaults to `<sink>.deadletter.csv`.
    pub dead_letter_path: Option<PathBuf>,
    /// Defaults to `<sink>.offset`.
    pub offset_path: Option<PathBuf>,
    pub max_batch: u64,
    pub poll_interval: Duration,
    /// Pacing between batches — a simple throughput limiter. Zero (the
    /// default) processes batches back-to-back.
    pub batch_delay: Duration,
    /// Stop once the consumer has been caught up for this long;
    /// `None` runs until the stop flag flips.
    pub idle_shutdown: Option<Duration>,
    pub client: ClientConfig,
}

impl PipelineConfig {
    pub fn new(broker_addr: &str, topic: &str, sink_path: &Path) -> PipelineConfig {
        PipelineConfig {
            broker_addr: broker_addr.to_string(),
            topic: topic.to_string(),
            sink_path: sink_path.to_path_buf(),
            dead_letter_path: None,
            offset_path: None,
            max_batch: 100,
            poll_interval: Duration::from_millis(25),
            batch_delay: Duration::ZERO,
            idle_shutdown: None,
            client: ClientConfig::default(),
        }
    }

    pub fn offset_path(&self) -> PathBuf {
        self.offset_path
            .clone()
            .unwrap_or_else(|| suffixed(&self.sink_path, ".offset"))
    }

    pub fn dead_letter_path(&self) -> PathBuf {
        self.dead_letter_path
            .clone()
            .unwrap_or_else(|| suffixed(&self.sink_path, ".deadletter.csv"))
    }
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineStats {
    pub processed: u64,
    pub dead_lettered: u64,
    pub committed_offset: u64,
}

/// Reads the committed offset; 0 when no commit exists yet.
pub fn read_offset(path: &Path) -> Result<u64> {
    match std::fs::read_to_string(path) {
        Ok(content) => content
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::Config(format!("corrupt offset file {path:?}: {e}"))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(0),
        Err(e) => Err(e.into()),
    }
}

/// Atomically persists the offset: write to a temp file in the same
/// directory, fsync, then rename over the target.
pub fn write_offset(path: &Path, offset: u64) -> Result<()> {
    let tmp = suffixed(path, ".tmp");
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(offset.to_string().as_bytes())?;
        file.write_all(b"\n")?;
        file.sync_data()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Appends CSV rows, emitting the header first when the file is new or
/// empty. Data is flushed and synced before returning.
fn append_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let err = |e: std::io::Error| Error::Sink(format!("{}: {e}", path.display()));
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(err)?;
    let is_new = file.metadata().map_err(err)?.len() == 0;
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        if is_new {
            w.write_record(header)
                .map_err(|e| Error::Sink(e.to_string()))?;
        }
        for row in rows {
            w.write_record(row).map_err(|e| Error::Sink(e.to_string()))?;
        }
        w.flush().map_err(err)?;
    }
    file.write_all(&buf).map_err(err)?;
    file.sync_data().map_err(err)?;
    Ok(())
}

/// One classified message rendered as a sink row.
fn sink_row(
    msg: &Message,
    model: &Model,
    vocab: &Vocabulary,
    normalizer: &NormalizerConfig,
) -> Result<Vec<String>> {
    let tokens = preprocess(&msg.text, normalizer);
    let empty = tokens.is_empty();
    let doc = vistream_core::textprep::ProcessedText::new(msg.id.clone(), tokens);
    let x = transform(&doc, vocab);
    let prediction = model.predict(&x)?;
    let label = Label::from_index(prediction.class)
        .ok_or_else(|| Error::Config(format!("model produced class {}", prediction.class)))?;
    Ok(vec![
        msg.id.clone(),
        msg.ts.to_string(),
        msg.source.clone(),
        msg.text.clone(),
        label.as_decimal_str().to_string(),
        prediction.probabilities[0].to_string(),
        prediction.probabilities[1].to_string(),
        prediction.probabilities[2].to_string(),
        empty.to_string(),
        now_millis().to_string(),
    ])
}

fn dead_letter_row(raw: &Value, reason: &str) -> Vec<String> {
    let bytes = serde_json::to_vec(raw).unwrap_or_default();
    vec![
        base64::engine::general_purpose::STANDARD.encode(bytes),
        reason.to_string(),
        now_millis().to_string(),
    ]
}

/// Runs the consume→classify→sink loop until the stop flag flips (or the
/// idle shutdown fires). Resumes from the committed offset.
pub fn run_pipeline(
    config: &PipelineConfig,
    model: &Model,
    vocab: &Vocabulary,
    normalizer: &NormalizerConfig,
    stop: &AtomicBool,
) -> Result<PipelineStats> {
    if model.n_classes() != Label::COUNT {
        return Err(Error::Config(format!(
            "sink schema needs a {}-class model, got {} classes",
            Label::COUNT,
            model.n_classes()
        )));
    }
    if model.n_features() != vocab.len() {
        return Err(Error::Config(format!(
            "model expects {} features but vocabulary has {} terms",
            model.n_features(),
            vocab.len()
        )));
    }

    let offset_path = config.offset_path();
    let dead_letter_path = config.dead_letter_path();
    let mut client = BrokerClient::with_config(&config.broker_addr, config.client)?;
    let mut offset = read_offset(&offset_path)?;
    let mut stats = PipelineStats {
        committed_offset: offset,
        ..PipelineStats::default()
    };
    let mut caught_up_since: Option<Instant> = None;

    log::info!(
        "pipeline: consuming {:?} from offset {offset} into {}",
        config.topic,
        config.sink_path.display()
    );

    while !stop.load(Ordering::SeqCst) {
        let (msgs, next) = client.consume(&config.topic, offset, config.max_batch)?;
        if msgs.is_empty() {
            let idle_start = caught_up_since.get_or_insert_with(Instant::now);
            if let Some(limit) = config.idle_shutdown {
                if idle_start.elapsed() >= limit {
                    break;
                }
            }
            std::thread::sleep(config.poll_interval);
            continue;
        }
        caught_up_since = None;

        let mut rows = Vec::with_capacity(msgs.len());
        let mut dead = Vec::new();
        for raw in &msgs {
            let decoded = serde_json::from_value::<Message>(raw.clone())
                .map_err(|e| e.to_string())
                .and_then(|m| {
                    if m.id.is_empty() {
                        Err("message id must be non-empty".to_string())
                    } else {
                        Ok(m)
                    }
                });
            match decoded {
                Ok(message) => rows.push(sink_row(&message, model, vocab, normalizer)?),
                Err(reason) => dead.push(dead_letter_row(raw, &reason)),
            }
        }

        // sink first, then the dead letters, then the offset commit
        if !rows.is_empty() {
            append_csv(&config.sink_path, &SINK_HEADER, &rows)?;
        }
        if !dead.is_empty() {
            append_csv(&dead_letter_path, &DEAD_LETTER_HEADER, &dead)?;
        }
        write_offset(&offset_path, next)?;
        stats.processed += rows.len() as u64;
        stats.dead_lettered += dead.len() as u64;
        stats.committed_offset = next;
        offset = next;
        if !config.batch_delay.is_zero() {
            std::thread::sleep(config.batch_delay);
        }
    }

    Ok(stats)
}

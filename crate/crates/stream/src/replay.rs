//! Replays a dataset CSV into a topic, standing in for a live crawler.

use std::path::Path;
use std::time::{Duration, Instant};

use crate::client::BrokerClient;
use crate::error::{Error, Result};
use crate::protocol::{now_millis, Message};

#[derive(Debug, Clone, Copy, Default)]
pub struct ReplayStats {
    pub produced: u64,
    pub skipped: u64,
}

/// Produces every row of an ingest-schema CSV (`text` mandatory; `id` and
/// `source` optional) as one message, in file order. `rate` is messages per
/// second, best-effort; 0 means unthrottled. Malformed rows are skipped and
/// counted.
pub fn replay_csv_as_stream(
    client: &mut BrokerClient,
    path: &Path,
    topic: &str,
    rate: f64,
) -> Result<ReplayStats> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let text_col = col("text").ok_or_else(|| {
        Error::Config(format!(
            "replay file {} has no `text` column",
            path.display()
        ))
    })?;
    let id_col = col("id");
    let source_col = col("source");

    let started = Instant::now();
    let mut stats = ReplayStats::default();
    for (i, record) in reader.records().enumerate() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                log::warn!("replay: skipping unreadable row {}: {e}", i + 1);
                stats.skipped += 1;
                continue;
            }
        };
        let text = record.get(text_col).unwrap_or("");
        if text.trim().is_empty() {
            log::warn!("replay: skipping row {} with empty text", i + 1);
            stats.skipped += 1;
            continue;
        }
        let id = match id_col.and_then(|c| record.get(c)) {
            Some(v) if !v.is_empty() => v.to_string(),
            _ => format!("r{i}"),
        };
        let source = source_col
            .and_then(|c| record.get(c))
            .unwrap_or("")
            .to_string();

        if rate > 0.0 {
            let due = started + Duration::from_secs_f64(stats.produced as f64 / rate);
            if let Some(wait) = due.checked_duration_since(Instant::now()) {
                std::thread::sleep(wait);
            }
        }
        client.produce(
            topic,
            &Message {
                id,
                text: text.to_string(),
                source,
                ts: now_millis(),
            },
        )?;
        stats.produced += 1;
    }
    log::info!(
        "replay: produced {} messages ({} skipped) to {topic:?}",
        stats.produced,
        stats.skipped
    );
    Ok(stats)
}

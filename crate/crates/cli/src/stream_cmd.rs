//! The online system: broker, producer and classifying consumer.

use std::sync::atomic::AtomicBool;
use std::time::Duration;

use anyhow::{Context, Result};

use vistream_core::classify::Model;
use vistream_core::features::Vocabulary;
use vistream_stream::{
    replay_csv_as_stream, run_pipeline, start_broker, BrokerClient, BrokerConfig, ClientConfig,
    PipelineConfig,
};

use crate::offline::{load_normalizer, require_file};
use crate::{BrokerArgs, ConsumeArgs, ProduceArgs};

pub(crate) fn cmd_broker(args: BrokerArgs) -> Result<()> {
    let broker = start_broker(
        &args.bind,
        BrokerConfig {
            journal: args.journal.clone(),
        },
    )?;
    println!("broker listening on {}", broker.addr());
    // serve until the process is terminated
    loop {
        std::thread::sleep(Duration::from_secs(3600));
    }
}

fn client_config(retries: u32) -> ClientConfig {
    ClientConfig {
        retries,
        ..ClientConfig::default()
    }
}

pub(crate) fn cmd_produce(args: ProduceArgs) -> Result<()> {
    require_file(&args.data)?;
    let mut client = BrokerClient::with_config(&args.broker, client_config(args.connect_retries))
        .with_context(|| format!("connecting to broker {}", args.broker))?;
    let stats = replay_csv_as_stream(&mut client, &args.data, &args.topic, args.rate)?;
    println!(
        "{}",
        serde_json::json!({ "produced": stats.produced, "skipped": stats.skipped })
    );
    Ok(())
}

pub(crate) fn cmd_consume(args: ConsumeArgs) -> Result<()> {
    for path in [&args.model, &args.vocab] {
        require_file(path)?;
    }
    let model = Model::load_from_path(&args.model)?;
    let vocab = Vocabulary::load_from_path(&args.vocab)?;
    let normalizer = load_normalizer(&args.dicts)?;

    let mut config = PipelineConfig::new(&args.broker, &args.topic, &args.sink);
    config.dead_letter_path = args.dead_letter.clone();
    config.offset_path = args.offset_file.clone();
    config.max_batch = args.max_batch.max(1);
    config.poll_interval = Duration::from_millis(args.poll_ms);
    config.batch_delay = Duration::from_millis(args.batch_delay_ms);
    config.idle_shutdown = args.idle_timeout_ms.map(Duration::from_millis);
    config.client = client_config(args.connect_retries);

    let stop = AtomicBool::new(false);
    let stats = run_pipeline(&config, &model, &vocab, &normalizer, &stop)
        .with_context(|| format!("consuming {:?} from {}", args.topic, args.broker))?;
    println!(
        "{}",
        serde_json::json!({
            "processed": stats.processed,
            "dead_lettered": stats.dead_lettered,
            "committed_offset": stats.committed_offset,
        })
    );
    Ok(())
}

//! `vistream` — Vietnamese comment classification, offline and online.
//!
//! Offline: `train`, `evaluate`, `grid` run the dataset → preprocess →
//! vectorize → model pipeline and write JSON/CSV artifacts. Online:
//! `broker`, `produce`, `consume` compose into the streaming system, and
//! `report` renders static HTML/CSV summaries of a sink or dataset file.
//!
//! Every subcommand is deterministic given its flags and `--seed`
//! (streaming commands up to timestamps). Failures print a single JSON line
//! `{"error": "..."}` to stderr and exit nonzero. Set `VISTREAM_LOG` to
//! control log verbosity (error/warn/info/debug/trace).

mod offline;
mod report;
mod stream_cmd;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "vistream",
    version,
    about = "Stream and classify Vietnamese social-media comments",
    after_help = "Machine-readable outputs:\n  \
    train:    <out>/model.json (versioned model), <out>/vocab.json,\n            \
    <out>/manifest.json (seed, fractions, split ids), <out>/{train,val,test}.csv,\n            \
    <out>/val_report.json\n  \
    evaluate: <out>/report.json, <out>/confusion.csv, <out>/errors.csv\n  \
    grid:     <out>/scores.csv (one row per grid point), <out>/best_config.json\n  \
    consume:  sink CSV with header id,ts,source,text,label,p_other,\n            \
    p_discrimination,p_supportive,empty_after_preprocess,processed_at;\n            \
    dead-letter CSV with header raw_frame_base64,reason,received_at\n  \
    report:   <out>/report.html plus label_distribution.csv, top_terms.csv,\n            \
    length_histogram.csv and (with --truth) confusion.csv, metrics.json\n\n\
    Labels are 0.0 (other), 1.0 (discrimination), 2.0 (supportive).\n\
    VISTREAM_LOG sets the log level."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model: balance, split, preprocess, vectorize, fit, save.
    Train(TrainArgs),
    /// Evaluate a saved model on a labeled dataset.
    Evaluate(EvaluateArgs),
    /// Grid-search hyperparameters against the validation split.
    Grid(GridArgs),
    /// Run the message broker.
    Broker(BrokerArgs),
    /// Replay a dataset CSV into a topic.
    Produce(ProduceArgs),
    /// Consume a topic, classify each message, append to the sink CSV.
    Consume(ConsumeArgs),
    /// Render static HTML/CSV summaries from a sink or dataset CSV.
    Report(ReportArgs),
}

/// Preprocessing dictionary overrides, shared by several subcommands.
#[derive(Args, Clone)]
struct DictArgs {
    /// Teencode dictionary file (`key<TAB>expansion` per line); built-in if omitted.
    #[arg(long)]
    teencode: Option<PathBuf>,
    /// Phrase lexicon file (one multi-syllable phrase per line); built-in if omitted.
    #[arg(long)]
    phrases: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct SplitArgs {
    #[arg(long, default_value_t = 0.70)]
    train_frac: f64,
    #[arg(long, default_value_t = 0.15)]
    val_frac: f64,
    #[arg(long, default_value_t = 0.15)]
    test_frac: f64,
}

#[derive(Args, Clone, Copy)]
struct VectorizerArgs {
    /// Minimum document frequency for a term to enter the vocabulary.
    #[arg(long, default_value_t = 1)]
    min_df: usize,
    /// Keep only the N highest-count terms.
    #[arg(long)]
    max_features: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled dataset CSV (columns: text required; id, label, source optional).
    #[arg(long)]
    data: PathBuf,
    /// Model kind: nb, lr or rf.
    #[arg(long, default_value = "nb")]
    kind: String,
    /// Output directory for model, vocabulary, manifest, splits and report.
    #[arg(long)]
    out: PathBuf,
    /// Seed for balancing, splitting and model randomness.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    split: SplitArgs,
    #[command(flatten)]
    vectorizer: VectorizerArgs,
    #[command(flatten)]
    dicts: DictArgs,
    /// Naive Bayes smoothing.
    #[arg(long, default_value_t = 1.0)]
    nb_alpha: f64,
    /// Logistic regression ridge strength (defaults to 1/n_samples).
    #[arg(long)]
    lr_l2: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    lr_max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    lr_tol: f64,
    /// Random forest size.
    #[arg(long, default_value_t = 400)]
    rf_trees: usize,
    #[arg(long, default_value_t = 2)]
    rf_min_split: usize,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    /// Labeled dataset CSV to score.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    dicts: DictArgs,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    data: PathBuf,
    /// Grid JSON: {"model":"nb|lr|rf","axes":[{"name":...,"values":[...]},...]}.
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    split: SplitArgs,
    #[command(flatten)]
    vectorizer: VectorizerArgs,
    #[command(flatten)]
    dicts: DictArgs,
}

#[derive(Args)]
struct BrokerArgs {
    /// Address to listen on.
    #[arg(long, default_value = "127.0.0.1:7171")]
    bind: String,
    /// Append-only journal file; replayed on restart when present.
    #[arg(long)]
    journal: Option<PathBuf>,
}

#[derive(Args)]
struct ProduceArgs {
    /// Broker address.
    #[arg(long)]
    broker: String,
    #[arg(long)]
    topic: String,
    /// Dataset CSV to replay in file order.
    #[arg(long)]
    data: PathBuf,
    /// Messages per second; 0 = unthrottled.
    #[arg(long, default_value_t = 0.0)]
    rate: f64,
    #[arg(long, default_value_t = 5)]
    connect_retries: u32,
}

#[derive(Args)]
struct ConsumeArgs {
    #[arg(long)]
    broker: String,
    #[arg(long)]
    topic: String,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    /// Classified-output CSV; created with header on first write.
    #[arg(long)]
    sink: PathBuf,
    /// Dead-letter CSV (default: `<sink>.deadletter.csv`).
    #[arg(long)]
    dead_letter: Option<PathBuf>,
    /// Offset-commit file (default: `<sink>.offset`).
    #[arg(long)]
    offset_file: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    max_batch: u64,
    #[arg(long, default_value_t = 25)]
    poll_ms: u64,
    /// Pause between batches (throughput limiter); 0 = no pacing.
    #[arg(long, default_value_t = 0)]
    batch_delay_ms: u64,
    /// Exit once caught up for this many milliseconds; absent = run forever.
    #[arg(long)]
    idle_timeout_ms: Option<u64>,
    #[arg(long, default_value_t = 5)]
    connect_retries: u32,
    #[command(flatten)]
    dicts: DictArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// Sink CSV or dataset CSV to summarize.
    #[arg(long)]
    input: PathBuf,
    /// Labeled dataset to join by id for a confusion matrix.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Terms listed per label.
    #[arg(long, default_value_t = 20)]
    top_k: usize,
    #[command(flatten)]
    dicts: DictArgs,
}

fn main() {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("VISTREAM_LOG", "info"),
    )
    .format_timestamp_millis()
    .init();

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => offline::cmd_train(args),
        Command::Evaluate(args) => offline::cmd_evaluate(args),
        Command::Grid(args) => offline::cmd_grid(args),
        Command::Broker(args) => stream_cmd::cmd_broker(args),
        Command::Produce(args) => stream_cmd::cmd_produce(args),
        Command::Consume(args) => stream_cmd::cmd_consume(args),
        Command::Report(args) => report::cmd_report(args),
    };
    if let Err(e) = result {
        eprintln!("{}", serde_json::json!({ "error": format!("{e:#}") }));
        std::process::exit(1);
    }
}

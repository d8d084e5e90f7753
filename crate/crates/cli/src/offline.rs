//! The offline system: train, evaluate and grid-search.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use vistream_core::classify::{LrConfig, Model, ModelKind, RfConfig, TrainOptions};
use vistream_core::eval::{
    error_listing, evaluate_model, grid_search, EvalReport, ParamGrid,
};
use vistream_core::features::{
    fit_vocabulary, transform, SparseVector, VectorizerConfig, Vocabulary,
};
use vistream_core::ingest::{
    balance_labels, load_dataset, save_dataset_to_path, split, Dataset, Label, SplitSpec,
};
use vistream_core::textprep::{NormalizerConfig, ProcessedText};

use crate::{DictArgs, EvaluateArgs, GridArgs, SplitArgs, TrainArgs, VectorizerArgs};

pub(crate) fn load_normalizer(dicts: &DictArgs) -> Result<NormalizerConfig> {
    for path in [&dicts.teencode, &dicts.phrases].into_iter().flatten() {
        require_file(path)?;
    }
    NormalizerConfig::from_files(dicts.teencode.as_deref(), dicts.phrases.as_deref())
        .context("loading preprocessing dictionaries")
}

pub(crate) fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("path {:?} does not exist or is not a file", path);
    }
    Ok(())
}

/// One split, fully prepared for training or scoring.
struct SplitData {
    dataset: Dataset,
    x: Vec<SparseVector>,
    y: Vec<usize>,
}

struct Prepared {
    vocab: Vocabulary,
    train: SplitData,
    val: SplitData,
    test: SplitData,
}

fn preprocess_dataset(dataset: &Dataset, normalizer: &NormalizerConfig) -> Vec<ProcessedText> {
    dataset
        .records()
        .iter()
        .map(|r| ProcessedText::from_text(r.id.clone(), &r.text, normalizer))
        .collect()
}

fn labels_of(dataset: &Dataset) -> Vec<usize> {
    dataset
        .records()
        .iter()
        .map(|r| r.label.expect("all-labeled dataset").index())
        .collect()
}

/// Balance → split → preprocess → fit vocabulary on the train split only →
/// vectorize all three splits.
fn prepare(
    data: &Path,
    seed: u64,
    split_args: &SplitArgs,
    vectorizer: &VectorizerArgs,
    normalizer: &NormalizerConfig,
) -> Result<Prepared> {
    let dataset = load_dataset(data).with_context(|| format!("loading {data:?}"))?;
    let balanced = balance_labels(&dataset, seed).context("balancing labels")?;
    let spec = SplitSpec::new(
        split_args.train_frac,
        split_args.val_frac,
        split_args.test_frac,
        seed,
    )?;
    let (train, val, test) = split(&balanced, &spec).context("splitting dataset")?;

    let train_docs = preprocess_dataset(&train, normalizer);
    let vocab = fit_vocabulary(
        &train_docs,
        VectorizerConfig {
            min_df: vectorizer.min_df,
            max_features: vectorizer.max_features,
        },
    )
    .context("fitting vocabulary on the train split")?;

    let make = |dataset: Dataset, docs: Vec<ProcessedText>| {
        let x = docs.iter().map(|d| transform(d, &vocab)).collect();
        let y = labels_of(&dataset);
        SplitData { dataset, x, y }
    };
    let val_docs = preprocess_dataset(&val, normalizer);
    let test_docs = preprocess_dataset(&test, normalizer);
    Ok(Prepared {
        train: make(train, train_docs),
        val: make(val, val_docs),
        test: make(test, test_docs),
        vocab,
    })
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    version: u32,
    seed: u64,
    model_kind: String,
    train_fraction: f64,
    val_fraction: f64,
    test_fraction: f64,
    min_df: usize,
    max_features: Option<usize>,
    balanced: bool,
    splits: ManifestSplits,
}

#[derive(Serialize, Deserialize)]
struct ManifestSplits {
    train: Vec<String>,
    val: Vec<String>,
    test: Vec<String>,
}

fn ids_of(dataset: &Dataset) -> Vec<String> {
    dataset.records().iter().map(|r| r.id.clone()).collect()
}

fn train_options(args: &TrainArgs, kind: ModelKind) -> TrainOptions {
    TrainOptions {
        kind,
        nb_alpha: args.nb_alpha,
        lr: LrConfig {
            max_iter: args.lr_max_iter,
            tol: args.lr_tol,
            l2: args.lr_l2,
        },
        rf: RfConfig {
            n_estimators: args.rf_trees,
            seed: args.seed,
            min_samples_split: args.rf_min_split,
            ..RfConfig::default()
        },
    }
}

pub(crate) fn cmd_train(args: TrainArgs) -> Result<()> {
    require_file(&args.data)?;
    let kind = ModelKind::parse(&args.kind)
        .ok_or_else(|| anyhow::anyhow!("unknown model kind {:?} (nb|lr|rf)", args.kind))?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating output directory {:?}", args.out))?;
    let normalizer = load_normalizer(&args.dicts)?;

    let prepared = prepare(
        &args.data,
        args.seed,
        &args.split,
        &args.vectorizer,
        &normalizer,
    )?;
    log::info!(
        "training {} on {} records, vocabulary of {} terms",
        kind.as_str(),
        prepared.train.dataset.len(),
        prepared.vocab.len()
    );

    let options = train_options(&args, kind);
    let model = vistream_core::classify::train_model(
        &prepared.train.x,
        &prepared.train.y,
        Label::COUNT,
        &options,
    )
    .context("training model")?;

    model.save_to_path(&args.out.join("model.json"))?;
    prepared.vocab.save_to_path(&args.out.join("vocab.json"))?;
    for (name, data) in [
        ("train.csv", &prepared.train),
        ("val.csv", &prepared.val),
        ("test.csv", &prepared.test),
    ] {
        save_dataset_to_path(&data.dataset, &args.out.join(name))?;
    }
    let manifest = Manifest {
        version: 1,
        seed: args.seed,
        model_kind: kind.as_str().to_string(),
        train_fraction: args.split.train_frac,
        val_fraction: args.split.val_frac,
        test_fraction: args.split.test_frac,
        min_df: args.vectorizer.min_df,
        max_features: args.vectorizer.max_features,
        balanced: true,
        splits: ManifestSplits {
            train: ids_of(&prepared.train.dataset),
            val: ids_of(&prepared.val.dataset),
            test: ids_of(&prepared.test.dataset),
        },
    };
    std::fs::write(
        args.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;

    let report = evaluate_model(&model, &prepared.val.x, &prepared.val.y, Label::COUNT)
        .context("validation evaluation")?;
    std::fs::write(args.out.join("val_report.json"), report.to_json())?;
    println!("validation report ({} on val split):", kind.as_str());
    print!("{}", report.to_text_table());
    Ok(())
}

fn write_eval_artifacts(
    out: &Path,
    report: &EvalReport,
    errors: &[vistream_core::eval::ErrorRecord],
) -> Result<()> {
    std::fs::write(out.join("report.json"), report.to_json())?;
    let mut confusion = Vec::new();
    report.confusion.write_csv(&mut confusion)?;
    std::fs::write(out.join("confusion.csv"), confusion)?;

    let mut w = csv::Writer::from_path(out.join("errors.csv"))?;
    w.write_record(["index", "text", "true_label", "predicted"])?;
    for e in errors {
        let as_label = |i: usize| {
            Label::from_index(i)
                .map(|l| l.as_decimal_str().to_string())
                .unwrap_or_else(|| i.to_string())
        };
        w.write_record([
            e.index.to_string(),
            e.text.clone(),
            as_label(e.true_label),
            as_label(e.predicted),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    for path in [&args.model, &args.vocab, &args.data] {
        require_file(path)?;
    }
    std::fs::create_dir_all(&args.out)?;
    let normalizer = load_normalizer(&args.dicts)?;
    let model = Model::load_from_path(&args.model)?;
    let vocab = Vocabulary::load_from_path(&args.vocab)?;
    if model.n_features() != vocab.len() {
        bail!(
            "model expects {} features but vocabulary has {} terms",
            model.n_features(),
            vocab.len()
        );
    }

    let dataset = load_dataset(&args.data)?;
    if !dataset.all_labeled() {
        bail!("evaluation dataset must be fully labeled");
    }
    let docs = preprocess_dataset(&dataset, &normalizer);
    let x: Vec<SparseVector> = docs.iter().map(|d| transform(d, &vocab)).collect();
    let y = labels_of(&dataset);
    let texts: Vec<String> = dataset.records().iter().map(|r| r.text.clone()).collect();

    let report = evaluate_model(&model, &x, &y, Label::COUNT)?;
    let errors = error_listing(&model, &texts, &y, &x)?;
    write_eval_artifacts(&args.out, &report, &errors)?;
    print!("{}", report.to_text_table());
    println!("misclassified: {} of {}", errors.len(), dataset.len());
    Ok(())
}

#[derive(Deserialize)]
struct GridFile {
    model: String,
    #[serde(flatten)]
    grid: ParamGrid,
}

pub(crate) fn cmd_grid(args: GridArgs) -> Result<()> {
    require_file(&args.data)?;
    require_file(&args.grid)?;
    std::fs::create_dir_all(&args.out)?;
    let raw = std::fs::read_to_string(&args.grid)?;
    let file: GridFile = serde_json::from_str(&raw)
        .with_context(|| format!("parsing grid file {:?}", args.grid))?;
    let kind = ModelKind::parse(&file.model)
        .ok_or_else(|| anyhow::anyhow!("unknown model kind {:?} in grid file", file.model))?;
    file.grid
        .validate(kind)
        .context("grid file failed validation")?;

    let normalizer = load_normalizer(&args.dicts)?;
    let prepared = prepare(
        &args.data,
        args.seed,
        &args.split,
        &args.vectorizer,
        &normalizer,
    )?;

    let mut base = TrainOptions::new(kind);
    base.rf.seed = args.seed;
    let outcome = grid_search(
        &file.grid,
        kind,
        &base,
        &prepared.train.x,
        &prepared.train.y,
        &prepared.val.x,
        &prepared.val.y,
        Label::COUNT,
    )?;

    let mut w = csv::Writer::from_path(args.out.join("scores.csv"))?;
    w.write_record(["point", "params", "macro_f1", "error"])?;
    for (i, point) in outcome.points.iter().enumerate() {
        let params: serde_json::Map<String, serde_json::Value> = point
            .params
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::json!(v)))
            .collect();
        w.write_record([
            i.to_string(),
            serde_json::Value::Object(params).to_string(),
            point.macro_f1.map(|s| s.to_string()).unwrap_or_default(),
            point.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;

    let best = outcome.best_point();
    let mut params = serde_json::Map::new();
    for (k, v) in &best.params {
        params.insert(k.clone(), serde_json::json!(v));
    }
    let best_json = serde_json::json!({
        "model": kind.as_str(),
        "params": params,
        "macro_f1": best.macro_f1,
    });
    std::fs::write(
        args.out.join("best_config.json"),
        serde_json::to_string_pretty(&best_json)?,
    )?;
    println!(
        "best grid point #{}: {} macro-F1 {:.4}",
        outcome.best,
        best.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", "),
        best.macro_f1.unwrap_or(f64::NAN)
    );
    Ok(())
}

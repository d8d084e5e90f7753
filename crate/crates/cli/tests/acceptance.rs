//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS] criterion N` line on success. Run with
//! `cargo test -p vistream-cli --test acceptance -- --nocapture`.

mod common;

use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use common::*;

use vistream_core::classify::{
    train_lr_traced, train_model, train_nb, LrConfig, ModelKind, RfConfig, TrainOptions,
};
use vistream_core::eval::{accuracy, evaluate_model, macro_f1, ConfusionMatrix};
use vistream_core::features::{fit_vocabulary, transform, SparseVector, VectorizerConfig};
use vistream_core::ingest::{balance_labels, split, Dataset, Label, RawComment, SplitSpec};
use vistream_core::rng::SplitMix64;
use vistream_core::textprep::{preprocess, NormalizerConfig, ProcessedText};

// ---------------------------------------------------------------------------
// criterion 1: exhaustive NB oracle equivalence
// ---------------------------------------------------------------------------

/// All count vectors over `v` terms with total in `0..=max_total`.
fn doc_types(v: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; v];
    fn rec(pos: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for c in 0..=left {
            current[pos] = c;
            rec(pos + 1, left - c, current, out);
        }
        current[pos] = 0;
    }
    rec(0, max_total, &mut current, &mut out);
    out
}

/// Visits every multiset of size `d` over `n_types` items.
fn for_each_multiset(n_types: usize, d: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(n: usize, left: usize, start: usize, current: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if left == 0 {
            f(current);
            return;
        }
        for t in start..n {
            current.push(t);
            rec(n, left - 1, t, current, f);
            current.pop();
        }
    }
    rec(n_types, d, 0, &mut Vec::new(), f);
}

/// Independent oracle: the smoothed multinomial posterior computed with
/// plain products over raw count rows (no log-space, no SparseVector).
#[allow(clippy::needless_range_loop)] // deliberately plain index loops
fn nb_posterior_oracle(
    docs: &[&[u32]],
    y: &[usize],
    n_classes: usize,
    alpha: f64,
    query: &[u32],
) -> Vec<f64> {
    let v = query.len();
    let n = docs.len() as f64;
    let mut joint = vec![0.0f64; n_classes];
    for c in 0..n_classes {
        let n_c = y.iter().filter(|&&l| l == c).count() as f64;
        let total_c: u32 = docs
            .iter()
            .zip(y)
            .filter(|(_, &l)| l == c)
            .map(|(d, _)| d.iter().sum::<u32>())
            .sum();
        let mut p = n_c / n;
        for j in 0..v {
            let count_cj: u32 = docs
                .iter()
                .zip(y)
                .filter(|(_, &l)| l == c)
                .map(|(d, _)| d[j])
                .sum();
            let term = (count_cj as f64 + alpha) / (total_c as f64 + alpha * v as f64);
            p *= term.powi(query[j] as i32);
        }
        joint[c] = p;
    }
    let z: f64 = joint.iter().sum();
    joint.iter().map(|p| p / z).collect()
}

fn sparse_from_counts(counts: &[u32]) -> SparseVector {
    let entries = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i, c))
        .collect();
    SparseVector::new(counts.len(), entries).unwrap()
}

#[test]
fn criterion_1_nb_oracle_equivalence() {
    let started = Instant::now();
    let mut corpora_checked = 0u64;
    let mut predictions_checked = 0u64;

    // (n_classes, vocab size, corpus sizes)
    let sweeps: [(usize, usize, &[usize]); 5] = [
        (2, 1, &[2, 3, 4]),
        (2, 2, &[2, 3, 4]),
        (2, 3, &[2, 3, 4]),
        (3, 1, &[3, 4]),
        (3, 2, &[3, 4]),
    ];
    for (n_classes, v, corpus_sizes) in sweeps {
        let types = doc_types(v, 3);
        let n_labeled = types.len() * n_classes;
        for &d in corpus_sizes {
            for_each_multiset(n_labeled, d, &mut |members| {
                let docs: Vec<&[u32]> = members
                    .iter()
                    .map(|&m| types[m / n_classes].as_slice())
                    .collect();
                let y: Vec<usize> = members.iter().map(|&m| m % n_classes).collect();
                let mut present = vec![false; n_classes];
                for &c in &y {
                    present[c] = true;
                }
                if !present.iter().all(|&p| p) {
                    return;
                }

                let x: Vec<SparseVector> =
                    docs.iter().map(|d| sparse_from_counts(d)).collect();
                for alpha in [0.5, 1.0] {
                    let model = train_nb(&x, &y, n_classes, alpha).expect("train");
                    // probe every distinct doc in the corpus plus the zero doc
                    let zero = vec![0u32; v];
                    let mut probes: Vec<&[u32]> = docs.clone();
                    probes.push(&zero);
                    probes.sort();
                    probes.dedup();
                    for probe in probes {
                        let got = model
                            .predict(&sparse_from_counts(probe))
                            .expect("predict")
                            .probabilities;
                        let want =
                            nb_posterior_oracle(&docs, &y, n_classes, alpha, probe);
                        for (g, w) in got.iter().zip(&want) {
                            assert!(
                                (g - w).abs() <= 1e-12,
                                "corpus {docs:?} y {y:?} α={alpha} probe {probe:?}: \
                                 impl {got:?} vs oracle {want:?}"
                            );
                        }
                        predictions_checked += 1;
                    }
                }
                corpora_checked += 1;
            });
        }
    }

    let elapsed = started.elapsed();
    assert!(corpora_checked > 100_000, "sweep too small: {corpora_checked}");
    assert!(
        elapsed < Duration::from_secs(10),
        "sweep took {elapsed:?} (budget 10s)"
    );
    println!(
        "[PASS] criterion 1 — NB oracle equivalence: {corpora_checked} corpora, \
         {predictions_checked} posteriors within 1e-12, {elapsed:?}"
    );
}

// ---------------------------------------------------------------------------
// criterion 2: vectorizer vs naive tally on 1,000 random corpora
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_vectorizer_oracle() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x20260810);
    let alphabet: Vec<String> = (0..12).map(|i| format!("t{i:02}")).collect();

    for case in 0..1000 {
        let n_docs = 1 + rng.next_below(8);
        let docs: Vec<ProcessedText> = (0..n_docs)
            .map(|i| {
                let len = rng.next_below(13);
                let tokens = (0..len)
                    .map(|_| alphabet[rng.next_below(alphabet.len())].clone())
                    .collect();
                ProcessedText::new(format!("d{i}"), tokens)
            })
            .collect();
        let min_df = 1 + rng.next_below(3);
        let max_features = match rng.next_below(3) {
            0 => None,
            _ => Some(1 + rng.next_below(6)),
        };
        let config = VectorizerConfig {
            min_df,
            max_features,
        };

        // oracle: recompute document frequencies and totals by enumeration
        let mut df: std::collections::BTreeMap<&str, usize> = Default::default();
        let mut totals: std::collections::BTreeMap<&str, u64> = Default::default();
        for doc in &docs {
            let mut seen: Vec<&str> = Vec::new();
            for t in &doc.tokens {
                *totals.entry(t).or_insert(0) += 1;
                if !seen.contains(&t.as_str()) {
                    seen.push(t);
                }
            }
            for t in seen {
                *df.entry(t).or_insert(0) += 1;
            }
        }
        let mut expected: Vec<&str> = df
            .iter()
            .filter(|(_, &d)| d >= min_df)
            .map(|(&t, _)| t)
            .collect();
        if let Some(cap) = max_features {
            if expected.len() > cap {
                expected.sort_by(|a, b| totals[b].cmp(&totals[a]).then_with(|| a.cmp(b)));
                expected.truncate(cap);
                expected.sort_unstable();
            }
        }

        match fit_vocabulary(&docs, config) {
            Err(_) => assert!(
                expected.is_empty(),
                "case {case}: fit failed but oracle kept {expected:?}"
            ),
            Ok(vocab) => {
                assert_eq!(vocab.terms(), expected.as_slice(), "case {case}");
                for (i, term) in expected.iter().enumerate() {
                    assert_eq!(vocab.index_of(term), Some(i), "case {case}");
                }
                // transform equals a naive tally for every document
                for doc in &docs {
                    let x = transform(doc, &vocab);
                    for (i, term) in expected.iter().enumerate() {
                        let tally =
                            doc.tokens.iter().filter(|t| t == term).count() as u32;
                        assert_eq!(x.get(i), tally, "case {case} term {term}");
                    }
                }
            }
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10));
    println!("[PASS] criterion 2 — vectorizer oracle: 1000 random corpora, {elapsed:?}");
}

// ---------------------------------------------------------------------------
// criterion 3: LR gradient check + monotone loss
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_lr_gradient_and_monotone_loss() {
    let mut rng = SplitMix64::new(0xF00D);
    let uniform = |rng: &mut SplitMix64| rng.next_u64() as f64 / u64::MAX as f64;

    for problem in 0..50 {
        let n_features = 1 + rng.next_below(5);
        let n_classes = 2 + rng.next_below(2);
        let n_docs = 2 + rng.next_below(5);
        let x: Vec<SparseVector> = (0..n_docs)
            .map(|_| {
                let counts: Vec<u32> =
                    (0..n_features).map(|_| rng.next_below(4) as u32).collect();
                sparse_from_counts(&counts)
            })
            .collect();
        let y: Vec<usize> = (0..n_docs)
            .map(|i| if i < n_classes { i } else { rng.next_below(n_classes) })
            .collect();
        let weights: Vec<Vec<f64>> = (0..n_classes)
            .map(|_| (0..n_features).map(|_| uniform(&mut rng) - 0.5).collect())
            .collect();
        let bias: Vec<f64> = (0..n_classes).map(|_| uniform(&mut rng) - 0.5).collect();
        let l2 = [0.0, 0.1, 1.0][rng.next_below(3)];

        let (_, grad_w, grad_b) =
            vistream_core::classify::loss_and_gradient(&x, &y, &weights, &bias, l2);
        let h = 1e-5;
        let rel = |analytic: f64, fd: f64| (analytic - fd).abs() / fd.abs().max(1e-8);
        for c in 0..n_classes {
            for j in 0..n_features {
                let mut wp = weights.clone();
                wp[c][j] += h;
                let mut wm = weights.clone();
                wm[c][j] -= h;
                let (lp, _, _) =
                    vistream_core::classify::loss_and_gradient(&x, &y, &wp, &bias, l2);
                let (lm, _, _) =
                    vistream_core::classify::loss_and_gradient(&x, &y, &wm, &bias, l2);
                let fd = (lp - lm) / (2.0 * h);
                assert!(
                    rel(grad_w[c][j], fd) < 1e-5,
                    "problem {problem} w[{c}][{j}]: {} vs {fd}",
                    grad_w[c][j]
                );
            }
            let mut bp = bias.clone();
            bp[c] += h;
            let mut bm = bias.clone();
            bm[c] -= h;
            let (lp, _, _) =
                vistream_core::classify::loss_and_gradient(&x, &y, &weights, &bp, l2);
            let (lm, _, _) =
                vistream_core::classify::loss_and_gradient(&x, &y, &weights, &bm, l2);
            let fd = (lp - lm) / (2.0 * h);
            assert!(
                rel(grad_b[c], fd) < 1e-5,
                "problem {problem} b[{c}]: {} vs {fd}",
                grad_b[c]
            );
        }

        // the actual optimizer's loss trace is monotone non-increasing
        let (_, trace) = train_lr_traced(
            &x,
            &y,
            n_classes,
            LrConfig {
                max_iter: 60,
                tol: 1e-9,
                l2: Some(l2),
            },
        )
        .expect("train");
        for pair in trace.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-15,
                "problem {problem}: loss increased {pair:?}"
            );
        }
    }
    println!("[PASS] criterion 3 — LR gradients match finite differences; loss monotone on 50 problems");
}

// ---------------------------------------------------------------------------
// criterion 4: metric goldens
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_metric_goldens() {
    let cm = ConfusionMatrix::from_counts(vec![
        vec![2, 0, 0],
        vec![0, 1, 1],
        vec![1, 0, 1],
    ])
    .unwrap();
    let acc = accuracy(&cm).unwrap();
    assert!((acc - 0.66667).abs() < 1e-5 + 1e-9, "accuracy {acc}");
    assert!((acc - 4.0 / 6.0).abs() < 1e-9, "accuracy {acc}");
    let f1 = macro_f1(&cm).unwrap();
    assert!((f1 - 0.65556).abs() < 1e-4, "macro-F1 {f1}");

    let perfect = ConfusionMatrix::from_counts(vec![
        vec![7, 0, 0],
        vec![0, 4, 0],
        vec![0, 0, 9],
    ])
    .unwrap();
    assert_eq!(accuracy(&perfect).unwrap(), 1.0);
    assert_eq!(macro_f1(&perfect).unwrap(), 1.0);
    println!("[PASS] criterion 4 — metric goldens: accuracy 0.66667±1e-9, macro-F1 0.65556±1e-4, perfect = 1.0");
}

// ---------------------------------------------------------------------------
// criterion 5: byte-identical model files for a fixed seed
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_training_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_fixture_csv(&dir.path().join("data.csv"), 30);
    for kind in ["nb", "lr", "rf"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{kind}-{run}"));
            run_ok(&[
                "train",
                "--data",
                data.to_str().unwrap(),
                "--kind",
                kind,
                "--seed",
                "42",
                "--out",
                out.to_str().unwrap(),
            ]);
            outputs.push(out);
        }
        let a = std::fs::read(outputs[0].join("model.json")).unwrap();
        let b = std::fs::read(outputs[1].join("model.json")).unwrap();
        assert_eq!(a, b, "{kind}: model files differ between identical runs");
        let va = std::fs::read(outputs[0].join("vocab.json")).unwrap();
        let vb = std::fs::read(outputs[1].join("vocab.json")).unwrap();
        assert_eq!(va, vb, "{kind}: vocabulary files differ");
    }
    println!("[PASS] criterion 5 — seed 42 twice ⇒ byte-identical model files for nb, lr, rf");
}

// ---------------------------------------------------------------------------
// criterion 6: streaming exactness + crash injection
// ---------------------------------------------------------------------------

fn streaming_fixture_csv(path: &Path, rows: usize) -> Vec<(String, String)> {
    let texts = [
        "Nam Bắc một nhà, thương nhau nhé",
        "bọn bắc kỳ \"xấu tính\" lắm",
        "haha vui quá trời luôn 😂",
        "đồng bào ơi đoàn kết lại",
        "parky nói gì thế không hiểu",
        "dân miền trung chăm chỉ mà",
    ];
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(["id", "text", "label", "source"]).unwrap();
    let mut produced = Vec::new();
    for i in 0..rows {
        let id = format!("m{i:04}");
        let text = format!("{} #{i}", texts[i % texts.len()]);
        w.write_record([&id, &text, "", "stream"]).unwrap();
        produced.push((id, text));
    }
    w.flush().unwrap();
    produced
}

fn train_streaming_model(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let data = write_fixture_csv(&dir.join("train.csv"), 20);
    let out = dir.join("model");
    run_ok(&[
        "train",
        "--data",
        data.to_str().unwrap(),
        "--kind",
        "nb",
        "--out",
        out.to_str().unwrap(),
    ]);
    (out.join("model.json"), out.join("vocab.json"))
}

fn spawn_consumer(
    broker: &str,
    model: &Path,
    vocab: &Path,
    sink: &Path,
    extra: &[&str],
) -> Child {
    let mut cmd = Command::new(bin());
    cmd.args([
        "consume",
        "--broker",
        broker,
        "--topic",
        "storm",
        "--model",
        model.to_str().unwrap(),
        "--vocab",
        vocab.to_str().unwrap(),
        "--sink",
        sink.to_str().unwrap(),
    ])
    .args(extra)
    .env("VISTREAM_LOG", "error")
    .stdout(Stdio::null())
    .stderr(Stdio::null());
    cmd.spawn().expect("spawn consumer")
}

/// Sink rows keyed for comparison: everything except `processed_at`.
fn comparable_rows(path: &Path) -> Vec<Vec<String>> {
    read_csv(path)
        .iter()
        .map(|r| (0..9).map(|c| r.get(c).unwrap_or("").to_string()).collect())
        .collect()
}

#[test]
fn criterion_6_streaming_exactness_under_crashes() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (model, vocab) = train_streaming_model(dir.path());
    let input = dir.path().join("input.csv");
    let produced = streaming_fixture_csv(&input, 1000);

    // one broker holds the log for both the clean and the crashy consumer
    let broker =
        vistream_stream::start_broker("127.0.0.1:0", vistream_stream::BrokerConfig::default())
            .unwrap();
    let addr = broker.addr().to_string();
    let mut producer = vistream_stream::BrokerClient::connect(&addr).unwrap();
    let stats =
        vistream_stream::replay_csv_as_stream(&mut producer, &input, "storm", 0.0).unwrap();
    assert_eq!(stats.produced, 1000);

    // clean run
    let sink_clean = dir.path().join("clean.csv");
    let mut clean = spawn_consumer(
        &addr,
        &model,
        &vocab,
        &sink_clean,
        &["--idle-timeout-ms", "400"],
    );
    let status = clean.wait().expect("clean consumer");
    assert!(status.success());
    let clean_rows = comparable_rows(&sink_clean);
    assert_eq!(clean_rows.len(), 1000, "clean sink row count");
    for (row, (id, text)) in clean_rows.iter().zip(&produced) {
        assert_eq!(&row[0], id, "sink not in offset order");
        assert_eq!(row[3].as_bytes(), text.as_bytes(), "text not byte-identical");
    }

    // crash-injected runs: kill the consumer roughly every 100 messages
    let sink_crash = dir.path().join("crash.csv");
    for round in 0..5 {
        let baseline = count_csv_rows(&sink_crash);
        if baseline >= 1000 {
            break; // everything already delivered despite the kills
        }
        let mut child = spawn_consumer(
            &addr,
            &model,
            &vocab,
            &sink_crash,
            &[
                "--max-batch",
                "20",
                "--batch-delay-ms",
                "25",
                "--idle-timeout-ms",
                "10000",
            ],
        );
        let target = baseline + 80 + (round * 17) % 60;
        let deadline = Instant::now() + Duration::from_secs(20);
        while count_csv_rows(&sink_crash) < target.min(1000) && Instant::now() < deadline {
            std::thread::sleep(Duration::from_millis(8));
        }
        child.kill().expect("SIGKILL consumer");
        let _ = child.wait();
    }
    // final run to quiescence
    let mut last = spawn_consumer(
        &addr,
        &model,
        &vocab,
        &sink_crash,
        &["--idle-timeout-ms", "500"],
    );
    assert!(last.wait().expect("final consumer").success());

    let crash_rows = comparable_rows(&sink_crash);
    assert!(
        crash_rows.len() >= 1000,
        "crash sink lost rows: {}",
        crash_rows.len()
    );
    // dedup by id, keeping the first occurrence
    let mut seen = std::collections::HashSet::new();
    let deduped: Vec<&Vec<String>> = crash_rows
        .iter()
        .filter(|r| seen.insert(r[0].clone()))
        .collect();
    assert_eq!(deduped.len(), 1000, "dedup-by-id sink incomplete (offset gap)");
    for (got, want) in deduped.iter().zip(&clean_rows) {
        assert_eq!(*got, want, "dedup-by-id sink differs from the crash-free sink");
    }

    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "streaming criterion took {elapsed:?} (budget 60s)"
    );
    println!(
        "[PASS] criterion 6 — 1000-row exactness; {} rows after 5 kill rounds \
         dedup to the crash-free sink, {elapsed:?}",
        crash_rows.len()
    );
}

// ---------------------------------------------------------------------------
// criterion 7: preprocessing goldens + idempotence fuzz
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_preprocessing_goldens_and_idempotence() {
    let config = NormalizerConfig::builtin();
    let goldens = [
        ("đc", vec!["được"]),
        ("k", vec!["không"]),
        ("qùa", vec!["quà"]),
        ("hoá", vec!["hóa"]),
        ("việt nam", vec!["việt_nam"]),
    ];
    for (input, want) in &goldens {
        let got = preprocess(input, &config);
        assert_eq!(&got, want, "golden {input:?}");
    }

    // 10,000-case idempotence fuzz over social-media-shaped noise
    let fragments: [&str; 28] = [
        "đc", "k", "hoá", "qùa", "nguời", "bắc", "kỳ", "việt", "nam", "một", "nhà",
        "hayyyy", "vuiiii", "!!!", "...", "😂", "👍🏽", "❤️", "@nguyen.van_a",
        "https://t.co/xyz", "www.video.vn/clip?id=9", "Đẹp", "QUÁ", "số 123", "đồng_bào",
        "ko", "bít", "thuỷ",
    ];
    let mut rng = SplitMix64::new(0x1DEA);
    for case in 0..10_000 {
        let n = 1 + rng.next_below(12);
        let mut text = String::new();
        for _ in 0..n {
            text.push_str(fragments[rng.next_below(fragments.len())]);
            match rng.next_below(6) {
                0 => text.push_str("   "),
                1 => text.push('\t'),
                _ => text.push(' '),
            }
        }
        let once = preprocess(&text, &config);
        let rendered = once.join(" ");
        let twice = preprocess(&rendered, &config);
        assert_eq!(once, twice, "case {case}: not idempotent for {text:?}");
    }
    println!("[PASS] criterion 7 — normalization goldens + 10,000-case idempotence fuzz");
}

// ---------------------------------------------------------------------------
// criterion 8: synthetic-separable benchmark (public corpus unobtainable)
// ---------------------------------------------------------------------------

/// 3,000 generated comments whose classes carry exclusive marker tokens.
fn synthetic_corpus() -> Dataset {
    let fillers = ["hôm", "nay", "cái", "này", "nha", "thật", "là", "nhé"];
    let markers: [&[&str]; 3] = [
        &["vui", "hay", "haha"],
        &["parky", "namky", "tệ"],
        &["thương", "quý", "mến"],
    ];
    let mut rng = SplitMix64::new(2024);
    let mut records = Vec::with_capacity(3000);
    for i in 0..3000 {
        let class = i % 3;
        let mut tokens: Vec<&str> = Vec::new();
        for _ in 0..(3 + rng.next_below(6)) {
            tokens.push(fillers[rng.next_below(fillers.len())]);
        }
        for _ in 0..(2 + rng.next_below(3)) {
            tokens.push(markers[class][rng.next_below(3)]);
        }
        rng.shuffle(&mut tokens);
        records.push(RawComment {
            id: format!("s{i}"),
            text: tokens.join(" "),
            label: Label::from_index(class),
            source: Some("synthetic".into()),
        });
    }
    Dataset::new(records).unwrap()
}

#[test]
fn criterion_8_synthetic_separable_benchmark() {
    let dataset = synthetic_corpus();
    let balanced = balance_labels(&dataset, 42).unwrap();
    let spec = SplitSpec::new(0.70, 0.15, 0.15, 42).unwrap();
    let (train, _val, test) = split(&balanced, &spec).unwrap();

    let normalizer = NormalizerConfig::builtin();
    let prep = |d: &Dataset| -> (Vec<SparseVector>, Vec<usize>, Vec<ProcessedText>) {
        let docs: Vec<ProcessedText> = d
            .records()
            .iter()
            .map(|r| ProcessedText::from_text(r.id.clone(), &r.text, &normalizer))
            .collect();
        let y = d
            .records()
            .iter()
            .map(|r| r.label.unwrap().index())
            .collect();
        (Vec::new(), y, docs)
    };
    let (_, train_y, train_docs) = prep(&train);
    let (_, test_y, test_docs) = prep(&test);
    let vocab = fit_vocabulary(&train_docs, VectorizerConfig::default()).unwrap();
    let train_x: Vec<SparseVector> = train_docs.iter().map(|d| transform(d, &vocab)).collect();
    let test_x: Vec<SparseVector> = test_docs.iter().map(|d| transform(d, &vocab)).collect();

    // the streaming-system configuration: 400 trees, entropy, seed 42
    let mut scores = Vec::new();
    for kind in [ModelKind::Rf, ModelKind::Nb, ModelKind::Lr] {
        let mut options = TrainOptions::new(kind);
        options.rf = RfConfig::default(); // n_estimators 400, entropy, seed 42
        let model = train_model(&train_x, &train_y, Label::COUNT, &options).unwrap();
        let report = evaluate_model(&model, &test_x, &test_y, Label::COUNT).unwrap();
        assert!(
            report.macro_f1 >= 0.99,
            "{}: macro-F1 {:.4} below 0.99 on the separable benchmark",
            kind.as_str(),
            report.macro_f1
        );
        scores.push(format!("{} {:.4}", kind.as_str(), report.macro_f1));
    }
    println!(
        "[PASS] criterion 8 — synthetic separable benchmark (public corpus unreachable): {}",
        scores.join(", ")
    );
}

//! Static report emission: label distribution, top terms per label, comment
//! length histogram and (when a truth file is joined) a confusion matrix —
//! one self-contained HTML page plus machine-readable CSV/JSON next to it.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

use vistream_core::eval::{corpus_stats, EvalReport, LabelStats};
use vistream_core::ingest::{load_dataset, Label};
use vistream_core::textprep::{preprocess, NormalizerConfig, ProcessedText};

use crate::offline::{load_normalizer, require_file};
use crate::ReportArgs;

struct Row {
    id: Option<String>,
    label: Option<Label>,
    doc: ProcessedText,
}

const HISTOGRAM_BUCKETS: [(&str, usize, usize); 12] = [
    ("0", 0, 0),
    ("1-5", 1, 5),
    ("6-10", 6, 10),
    ("11-15", 11, 15),
    ("16-20", 16, 20),
    ("21-25", 21, 25),
    ("26-30", 26, 30),
    ("31-35", 31, 35),
    ("36-40", 36, 40),
    ("41-45", 41, 45),
    ("46-50", 46, 50),
    ("51+", 51, usize::MAX),
];

fn bucket_index(tokens: usize) -> usize {
    HISTOGRAM_BUCKETS
        .iter()
        .position(|&(_, lo, hi)| tokens >= lo && tokens <= hi)
        .expect("buckets cover all counts")
}

fn read_rows(path: &Path, normalizer: &NormalizerConfig) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let text_col = col("text")
        .ok_or_else(|| anyhow::anyhow!("input {:?} has no `text` column", path))?;
    let id_col = col("id");
    let label_col = col("label");

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let text = record.get(text_col).unwrap_or("");
        let id = id_col
            .and_then(|c| record.get(c))
            .filter(|v| !v.is_empty())
            .map(str::to_string);
        let label = label_col
            .and_then(|c| record.get(c))
            .and_then(Label::parse);
        rows.push(Row {
            id,
            label,
            doc: ProcessedText::new(
                id_col
                    .and_then(|c| record.get(c))
                    .unwrap_or("")
                    .to_string(),
                preprocess(text, normalizer),
            ),
        });
    }
    Ok(rows)
}

pub(crate) fn cmd_report(args: ReportArgs) -> Result<()> {
    require_file(&args.input)?;
    std::fs::create_dir_all(&args.out)?;
    let normalizer = load_normalizer(&args.dicts)?;
    let rows = read_rows(&args.input, &normalizer)?;

    // label distribution (incl. unlabeled bucket)
    let mut distribution = [0u64; Label::COUNT];
    let mut unlabeled = 0u64;
    for row in &rows {
        match row.label {
            Some(l) => distribution[l.index()] += 1,
            None => unlabeled += 1,
        }
    }

    // per-label stats over labeled rows
    let labeled: Vec<(usize, &ProcessedText)> = rows
        .iter()
        .filter_map(|r| r.label.map(|l| (l.index(), &r.doc)))
        .collect();
    let stats: Vec<LabelStats> = if labeled.is_empty() {
        Vec::new()
    } else {
        corpus_stats(&labeled, Label::COUNT, args.top_k)
    };

    // comment length histogram over every row
    let mut histogram = [0u64; HISTOGRAM_BUCKETS.len()];
    for row in &rows {
        histogram[bucket_index(row.doc.tokens.len())] += 1;
    }

    // optional truth join
    let truth_section = match &args.truth {
        Some(truth_path) => Some(join_truth(truth_path, &rows)?),
        None => None,
    };

    write_distribution_csv(&args.out, &distribution, unlabeled)?;
    write_top_terms_csv(&args.out, &stats)?;
    write_histogram_csv(&args.out, &histogram)?;
    if let Some((report, matched, unmatched)) = &truth_section {
        let mut confusion = Vec::new();
        report.confusion.write_csv(&mut confusion)?;
        std::fs::write(args.out.join("confusion.csv"), confusion)?;
        std::fs::write(
            args.out.join("metrics.json"),
            serde_json::to_string_pretty(&serde_json::json!({
                "accuracy": report.accuracy,
                "macro_f1": report.macro_f1,
                "matched_rows": matched,
                "unmatched_rows": unmatched,
            }))?,
        )?;
    }

    let html = render_html(
        &args.input,
        rows.len(),
        &distribution,
        unlabeled,
        &stats,
        &histogram,
        truth_section.as_ref(),
    );
    let html_path = args.out.join("report.html");
    std::fs::write(&html_path, html)?;
    println!(
        "report over {} rows written to {}",
        rows.len(),
        html_path.display()
    );
    Ok(())
}

/// Joins input rows to a labeled dataset by id: predicted labels come from
/// the rows, true labels from the dataset. Returns the metrics plus the
/// matched/unmatched row counts.
fn join_truth(truth_path: &Path, rows: &[Row]) -> Result<(EvalReport, u64, u64)> {
    require_file(truth_path)?;
    let truth = load_dataset(truth_path)?;
    if !truth.all_labeled() {
        bail!("truth dataset {:?} must be fully labeled", truth_path);
    }
    let by_id: HashMap<&str, Label> = truth
        .records()
        .iter()
        .map(|r| (r.id.as_str(), r.label.expect("labeled")))
        .collect();
    let mut y_true = Vec::new();
    let mut y_pred = Vec::new();
    let mut unmatched = 0u64;
    for row in rows {
        match (
            row.id.as_deref().and_then(|id| by_id.get(id)),
            row.label,
        ) {
            (Some(t), Some(p)) => {
                y_true.push(t.index());
                y_pred.push(p.index());
            }
            _ => unmatched += 1,
        }
    }
    if y_true.is_empty() {
        bail!("no input row matched the truth dataset by id");
    }
    let report = EvalReport::from_predictions(&y_true, &y_pred, Label::COUNT)
        .context("confusion matrix from truth join")?;
    Ok((report, y_true.len() as u64, unmatched))
}

fn write_distribution_csv(out: &Path, distribution: &[u64], unlabeled: u64) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join("label_distribution.csv"))?;
    w.write_record(["label", "count"])?;
    for (i, count) in distribution.iter().enumerate() {
        let label = Label::from_index(i).expect("three labels");
        w.write_record([label.as_decimal_str(), &count.to_string()])?;
    }
    w.write_record(["unlabeled", &unlabeled.to_string()])?;
    w.flush()?;
    Ok(())
}

fn write_top_terms_csv(out: &Path, stats: &[LabelStats]) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join("top_terms.csv"))?;
    w.write_record(["label", "term", "count"])?;
    for s in stats {
        let label = Label::from_index(s.label).expect("three labels");
        for (term, count) in &s.top_terms {
            w.write_record([label.as_decimal_str(), term, &count.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_histogram_csv(out: &Path, histogram: &[u64]) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join("length_histogram.csv"))?;
    w.write_record(["bucket", "count"])?;
    for ((name, _, _), count) in HISTOGRAM_BUCKETS.iter().zip(histogram) {
        w.write_record([*name, &count.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&#39;")
}

fn bar(count: u64, max: u64) -> String {
    let pct = if max == 0 {
        0.0
    } else {
        100.0 * count as f64 / max as f64
    };
    format!(
        "<div class=\"bar\" style=\"width: {pct:.1}%\"><span>{count}</span></div>"
    )
}

fn label_name(i: usize) -> String {
    let meaning = ["other", "discrimination", "supportive"][i];
    format!(
        "{} ({meaning})",
        Label::from_index(i).expect("three labels").as_decimal_str()
    )
}

#[allow(clippy::too_many_arguments)]
fn render_html(
    input: &Path,
    n_rows: usize,
    distribution: &[u64],
    unlabeled: u64,
    stats: &[LabelStats],
    histogram: &[u64],
    truth: Option<&(EvalReport, u64, u64)>,
) -> String {
    let mut h = String::new();
    h.push_str("<!DOCTYPE html>\n<html lang=\"vi\"><head><meta charset=\"utf-8\"/>");
    h.push_str("<title>vistream report</title><style>\n");
    h.push_str(
        "body{font-family:sans-serif;margin:2em;max-width:60em}\
         table{border-collapse:collapse;margin:1em 0}\
         th,td{border:1px solid #bbb;padding:0.3em 0.7em;text-align:left}\
         th{background:#eee}\
         .bar{background:#4a80c4;color:#fff;min-width:1.5em;padding:0 0.3em;white-space:nowrap}\
         caption{font-weight:bold;text-align:left;padding:0.3em 0}\n",
    );
    h.push_str("</style></head><body>\n<h1>Comment classification report</h1>\n");
    h.push_str(&format!(
        "<p>Input: <code>{}</code> — {} rows.</p>\n",
        esc(&input.display().to_string()),
        n_rows
    ));
    if n_rows == 0 {
        h.push_str("<p><strong>The input contains zero data rows.</strong></p>\n");
    }

    // label distribution
    let max_count = distribution.iter().copied().chain([unlabeled]).max().unwrap_or(0);
    h.push_str("<h2>Label distribution</h2>\n<table><tr><th>label</th><th>count</th><th>share</th></tr>\n");
    for (i, &count) in distribution.iter().enumerate() {
        h.push_str(&format!(
            "<tr><td>{}</td><td>{count}</td><td>{}</td></tr>\n",
            esc(&label_name(i)),
            bar(count, max_count)
        ));
    }
    if unlabeled > 0 {
        h.push_str(&format!(
            "<tr><td>unlabeled</td><td>{unlabeled}</td><td>{}</td></tr>\n",
            bar(unlabeled, max_count)
        ));
    }
    h.push_str("</table>\n");

    // per-label stats
    if !stats.is_empty() {
        h.push_str("<h2>Per-label statistics</h2>\n<table><tr><th>label</th><th>records</th><th>total tokens</th><th>mean tokens</th></tr>\n");
        for s in stats {
            h.push_str(&format!(
                "<tr><td>{}</td><td>{}</td><td>{}</td><td>{:.2}</td></tr>\n",
                esc(&label_name(s.label)),
                s.records,
                s.total_tokens,
                s.mean_tokens
            ));
        }
        h.push_str("</table>\n<h2>Top terms per label</h2>\n");
        for s in stats {
            if s.top_terms.is_empty() {
                continue;
            }
            h.push_str(&format!(
                "<table><caption>{}</caption><tr><th>term</th><th>count</th></tr>\n",
                esc(&label_name(s.label))
            ));
            let top = s.top_terms.first().map(|&(_, c)| c).unwrap_or(0);
            for (term, count) in &s.top_terms {
                h.push_str(&format!(
                    "<tr><td>{}</td><td>{}</td></tr>\n",
                    esc(term),
                    bar(*count, top)
                ));
            }
            h.push_str("</table>\n");
        }
    }

    // length histogram
    h.push_str("<h2>Comment length distribution (tokens after preprocessing)</h2>\n");
    h.push_str("<table><tr><th>tokens</th><th>comments</th></tr>\n");
    let max_bucket = histogram.iter().copied().max().unwrap_or(0);
    for ((name, _, _), &count) in HISTOGRAM_BUCKETS.iter().zip(histogram) {
        h.push_str(&format!(
            "<tr><td>{name}</td><td>{}</td></tr>\n",
            bar(count, max_bucket)
        ));
    }
    h.push_str("</table>\n");

    // confusion matrix from the truth join
    if let Some((report, matched, unmatched)) = truth {
        h.push_str("<h2>Confusion matrix (truth join)</h2>\n");
        h.push_str(&format!(
            "<p>{matched} rows matched by id ({unmatched} unmatched). \
             Accuracy {:.4}, macro-F1 {:.4}.</p>\n",
            report.accuracy, report.macro_f1
        ));
        h.push_str("<table><tr><th>true \\ predicted</th>");
        for p in 0..report.confusion.n_classes() {
            h.push_str(&format!("<th>{}</th>", esc(&label_name(p))));
        }
        h.push_str("</tr>\n");
        for (t, row) in report.confusion.counts().iter().enumerate() {
            h.push_str(&format!("<tr><td>{}</td>", esc(&label_name(t))));
            for count in row {
                h.push_str(&format!("<td>{count}</td>"));
            }
            h.push_str("</tr>\n");
        }
        h.push_str("</table>\n");
    }

    h.push_str("</body></html>\n");
    h
}

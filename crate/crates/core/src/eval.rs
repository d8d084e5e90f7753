//! Metrics, grid search, model selection, error analysis and corpus
//! statistics.
//!
//! The headline metric throughout is macro-F1 — the unweighted mean of
//! per-class F1 scores — with any 0/0 in precision or recall defined as 0.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::classify::{train_model, Model, ModelKind, TrainOptions};
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::textprep::ProcessedText;

/// K×K count matrix; rows are true labels, columns are predictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_predictions(
        y_true: &[usize],
        y_pred: &[usize],
        n_classes: usize,
    ) -> Result<ConfusionMatrix> {
        if y_true.len() != y_pred.len() {
            return Err(Error::Shape {
                expected: y_true.len(),
                got: y_pred.len(),
            });
        }
        if y_true.is_empty() {
            return Err(Error::EmptyEval);
        }
        let mut counts = vec![vec![0u64; n_classes]; n_classes];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            if t >= n_classes || p >= n_classes {
                return Err(Error::Shape {
                    expected: n_classes,
                    got: t.max(p) + 1,
                });
            }
            counts[t][p] += 1;
        }
        Ok(ConfusionMatrix { counts })
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<ConfusionMatrix> {
        let k = counts.len();
        if k == 0 || counts.iter().any(|row| row.len() != k) {
            return Err(Error::Shape {
                expected: k,
                got: counts.iter().map(Vec::len).max().unwrap_or(0),
            });
        }
        Ok(ConfusionMatrix { counts })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, true_class: usize, predicted: usize) -> u64 {
        self.counts[true_class][predicted]
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    fn row_sum(&self, c: usize) -> u64 {
        self.counts[c].iter().sum()
    }

    fn col_sum(&self, c: usize) -> u64 {
        self.counts.iter().map(|row| row[c]).sum()
    }

    /// CSV rendering: header `true\predicted,0,1,...` then one row per class.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let k = self.n_classes();
        let header: Vec<String> = std::iter::once("true\\predicted".to_string())
            .chain((0..k).map(|c| c.to_string()))
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for (t, row) in self.counts.iter().enumerate() {
            let cells: Vec<String> = std::iter::once(t.to_string())
                .chain(row.iter().map(|c| c.to_string()))
                .collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Fraction of correct predictions.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyEval);
    }
    Ok(cm.trace() as f64 / total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Per-class precision/recall/F1 with the 0/0 → 0 convention.
pub fn per_class_metrics(cm: &ConfusionMatrix) -> Vec<ClassMetrics> {
    (0..cm.n_classes())
        .map(|c| {
            let tp = cm.get(c, c) as f64;
            let precision = ratio_or_zero(tp, cm.col_sum(c) as f64);
            let recall = ratio_or_zero(tp, cm.row_sum(c) as f64);
            let f1 = ratio_or_zero(2.0 * precision * recall, precision + recall);
            ClassMetrics {
                precision,
                recall,
                f1,
            }
        })
        .collect()
}

fn ratio_or_zero(num: f64, denom: f64) -> f64 {
    if denom == 0.0 {
        0.0
    } else {
        num / denom
    }
}

/// Unweighted mean of per-class F1 scores.
pub fn macro_f1(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.total() == 0 {
        return Err(Error::EmptyEval);
    }
    let per_class = per_class_metrics(cm);
    Ok(per_class.iter().map(|m| m.f1).sum::<f64>() / per_class.len() as f64)
}

/// Everything a model evaluation produces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    pub fn from_predictions(
        y_true: &[usize],
        y_pred: &[usize],
        n_classes: usize,
    ) -> Result<EvalReport> {
        let confusion = ConfusionMatrix::from_predictions(y_true, y_pred, n_classes)?;
        EvalReport::from_confusion(confusion)
    }

    pub fn from_confusion(confusion: ConfusionMatrix) -> Result<EvalReport> {
        Ok(EvalReport {
            accuracy: accuracy(&confusion)?,
            per_class: per_class_metrics(&confusion),
            macro_f1: macro_f1(&confusion)?,
            confusion,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable fixed-width table.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("accuracy  {:.4}\n", self.accuracy));
        out.push_str(&format!("macro-F1  {:.4}\n\n", self.macro_f1));
        out.push_str("class  precision  recall  f1\n");
        for (c, m) in self.per_class.iter().enumerate() {
            out.push_str(&format!(
                "{c:<5}  {:<9.4}  {:<6.4}  {:.4}\n",
                m.precision, m.recall, m.f1
            ));
        }
        out.push_str("\nconfusion (rows = true, cols = predicted)\n");
        for row in self.confusion.counts() {
            let cells: Vec<String> = row.iter().map(|c| format!("{c:>7}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Evaluates a model on labeled, vectorized data.
pub fn evaluate_model(
    model: &Model,
    x: &[SparseVector],
    y: &[usize],
    n_classes: usize,
) -> Result<EvalReport> {
    let predictions = model.predict_batch(x)?;
    let y_pred: Vec<usize> = predictions.iter().map(|p| p.class).collect();
    EvalReport::from_predictions(y, &y_pred, n_classes)
}

/// One grid axis: a hyperparameter name plus candidate values in the order
/// they should be tried.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Hyperparameter grid. Axes enumerate in declaration order, values in
/// listed order; the scoring metric is fixed to macro-F1 on the validation
/// split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamGrid {
    pub axes: Vec<GridAxis>,
}

impl ParamGrid {
    pub fn validate(&self, kind: ModelKind) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::Config("grid has no axes".into()));
        }
        for axis in &self.axes {
            if axis.values.is_empty() {
                return Err(Error::Config(format!("grid axis {:?} is empty", axis.name)));
            }
            known_param(kind, &axis.name)?;
        }
        Ok(())
    }

    pub fn n_points(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }
}

fn known_param(kind: ModelKind, name: &str) -> Result<()> {
    let ok = match kind {
        ModelKind::Nb => matches!(name, "alpha"),
        ModelKind::Lr => matches!(name, "l2" | "max_iter" | "tol"),
        ModelKind::Rf => matches!(name, "n_estimators" | "min_samples_split" | "seed"),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "unknown {} parameter {name:?}",
            kind.as_str()
        )))
    }
}

fn apply_param(options: &mut TrainOptions, name: &str, value: f64) -> Result<()> {
    match (options.kind, name) {
        (ModelKind::Nb, "alpha") => options.nb_alpha = value,
        (ModelKind::Lr, "l2") => options.lr.l2 = Some(value),
        (ModelKind::Lr, "max_iter") => options.lr.max_iter = value as usize,
        (ModelKind::Lr, "tol") => options.lr.tol = value,
        (ModelKind::Rf, "n_estimators") => options.rf.n_estimators = value as usize,
        (ModelKind::Rf, "min_samples_split") => options.rf.min_samples_split = value as usize,
        (ModelKind::Rf, "seed") => options.rf.seed = value as u64,
        _ => return known_param(options.kind, name),
    }
    Ok(())
}

/// One evaluated grid point, in enumeration order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPoint {
    pub params: Vec<(String, f64)>,
    pub macro_f1: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    /// Index into `points` of the best-scoring configuration.
    pub best: usize,
    pub points: Vec<GridPoint>,
}

impl GridOutcome {
    pub fn best_point(&self) -> &GridPoint {
        &self.points[self.best]
    }
}

/// Trains one model per Cartesian-product point and scores each on the
/// validation split. Per-point training failures are recorded, not fatal —
/// unless every point fails. Ties go to the earliest enumerated point.
#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    grid: &ParamGrid,
    kind: ModelKind,
    base: &TrainOptions,
    train_x: &[SparseVector],
    train_y: &[usize],
    val_x: &[SparseVector],
    val_y: &[usize],
    n_classes: usize,
) -> Result<GridOutcome> {
    grid.validate(kind)?;

    let mut points = Vec::with_capacity(grid.n_points());
    let mut odometer = vec![0usize; grid.axes.len()];
    'enumerate: loop {
        let params: Vec<(String, f64)> = grid
            .axes
            .iter()
            .zip(&odometer)
            .map(|(axis, &i)| (axis.name.clone(), axis.values[i]))
            .collect();
        let mut options = *base;
        options.kind = kind;
        let outcome = params
            .iter()
            .try_fold((), |_, (name, value)| apply_param(&mut options, name, *value))
            .and_then(|_| train_model(train_x, train_y, n_classes, &options))
            .and_then(|model| evaluate_model(&model, val_x, val_y, n_classes));
        points.push(match outcome {
            Ok(report) => GridPoint {
                params,
                macro_f1: Some(report.macro_f1),
                error: None,
            },
            Err(e) => GridPoint {
                params,
                macro_f1: None,
                error: Some(e.to_string()),
            },
        });

        // advance the odometer; the last axis spins fastest
        let mut pos = grid.axes.len();
        while pos > 0 {
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < grid.axes[pos].values.len() {
                continue 'enumerate;
            }
            odometer[pos] = 0;
        }
        break;
    }

    let mut best: Option<usize> = None;
    for (i, point) in points.iter().enumerate() {
        if let Some(score) = point.macro_f1 {
            if best.is_none_or(|b| score > points[b].macro_f1.unwrap()) {
                best = Some(i);
            }
        }
    }
    match best {
        Some(best) => Ok(GridOutcome { best, points }),
        None => Err(Error::GridExhausted(
            points
                .first()
                .and_then(|p| p.error.clone())
                .unwrap_or_else(|| "empty grid".into()),
        )),
    }
}

/// Picks the candidate with the highest validation macro-F1; the first
/// listed wins ties. Returns the winning index plus every candidate's score.
pub fn select_best(
    candidates: &[(String, &Model)],
    val_x: &[SparseVector],
    val_y: &[usize],
    n_classes: usize,
) -> Result<(usize, Vec<f64>)> {
    if candidates.is_empty() {
        return Err(Error::EmptyEval);
    }
    let mut scores = Vec::with_capacity(candidates.len());
    for (_, model) in candidates {
        scores.push(evaluate_model(model, val_x, val_y, n_classes)?.macro_f1);
    }
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    Ok((best, scores))
}

/// A misclassified record, in data order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub index: usize,
    pub text: String,
    pub true_label: usize,
    pub predicted: usize,
}

/// Lists every misclassified record in data order.
pub fn error_listing(
    model: &Model,
    texts: &[String],
    y: &[usize],
    x: &[SparseVector],
) -> Result<Vec<ErrorRecord>> {
    if texts.len() != y.len() || y.len() != x.len() {
        return Err(Error::Shape {
            expected: texts.len(),
            got: y.len().min(x.len()),
        });
    }
    let mut out = Vec::new();
    for (i, ((text, &yi), xi)) in texts.iter().zip(y).zip(x).enumerate() {
        let pred = model.predict(xi)?.class;
        if pred != yi {
            out.push(ErrorRecord {
                index: i,
                text: text.clone(),
                true_label: yi,
                predicted: pred,
            });
        }
    }
    Ok(out)
}

/// Per-label corpus statistics over preprocessed documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelStats {
    pub label: usize,
    pub records: usize,
    pub total_tokens: u64,
    pub mean_tokens: f64,
    pub top_terms: Vec<(String, u64)>,
}

/// Exact per-label tallies: record counts, token totals/means and the top-k
/// terms by count (lexicographic tie-break).
pub fn corpus_stats(
    items: &[(usize, &ProcessedText)],
    n_classes: usize,
    top_k: usize,
) -> Vec<LabelStats> {
    let mut stats: Vec<LabelStats> = (0..n_classes)
        .map(|label| LabelStats {
            label,
            records: 0,
            total_tokens: 0,
            mean_tokens: 0.0,
            top_terms: Vec::new(),
        })
        .collect();
    let mut term_counts: Vec<std::collections::BTreeMap<&str, u64>> =
        vec![std::collections::BTreeMap::new(); n_classes];

    for &(label, doc) in items {
        if label >= n_classes {
            continue;
        }
        stats[label].records += 1;
        stats[label].total_tokens += doc.tokens.len() as u64;
        for tok in &doc.tokens {
            *term_counts[label].entry(tok).or_insert(0) += 1;
        }
    }

    for (stat, counts) in stats.iter_mut().zip(term_counts) {
        if stat.records > 0 {
            stat.mean_tokens = stat.total_tokens as f64 / stat.records as f64;
        }
        // BTreeMap iteration is lexicographic, so a stable sort by count
        // descending leaves ties in lexicographic order.
        let mut terms: Vec<(String, u64)> =
            counts.into_iter().map(|(t, c)| (t.to_string(), c)).collect();
        terms.sort_by_key(|&(_, c)| std::cmp::Reverse(c));
        terms.truncate(top_k);
        stat.top_terms = terms;
    }
    stats
}

//! Multinomial naive Bayes with Laplace smoothing.
//!
//! Word counts are modeled as draws from a per-class multinomial:
//! `P(j|c) = (count_cj + α) / (total_c + α·V)`, priors are empirical class
//! frequencies, and prediction normalizes the exponentiated joint
//! log-likelihoods.

use serde::{Deserialize, Serialize};

use super::{normalize_log_scores, Prediction};
use crate::error::{Error, Result};
use crate::features::SparseVector;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NbModel {
    pub class_log_prior: Vec<f64>,
    /// `feature_log_prob[c][j] = ln P(term j | class c)`.
    pub feature_log_prob: Vec<Vec<f64>>,
    pub alpha: f64,
}

impl NbModel {
    pub fn n_classes(&self) -> usize {
        self.class_log_prior.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_log_prob.first().map_or(0, Vec::len)
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Prediction> {
        if x.dims() != self.n_features() {
            return Err(Error::Shape {
                expected: self.n_features(),
                got: x.dims(),
            });
        }
        let scores: Vec<f64> = (0..self.n_classes())
            .map(|c| {
                let mut s = self.class_log_prior[c];
                for &(j, count) in x.entries() {
                    s += count as f64 * self.feature_log_prob[c][j];
                }
                s
            })
            .collect();
        let (class, probabilities) = normalize_log_scores(&scores);
        Ok(Prediction {
            class,
            probabilities,
        })
    }
}

/// Trains a smoothed multinomial NB model.
///
/// Every class in `0..n_classes` must be present in `y`.
pub fn train_nb(x: &[SparseVector], y: &[usize], n_classes: usize, alpha: f64) -> Result<NbModel> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::Config(format!("alpha must be > 0, got {alpha}")));
    }
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::Training(format!(
            "need equal non-zero sample counts, got {} features / {} labels",
            x.len(),
            y.len()
        )));
    }
    if n_classes < 2 {
        return Err(Error::Config("need at least 2 classes".into()));
    }
    let n_features = x[0].dims();
    if let Some(bad) = x.iter().find(|v| v.dims() != n_features) {
        return Err(Error::Shape {
            expected: n_features,
            got: bad.dims(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::Training(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }

    let mut class_docs = vec![0u64; n_classes];
    let mut term_counts = vec![vec![0u64; n_features]; n_classes];
    let mut class_totals = vec![0u64; n_classes];
    for (xi, &c) in x.iter().zip(y) {
        class_docs[c] += 1;
        for &(j, count) in xi.entries() {
            term_counts[c][j] += count as u64;
            class_totals[c] += count as u64;
        }
    }
    if let Some(missing) = class_docs.iter().position(|&n| n == 0) {
        return Err(Error::Training(format!(
            "class {missing} has no training documents"
        )));
    }

    let n = x.len() as f64;
    let class_log_prior = class_docs.iter().map(|&nc| (nc as f64 / n).ln()).collect();
    let feature_log_prob = (0..n_classes)
        .map(|c| {
            let denom = class_totals[c] as f64 + alpha * n_features as f64;
            term_counts[c]
                .iter()
                .map(|&cnt| ((cnt as f64 + alpha) / denom).ln())
                .collect()
        })
        .collect();

    Ok(NbModel {
        class_log_prior,
        feature_log_prob,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::SparseVector;

    // d1 = ["a","a","b"] -> class 0, d2 = ["b","b","c"] -> class 1, V = 3
    fn tiny_corpus() -> (Vec<SparseVector>, Vec<usize>) {
        let x = vec![
            SparseVector::new(3, vec![(0, 2), (1, 1)]).unwrap(),
            SparseVector::new(3, vec![(1, 2), (2, 1)]).unwrap(),
        ];
        (x, vec![0, 1])
    }

    #[test]
    fn closed_form_feature_probability() {
        let (x, y) = tiny_corpus();
        let m = train_nb(&x, &y, 2, 1.0).unwrap();
        // P(a|0) = (2 + 1) / (3 + 3) = 1/2
        let p_a_given_0 = m.feature_log_prob[0][0].exp();
        assert!((p_a_given_0 - 0.5).abs() < 1e-12);
        // P(a|1) = (0 + 1) / (3 + 3) = 1/6
        let p_a_given_1 = m.feature_log_prob[1][0].exp();
        assert!((p_a_given_1 - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_class_counts_give_equal_priors() {
        let (x, y) = tiny_corpus();
        let m = train_nb(&x, &y, 2, 1.0).unwrap();
        assert!((m.class_log_prior[0] - m.class_log_prior[1]).abs() < 1e-12);
    }

    #[test]
    fn predict_single_token_doc() {
        let (x, y) = tiny_corpus();
        let m = train_nb(&x, &y, 2, 1.0).unwrap();
        // doc ["a"]: P(0|doc) = 0.5·0.5 / (0.5·0.5 + 0.5·(1/6)) = 0.75
        let doc = SparseVector::new(3, vec![(0, 1)]).unwrap();
        let p = m.predict(&doc).unwrap();
        assert_eq!(p.class, 0);
        assert!((p.probabilities[0] - 0.75).abs() < 1e-12);
        assert!((p.probabilities[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn distributions_normalized() {
        let (x, y) = tiny_corpus();
        let m = train_nb(&x, &y, 2, 0.5).unwrap();
        let prior_sum: f64 = m.class_log_prior.iter().map(|p| p.exp()).sum();
        assert!((prior_sum - 1.0).abs() < 1e-9);
        for row in &m.feature_log_prob {
            let s: f64 = row.iter().map(|p| p.exp()).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_alpha_and_missing_class() {
        let (x, y) = tiny_corpus();
        assert!(matches!(train_nb(&x, &y, 2, 0.0), Err(Error::Config(_))));
        assert!(matches!(train_nb(&x, &y, 2, -1.0), Err(Error::Config(_))));
        assert!(matches!(
            train_nb(&x, &[0, 0], 2, 1.0),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn predict_shape_mismatch() {
        let (x, y) = tiny_corpus();
        let m = train_nb(&x, &y, 2, 1.0).unwrap();
        let wrong = SparseVector::zero(5);
        assert!(matches!(m.predict(&wrong), Err(Error::Shape { .. })));
    }

    /// Brute-force oracle: the smoothed posterior computed with plain
    /// products instead of log-space sums.
    #[allow(clippy::needless_range_loop)] // deliberately plain index loops
    fn oracle_posterior(
        x: &[SparseVector],
        y: &[usize],
        n_classes: usize,
        alpha: f64,
        doc: &SparseVector,
    ) -> Vec<f64> {
        let v = x[0].dims();
        let mut joint = vec![0.0f64; n_classes];
        for c in 0..n_classes {
            let docs_c = y.iter().filter(|&&l| l == c).count() as f64;
            let mut total_c = 0.0;
            for (xi, &l) in x.iter().zip(y) {
                if l == c {
                    total_c += xi.total() as f64;
                }
            }
            let mut p = docs_c / x.len() as f64;
            for &(j, count) in doc.entries() {
                let mut count_cj = 0.0;
                for (xi, &l) in x.iter().zip(y) {
                    if l == c {
                        count_cj += xi.get(j) as f64;
                    }
                }
                let term = (count_cj + alpha) / (total_c + alpha * v as f64);
                p *= term.powi(count as i32);
            }
            joint[c] = p;
        }
        let z: f64 = joint.iter().sum();
        joint.iter().map(|p| p / z).collect()
    }

    #[test]
    fn matches_brute_force_oracle_on_small_corpora() {
        let (x, y) = tiny_corpus();
        for alpha in [0.5, 1.0] {
            let m = train_nb(&x, &y, 2, alpha).unwrap();
            for doc in [
                SparseVector::new(3, vec![(0, 1)]).unwrap(),
                SparseVector::new(3, vec![(1, 2), (2, 1)]).unwrap(),
                SparseVector::zero(3),
            ] {
                let got = m.predict(&doc).unwrap().probabilities;
                let want = oracle_posterior(&x, &y, 2, alpha, &doc);
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-12, "got {got:?}, want {want:?}");
                }
            }
        }
    }
}

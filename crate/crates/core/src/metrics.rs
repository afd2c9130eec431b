//! Empirical confusion matrices, ROC curves, AUC, maximal accuracy, and
//! sampling-error quantities from a [`ScoreSet`].
//!
//! Class 0 is the positive class. A path is assigned to the rejection
//! region iff its score is strictly greater than the threshold, so
//! `fnr = P(score > t | class 0)` and `tnr = P(score > t | class 1)`.

use crate::error::{Error, Result};
use crate::lrt::ScoreSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn fnr(&self) -> f64 {
        self.fn_ as f64 / (self.tp + self.fn_) as f64
    }

    pub fn tnr(&self) -> f64 {
        self.tn as f64 / (self.tn + self.fp) as f64
    }
}

/// ROC curve swept over thresholds at every distinct score value plus a
/// low sentinel; `points[i]` is `(fpr, tpr)` at `thresholds[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSummary {
    pub auc: f64,
    pub acc_star: f64,
    /// Threshold on the score scale attaining `acc_star`.
    pub k_star: f64,
    pub fnr_at_star: f64,
    pub tnr_at_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingErrorEstimate {
    pub rate: f64,
    pub samples: usize,
    /// CLT standard deviation `sqrt(rate (1 - rate) / m)`.
    pub clt_std: f64,
    /// Worst-case rule of thumb `0.5 / sqrt(m)`.
    pub worst_case_std: f64,
    /// Hoeffding tail bound `2 exp(-m eps^2 / 2)` at the requested eps.
    pub hoeffding_bound: f64,
    pub epsilon: f64,
}

/// Five-number summary with IQR outliers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub outliers: Vec<f64>,
}

fn check_finite(scores: &ScoreSet) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    for (idx, s) in scores.scores.iter().enumerate() {
        if !s.is_finite() {
            return Err(Error::NonFiniteScore { path: idx });
        }
    }
    Ok(())
}

fn check_both_classes(scores: &ScoreSet) -> Result<(usize, usize)> {
    let ones = scores.labels.iter().filter(|l| **l == 1).count();
    let zeros = scores.len() - ones;
    if zeros == 0 || ones == 0 {
        return Err(Error::SingleClass);
    }
    Ok((zeros, ones))
}

/// Count decisions at one threshold (strict rejection).
pub fn confusion(scores: &ScoreSet, threshold: f64) -> Result<ConfusionMatrix> {
    check_finite(scores)?;
    let mut m = ConfusionMatrix {
        tp: 0,
        fn_: 0,
        fp: 0,
        tn: 0,
    };
    for (s, l) in scores.scores.iter().zip(&scores.labels) {
        let rejected = *s > threshold;
        match (l, rejected) {
            (0, false) => m.tp += 1,
            (0, true) => m.fn_ += 1,
            (1, true) => m.tn += 1,
            (1, false) => m.fp += 1,
            _ => {
                return Err(Error::Schema {
                    file: "scores".into(),
                    reason: format!("label {l} is not binary"),
                })
            }
        }
    }
    Ok(m)
}

/// Ascending thresholds with the `(fpr, tpr)` point at each.
type ThresholdSweep = (Vec<f64>, Vec<(f64, f64)>);

/// Threshold sweep shared by [`roc_curve`] and [`max_accuracy`]: ascending
/// thresholds (low sentinel first, then each distinct score) with the
/// fraction of each class at or below the threshold.
fn sweep(scores: &ScoreSet) -> Result<ThresholdSweep> {
    check_finite(scores)?;
    let (n0, n1) = check_both_classes(scores)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores.scores[a].partial_cmp(&scores.scores[b]).unwrap());

    let mut thresholds = vec![f64::NEG_INFINITY];
    let mut points = vec![(0.0, 0.0)];
    let mut acc0 = 0usize;
    let mut acc1 = 0usize;
    let mut i = 0;
    while i < order.len() {
        let value = scores.scores[order[i]];
        while i < order.len() && scores.scores[order[i]] == value {
            if scores.labels[order[i]] == 0 {
                acc0 += 1;
            } else {
                acc1 += 1;
            }
            i += 1;
        }
        thresholds.push(value);
        points.push((acc1 as f64 / n1 as f64, acc0 as f64 / n0 as f64));
    }
    Ok((thresholds, points))
}

/// ROC curve of a score set: `(fpr, tpr) = (1 - tnr, 1 - fnr)` at each
/// threshold, endpoints (0,0) and (1,1) included.
pub fn roc_curve(scores: &ScoreSet) -> Result<RocCurve> {
    let (thresholds, points) = sweep(scores)?;
    Ok(RocCurve { points, thresholds })
}

/// Trapezoidal area under the curve; equal to the Mann-Whitney statistic
/// `P(S1 > S0) + 1/2 P(S1 = S0)` of the underlying scores.
pub fn auc(curve: &RocCurve) -> f64 {
    let mut area = 0.0;
    for w in curve.points.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        area += (x1 - x0) * (y1 + y0) * 0.5;
    }
    area
}

/// Maximal balanced accuracy `max_t 1/2 (1 - fnr(t) + tnr(t))` over the
/// same threshold sweep as the ROC curve; ties break toward the smallest
/// threshold. The low sentinel realizes exactly 1/2, so the result is
/// never below it.
pub fn max_accuracy(scores: &ScoreSet) -> Result<MetricsSummary> {
    let (thresholds, points) = sweep(scores)?;
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (idx, (fpr, tpr)) in points.iter().enumerate() {
        let acc = 0.5 * (tpr + 1.0 - fpr);
        if acc > best {
            best = acc;
            best_idx = idx;
        }
    }
    let (fpr, tpr) = points[best_idx];
    let curve = RocCurve {
        points: points.clone(),
        thresholds: thresholds.clone(),
    };
    Ok(MetricsSummary {
        auc: auc(&curve),
        acc_star: best,
        k_star: thresholds[best_idx],
        fnr_at_star: 1.0 - tpr,
        tnr_at_star: 1.0 - fpr,
    })
}

/// ROC, AUC, and maximal accuracy of one score set.
pub fn evaluate(scores: &ScoreSet) -> Result<(RocCurve, MetricsSummary)> {
    let summary = max_accuracy(scores)?;
    let curve = roc_curve(scores)?;
    Ok((curve, summary))
}

/// CLT and Hoeffding quantities for an empirical rate from `m` samples.
pub fn sampling_error(rate: f64, m: usize, epsilon: f64) -> Result<SamplingErrorEstimate> {
    if m == 0 {
        return Err(Error::EmptyInput("sample count".into()));
    }
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::param(
            "rate",
            format!("must lie in [0, 1], got {rate}"),
        ));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::param("epsilon", "must be positive"));
    }
    let mf = m as f64;
    Ok(SamplingErrorEstimate {
        rate,
        samples: m,
        clt_std: (rate * (1.0 - rate) / mf).sqrt(),
        worst_case_std: 0.5 / mf.sqrt(),
        hoeffding_bound: 2.0 * (-mf * epsilon * epsilon / 2.0).exp(),
        epsilon,
    })
}

/// Linear-interpolation quantile of sorted data (inclusive method).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q * (n - 1) as f64;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Five-number summary of per-run metric values plus IQR outliers
/// (points beyond 1.5 IQR from the quartiles).
pub fn summarize_runs(values: &[f64]) -> Result<RunSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput("run values".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("values", "must be finite"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let outliers = sorted
        .iter()
        .copied()
        .filter(|v| *v < lo_fence || *v > hi_fence)
        .collect();
    Ok(RunSummary {
        min: sorted[0],
        q1,
        median,
        q3,
        max: sorted[sorted.len() - 1],
        outliers,
    })
}

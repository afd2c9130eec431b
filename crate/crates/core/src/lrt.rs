//! Log-likelihood-ratio scores per path.
//!
//! The discrete approximation sums
//! `(b1 - b0)(t_l, X_l)^T Sigma(X_l)^{-1} dX_l - 1/2 (|b1|^2_Sigma -
//! |b0|^2_Sigma)(t_l, X_l) dt_l` over observation steps. Applied on the
//! fine simulation grid it is the "hidden truth" reference; on the
//! observed grid it is the "numerical" baseline. The two Gaussian families
//! additionally have exact transition-density ratios.
//!
//! Every scorer is built so that swapping the pair negates the score
//! bitwise and identical drifts give exact zeros.

use crate::error::{Error, Result};
use crate::models::{ConstantDrift, Family, ModelPair, OrnsteinUhlenbeck};
use crate::simulate::{content_digest, Dataset, TimeSeriesPath};
use rayon::prelude::*;
use std::fmt;

/// Floor applied to each diagonal entry of Sigma before inversion; keeps
/// scores finite where the multiplicative-noise coefficient vanishes.
pub const COVARIANCE_FLOOR: f64 = 1e-8;

/// Which scoring rule produced a score set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMode {
    /// Discrete ratio on the fine simulation grid.
    HiddenTruth,
    /// Discrete ratio on the observed grid.
    Numerical,
    /// Exact ratio for Brownian motion with constant drift.
    ExactBm,
    /// Exact ratio for Ornstein-Uhlenbeck pairs on a uniform grid.
    ExactOu,
    /// Trained baseline decision values.
    Rocket,
    /// Scores imported from an external classifier.
    External,
}

impl ScoreMode {
    pub fn id(self) -> &'static str {
        match self {
            ScoreMode::HiddenTruth => "hidden-truth",
            ScoreMode::Numerical => "numerical",
            ScoreMode::ExactBm => "exact-bm",
            ScoreMode::ExactOu => "exact-ou",
            ScoreMode::Rocket => "rocket",
            ScoreMode::External => "external",
        }
    }
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for ScoreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hidden-truth" => ScoreMode::HiddenTruth,
            "numerical" => ScoreMode::Numerical,
            "exact-bm" => ScoreMode::ExactBm,
            "exact-ou" => ScoreMode::ExactOu,
            "rocket" => ScoreMode::Rocket,
            "external" => ScoreMode::External,
            other => {
                return Err(Error::Schema {
                    file: "scores".into(),
                    reason: format!("unknown score mode `{other}`"),
                })
            }
        })
    }
}

/// Per-path scores with labels, in dataset order (or a subset of it).
#[derive(Debug, Clone)]
pub struct ScoreSet {
    pub scores: Vec<f64>,
    pub labels: Vec<u8>,
    /// Index of each scored path in its source dataset.
    pub path_ids: Vec<usize>,
    pub mode: ScoreMode,
    /// Content digest of the dataset the scores refer to.
    pub provenance: Option<String>,
}

impl ScoreSet {
    pub fn new(
        scores: Vec<f64>,
        labels: Vec<u8>,
        path_ids: Vec<usize>,
        mode: ScoreMode,
        provenance: Option<String>,
    ) -> Result<Self> {
        if scores.len() != labels.len() || scores.len() != path_ids.len() {
            return Err(Error::Schema {
                file: "scores".into(),
                reason: format!(
                    "inconsistent lengths: {} scores, {} labels, {} ids",
                    scores.len(),
                    labels.len(),
                    path_ids.len()
                ),
            });
        }
        Ok(ScoreSet {
            scores,
            labels,
            path_ids,
            mode,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Restriction to a subset of rows (e.g. the test side of a split).
    pub fn subset(&self, rows: &[usize]) -> ScoreSet {
        ScoreSet {
            scores: rows.iter().map(|&r| self.scores[r]).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            path_ids: rows.iter().map(|&r| self.path_ids[r]).collect(),
            mode: self.mode,
            provenance: self.provenance.clone(),
        }
    }
}

/// Discrete log-likelihood ratio of one path under `pair`, with the
/// covariance floored before inversion.
pub fn loglik_ratio_numerical(path: &TimeSeriesPath, pair: &ModelPair) -> Result<f64> {
    if path.dim() != pair.dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.dim(),
            got: path.dim(),
        });
    }
    if path.len() < 2 {
        return Err(Error::PathTooShort);
    }
    let d = path.dim();
    let spec0 = pair.spec0();
    let spec1 = pair.spec1();
    let times = path.times();
    let mut b0 = vec![0.0; d];
    let mut b1 = vec![0.0; d];
    let mut sdiag = vec![0.0; d];
    let mut total = 0.0;
    for l in 0..path.len() - 1 {
        let t = times[l];
        let x = path.state(l);
        let x_next = path.state(l + 1);
        let dt = times[l + 1] - times[l];
        spec0.drift(t, x, &mut b0);
        spec1.drift(t, x, &mut b1);
        spec0.diffusion_diag(x, &mut sdiag);
        let mut cross = 0.0;
        let mut q0 = 0.0;
        let mut q1 = 0.0;
        for i in 0..d {
            let inv = 1.0 / (sdiag[i] * sdiag[i]).max(COVARIANCE_FLOOR);
            cross += (b1[i] - b0[i]) * inv * (x_next[i] - x[i]);
            q0 += b0[i] * b0[i] * inv;
            q1 += b1[i] * b1[i] * inv;
        }
        total += cross - 0.5 * (q1 - q0) * dt;
    }
    if !total.is_finite() {
        return Err(Error::NonFiniteScore { path: 0 });
    }
    Ok(total)
}

/// Exact ratio for the constant-drift family:
/// `sigma^{-2} [ (theta1 - theta0)^T (X_{t_L} - X_{t_0})
///              - 1/2 (|theta1|^2 - |theta0|^2)(t_L - t_0) ]`.
pub fn loglik_ratio_exact_bm(path: &TimeSeriesPath, pair: &ModelPair) -> Result<f64> {
    let (s0, s1) = pair
        .downcast_pair::<ConstantDrift>()
        .ok_or_else(|| Error::FamilyMismatch {
            expected: Family::ConstantDrift.id().into(),
            got: pair.family().id().into(),
        })?;
    if path.dim() != pair.dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.dim(),
            got: path.dim(),
        });
    }
    if path.len() < 2 {
        return Err(Error::PathTooShort);
    }
    let first = path.state(0);
    let last = path.state(path.len() - 1);
    let span = path.times()[path.len() - 1] - path.times()[0];
    let mut cross = 0.0;
    for i in 0..path.dim() {
        cross += (s1.a - s0.a) * (last[i] - first[i]);
    }
    let n0 = s0.a * s0.a * path.dim() as f64;
    let n1 = s1.a * s1.a * path.dim() as f64;
    let inv_sigma2 = 1.0 / (s0.sigma * s0.sigma);
    Ok(inv_sigma2 * (cross - 0.5 * (n1 - n0) * span))
}

/// Exact ratio for an OU pair on a uniform grid:
/// `(dL/2) log(s0/s1) + 1/2 sum_l ( |X_{l+1} - e^{theta0 dt} X_l|^2 / s0
///                                 - |X_{l+1} - e^{theta1 dt} X_l|^2 / s1 )`
/// with `s_i = sigma^2 (e^{2 theta_i dt} - 1) / (2 theta_i)`.
pub fn loglik_ratio_exact_ou(path: &TimeSeriesPath, pair: &ModelPair) -> Result<f64> {
    let (s0, s1) =
        pair.downcast_pair::<OrnsteinUhlenbeck>()
            .ok_or_else(|| Error::FamilyMismatch {
                expected: Family::Ou.id().into(),
                got: pair.family().id().into(),
            })?;
    if path.dim() != pair.dim() {
        return Err(Error::DimensionMismatch {
            expected: pair.dim(),
            got: path.dim(),
        });
    }
    if path.len() < 2 {
        return Err(Error::PathTooShort);
    }
    let times = path.times();
    let dt = times[1] - times[0];
    for l in 1..path.len() - 1 {
        if (times[l + 1] - times[l] - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(Error::NonUniformGrid { step: l });
        }
    }
    let d = path.dim();
    let steps = (path.len() - 1) as f64;
    let var0 = s0.transition_variance(dt);
    let var1 = s1.transition_variance(dt);
    let decay0 = (s0.rate * dt).exp();
    let decay1 = (s1.rate * dt).exp();
    let mut quad = 0.0;
    for l in 0..path.len() - 1 {
        let x = path.state(l);
        let x_next = path.state(l + 1);
        let mut a = 0.0;
        let mut b = 0.0;
        for i in 0..d {
            let r0 = x_next[i] - decay0 * x[i];
            let r1 = x_next[i] - decay1 * x[i];
            a += r0 * r0;
            b += r1 * r1;
        }
        quad += a / var0 - b / var1;
    }
    Ok(0.5 * d as f64 * steps * (var0.ln() - var1.ln()) + 0.5 * quad)
}

/// Posterior probability of class 1 given a log-likelihood ratio:
/// `1 / (1 + e^{-l})`, so `posterior > k` iff `l > log(k / (1 - k))`.
pub fn lrt_posterior(score: f64) -> f64 {
    1.0 / (1.0 + (-score).exp())
}

/// Decision threshold on the score scale for a posterior threshold `k`.
pub fn decision_threshold(k: f64) -> f64 {
    (k / (1.0 - k)).ln()
}

/// Score every path of a dataset. Reference classifiers never train: the
/// same rule is applied to each path independently and the output preserves
/// dataset order.
pub fn lrt_scores(dataset: &Dataset, pair: &ModelPair, mode: ScoreMode) -> Result<ScoreSet> {
    type PathScorer<'a> = Box<dyn Fn(&TimeSeriesPath) -> Result<f64> + Sync + 'a>;
    let scorer: PathScorer = match mode {
        ScoreMode::HiddenTruth | ScoreMode::Numerical => {
            Box::new(move |p: &TimeSeriesPath| loglik_ratio_numerical(p, pair))
        }
        ScoreMode::ExactBm => Box::new(move |p: &TimeSeriesPath| loglik_ratio_exact_bm(p, pair)),
        ScoreMode::ExactOu => Box::new(move |p: &TimeSeriesPath| loglik_ratio_exact_ou(p, pair)),
        ScoreMode::Rocket | ScoreMode::External => {
            return Err(Error::UnknownClassifier(format!(
                "{mode} is not an LRT scoring mode"
            )))
        }
    };
    let paths: &[TimeSeriesPath] = match mode {
        ScoreMode::HiddenTruth => dataset.fine.as_deref().ok_or(Error::MissingFinePaths)?,
        _ => &dataset.paths,
    };
    let scores = paths
        .par_iter()
        .enumerate()
        .map(|(idx, p)| {
            scorer(p).map_err(|e| match e {
                Error::NonFiniteScore { .. } => Error::NonFiniteScore { path: idx },
                other => other,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    ScoreSet::new(
        scores,
        dataset.labels.clone(),
        (0..dataset.len()).collect(),
        mode,
        Some(content_digest(dataset)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_model_pair, ParamMap};
    use crate::rng::{self, purpose};
    use crate::simulate::{generate_dataset, simulate_fine_path, SimConfig};
    use rand::RngExt;

    fn pair_with(family: &str, entries: &[(&str, f64)]) -> ModelPair {
        let overrides: ParamMap = entries.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        make_model_pair(family, &overrides).unwrap()
    }

    fn config(delta: f64, dt: f64, t_span: f64, paths: usize, seed: u64) -> SimConfig {
        let observations = (t_span / dt).round() as usize;
        SimConfig::new(delta, dt, t_span, observations, paths, seed).unwrap()
    }

    /// Exact negation up to the sign of zero: swapping a pair of identical
    /// sums produces +0.0 on both sides.
    fn assert_exact_negation(forward: f64, backward: f64) {
        assert!(
            forward == -backward,
            "{forward} is not the exact negation of {backward}"
        );
        if forward != 0.0 {
            assert_eq!(forward.to_bits(), (-backward).to_bits());
        }
    }

    fn random_path(pair: &ModelPair, seed: u64) -> TimeSeriesPath {
        let cfg = config(0.01, 0.1, 1.0, 2, seed);
        let mut stream = rng::stream(seed, &[purpose::SIM_PATH, 0, 0]);
        let d = pair.dim();
        let x0: Vec<f64> = (0..d).map(|_| stream.random_range(-1.0..1.0)).collect();
        let fine = simulate_fine_path(pair.spec0(), &x0, &cfg, &mut stream).unwrap();
        crate::simulate::downsample(&fine, 10).unwrap()
    }

    #[test]
    fn identical_drifts_score_exactly_zero() {
        let pairs = vec![
            pair_with("constant-drift", &[("a0", 0.3), ("a1", 0.3)]),
            pair_with("ou", &[("theta0", -0.7), ("theta1", -0.7)]),
        ];
        for pair in &pairs {
            let path = random_path(pair, 5);
            assert_eq!(loglik_ratio_numerical(&path, pair).unwrap(), 0.0);
        }
        let bm = &pairs[0];
        let ou = &pairs[1];
        assert_eq!(loglik_ratio_exact_bm(&random_path(bm, 6), bm).unwrap(), 0.0);
        assert_eq!(loglik_ratio_exact_ou(&random_path(ou, 7), ou).unwrap(), 0.0);

        // Identical drifts through shared specs work for any family.
        let well = std::sync::Arc::new(crate::models::PotentialGradient::new(
            crate::models::PotentialKind::DoubleWell,
            1.0,
            1,
        ));
        let degenerate = ModelPair::from_specs(well.clone(), well).unwrap();
        let path = random_path(&degenerate, 8);
        assert_eq!(loglik_ratio_numerical(&path, &degenerate).unwrap(), 0.0);
    }

    #[test]
    fn swapping_the_pair_negates_scores_bitwise() {
        let pairs = [
            pair_with("constant-drift", &[]),
            pair_with("potential-gradient", &[]),
            pair_with("linear-nonlinear", &[]),
            pair_with("ou", &[("d", 2.0)]),
            pair_with("interacting-particles", &[("N", 3.0), ("d1", 2.0)]),
        ];
        for (i, pair) in pairs.iter().enumerate() {
            let path = random_path(pair, 100 + i as u64);
            let forward = loglik_ratio_numerical(&path, pair).unwrap();
            let backward = loglik_ratio_numerical(&path, &pair.swapped()).unwrap();
            assert_exact_negation(forward, backward);
        }
        let bm = &pairs[0];
        let path = random_path(bm, 200);
        assert_exact_negation(
            loglik_ratio_exact_bm(&path, bm).unwrap(),
            loglik_ratio_exact_bm(&path, &bm.swapped()).unwrap(),
        );
        let ou = &pairs[3];
        let path = random_path(ou, 201);
        assert_exact_negation(
            loglik_ratio_exact_ou(&path, ou).unwrap(),
            loglik_ratio_exact_ou(&path, &ou.swapped()).unwrap(),
        );
    }

    #[test]
    fn constant_drift_scores_telescope() {
        let pair = pair_with("constant-drift", &[]);
        let cfg = config(0.01, 0.1, 1.0, 40, 17);
        let ds = generate_dataset(&pair, &cfg, true).unwrap();
        let hidden = lrt_scores(&ds, &pair, ScoreMode::HiddenTruth).unwrap();
        let numerical = lrt_scores(&ds, &pair, ScoreMode::Numerical).unwrap();
        let exact = lrt_scores(&ds, &pair, ScoreMode::ExactBm).unwrap();
        for i in 0..ds.len() {
            assert!((numerical.scores[i] - exact.scores[i]).abs() <= 1e-10);
            assert!((hidden.scores[i] - numerical.scores[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn exact_bm_closed_form_value() {
        // theta0 = 0, theta1 = 1, sigma = 1, increment 0.5 over unit span.
        let pair = pair_with("constant-drift", &[]);
        let path = TimeSeriesPath::new(
            vec![0.0, 1.0],
            vec![0.25, 0.75],
            1,
            crate::simulate::GridKind::Observed,
        )
        .unwrap();
        let score = loglik_ratio_exact_bm(&path, &pair).unwrap();
        assert!((score - 0.0).abs() < 1e-15);
        assert!(matches!(
            loglik_ratio_exact_bm(&path, &pair_with("ou", &[])),
            Err(Error::FamilyMismatch { .. })
        ));
    }

    #[test]
    fn exact_ou_uses_stable_step_variances() {
        let pair = pair_with("ou", &[]);
        let (s0, s1) = pair.downcast_pair::<OrnsteinUhlenbeck>().unwrap();
        let v0 = s0.transition_variance(0.1);
        let v1 = s1.transition_variance(0.1);
        assert!((v0 - (1.0 - (-0.2f64).exp()) / 2.0).abs() < 1e-15);
        assert!((v1 - (1.0 - (-0.1f64).exp())).abs() < 1e-15);
        assert!(v0 > 0.0 && v1 > 0.0);

        // Removable singularity at theta = 0: the limit branch returns
        // sigma^2 dt exactly, and the expm1 branch is continuous across it.
        let tiny = OrnsteinUhlenbeck::new(1e-9, 1.0, 1);
        assert_eq!(tiny.transition_variance(0.1), 0.1);
        let above = OrnsteinUhlenbeck::new(1e-7, 1.0, 1);
        assert!((above.transition_variance(0.1) - 0.1).abs() < 1e-8 * 0.1);
    }

    #[test]
    fn exact_ou_approaches_discrete_ratio_for_small_rates() {
        // Rates small enough that the step variance takes its limit value;
        // the pair is Brownian up to O(theta^2) and the two scores agree.
        let pair = pair_with("ou", &[("theta0", 1e-8), ("theta1", -2e-8)]);
        let cfg = config(0.01, 0.1, 1.0, 20, 23);
        let ds = generate_dataset(&pair, &cfg, false).unwrap();
        let mut largest = 0.0f64;
        for path in &ds.paths {
            let exact = loglik_ratio_exact_ou(path, &pair).unwrap();
            let discrete = loglik_ratio_numerical(path, &pair).unwrap();
            assert!((exact - discrete).abs() <= 1e-8);
            largest = largest.max(exact.abs());
        }
        assert!(largest > 0.0);
    }

    #[test]
    fn exact_ou_rejects_nonuniform_grids() {
        let pair = pair_with("ou", &[]);
        let path = TimeSeriesPath::new(
            vec![0.0, 0.1, 0.35],
            vec![0.0, 0.1, 0.2],
            1,
            crate::simulate::GridKind::Observed,
        )
        .unwrap();
        assert!(matches!(
            loglik_ratio_exact_ou(&path, &pair),
            Err(Error::NonUniformGrid { .. })
        ));
    }

    #[test]
    fn posterior_of_score() {
        assert_eq!(lrt_posterior(0.0), 0.5);
        assert_eq!(lrt_posterior(f64::INFINITY), 1.0);
        assert_eq!(lrt_posterior(1e6), 1.0);
        assert!((lrt_posterior(9f64.ln()) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn posterior_threshold_equals_score_threshold() {
        let pair = pair_with("constant-drift", &[]);
        let cfg = config(0.01, 0.1, 1.0, 100, 3);
        let ds = generate_dataset(&pair, &cfg, false).unwrap();
        let scores = lrt_scores(&ds, &pair, ScoreMode::Numerical).unwrap();
        for i in 1..20 {
            let k = i as f64 / 20.0;
            let c = decision_threshold(k);
            for &s in &scores.scores {
                assert_eq!(lrt_posterior(s) > k, s > c);
            }
        }
    }

    #[test]
    fn scores_add_over_contiguous_segments() {
        let pairs = vec![
            pair_with("linear-nonlinear", &[]),
            pair_with("potential-gradient", &[]),
        ];
        for pair in &pairs {
            let path = random_path(pair, 300);
            let total = loglik_ratio_numerical(&path, pair).unwrap();
            for split in 1..path.len() - 1 {
                let head = path.segment(0, split).unwrap();
                let tail = path.segment(split, path.len() - 1).unwrap();
                let sum = loglik_ratio_numerical(&head, pair).unwrap()
                    + loglik_ratio_numerical(&tail, pair).unwrap();
                assert!((total - sum).abs() <= 1e-10 * total.abs().max(1.0));
            }
        }
    }

    #[test]
    fn hidden_and_numerical_differ_for_nonlinear_drift() {
        let pair = pair_with("potential-gradient", &[]);
        let cfg = config(0.01, 0.1, 2.0, 60, 19);
        let ds = generate_dataset(&pair, &cfg, true).unwrap();
        let hidden = lrt_scores(&ds, &pair, ScoreMode::HiddenTruth).unwrap();
        let numerical = lrt_scores(&ds, &pair, ScoreMode::Numerical).unwrap();
        assert!(hidden
            .scores
            .iter()
            .zip(&numerical.scores)
            .any(|(a, b)| (a - b).abs() > 1e-6));
    }

    #[test]
    fn score_mode_errors() {
        let pair = pair_with("constant-drift", &[]);
        let cfg = config(0.01, 0.1, 1.0, 10, 3);
        let ds = generate_dataset(&pair, &cfg, false).unwrap();
        assert!(matches!(
            lrt_scores(&ds, &pair, ScoreMode::HiddenTruth),
            Err(Error::MissingFinePaths)
        ));
        assert!(matches!(
            lrt_scores(&ds, &pair, ScoreMode::ExactOu),
            Err(Error::FamilyMismatch { .. })
        ));
        assert!(matches!(
            lrt_scores(&ds, &pair, ScoreMode::Rocket),
            Err(Error::UnknownClassifier(_))
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arbitrary_path() -> impl Strategy<Value = (TimeSeriesPath, u8)> {
            // Observation count, dimension selector, and raw states.
            (2usize..12, 0u8..4).prop_flat_map(|(len, family_idx)| {
                let dim = match family_idx {
                    3 => 4, // particles: N = 2, d1 = 2
                    2 => 2, // ou d = 2
                    _ => 1,
                };
                proptest::collection::vec(-3.0f64..3.0, len * dim).prop_map(move |states| {
                    let times: Vec<f64> = (0..len).map(|l| 0.1 * l as f64).collect();
                    (
                        TimeSeriesPath::new(
                            times,
                            states,
                            dim,
                            crate::simulate::GridKind::Observed,
                        )
                        .unwrap(),
                        family_idx,
                    )
                })
            })
        }

        fn pair_for(idx: u8) -> ModelPair {
            match idx {
                0 => pair_with("constant-drift", &[("a0", -0.4), ("a1", 0.9)]),
                1 => pair_with("potential-gradient", &[]),
                2 => pair_with("ou", &[("d", 2.0)]),
                _ => pair_with("interacting-particles", &[("N", 2.0), ("d1", 2.0)]),
            }
        }

        proptest! {
            #[test]
            fn antisymmetry_is_exact((path, idx) in arbitrary_path()) {
                let pair = pair_for(idx);
                let forward = loglik_ratio_numerical(&path, &pair).unwrap();
                let backward = loglik_ratio_numerical(&path, &pair.swapped()).unwrap();
                prop_assert!(forward == -backward);
                if forward != 0.0 {
                    prop_assert_eq!(forward.to_bits(), (-backward).to_bits());
                }
            }
        }
    }
}

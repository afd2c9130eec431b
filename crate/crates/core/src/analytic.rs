//! Ground-truth references for the two Gaussian families: closed-form
//! FNR/TNR/ACC*/AUC for Brownian motion with constant drift, and
//! Monte-Carlo rates with exact transition sampling for OU pairs.

use crate::error::{Error, Result};
use crate::lrt::{decision_threshold, loglik_ratio_exact_ou};
use crate::models::{ConstantDrift, Family, ModelPair, OrnsteinUhlenbeck};
use crate::rng::{self, purpose};
use crate::simulate::{GridKind, SimConfig, TimeSeriesPath};
use rand::RngExt;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal tail probability P(Z > x).
pub fn normal_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Score-law parameters for a constant-drift pair over a span:
/// conditional on class i the log-likelihood ratio is `(-1)^{1-i} m + v Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmClosedForm {
    /// `1/2 |theta1 - theta0|^2 (t_L - t_0)`.
    pub m: f64,
    /// `sigma |theta1 - theta0| sqrt(t_L - t_0)`.
    pub v: f64,
}

impl BmClosedForm {
    pub fn separation(&self) -> f64 {
        self.m / self.v
    }
}

/// False-negative and true-negative rate at one threshold, with binomial
/// standard errors when estimated by Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub k: f64,
    pub fnr: f64,
    pub tnr: f64,
    pub fnr_std_err: Option<f64>,
    pub tnr_std_err: Option<f64>,
}

fn bm_closed_form(pair: &ModelPair, t_span: f64) -> Result<BmClosedForm> {
    let (s0, s1) = pair
        .downcast_pair::<ConstantDrift>()
        .ok_or_else(|| Error::FamilyMismatch {
            expected: Family::ConstantDrift.id().into(),
            got: pair.family().id().into(),
        })?;
    if t_span.is_nan() || t_span <= 0.0 {
        return Err(Error::param("t_span", "must be positive"));
    }
    let dist = ((s1.a - s0.a).abs()) * (pair.dim() as f64).sqrt();
    if dist == 0.0 {
        return Err(Error::param(
            "pair",
            "theta1 = theta0: rates are threshold-degenerate",
        ));
    }
    Ok(BmClosedForm {
        m: 0.5 * dist * dist * t_span,
        v: s0.sigma * dist * t_span.sqrt(),
    })
}

/// Closed-form LRT rates for a constant-drift pair:
/// `fnr = P(Z > c_k/v + m/v)`, `tnr = P(Z > c_k/v - m/v)`.
pub fn bm_rates(pair: &ModelPair, t_span: f64, k: f64) -> Result<RatePair> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::param("k", "threshold must lie in (0, 1)"));
    }
    let cf = bm_closed_form(pair, t_span)?;
    let c = decision_threshold(k);
    Ok(RatePair {
        k,
        fnr: normal_tail(c / cf.v + cf.separation()),
        tnr: normal_tail(c / cf.v - cf.separation()),
        fnr_std_err: None,
        tnr_std_err: None,
    })
}

/// Maximal accuracy of the constant-drift LRT and the threshold attaining
/// it. The optimum sits at c_k = 0, i.e. k* = 1/2, where
/// `ACC* = Phi(m/v)`.
pub fn bm_optimal_accuracy(pair: &ModelPair, t_span: f64) -> Result<(f64, f64)> {
    match bm_closed_form(pair, t_span) {
        Ok(cf) => Ok((normal_cdf(cf.separation()), 0.5)),
        // Identical drifts: the classes are indistinguishable.
        Err(Error::InvalidParameter { name, .. }) if name == "pair" => Ok((0.5, 0.5)),
        Err(e) => Err(e),
    }
}

/// AUC of the constant-drift LRT: the scores are two equal-variance
/// Gaussians separated by 2m, so `AUC = Phi(sqrt(2) m/v)`.
pub fn bm_auc(pair: &ModelPair, t_span: f64) -> Result<f64> {
    match bm_closed_form(pair, t_span) {
        Ok(cf) => Ok(normal_cdf(std::f64::consts::SQRT_2 * cf.separation())),
        Err(Error::InvalidParameter { name, .. }) if name == "pair" => Ok(0.5),
        Err(e) => Err(e),
    }
}

/// Draw one exact OU path on the observed grid: standard normal start and
/// transitions `X_{l+1} = e^{theta dt} X_l + sqrt(var_dt) xi`.
pub fn sample_exact_ou_path(
    spec: &OrnsteinUhlenbeck,
    config: &SimConfig,
    stream: &mut rand_pcg::Pcg64Mcg,
) -> TimeSeriesPath {
    let d = spec.d;
    let decay = (spec.rate * config.dt).exp();
    let step_std = spec.transition_variance(config.dt).sqrt();
    let mut times = Vec::with_capacity(config.observations + 1);
    let mut states = Vec::with_capacity((config.observations + 1) * d);
    let mut x: Vec<f64> = (0..d).map(|_| stream.sample(StandardNormal)).collect();
    times.push(0.0);
    states.extend_from_slice(&x);
    for l in 0..config.observations {
        for xi in x.iter_mut() {
            let z: f64 = stream.sample(StandardNormal);
            *xi = decay * *xi + step_std * z;
        }
        times.push((l + 1) as f64 * config.dt);
        states.extend_from_slice(&x);
    }
    TimeSeriesPath::new(times, states, d, GridKind::Observed).expect("valid grid")
}

/// Exact log-likelihood-ratio scores of `n` freshly sampled OU paths per
/// class, using exact transition sampling. Per-sample streams keep the
/// draw reproducible under any thread count.
pub fn ou_montecarlo_scores(
    pair: &ModelPair,
    config: &SimConfig,
    n: usize,
    seed: u64,
) -> Result<[Vec<f64>; 2]> {
    if pair.family() != Family::Ou {
        return Err(Error::FamilyMismatch {
            expected: Family::Ou.id().into(),
            got: pair.family().id().into(),
        });
    }
    if n < 100 {
        return Err(Error::param(
            "n",
            format!("need at least 100 samples, got {n}"),
        ));
    }
    let mut out = [Vec::new(), Vec::new()];
    for class in 0..2u8 {
        let spec = pair
            .spec(class)
            .as_any()
            .downcast_ref::<OrnsteinUhlenbeck>()
            .expect("ou family");
        out[class as usize] = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut stream =
                    rng::stream(seed, &[purpose::OU_MONTE_CARLO, class as u64, i as u64]);
                let path = sample_exact_ou_path(spec, config, &mut stream);
                loglik_ratio_exact_ou(&path, pair).expect("ou score")
            })
            .collect();
    }
    Ok(out)
}

/// Threshold pre-computed per-class scores at c_k.
pub fn rates_from_scores(scores: &[Vec<f64>; 2], k: f64) -> Result<RatePair> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::param("k", "threshold must lie in (0, 1)"));
    }
    let c = decision_threshold(k);
    let mut rates = [0.0f64; 2];
    let mut errs = [0.0f64; 2];
    for class in 0..2 {
        let n = scores[class].len();
        let rejected = scores[class].iter().filter(|s| **s > c).count();
        let rate = rejected as f64 / n as f64;
        rates[class] = rate;
        errs[class] = (rate * (1.0 - rate) / n as f64).sqrt();
    }
    Ok(RatePair {
        k,
        fnr: rates[0],
        tnr: rates[1],
        fnr_std_err: Some(errs[0]),
        tnr_std_err: Some(errs[1]),
    })
}

/// Monte-Carlo FNR/TNR of the exact OU likelihood-ratio classifier at one
/// threshold, with binomial standard errors.
pub fn ou_rates_montecarlo(
    pair: &ModelPair,
    config: &SimConfig,
    k: f64,
    n: usize,
    seed: u64,
) -> Result<RatePair> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::param("k", "threshold must lie in (0, 1)"));
    }
    let scores = ou_montecarlo_scores(pair, config, n, seed)?;
    rates_from_scores(&scores, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_model_pair, ParamMap};

    fn bm_pair(a0: f64, a1: f64, sigma: f64, d: usize) -> ModelPair {
        let mut o = ParamMap::new();
        o.insert("a0".into(), a0);
        o.insert("a1".into(), a1);
        o.insert("sigma".into(), sigma);
        o.insert("d".into(), d as f64);
        make_model_pair("constant-drift", &o).unwrap()
    }

    fn ou_pair(theta0: f64, theta1: f64, d: usize) -> ModelPair {
        let mut o = ParamMap::new();
        o.insert("theta0".into(), theta0);
        o.insert("theta1".into(), theta1);
        o.insert("d".into(), d as f64);
        make_model_pair("ou", &o).unwrap()
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(0.5) - 0.691462461274013).abs() < 1e-12);
        assert!((normal_cdf(2.0) - 0.977249868051821).abs() < 1e-12);
        assert!((normal_tail(0.5) - (1.0 - normal_cdf(0.5))).abs() < 1e-15);
    }

    #[test]
    fn bm_rates_at_even_threshold() {
        // m/v = 0.5 for the default pair over unit span.
        let pair = bm_pair(0.0, 1.0, 1.0, 1);
        let rates = bm_rates(&pair, 1.0, 0.5).unwrap();
        assert!((rates.fnr - 0.3085375387259869).abs() < 1e-12);
        assert!((rates.tnr - 0.6914624612740131).abs() < 1e-12);
    }

    #[test]
    fn extreme_threshold_drives_both_rates_to_zero() {
        let pair = bm_pair(0.0, 1.0, 1.0, 1);
        let rates = bm_rates(&pair, 1.0, 1.0 - 1e-12).unwrap();
        assert!(rates.fnr < 1e-6);
        assert!(rates.tnr < 1e-3);
        assert!(bm_rates(&pair, 1.0, 1.0).is_err());
        assert!(bm_rates(&bm_pair(1.0, 1.0, 1.0, 1), 1.0, 0.5).is_err());
    }

    #[test]
    fn symmetric_pair_rates_sum_to_one() {
        let pair = bm_pair(-0.7, 0.7, 1.0, 1);
        let rates = bm_rates(&pair, 1.0, 0.5).unwrap();
        assert!((rates.fnr + rates.tnr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_accuracy_matches_closed_form() {
        let pair = bm_pair(0.0, 1.0, 1.0, 1);
        let (acc, k_star) = bm_optimal_accuracy(&pair, 1.0).unwrap();
        assert!((acc - normal_cdf(0.5)).abs() < 1e-15);
        assert_eq!(k_star, 0.5);

        let degenerate = bm_pair(1.0, 1.0, 1.0, 1);
        assert_eq!(bm_optimal_accuracy(&degenerate, 1.0).unwrap().0, 0.5);
    }

    #[test]
    fn accuracy_increases_with_dimension() {
        let mut prev = 0.0;
        for d in [1usize, 2, 4, 8] {
            let (acc, _) = bm_optimal_accuracy(&bm_pair(0.0, 1.0, 1.0, d), 1.0).unwrap();
            let expected = normal_cdf(0.5 * (d as f64).sqrt());
            assert!((acc - expected).abs() < 1e-12);
            assert!(acc > prev);
            prev = acc;
        }
    }

    #[test]
    fn auc_reference_values() {
        let pair = bm_pair(0.0, 1.0, 1.0, 1);
        assert!(
            (bm_auc(&pair, 1.0).unwrap() - normal_cdf(std::f64::consts::FRAC_1_SQRT_2)).abs()
                < 1e-15
        );
        assert!((bm_auc(&pair, 1.0).unwrap() - 0.7602499389065233).abs() < 1e-12);
        assert_eq!(bm_auc(&bm_pair(2.0, 2.0, 1.0, 1), 1.0).unwrap(), 0.5);
        // m/v = 2 with a1 - a0 = 4, t = 1.
        let wide = bm_pair(0.0, 4.0, 1.0, 1);
        assert!(
            (bm_auc(&wide, 1.0).unwrap() - normal_cdf(2.0 * std::f64::consts::SQRT_2)).abs()
                < 1e-12
        );
        assert!((bm_auc(&wide, 1.0).unwrap() - 0.9976611325094764).abs() < 1e-10);
    }

    #[test]
    fn scale_invariance_of_acc_and_auc() {
        for c in [0.5, 2.0, 10.0] {
            let base = bm_pair(0.0, 1.0, 1.0, 1);
            let scaled = bm_pair(0.0, c, c, 1);
            assert!(
                (bm_optimal_accuracy(&base, 1.0).unwrap().0
                    - bm_optimal_accuracy(&scaled, 1.0).unwrap().0)
                    .abs()
                    < 1e-12
            );
            assert!((bm_auc(&base, 1.0).unwrap() - bm_auc(&scaled, 1.0).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn accuracy_curve_peaks_at_even_threshold() {
        let pair = bm_pair(0.0, 1.0, 1.0, 1);
        let acc_at = |k: f64| {
            let r = bm_rates(&pair, 1.0, k).unwrap();
            0.5 * (1.0 - r.fnr + r.tnr)
        };
        let peak = acc_at(0.5);
        let mut prev_fnr = f64::INFINITY;
        let mut prev_tnr = f64::INFINITY;
        for i in 1..100 {
            let k = i as f64 / 100.0;
            let r = bm_rates(&pair, 1.0, k).unwrap();
            assert!(r.fnr <= prev_fnr + 1e-15);
            assert!(r.tnr <= prev_tnr + 1e-15);
            prev_fnr = r.fnr;
            prev_tnr = r.tnr;
            assert!(acc_at(k) <= peak + 1e-12);
        }
    }

    #[test]
    fn ou_identical_pair_has_matching_rates() {
        let pair = ou_pair(-1.0, -1.0, 1);
        let cfg = SimConfig::new(0.01, 0.1, 2.0, 20, 2, 0).unwrap();
        let rates = ou_rates_montecarlo(&pair, &cfg, 0.5, 2000, 9).unwrap();
        let combined = (rates.fnr_std_err.unwrap().powi(2) + rates.tnr_std_err.unwrap().powi(2))
            .sqrt()
            .max(1e-12);
        // Identical laws: the two rejection probabilities coincide.
        assert!((rates.fnr - rates.tnr).abs() <= 3.0 * combined + 1e-9);
        assert!(ou_rates_montecarlo(&pair, &cfg, 0.5, 50, 9).is_err());
    }

    #[test]
    fn ou_rates_reproduce_across_seeds() {
        let pair = ou_pair(-1.0, -0.5, 1);
        let cfg = SimConfig::new(0.01, 0.1, 2.0, 20, 2, 0).unwrap();
        let a = ou_rates_montecarlo(&pair, &cfg, 0.5, 20_000, 1).unwrap();
        let b = ou_rates_montecarlo(&pair, &cfg, 0.5, 20_000, 2).unwrap();
        let comb_fnr = (a.fnr_std_err.unwrap().powi(2) + b.fnr_std_err.unwrap().powi(2)).sqrt();
        let comb_tnr = (a.tnr_std_err.unwrap().powi(2) + b.tnr_std_err.unwrap().powi(2)).sqrt();
        assert!((a.fnr - b.fnr).abs() <= 3.0 * comb_fnr);
        assert!((a.tnr - b.tnr).abs() <= 3.0 * comb_tnr);
    }

    #[test]
    fn doubling_samples_shrinks_standard_errors() {
        let pair = ou_pair(-1.0, -0.5, 1);
        let cfg = SimConfig::new(0.01, 0.1, 2.0, 20, 2, 0).unwrap();
        let small = ou_rates_montecarlo(&pair, &cfg, 0.5, 10_000, 4).unwrap();
        let big = ou_rates_montecarlo(&pair, &cfg, 0.5, 20_000, 4).unwrap();
        let ratio = small.fnr_std_err.unwrap() / big.fnr_std_err.unwrap();
        assert!((ratio - std::f64::consts::SQRT_2).abs() < 0.2 * std::f64::consts::SQRT_2);
    }
}

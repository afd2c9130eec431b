//! Ornstein-Uhlenbeck processes `dX = theta X dt + sigma dB` with scalar
//! rate theta applied to every coordinate.

use super::{
    fmt_f64, manifest_f64, require_positive, require_positive_int, Diffusion, Family,
    FamilyBuilder, ManifestParams, ModelPair, ParamMap,
};
use crate::error::{Error, Result};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct OrnsteinUhlenbeck {
    /// Mean-reversion rate theta (negative for a stable process).
    pub rate: f64,
    pub sigma: f64,
    pub d: usize,
}

impl OrnsteinUhlenbeck {
    pub fn new(rate: f64, sigma: f64, d: usize) -> Self {
        OrnsteinUhlenbeck { rate, sigma, d }
    }

    /// Variance of the exact transition over a gap `dt`:
    /// `sigma^2 (e^{2 theta dt} - 1) / (2 theta)`, with the removable
    /// singularity at theta = 0 evaluated as `sigma^2 dt`.
    pub fn transition_variance(&self, dt: f64) -> f64 {
        transition_variance(self.rate, self.sigma, dt)
    }
}

/// Stable evaluation of `sigma^2 (e^{2 theta dt} - 1) / (2 theta)`.
pub(crate) fn transition_variance(theta: f64, sigma: f64, dt: f64) -> f64 {
    if (theta * dt).abs() < 1e-8 {
        sigma * sigma * dt
    } else {
        sigma * sigma * f64::exp_m1(2.0 * theta * dt) / (2.0 * theta)
    }
}

impl Diffusion for OrnsteinUhlenbeck {
    fn family(&self) -> Family {
        Family::Ou
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn drift(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = self.rate * xi;
        }
    }

    fn diffusion_diag(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(self.sigma);
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![
            ("theta".to_string(), fmt_f64(self.rate)),
            ("sigma".to_string(), fmt_f64(self.sigma)),
        ]
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

pub(super) struct Builder;

impl FamilyBuilder for Builder {
    fn id(&self) -> &'static str {
        "ou"
    }

    fn override_keys(&self) -> &'static [&'static str] {
        &["theta0", "theta1", "sigma", "d"]
    }

    fn build_pair(&self, overrides: &ParamMap) -> Result<ModelPair> {
        let theta0 = overrides.get("theta0").copied().unwrap_or(-1.0);
        let theta1 = overrides.get("theta1").copied().unwrap_or(-0.5);
        for (name, v) in [("theta0", theta0), ("theta1", theta1)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        let sigma = require_positive("sigma", overrides.get("sigma").copied().unwrap_or(1.0))?;
        let d = require_positive_int("d", overrides.get("d").copied().unwrap_or(1.0))?;
        ModelPair::from_specs(
            Arc::new(OrnsteinUhlenbeck::new(theta0, sigma, d)),
            Arc::new(OrnsteinUhlenbeck::new(theta1, sigma, d)),
        )
    }

    fn spec_from_params(&self, d: usize, params: &ManifestParams) -> Result<Arc<dyn Diffusion>> {
        let rate = manifest_f64(params, "theta")?;
        let sigma = require_positive("sigma", manifest_f64(params, "sigma")?)?;
        Ok(Arc::new(OrnsteinUhlenbeck::new(rate, sigma, d)))
    }
}

//! Brownian motion with constant drift: `dX = theta dt + sigma dB` with
//! `theta = a * (1, ..., 1)`.

use super::{
    fmt_f64, manifest_f64, require_positive, require_positive_int, Diffusion, Family,
    FamilyBuilder, ManifestParams, ModelPair, ParamMap,
};
use crate::error::Result;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct ConstantDrift {
    /// Per-coordinate drift level a; theta = a * ones(d).
    pub a: f64,
    pub sigma: f64,
    pub d: usize,
}

impl ConstantDrift {
    pub fn new(a: f64, sigma: f64, d: usize) -> Self {
        ConstantDrift { a, sigma, d }
    }

    /// Drift vector theta = a * ones(d).
    pub fn theta(&self) -> Vec<f64> {
        vec![self.a; self.d]
    }
}

impl Diffusion for ConstantDrift {
    fn family(&self) -> Family {
        Family::ConstantDrift
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn drift(&self, _t: f64, _x: &[f64], out: &mut [f64]) {
        out.fill(self.a);
    }

    fn diffusion_diag(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(self.sigma);
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![
            ("a".to_string(), fmt_f64(self.a)),
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
        "constant-drift"
    }

    fn override_keys(&self) -> &'static [&'static str] {
        &["a0", "a1", "sigma", "d"]
    }

    fn build_pair(&self, overrides: &ParamMap) -> Result<ModelPair> {
        let a0 = overrides.get("a0").copied().unwrap_or(0.0);
        let a1 = overrides.get("a1").copied().unwrap_or(1.0);
        let sigma = require_positive("sigma", overrides.get("sigma").copied().unwrap_or(1.0))?;
        let d = require_positive_int("d", overrides.get("d").copied().unwrap_or(1.0))?;
        ModelPair::from_specs(
            Arc::new(ConstantDrift::new(a0, sigma, d)),
            Arc::new(ConstantDrift::new(a1, sigma, d)),
        )
    }

    fn spec_from_params(&self, d: usize, params: &ManifestParams) -> Result<Arc<dyn Diffusion>> {
        let a = manifest_f64(params, "a")?;
        let sigma = require_positive("sigma", manifest_f64(params, "sigma")?)?;
        Ok(Arc::new(ConstantDrift::new(a, sigma, d)))
    }
}

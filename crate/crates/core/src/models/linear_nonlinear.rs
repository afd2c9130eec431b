//! Multiplicative-noise processes `dX = b_theta(t, X) dt + sigma X dB` with
//! basis `b_theta(t, x) = theta_1 x + theta_2 cos(pi x) + theta_3 sin(pi t)`
//! applied per coordinate. Class 0 uses the linear drift
//! `(-pi) x + sin(pi t)`; class 1 the nonlinear `-0.1 x + cos(pi x)`.

use super::{
    fmt_f64, manifest_f64, manifest_f64_list, require_positive, require_positive_int, Diffusion,
    Family, FamilyBuilder, ManifestParams, ModelPair, ParamMap,
};
use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct LinearNonlinear {
    /// Coefficients of [x, cos(pi x), sin(pi t)].
    pub theta: [f64; 3],
    /// Scale of the multiplicative noise; the coefficient is `sigma * x`.
    pub sigma: f64,
    pub d: usize,
}

impl LinearNonlinear {
    pub fn new(theta: [f64; 3], sigma: f64, d: usize) -> Self {
        LinearNonlinear { theta, sigma, d }
    }
}

impl Diffusion for LinearNonlinear {
    fn family(&self) -> Family {
        Family::LinearNonlinear
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn drift(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let time_term = self.theta[2] * (PI * t).sin();
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = self.theta[0] * xi + self.theta[1] * (PI * xi).cos() + time_term;
        }
    }

    fn diffusion_diag(&self, x: &[f64], out: &mut [f64]) {
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = self.sigma * xi;
        }
    }

    fn params(&self) -> Vec<(String, String)> {
        let theta = self
            .theta
            .iter()
            .map(|c| fmt_f64(*c))
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("theta".to_string(), theta),
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
        "linear-nonlinear"
    }

    fn override_keys(&self) -> &'static [&'static str] {
        &["sigma", "d"]
    }

    fn build_pair(&self, overrides: &ParamMap) -> Result<ModelPair> {
        let sigma = require_positive("sigma", overrides.get("sigma").copied().unwrap_or(1.0))?;
        let d = require_positive_int("d", overrides.get("d").copied().unwrap_or(1.0))?;
        ModelPair::from_specs(
            Arc::new(LinearNonlinear::new([-PI, 0.0, 1.0], sigma, d)),
            Arc::new(LinearNonlinear::new([-0.1, 1.0, 0.0], sigma, d)),
        )
    }

    fn spec_from_params(&self, d: usize, params: &ManifestParams) -> Result<Arc<dyn Diffusion>> {
        let theta = manifest_f64_list(params, "theta")?;
        let theta: [f64; 3] = theta
            .try_into()
            .map_err(|_| Error::param("theta", "expected three coefficients"))?;
        let sigma = require_positive("sigma", manifest_f64(params, "sigma")?)?;
        Ok(Arc::new(LinearNonlinear::new(theta, sigma, d)))
    }
}

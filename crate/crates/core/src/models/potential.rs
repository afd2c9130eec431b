//! Gradient systems `dX = -grad V(X) dt + sigma dB` with a double-well
//! potential `V0(x) = 1/2 (|x|^2 - 1)^2` against the flat well
//! `V1(x) = 1/4 |x|^4`. Gradients are hard-coded analytically.

use super::{
    fmt_f64, manifest_f64, manifest_f64_list, require_positive, require_positive_int, Diffusion,
    Family, FamilyBuilder, ManifestParams, ModelPair, ParamMap,
};
use crate::error::{Error, Result};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// V(x) = 1/2 (|x|^2 - 1)^2, drift -2(|x|^2 - 1) x.
    DoubleWell,
    /// V(x) = 1/4 |x|^4, drift -|x|^2 x.
    Quartic,
}

impl PotentialKind {
    /// Coefficient vector in powers of |x| recorded in manifests. This is
    /// identification metadata matched on import, not the source of the
    /// drift; the drifts are hard-coded in [`Diffusion::drift`].
    pub fn recorded_coefficients(self) -> [f64; 5] {
        match self {
            PotentialKind::DoubleWell => [0.25, 0.0, -0.5, 0.0, 0.25],
            PotentialKind::Quartic => [0.0, 0.0, 0.0, 0.0, 0.25],
        }
    }
}

#[derive(Debug, Clone)]
pub struct PotentialGradient {
    pub kind: PotentialKind,
    pub sigma: f64,
    pub d: usize,
}

impl PotentialGradient {
    pub fn new(kind: PotentialKind, sigma: f64, d: usize) -> Self {
        PotentialGradient { kind, sigma, d }
    }
}

impl Diffusion for PotentialGradient {
    fn family(&self) -> Family {
        Family::PotentialGradient
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn drift(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let factor = match self.kind {
            PotentialKind::DoubleWell => -2.0 * (r2 - 1.0),
            PotentialKind::Quartic => -r2,
        };
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = factor * xi;
        }
    }

    fn diffusion_diag(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(self.sigma);
    }

    fn params(&self) -> Vec<(String, String)> {
        let coeffs = self
            .kind
            .recorded_coefficients()
            .iter()
            .map(|c| fmt_f64(*c))
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("theta".to_string(), coeffs),
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
        "potential-gradient"
    }

    fn override_keys(&self) -> &'static [&'static str] {
        &["sigma", "d"]
    }

    fn build_pair(&self, overrides: &ParamMap) -> Result<ModelPair> {
        let sigma = require_positive("sigma", overrides.get("sigma").copied().unwrap_or(1.0))?;
        let d = require_positive_int("d", overrides.get("d").copied().unwrap_or(1.0))?;
        ModelPair::from_specs(
            Arc::new(PotentialGradient::new(PotentialKind::DoubleWell, sigma, d)),
            Arc::new(PotentialGradient::new(PotentialKind::Quartic, sigma, d)),
        )
    }

    fn spec_from_params(&self, d: usize, params: &ManifestParams) -> Result<Arc<dyn Diffusion>> {
        let coeffs = manifest_f64_list(params, "theta")?;
        let kind = [PotentialKind::DoubleWell, PotentialKind::Quartic]
            .into_iter()
            .find(|k| k.recorded_coefficients().as_slice() == coeffs.as_slice())
            .ok_or_else(|| Error::param("theta", "unknown potential coefficients"))?;
        let sigma = require_positive("sigma", manifest_f64(params, "sigma")?)?;
        Ok(Arc::new(PotentialGradient::new(kind, sigma, d)))
    }
}

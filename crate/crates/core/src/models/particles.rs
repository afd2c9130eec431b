//! Systems of N interacting agents in R^{d1} driven by a piecewise-constant
//! pairwise kernel:
//! `dX^j = (1/N) sum_i phi(||X^j - X^i||) (X^j - X^i) dt + sigma dB^j`.
//!
//! The `(X^j - X^i)` factor follows the source convention; `ips_sign`
//! flips it to the attractive `(X^i - X^j)`.

use super::{
    fmt_f64, manifest_f64, manifest_value, require_positive, require_positive_int, Diffusion,
    Family, FamilyBuilder, ManifestParams, ModelPair, ParamMap,
};
use crate::error::{Error, Result};
use std::sync::Arc;

/// Piecewise-constant interaction kernel on [0, inf): level `levels[k]` on
/// `[breaks[k-1], breaks[k])` with right-open intervals, and zero from the
/// last breakpoint on.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel {
    breaks: Vec<f64>,
    levels: Vec<f64>,
}

impl StepKernel {
    /// `levels.len() == breaks.len() + 1`; breaks strictly increasing and
    /// positive; the last level must be zero so the kernel has compact
    /// support.
    pub fn new(breaks: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        if levels.len() != breaks.len() + 1 {
            return Err(Error::param(
                "kernel",
                format!(
                    "need one more level than breakpoints, got {} levels for {} breaks",
                    levels.len(),
                    breaks.len()
                ),
            ));
        }
        if !breaks.windows(2).all(|w| w[0] < w[1]) || breaks.iter().any(|b| b.is_nan() || *b <= 0.0)
        {
            return Err(Error::param(
                "kernel",
                "breakpoints must be increasing and positive",
            ));
        }
        if levels.iter().any(|l| !l.is_finite()) {
            return Err(Error::param("kernel", "levels must be finite"));
        }
        if *levels.last().unwrap() != 0.0 {
            return Err(Error::param(
                "kernel",
                "kernel must vanish beyond its last breakpoint",
            ));
        }
        Ok(StepKernel { breaks, levels })
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::param("r", format!("must be nonnegative, got {r}")));
        }
        Ok(self.eval_unchecked(r))
    }

    #[inline]
    fn eval_unchecked(&self, r: f64) -> f64 {
        for (k, b) in self.breaks.iter().enumerate() {
            if r < *b {
                return self.levels[k];
            }
        }
        *self.levels.last().unwrap()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    fn describe(&self) -> String {
        format!(
            "breaks={};levels={}",
            self.breaks
                .iter()
                .map(|v| fmt_f64(*v))
                .collect::<Vec<_>>()
                .join(","),
            self.levels
                .iter()
                .map(|v| fmt_f64(*v))
                .collect::<Vec<_>>()
                .join(","),
        )
    }
}

#[derive(Debug, Clone)]
pub struct InteractingParticles {
    pub n_agents: usize,
    pub agent_dim: usize,
    pub kernel: StepKernel,
    pub sigma: f64,
    /// True flips the interaction factor to `(X^i - X^j)`.
    pub flip_sign: bool,
}

impl InteractingParticles {
    pub fn new(
        n_agents: usize,
        agent_dim: usize,
        kernel: StepKernel,
        sigma: f64,
        flip_sign: bool,
    ) -> Self {
        InteractingParticles {
            n_agents,
            agent_dim,
            kernel,
            sigma,
            flip_sign,
        }
    }

    /// The shipped heterophilious kernel (class 0): strong between far
    /// neighbors.
    pub fn kernel_far() -> StepKernel {
        StepKernel::new(vec![2f64.sqrt(), 2.0], vec![0.2, 2.0, 0.0]).unwrap()
    }

    /// The shipped homophilious kernel (class 1): strong between close
    /// neighbors.
    pub fn kernel_close() -> StepKernel {
        StepKernel::new(vec![2f64.sqrt(), 2.0], vec![2.0, 0.2, 0.0]).unwrap()
    }
}

impl Diffusion for InteractingParticles {
    fn family(&self) -> Family {
        Family::InteractingParticles
    }

    fn dim(&self) -> usize {
        self.n_agents * self.agent_dim
    }

    fn drift(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        let n = self.n_agents;
        let d1 = self.agent_dim;
        let scale = 1.0 / n as f64;
        let orientation = if self.flip_sign { -1.0 } else { 1.0 };
        out.fill(0.0);
        for j in 0..n {
            let xj = &x[j * d1..(j + 1) * d1];
            let oj = &mut out[j * d1..(j + 1) * d1];
            for i in 0..n {
                if i == j {
                    continue;
                }
                let xi = &x[i * d1..(i + 1) * d1];
                let mut r2 = 0.0;
                for k in 0..d1 {
                    let diff = xj[k] - xi[k];
                    r2 += diff * diff;
                }
                let w = orientation * scale * self.kernel.eval_unchecked(r2.sqrt());
                for k in 0..d1 {
                    oj[k] += w * (xj[k] - xi[k]);
                }
            }
        }
    }

    fn diffusion_diag(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(self.sigma);
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![
            ("n_agents".to_string(), self.n_agents.to_string()),
            ("d1".to_string(), self.agent_dim.to_string()),
            ("kernel".to_string(), self.kernel.describe()),
            ("sigma".to_string(), fmt_f64(self.sigma)),
            ("ips_sign".to_string(), u8::from(self.flip_sign).to_string()),
        ]
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

pub(super) struct Builder;

impl FamilyBuilder for Builder {
    fn id(&self) -> &'static str {
        "interacting-particles"
    }

    fn override_keys(&self) -> &'static [&'static str] {
        &["N", "d1", "sigma", "ips_sign"]
    }

    fn build_pair(&self, overrides: &ParamMap) -> Result<ModelPair> {
        let n = require_positive_int("N", overrides.get("N").copied().unwrap_or(3.0))?;
        let d1 = require_positive_int("d1", overrides.get("d1").copied().unwrap_or(2.0))?;
        let sigma = require_positive("sigma", overrides.get("sigma").copied().unwrap_or(1.0))?;
        let flip = match overrides.get("ips_sign").copied().unwrap_or(0.0) {
            0.0 => false,
            1.0 => true,
            v => return Err(Error::param("ips_sign", format!("must be 0 or 1, got {v}"))),
        };
        ModelPair::from_specs(
            Arc::new(InteractingParticles::new(
                n,
                d1,
                InteractingParticles::kernel_far(),
                sigma,
                flip,
            )),
            Arc::new(InteractingParticles::new(
                n,
                d1,
                InteractingParticles::kernel_close(),
                sigma,
                flip,
            )),
        )
    }

    fn spec_from_params(&self, d: usize, params: &ManifestParams) -> Result<Arc<dyn Diffusion>> {
        let n = manifest_f64(params, "n_agents")? as usize;
        let d1 = manifest_f64(params, "d1")? as usize;
        if n == 0 || d1 == 0 || n * d1 != d {
            return Err(Error::param(
                "n_agents",
                format!("{n} agents of dimension {d1} do not fill d = {d}"),
            ));
        }
        let kernel = parse_kernel(manifest_value(params, "kernel")?)?;
        let sigma = require_positive("sigma", manifest_f64(params, "sigma")?)?;
        let flip = manifest_value(params, "ips_sign")? == "1";
        Ok(Arc::new(InteractingParticles::new(
            n, d1, kernel, sigma, flip,
        )))
    }
}

fn parse_kernel(raw: &str) -> Result<StepKernel> {
    let bad = || Error::param("kernel", format!("malformed kernel `{raw}`"));
    let mut breaks = None;
    let mut levels = None;
    for part in raw.split(';') {
        let (key, values) = part.split_once('=').ok_or_else(bad)?;
        let parsed: Vec<f64> = values
            .split(',')
            .map(|v| v.parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match key {
            "breaks" => breaks = Some(parsed),
            "levels" => levels = Some(parsed),
            _ => return Err(bad()),
        }
    }
    StepKernel::new(breaks.ok_or_else(bad)?, levels.ok_or_else(bad)?)
}

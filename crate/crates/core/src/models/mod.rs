//! Diffusion model families.
//!
//! Each family implements [`Diffusion`] (drift and diffusion coefficient of
//! an SDE `dX = b_theta(t, X) dt + sigma(X) dB`) and registers a
//! [`FamilyBuilder`] under its CLI name. A classification problem is a
//! [`ModelPair`]: two parameterizations of one family that share the
//! diffusion coefficient and differ only in drift, so the likelihood ratio
//! between their path laws exists.

mod constant_drift;
mod linear_nonlinear;
mod ou;
mod particles;
mod potential;

pub use constant_drift::ConstantDrift;
pub use linear_nonlinear::LinearNonlinear;
pub use ou::OrnsteinUhlenbeck;
pub use particles::{InteractingParticles, StepKernel};
pub use potential::{PotentialGradient, PotentialKind};

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Identifier of a shipped model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    ConstantDrift,
    PotentialGradient,
    LinearNonlinear,
    Ou,
    InteractingParticles,
}

impl Family {
    pub fn id(self) -> &'static str {
        match self {
            Family::ConstantDrift => "constant-drift",
            Family::PotentialGradient => "potential-gradient",
            Family::LinearNonlinear => "linear-nonlinear",
            Family::Ou => "ou",
            Family::InteractingParticles => "interacting-particles",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant-drift" => Ok(Family::ConstantDrift),
            "potential-gradient" => Ok(Family::PotentialGradient),
            "linear-nonlinear" => Ok(Family::LinearNonlinear),
            "ou" => Ok(Family::Ou),
            "interacting-particles" => Ok(Family::InteractingParticles),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// Parameter overrides accepted by [`make_model_pair`], keyed by the names
/// listed in each family's `override_keys`.
pub type ParamMap = BTreeMap<String, f64>;

/// One parameterized diffusion: drift, diffusion coefficient, and the
/// metadata recorded in dataset manifests.
///
/// All implementations are pure functions of their inputs and are safe to
/// call concurrently.
pub trait Diffusion: Send + Sync {
    fn family(&self) -> Family;

    /// State dimension d.
    fn dim(&self) -> usize;

    /// Drift `b_theta(t, x)` written into `out`. Time-independent families
    /// ignore `t`.
    fn drift(&self, t: f64, x: &[f64], out: &mut [f64]);

    /// Diagonal of the diffusion coefficient `sigma(x)`. Every shipped
    /// family has a diagonal coefficient.
    fn diffusion_diag(&self, x: &[f64], out: &mut [f64]);

    /// Parameters echoed into manifests, in a stable order.
    fn params(&self) -> Vec<(String, String)>;

    fn as_any(&self) -> &dyn std::any::Any;
}

fn check_dim(model: &dyn Diffusion, x: &[f64]) -> Result<()> {
    if x.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Drift with dimension checking; the trait method itself is the hot path
/// and assumes validated lengths.
pub fn drift(model: &dyn Diffusion, t: f64, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(model, x)?;
    let mut out = vec![0.0; model.dim()];
    model.drift(t, x, &mut out);
    Ok(out)
}

/// Full d-by-d diffusion coefficient matrix `sigma(x)`, row major.
pub fn diffusion_coeff(model: &dyn Diffusion, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(model, x)?;
    let d = model.dim();
    let mut diag = vec![0.0; d];
    model.diffusion_diag(x, &mut diag);
    let mut mat = vec![0.0; d * d];
    for (i, &v) in diag.iter().enumerate() {
        mat[i * d + i] = v;
    }
    Ok(mat)
}

/// Covariance `Sigma(x) = sigma sigma^T (x)`, row major.
pub fn covariance(model: &dyn Diffusion, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(model, x)?;
    let d = model.dim();
    let mut diag = vec![0.0; d];
    model.diffusion_diag(x, &mut diag);
    let mut mat = vec![0.0; d * d];
    for (i, &v) in diag.iter().enumerate() {
        mat[i * d + i] = v * v;
    }
    Ok(mat)
}

/// A pair of same-family diffusions sharing the diffusion coefficient.
/// Class 0 paths are generated from `spec0`, class 1 from `spec1`.
#[derive(Clone)]
pub struct ModelPair {
    spec0: Arc<dyn Diffusion>,
    spec1: Arc<dyn Diffusion>,
}

impl ModelPair {
    /// Pair two specs. They must agree on family and dimension; sharing the
    /// diffusion coefficient is the constructor's contract and is enforced
    /// per family by the builders.
    pub fn from_specs(spec0: Arc<dyn Diffusion>, spec1: Arc<dyn Diffusion>) -> Result<Self> {
        if spec0.family() != spec1.family() {
            return Err(Error::param(
                "family",
                format!("pair mixes {} and {}", spec0.family(), spec1.family()),
            ));
        }
        if spec0.dim() != spec1.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec0.dim(),
                got: spec1.dim(),
            });
        }
        Ok(ModelPair { spec0, spec1 })
    }

    pub fn spec0(&self) -> &dyn Diffusion {
        self.spec0.as_ref()
    }

    pub fn spec1(&self) -> &dyn Diffusion {
        self.spec1.as_ref()
    }

    pub fn spec(&self, class: u8) -> &dyn Diffusion {
        if class == 0 {
            self.spec0()
        } else {
            self.spec1()
        }
    }

    pub fn family(&self) -> Family {
        self.spec0.family()
    }

    pub fn dim(&self) -> usize {
        self.spec0.dim()
    }

    /// The pair with classes exchanged.
    pub fn swapped(&self) -> ModelPair {
        ModelPair {
            spec0: Arc::clone(&self.spec1),
            spec1: Arc::clone(&self.spec0),
        }
    }

    /// Manifest lines: family, dimension, and both parameter sets.
    pub fn manifest_params(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("family".to_string(), self.family().id().to_string()),
            ("d".to_string(), self.dim().to_string()),
        ];
        for (k, v) in self.spec0.params() {
            out.push((format!("model0.{k}"), v));
        }
        for (k, v) in self.spec1.params() {
            out.push((format!("model1.{k}"), v));
        }
        out
    }

    pub fn downcast_pair<T: 'static>(&self) -> Option<(&T, &T)> {
        match (
            self.spec0.as_any().downcast_ref::<T>(),
            self.spec1.as_any().downcast_ref::<T>(),
        ) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }
}

/// Per-model parameter lines read back from a manifest.
pub type ManifestParams = BTreeMap<String, String>;

/// Constructs a family's default [`ModelPair`] with overrides applied.
pub trait FamilyBuilder: Sync {
    fn id(&self) -> &'static str;

    /// Override keys this family recognizes.
    fn override_keys(&self) -> &'static [&'static str];

    fn build_pair(&self, overrides: &ParamMap) -> Result<ModelPair>;

    /// Rebuild one spec from its manifest lines (the inverse of
    /// [`Diffusion::params`]).
    fn spec_from_params(&self, d: usize, params: &ManifestParams) -> Result<Arc<dyn Diffusion>>;
}

pub(crate) fn manifest_value<'a>(params: &'a ManifestParams, key: &str) -> Result<&'a str> {
    params
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::param(key, "missing from manifest"))
}

pub(crate) fn manifest_f64(params: &ManifestParams, key: &str) -> Result<f64> {
    let raw = manifest_value(params, key)?;
    raw.parse::<f64>()
        .map_err(|_| Error::param(key, format!("not a number: {raw}")))
}

pub(crate) fn manifest_f64_list(params: &ManifestParams, key: &str) -> Result<Vec<f64>> {
    let raw = manifest_value(params, key)?;
    raw.split(',')
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::param(key, format!("not a number list: {raw}")))
        })
        .collect()
}

/// Rebuild a [`ModelPair`] from manifest lines as produced by
/// [`ModelPair::manifest_params`].
pub fn pair_from_manifest(entries: &[(String, String)]) -> Result<ModelPair> {
    let mut family = None;
    let mut d = None;
    let mut model0 = ManifestParams::new();
    let mut model1 = ManifestParams::new();
    for (k, v) in entries {
        if k == "family" {
            family = Some(v.clone());
        } else if k == "d" {
            d = Some(
                v.parse::<usize>()
                    .map_err(|_| Error::param("d", v.clone()))?,
            );
        } else if let Some(rest) = k.strip_prefix("model0.") {
            model0.insert(rest.to_string(), v.clone());
        } else if let Some(rest) = k.strip_prefix("model1.") {
            model1.insert(rest.to_string(), v.clone());
        }
    }
    let family = family.ok_or_else(|| Error::param("family", "missing from manifest"))?;
    let d = d.ok_or_else(|| Error::param("d", "missing from manifest"))?;
    let builder = lookup(&family)?;
    ModelPair::from_specs(
        builder.spec_from_params(d, &model0)?,
        builder.spec_from_params(d, &model1)?,
    )
}

/// All registered families, in registry order.
pub fn registry() -> &'static [&'static dyn FamilyBuilder] {
    static REGISTRY: [&dyn FamilyBuilder; 5] = [
        &constant_drift::Builder,
        &potential::Builder,
        &linear_nonlinear::Builder,
        &ou::Builder,
        &particles::Builder,
    ];
    &REGISTRY
}

pub fn lookup(family: &str) -> Result<&'static dyn FamilyBuilder> {
    registry()
        .iter()
        .copied()
        .find(|b| b.id() == family)
        .ok_or_else(|| Error::UnknownFamily(family.to_string()))
}

/// Build a family's default pair with `overrides` applied. Unknown keys and
/// values violating the family invariants are rejected.
pub fn make_model_pair(family: &str, overrides: &ParamMap) -> Result<ModelPair> {
    let builder = lookup(family)?;
    for key in overrides.keys() {
        if !builder.override_keys().contains(&key.as_str()) {
            return Err(Error::UnknownOverride(key.clone()));
        }
    }
    builder.build_pair(overrides)
}

pub(crate) fn require_positive(name: &str, value: f64) -> Result<f64> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::param(name, format!("must be positive, got {value}")));
    }
    Ok(value)
}

pub(crate) fn require_positive_int(name: &str, value: f64) -> Result<usize> {
    if !(value.is_finite() && value > 0.0 && value.fract() == 0.0) {
        return Err(Error::param(
            name,
            format!("must be a positive integer, got {value}"),
        ));
    }
    Ok(value as usize)
}

pub(crate) fn fmt_f64(v: f64) -> String {
    // Shortest representation that round-trips.
    format!("{v}")
}

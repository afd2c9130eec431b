//! Euler-Maruyama simulation, downsampling, and dataset generation.

use crate::error::{Error, Result};
use crate::models::{Diffusion, ModelPair};
use crate::rng::{self, purpose};
use rand::RngExt;
use rand_distr::StandardNormal;
use rand_pcg::Pcg64Mcg;
use rayon::prelude::*;

/// Generation settings for one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Fine Euler-Maruyama step.
    pub delta: f64,
    /// Observation gap; must be an integer multiple of `delta`.
    pub dt: f64,
    /// Horizon t_L = observations * dt.
    pub t_span: f64,
    /// Number of observation steps L (the observed grid has L + 1 points).
    pub observations: usize,
    /// Total number of paths M, balanced between the classes.
    pub paths: usize,
    pub master_seed: u64,
}

impl SimConfig {
    pub fn new(
        delta: f64,
        dt: f64,
        t_span: f64,
        observations: usize,
        paths: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let cfg = SimConfig {
            delta,
            dt,
            t_span,
            observations,
            paths,
            master_seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("delta", self.delta),
            ("dt", self.dt),
            ("t_span", self.t_span),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        let stride = (self.dt / self.delta).round();
        if stride < 1.0 || (self.dt - stride * self.delta).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "dt {} is not an integer multiple of delta {}",
                self.dt, self.delta
            )));
        }
        if self.observations == 0 {
            return Err(Error::InvalidConfig("observations must be positive".into()));
        }
        if (self.observations as f64 * self.dt - self.t_span).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "observations * dt = {} does not reach t_span {}",
                self.observations as f64 * self.dt,
                self.t_span
            )));
        }
        if self.paths == 0 || !self.paths.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "paths must be even and positive, got {}",
                self.paths
            )));
        }
        Ok(())
    }

    /// Fine steps per observation gap.
    pub fn stride(&self) -> usize {
        (self.dt / self.delta).round() as usize
    }

    /// Total fine steps over the horizon.
    pub fn fine_steps(&self) -> usize {
        self.observations * self.stride()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Fine,
    Observed,
}

/// One sampled trajectory on an ascending time grid starting at t_0 = 0.
/// States are stored row major, one row of length `dim` per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPath {
    times: Vec<f64>,
    states: Vec<f64>,
    dim: usize,
    grid: GridKind,
}

impl TimeSeriesPath {
    pub fn new(times: Vec<f64>, states: Vec<f64>, dim: usize, grid: GridKind) -> Result<Self> {
        if dim == 0 || times.is_empty() || states.len() != times.len() * dim {
            return Err(Error::InvalidConfig(format!(
                "path shape mismatch: {} times, {} states, dim {}",
                times.len(),
                states.len(),
                dim
            )));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig(
                "time grid must be strictly increasing".into(),
            ));
        }
        Ok(TimeSeriesPath {
            times,
            states,
            dim,
            grid,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of grid points (steps + 1).
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> GridKind {
        self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn state(&self, idx: usize) -> &[f64] {
        &self.states[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Contiguous sub-path over grid points `start..=end`.
    pub fn segment(&self, start: usize, end: usize) -> Result<TimeSeriesPath> {
        if start >= end || end >= self.len() {
            return Err(Error::InvalidConfig(format!(
                "segment {start}..={end} out of range for length {}",
                self.len()
            )));
        }
        TimeSeriesPath::new(
            self.times[start..=end].to_vec(),
            self.states[start * self.dim..(end + 1) * self.dim].to_vec(),
            self.dim,
            self.grid,
        )
    }
}

/// Balanced labeled dataset on the observed grid. Class 0 paths come first,
/// then class 1. Fine paths are retained when requested at generation.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub paths: Vec<TimeSeriesPath>,
    pub labels: Vec<u8>,
    pub fine: Option<Vec<TimeSeriesPath>>,
    pub config: SimConfig,
    /// Generation record: the model pair's family and parameters.
    pub params: Vec<(String, String)>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.paths.first().map_or(0, |p| p.dim())
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.labels.iter().filter(|l| **l == 1).count();
        (self.labels.len() - ones, ones)
    }
}

/// Digest identifying the observed content of a dataset: labels, time
/// grids, and states hashed in path order as little-endian doubles. Fine
/// paths are not covered, so datasets that differ only in `keep_fine`
/// share an identity.
pub fn content_digest(dataset: &Dataset) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update((dataset.len() as u64).to_le_bytes());
    for (path, label) in dataset.paths.iter().zip(&dataset.labels) {
        hasher.update([*label]);
        hasher.update((path.dim() as u64).to_le_bytes());
        for t in path.times() {
            hasher.update(t.to_le_bytes());
        }
        for s in path.states() {
            hasher.update(s.to_le_bytes());
        }
    }
    hex::encode(hasher.finalize())
}

/// Simulate one fine-grid path with left-endpoint Euler-Maruyama:
/// `X_{k+1} = X_k + b(t_k, X_k) delta + sigma(X_k) sqrt(delta) Z_k`.
///
/// A non-finite state aborts with the failing step; blow-up on the shipped
/// horizons signals a configuration bug, not a numerical event to clamp.
pub fn simulate_fine_path(
    spec: &dyn Diffusion,
    x0: &[f64],
    config: &SimConfig,
    stream: &mut Pcg64Mcg,
) -> Result<TimeSeriesPath> {
    config.validate()?;
    let d = spec.dim();
    if x0.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x0.len(),
        });
    }
    let steps = config.fine_steps();
    let sqrt_delta = config.delta.sqrt();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity((steps + 1) * d);
    let mut x = x0.to_vec();
    let mut b = vec![0.0; d];
    let mut s = vec![0.0; d];
    times.push(0.0);
    states.extend_from_slice(&x);
    for k in 0..steps {
        let t = k as f64 * config.delta;
        spec.drift(t, &x, &mut b);
        spec.diffusion_diag(&x, &mut s);
        for i in 0..d {
            let z: f64 = stream.sample(StandardNormal);
            x[i] += b[i] * config.delta + s[i] * sqrt_delta * z;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState {
                family: spec.family().id().to_string(),
                class: 0,
                path: 0,
                step: k + 1,
            });
        }
        times.push((k + 1) as f64 * config.delta);
        states.extend_from_slice(&x);
    }
    TimeSeriesPath::new(times, states, d, GridKind::Fine)
}

/// Keep every `stride`-th grid point of `fine`, both endpoints included.
/// Entries are bitwise copies.
pub fn downsample(fine: &TimeSeriesPath, stride: usize) -> Result<TimeSeriesPath> {
    let steps = fine.len() - 1;
    if stride == 0 || !steps.is_multiple_of(stride) {
        return Err(Error::BadStride {
            stride,
            len: fine.len(),
        });
    }
    let d = fine.dim();
    let kept = steps / stride + 1;
    let mut times = Vec::with_capacity(kept);
    let mut states = Vec::with_capacity(kept * d);
    for k in (0..fine.len()).step_by(stride) {
        times.push(fine.times[k]);
        states.extend_from_slice(fine.state(k));
    }
    TimeSeriesPath::new(times, states, d, GridKind::Observed)
}

/// Generate a balanced labeled dataset: M/2 paths per class, initial
/// conditions standard normal, per-path random streams addressed by
/// `(master seed, class, path index)` so the result does not depend on
/// worker count or scheduling.
pub fn generate_dataset(pair: &ModelPair, config: &SimConfig, keep_fine: bool) -> Result<Dataset> {
    config.validate()?;
    let per_class = config.paths / 2;
    let d = pair.dim();
    let stride = config.stride();

    let results: Vec<Result<(TimeSeriesPath, Option<TimeSeriesPath>)>> = (0..config.paths)
        .into_par_iter()
        .map(|global_idx| {
            let class = u8::from(global_idx >= per_class);
            let index = (global_idx % per_class) as u64;
            let mut stream = rng::stream(
                config.master_seed,
                &[purpose::SIM_PATH, class as u64, index],
            );
            let x0: Vec<f64> = (0..d).map(|_| stream.sample(StandardNormal)).collect();
            let fine = simulate_fine_path(pair.spec(class), &x0, config, &mut stream).map_err(
                |e| match e {
                    Error::NonFiniteState { family, step, .. } => Error::NonFiniteState {
                        family,
                        class,
                        path: index as usize,
                        step,
                    },
                    other => other,
                },
            )?;
            let observed = downsample(&fine, stride)?;
            Ok((observed, keep_fine.then_some(fine)))
        })
        .collect();

    let mut paths = Vec::with_capacity(config.paths);
    let mut fine = keep_fine.then(|| Vec::with_capacity(config.paths));
    let mut labels = Vec::with_capacity(config.paths);
    for (global_idx, r) in results.into_iter().enumerate() {
        let (observed, fine_path) = r?;
        paths.push(observed);
        if let (Some(store), Some(f)) = (fine.as_mut(), fine_path) {
            store.push(f);
        }
        labels.push(u8::from(global_idx >= per_class));
    }
    Ok(Dataset {
        paths,
        labels,
        fine,
        config: config.clone(),
        params: pair.manifest_params(),
    })
}

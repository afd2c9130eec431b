//! Random convolutional kernel baseline: random dilated kernels produce
//! (ppv, max) features per series, classified by a closed-form ridge
//! regression with cross-validated regularization strength.
//!
//! Multivariate series are handled by assigning each kernel one channel at
//! draw time; the time grid is an extra channel eligible for assignment.

use crate::error::{Error, Result};
use crate::rng::{self, purpose};
use crate::simulate::Dataset;
use rand::RngExt;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Candidate kernel lengths.
const KERNEL_LENGTHS: [usize; 3] = [7, 9, 11];

/// Columns with training standard deviation at or below this are dropped.
const VARIANCE_EPS: f64 = 1e-12;

/// The default regularization grid: 10^-3 .. 10^3, seven points.
pub fn default_lambda_grid() -> Vec<f64> {
    (-3..=3).map(|e| 10f64.powi(e)).collect()
}

#[derive(Debug, Clone)]
pub struct RocketKernel {
    /// Series length this kernel was drawn for.
    pub l_input: usize,
    pub length: usize,
    /// Mean-centered N(0,1) weights.
    pub weights: Vec<f64>,
    /// Uniform on [-1, 1].
    pub bias: f64,
    /// floor(2^x) with x ~ N(0, A), clipped so the span fits `l_input`.
    pub dilation: usize,
    pub padding: bool,
    /// Channel this kernel reads (state coordinates first, then the time
    /// grid as the last channel).
    pub channel: usize,
}

impl RocketKernel {
    /// Tap span in the input: `(length - 1) * dilation + 1`.
    pub fn span(&self) -> usize {
        (self.length - 1) * self.dilation + 1
    }
}

/// Draw `count` kernels for series of length `l_input` with `n_channels`
/// channels. Deterministic in `seed`.
///
/// Lengths are drawn uniformly from the candidates that fit the input
/// without padding. Inputs shorter than every candidate fall back to
/// length-7 kernels with padding forced on and unit dilation, so the
/// shipped short-series settings stay classifiable.
pub fn sample_kernels(
    count: usize,
    l_input: usize,
    n_channels: usize,
    seed: u64,
) -> Result<Vec<RocketKernel>> {
    if l_input < 2 {
        return Err(Error::param(
            "l_input",
            format!("series of length {l_input} are too short"),
        ));
    }
    if n_channels == 0 {
        return Err(Error::param("n_channels", "must be positive"));
    }
    let admissible: Vec<usize> = KERNEL_LENGTHS
        .iter()
        .copied()
        .filter(|l| *l <= l_input)
        .collect();
    let padded_fallback = admissible.is_empty();
    let admissible = if padded_fallback {
        vec![KERNEL_LENGTHS[0]]
    } else {
        admissible
    };
    let mut stream = rng::stream(seed, &[purpose::ROCKET_KERNELS]);
    let mut kernels = Vec::with_capacity(count);
    for _ in 0..count {
        let length = admissible[stream.random_range(0..admissible.len())];
        let mut weights: Vec<f64> = (0..length).map(|_| stream.sample(StandardNormal)).collect();
        let mean = weights.iter().sum::<f64>() / length as f64;
        for w in weights.iter_mut() {
            *w -= mean;
        }
        let bias = stream.random_range(-1.0..=1.0);
        let (dilation, padding) = if padded_fallback {
            (1, true)
        } else {
            let max_dilation = (l_input - 1) / (length - 1);
            let exponent_sd = ((l_input - 1) as f64 / (length - 1) as f64).log2().sqrt();
            let x: f64 = exponent_sd * stream.sample::<f64, _>(StandardNormal);
            let dilation = (2f64.powf(x).floor() as i64).clamp(1, max_dilation as i64) as usize;
            (dilation, stream.random_range(0..2u8) == 1)
        };
        let channel = stream.random_range(0..n_channels);
        kernels.push(RocketKernel {
            l_input,
            length,
            weights,
            bias,
            dilation,
            padding,
            channel,
        });
    }
    Ok(kernels)
}

/// Dilated convolution at stride 1 with optional symmetric zero padding.
/// Returns the fraction of strictly positive feature-map entries and the
/// maximal entry.
pub fn apply_kernel(kernel: &RocketKernel, series: &[f64]) -> Result<(f64, f64)> {
    if series.len() != kernel.l_input {
        return Err(Error::DimensionMismatch {
            expected: kernel.l_input,
            got: series.len(),
        });
    }
    let span = kernel.span();
    let pad = if kernel.padding { (span - 1) / 2 } else { 0 };
    if kernel.l_input + 2 * pad < span {
        return Err(Error::DimensionMismatch {
            expected: span,
            got: kernel.l_input,
        });
    }
    let out_len = kernel.l_input + 2 * pad - span + 1;
    let mut positive = 0usize;
    let mut max = f64::NEG_INFINITY;
    for start in 0..out_len {
        let mut acc = kernel.bias;
        for (j, w) in kernel.weights.iter().enumerate() {
            let idx = start + j * kernel.dilation;
            if idx >= pad && idx - pad < kernel.l_input {
                acc += w * series[idx - pad];
            }
        }
        if acc > 0.0 {
            positive += 1;
        }
        if acc > max {
            max = acc;
        }
    }
    Ok((positive as f64 / out_len as f64, max))
}

/// Feature rows in path order: for each kernel, its (ppv, max) pair.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        FeatureMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// Extract features for the selected dataset rows (all rows when `rows` is
/// `None`). Channel `d` is the time grid.
pub fn featurize(
    dataset: &Dataset,
    kernels: &[RocketKernel],
    rows: Option<&[usize]>,
) -> Result<FeatureMatrix> {
    let all_rows: Vec<usize>;
    let rows = match rows {
        Some(r) => r,
        None => {
            all_rows = (0..dataset.len()).collect();
            &all_rows
        }
    };
    let d = dataset.dim();
    let n_channels = d + 1;
    if let Some(k) = kernels.iter().find(|k| k.channel >= n_channels) {
        return Err(Error::DimensionMismatch {
            expected: n_channels,
            got: k.channel + 1,
        });
    }
    let cols = 2 * kernels.len();
    let feature_rows = rows
        .par_iter()
        .map(|&row| {
            let path = &dataset.paths[row];
            let mut out = Vec::with_capacity(cols);
            let mut cache: Vec<Option<Vec<f64>>> = vec![None; n_channels];
            for kernel in kernels {
                let view = cache[kernel.channel].get_or_insert_with(|| {
                    if kernel.channel < d {
                        (0..path.len())
                            .map(|l| path.state(l)[kernel.channel])
                            .collect()
                    } else {
                        path.times().to_vec()
                    }
                });
                let (ppv, max) = apply_kernel(kernel, view)?;
                out.push(ppv);
                out.push(max);
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(FeatureMatrix::from_rows(feature_rows))
}

/// Ridge classifier on standardized features with labels encoded -1/+1.
#[derive(Debug, Clone)]
pub struct LinearClassifier {
    /// Columns kept after dropping constant features.
    kept: Vec<usize>,
    means: Vec<f64>,
    stds: Vec<f64>,
    weights: Vec<f64>,
    intercept: f64,
    pub lambda: f64,
    /// Mean cross-validation accuracy of the chosen lambda (NaN when no
    /// search was run).
    pub validation_accuracy: f64,
}

/// In-place Cholesky factorization of a symmetric positive-definite matrix
/// (lower triangle), followed by the two triangular solves.
fn cholesky_solve(matrix: &mut [f64], n: usize, rhs: &[f64]) -> Result<Vec<f64>> {
    for j in 0..n {
        let mut diag = matrix[j * n + j];
        for k in 0..j {
            diag -= matrix[j * n + k] * matrix[j * n + k];
        }
        if diag <= 0.0 {
            return Err(Error::DegenerateTraining(
                "gram matrix is not positive definite".into(),
            ));
        }
        let root = diag.sqrt();
        matrix[j * n + j] = root;
        for i in j + 1..n {
            let mut v = matrix[i * n + j];
            for k in 0..j {
                v -= matrix[i * n + k] * matrix[j * n + k];
            }
            matrix[i * n + j] = v / root;
        }
    }
    let mut y = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            let yk = y[k];
            y[i] -= matrix[i * n + k] * yk;
        }
        y[i] /= matrix[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let yk = y[k];
            y[i] -= matrix[k * n + i] * yk;
        }
        y[i] /= matrix[i * n + i];
    }
    Ok(y)
}

struct Standardization {
    kept: Vec<usize>,
    means: Vec<f64>,
    stds: Vec<f64>,
}

fn standardization(features: &FeatureMatrix) -> Standardization {
    let n = features.rows as f64;
    let mut means = vec![0.0; features.cols];
    for r in 0..features.rows {
        for (m, v) in means.iter_mut().zip(features.row(r)) {
            *m += v;
        }
    }
    for m in means.iter_mut() {
        *m /= n;
    }
    let mut vars = vec![0.0; features.cols];
    for r in 0..features.rows {
        for (c, v) in features.row(r).iter().enumerate() {
            let d = v - means[c];
            vars[c] += d * d;
        }
    }
    let mut kept = Vec::new();
    let mut kept_means = Vec::new();
    let mut kept_stds = Vec::new();
    for c in 0..features.cols {
        let std = (vars[c] / n).sqrt();
        if std > VARIANCE_EPS {
            kept.push(c);
            kept_means.push(means[c]);
            kept_stds.push(std);
        }
    }
    Standardization {
        kept,
        means: kept_means,
        stds: kept_stds,
    }
}

fn standardized_rows(features: &FeatureMatrix, st: &Standardization) -> Vec<f64> {
    let p = st.kept.len();
    let mut z = vec![0.0; features.rows * p];
    z.par_chunks_mut(p).enumerate().for_each(|(r, zr)| {
        let row = features.row(r);
        for (j, &c) in st.kept.iter().enumerate() {
            zr[j] = (row[c] - st.means[j]) / st.stds[j];
        }
    });
    z
}

/// Dense Gram matrix `Z Z^T` of standardized rows.
fn gram(z: &[f64], n: usize, p: usize) -> Vec<f64> {
    let mut k = vec![0.0; n * n];
    k.par_chunks_mut(n).enumerate().for_each(|(i, ki)| {
        let zi = &z[i * p..(i + 1) * p];
        for (j, slot) in ki.iter_mut().enumerate().take(i + 1) {
            let zj = &z[j * p..(j + 1) * p];
            *slot = zi.iter().zip(zj).map(|(a, b)| a * b).sum();
        }
    });
    for i in 0..n {
        for j in i + 1..n {
            k[i * n + j] = k[j * n + i];
        }
    }
    k
}

/// Deterministic stratified fold assignment.
fn fold_assignment(labels: &[i8], folds: usize, seed: u64) -> Vec<usize> {
    let mut assignment = vec![0usize; labels.len()];
    let mut stream = rng::stream(seed, &[purpose::RIDGE_FOLDS]);
    for class in [-1i8, 1] {
        let mut idx: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| **l == class)
            .map(|(i, _)| i)
            .collect();
        use rand::seq::SliceRandom;
        idx.shuffle(&mut stream);
        for (pos, i) in idx.into_iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    assignment
}

/// Fit the ridge classifier: standardize (dropping constant columns),
/// encode labels as -1/+1 and center them, solve the dual system
/// `(Z Z^T + lambda I) a = y` per grid point, choose lambda by stratified
/// k-fold validation accuracy (ties toward the smaller lambda), and refit
/// on the full training set.
pub fn fit_ridge(
    features: &FeatureMatrix,
    labels: &[u8],
    lambda_grid: &[f64],
    seed: u64,
) -> Result<LinearClassifier> {
    let n = features.rows;
    if labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    if lambda_grid.is_empty() || lambda_grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::param("lambda_grid", "must be positive and nonempty"));
    }
    let n1 = labels.iter().filter(|l| **l == 1).count();
    let n0 = n - n1;
    if n0 == 0 || n1 == 0 {
        return Err(Error::DegenerateTraining(
            "both classes are required for training".into(),
        ));
    }
    let st = standardization(features);
    if st.kept.is_empty() {
        return Err(Error::DegenerateTraining(
            "all feature columns have zero variance".into(),
        ));
    }
    let p = st.kept.len();
    let z = standardized_rows(features, &st);
    let y: Vec<f64> = labels
        .iter()
        .map(|l| if *l == 1 { 1.0 } else { -1.0 })
        .collect();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let k = gram(&z, n, p);

    let encoded: Vec<i8> = labels
        .iter()
        .map(|l| if *l == 1 { 1 } else { -1 })
        .collect();
    let folds = 5.min(n0.min(n1));
    let (lambda, validation_accuracy) = if folds < 2 {
        (lambda_grid[0], f64::NAN)
    } else {
        let assignment = fold_assignment(&encoded, folds, seed);
        let hits: Vec<usize> = (0..folds)
            .into_par_iter()
            .map(|fold| {
                let train: Vec<usize> = (0..n).filter(|i| assignment[*i] != fold).collect();
                let val: Vec<usize> = (0..n).filter(|i| assignment[*i] == fold).collect();
                let nf = train.len();
                let mut base = vec![0.0; nf * nf];
                for (a, &i) in train.iter().enumerate() {
                    for (b, &j) in train.iter().enumerate() {
                        base[a * nf + b] = k[i * n + j];
                    }
                }
                let y_f: Vec<f64> = train.iter().map(|&i| yc[i]).collect();
                let mut fold_hits = vec![0usize; lambda_grid.len()];
                for (g, &lambda) in lambda_grid.iter().enumerate() {
                    let mut system = base.clone();
                    for a in 0..nf {
                        system[a * nf + a] += lambda;
                    }
                    let alpha = match cholesky_solve(&mut system, nf, &y_f) {
                        Ok(a) => a,
                        Err(_) => continue,
                    };
                    for &v in &val {
                        let mut pred = y_mean;
                        for (a, &i) in train.iter().enumerate() {
                            pred += k[v * n + i] * alpha[a];
                        }
                        let decided: i8 = if pred > 0.0 { 1 } else { -1 };
                        if decided == encoded[v] {
                            fold_hits[g] += 1;
                        }
                    }
                }
                fold_hits
            })
            .reduce(
                || vec![0usize; lambda_grid.len()],
                |mut acc, h| {
                    for (a, b) in acc.iter_mut().zip(h) {
                        *a += b;
                    }
                    acc
                },
            );
        let best = hits
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .unwrap();
        (lambda_grid[best], hits[best] as f64 / n as f64)
    };

    let mut system = k;
    for i in 0..n {
        system[i * n + i] += lambda;
    }
    let alpha = cholesky_solve(&mut system, n, &yc)?;
    // Primal weights beta = Z^T alpha.
    let mut weights = vec![0.0; p];
    for (i, &a) in alpha.iter().enumerate() {
        let zi = &z[i * p..(i + 1) * p];
        for (w, &zv) in weights.iter_mut().zip(zi) {
            *w += a * zv;
        }
    }
    Ok(LinearClassifier {
        kept: st.kept,
        means: st.means,
        stds: st.stds,
        weights,
        intercept: y_mean,
        lambda,
        validation_accuracy,
    })
}

/// Raw linear decision values for feature rows; thresholding is the
/// metrics module's job.
pub fn predict_scores(classifier: &LinearClassifier, features: &FeatureMatrix) -> Result<Vec<f64>> {
    if let Some(&max_col) = classifier.kept.last() {
        if max_col >= features.cols {
            return Err(Error::DimensionMismatch {
                expected: max_col + 1,
                got: features.cols,
            });
        }
    }
    Ok((0..features.rows)
        .into_par_iter()
        .map(|r| {
            let row = features.row(r);
            let mut score = classifier.intercept;
            for (j, &c) in classifier.kept.iter().enumerate() {
                score +=
                    classifier.weights[j] * (row[c] - classifier.means[j]) / classifier.stds[j];
            }
            score
        })
        .collect())
}

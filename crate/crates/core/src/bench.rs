//! Experiment orchestration: the shipped case matrix, train/test splits,
//! repeated runs, classifier selection, and parameter sweeps.
//!
//! Classifiers live behind the [`Classifier`] trait and are selected by
//! name at runtime. Reference classifiers (the LRT family and imported
//! score files) never train: they are scored once per dataset, so their
//! metrics replicate across the re-split runs. Trained classifiers are
//! refit on each run's training split and scored on its test split.

use crate::error::{Error, Result};
use crate::lrt::{self, ScoreMode, ScoreSet};
use crate::metrics::{self, RocCurve, RunSummary};
use crate::models::{make_model_pair, Family, ModelPair, ParamMap};
use crate::rng::{self, purpose};
use crate::rocket;
use crate::simulate::{content_digest, generate_dataset, Dataset, SimConfig};

/// One resolved row of the shipped case matrix.
#[derive(Debug, Clone)]
pub struct CaseSetting {
    pub case: String,
    pub setting: usize,
    pub family: String,
    pub d: usize,
    /// Observation count L.
    pub observations: usize,
    pub t_span: f64,
    pub dt: f64,
    /// Fine simulation step.
    pub delta: f64,
    /// Family overrides implied by the case (dimension, agent count, ...).
    pub model_overrides: ParamMap,
}

impl CaseSetting {
    pub fn label(&self) -> String {
        format!("case-{}-setting-{}", self.case, self.setting)
    }

    pub fn sim_config(&self, paths: usize, master_seed: u64) -> Result<SimConfig> {
        SimConfig::new(
            self.delta,
            self.dt,
            self.t_span,
            self.observations,
            paths,
            master_seed,
        )
    }

    /// The case's model pair with optional extra overrides on top.
    pub fn model_pair(&self, extra: &ParamMap) -> Result<ModelPair> {
        let mut merged = self.model_overrides.clone();
        for (k, v) in extra {
            merged.insert(k.clone(), *v);
        }
        make_model_pair(&self.family, &merged)
    }
}

/// Resolve a case id (a-f) and setting index (1-4) to its generation
/// parameters.
pub fn resolve_case(case: &str, setting: usize) -> Result<CaseSetting> {
    let unknown = || Error::UnknownCase {
        case: case.to_string(),
        setting,
    };
    if !(1..=4).contains(&setting) {
        return Err(unknown());
    }
    let idx = setting - 1;
    let mut overrides = ParamMap::new();
    let (family, d, observations, t_span, dt) = match case {
        "a" => {
            let t = [1.0, 2.0, 4.0, 8.0][idx];
            ("constant-drift", 1, [10, 20, 40, 80][idx], t, 0.1)
        }
        "b" => {
            let t = [2.0, 4.0, 8.0, 16.0][idx];
            ("potential-gradient", 1, [20, 40, 80, 160][idx], t, 0.1)
        }
        "c" => {
            let d = [1, 2, 4, 8][idx];
            ("ou", d, 20, 2.0, 0.1)
        }
        "d" => {
            let d = [6, 12, 24, 48][idx];
            ("interacting-particles", d, 20, 2.0, 0.1)
        }
        "e" => {
            let dt = [0.2, 0.1, 0.05, 0.025][idx];
            ("linear-nonlinear", 1, [5, 10, 20, 40][idx], 1.0, dt)
        }
        "f" => {
            let dt = [0.4, 0.2, 0.1, 0.05][idx];
            ("interacting-particles", 24, [10, 20, 40, 80][idx], 4.0, dt)
        }
        _ => return Err(unknown()),
    };
    match family {
        "interacting-particles" => {
            overrides.insert("N".into(), (d / 2) as f64);
            overrides.insert("d1".into(), 2.0);
        }
        _ => {
            overrides.insert("d".into(), d as f64);
        }
    }
    // The smallest observation gap needs a finer simulation step to keep
    // the integer stride.
    let delta = if dt < 0.05 { 0.005 } else { 0.01 };
    Ok(CaseSetting {
        case: case.to_string(),
        setting,
        family: family.to_string(),
        d,
        observations,
        t_span,
        dt,
        delta,
        model_overrides: overrides,
    })
}

/// Index sets of a label-stratified split, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn stratified_split(
    dataset: &Dataset,
    take_train: impl Fn(usize) -> usize,
    take_test: impl Fn(usize, usize) -> usize,
    seed: u64,
) -> Result<Split> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..2u8 {
        let mut idx: Vec<usize> = (0..dataset.len())
            .filter(|i| dataset.labels[*i] == class)
            .collect();
        let n = idx.len();
        let n_train = take_train(n);
        let n_test = take_test(n, n_train);
        if n_train == 0 || n_test == 0 || n_train + n_test > n {
            return Err(Error::BadSplit(n_train as f64 / n.max(1) as f64));
        }
        use rand::seq::SliceRandom;
        let mut stream = rng::stream(seed, &[purpose::SPLIT, class as u64]);
        idx.shuffle(&mut stream);
        train.extend_from_slice(&idx[..n_train]);
        test.extend_from_slice(&idx[n_train..n_train + n_test]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// Label-stratified split by training fraction; the remainder tests.
pub fn split(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::BadSplit(train_fraction));
    }
    stratified_split(
        dataset,
        |n| (train_fraction * n as f64).round() as usize,
        |n, n_train| n - n_train,
        seed,
    )
}

/// Label-stratified split with explicit per-side totals (split evenly
/// between the classes); rows beyond `train + test` stay unused.
pub fn split_counts(dataset: &Dataset, train: usize, test: usize, seed: u64) -> Result<Split> {
    if train == 0 || test == 0 || !train.is_multiple_of(2) || !test.is_multiple_of(2) {
        return Err(Error::BadSplit(train as f64));
    }
    stratified_split(dataset, |_| train / 2, |_, _| test / 2, seed)
}

/// How each run carves the dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitSpec {
    Fraction(f64),
    Counts { train: usize, test: usize },
}

impl SplitSpec {
    fn apply(&self, dataset: &Dataset, seed: u64) -> Result<Split> {
        match *self {
            SplitSpec::Fraction(f) => split(dataset, f, seed),
            SplitSpec::Counts { train, test } => split_counts(dataset, train, test, seed),
        }
    }
}

/// Knobs shared by the bench entry points.
#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Dataset size M.
    pub paths: usize,
    pub split: SplitSpec,
    /// Kernel count for the trained baseline.
    pub kernels: usize,
    pub lambda_grid: Vec<f64>,
    /// Regenerate the dataset for every run instead of re-splitting one
    /// fixed dataset.
    pub regenerate_per_run: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            paths: 2000,
            split: SplitSpec::Fraction(0.75),
            kernels: 10_000,
            lambda_grid: rocket::default_lambda_grid(),
            regenerate_per_run: false,
        }
    }
}

/// A classification strategy selectable by name.
pub trait Classifier: Send + Sync {
    fn name(&self) -> String;

    /// Trained classifiers are refit per run; reference classifiers are
    /// scored once per dataset.
    fn needs_training(&self) -> bool;

    /// Score every path of the dataset without training.
    fn score_dataset(&self, _dataset: &Dataset, _pair: &ModelPair) -> Result<ScoreSet> {
        Err(Error::UnknownClassifier(format!(
            "{} requires training",
            self.name()
        )))
    }

    /// Fit on the train rows and score the test rows.
    fn train_and_score(
        &self,
        _dataset: &Dataset,
        _pair: &ModelPair,
        _split: &Split,
        _seed: u64,
    ) -> Result<ScoreSet> {
        Err(Error::UnknownClassifier(format!(
            "{} does not train",
            self.name()
        )))
    }
}

/// LRT reference classifiers; `Exact` resolves to the family's closed
/// transition kernel.
pub struct LrtClassifier {
    mode: ScoreMode,
}

impl LrtClassifier {
    pub fn new(mode: ScoreMode) -> Self {
        LrtClassifier { mode }
    }

    fn resolve_mode(&self, pair: &ModelPair) -> Result<ScoreMode> {
        Ok(match self.mode {
            ScoreMode::ExactBm | ScoreMode::ExactOu => match pair.family() {
                Family::ConstantDrift => ScoreMode::ExactBm,
                Family::Ou => ScoreMode::ExactOu,
                other => {
                    return Err(Error::FamilyMismatch {
                        expected: "constant-drift or ou".into(),
                        got: other.id().into(),
                    })
                }
            },
            m => m,
        })
    }
}

impl Classifier for LrtClassifier {
    fn name(&self) -> String {
        match self.mode {
            ScoreMode::HiddenTruth => "lrt-hidden-truth".into(),
            ScoreMode::Numerical => "lrt-numerical".into(),
            ScoreMode::ExactBm | ScoreMode::ExactOu => "lrt-exact".into(),
            other => format!("lrt-{other}"),
        }
    }

    fn needs_training(&self) -> bool {
        false
    }

    fn score_dataset(&self, dataset: &Dataset, pair: &ModelPair) -> Result<ScoreSet> {
        lrt::lrt_scores(dataset, pair, self.resolve_mode(pair)?)
    }
}

/// The trained convolutional-kernel baseline.
pub struct RocketClassifier {
    pub kernels: usize,
    pub lambda_grid: Vec<f64>,
}

impl Classifier for RocketClassifier {
    fn name(&self) -> String {
        "rocket".into()
    }

    fn needs_training(&self) -> bool {
        true
    }

    fn train_and_score(
        &self,
        dataset: &Dataset,
        _pair: &ModelPair,
        split: &Split,
        seed: u64,
    ) -> Result<ScoreSet> {
        let l_input = dataset
            .paths
            .first()
            .ok_or(Error::EmptyInput("dataset".into()))?
            .len();
        let kernels = rocket::sample_kernels(self.kernels, l_input, dataset.dim() + 1, seed)?;
        let train_features = rocket::featurize(dataset, &kernels, Some(&split.train))?;
        let train_labels: Vec<u8> = split.train.iter().map(|&i| dataset.labels[i]).collect();
        let clf = rocket::fit_ridge(&train_features, &train_labels, &self.lambda_grid, seed)?;
        let test_features = rocket::featurize(dataset, &kernels, Some(&split.test))?;
        let scores = rocket::predict_scores(&clf, &test_features)?;
        ScoreSet::new(
            scores,
            split.test.iter().map(|&i| dataset.labels[i]).collect(),
            split.test.clone(),
            ScoreMode::Rocket,
            Some(content_digest(dataset)),
        )
    }
}

/// Pre-computed scores from an external classifier, validated against the
/// dataset before entering a report.
pub struct ImportedScores {
    pub label: String,
    pub scores: ScoreSet,
}

impl ImportedScores {
    fn validate(&self, dataset: &Dataset) -> Result<()> {
        let digest = content_digest(dataset);
        match &self.scores.provenance {
            Some(p) if *p == digest => {}
            Some(p) => {
                return Err(Error::ManifestMismatch(format!(
                    "scores reference dataset {p}, expected {digest}"
                )))
            }
            None => {
                return Err(Error::ManifestMismatch(
                    "imported scores carry no dataset digest".into(),
                ))
            }
        }
        for (row, (&path_id, &label)) in self
            .scores
            .path_ids
            .iter()
            .zip(&self.scores.labels)
            .enumerate()
        {
            if path_id >= dataset.len() {
                return Err(Error::ManifestMismatch(format!(
                    "row {row}: path id {path_id} outside dataset of {}",
                    dataset.len()
                )));
            }
            if dataset.labels[path_id] != label {
                return Err(Error::ManifestMismatch(format!(
                    "row {row}: label {label} does not match path {path_id}"
                )));
            }
        }
        Ok(())
    }
}

impl Classifier for ImportedScores {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn needs_training(&self) -> bool {
        false
    }

    fn score_dataset(&self, dataset: &Dataset, _pair: &ModelPair) -> Result<ScoreSet> {
        self.validate(dataset)?;
        Ok(self.scores.clone())
    }
}

/// Names recognized by [`build_classifiers`].
pub const CLASSIFIER_NAMES: [&str; 4] =
    ["lrt-hidden-truth", "lrt-numerical", "lrt-exact", "rocket"];

/// Resolve classifier names against the registry.
pub fn build_classifiers(names: &[&str], opts: &BenchOptions) -> Result<Vec<Box<dyn Classifier>>> {
    names
        .iter()
        .map(|name| -> Result<Box<dyn Classifier>> {
            match *name {
                "lrt-hidden-truth" => Ok(Box::new(LrtClassifier::new(ScoreMode::HiddenTruth))),
                "lrt-numerical" => Ok(Box::new(LrtClassifier::new(ScoreMode::Numerical))),
                "lrt-exact" => Ok(Box::new(LrtClassifier::new(ScoreMode::ExactBm))),
                "rocket" => Ok(Box::new(RocketClassifier {
                    kernels: opts.kernels,
                    lambda_grid: opts.lambda_grid.clone(),
                })),
                other => Err(Error::UnknownClassifier(other.to_string())),
            }
        })
        .collect()
}

/// Metrics of one classifier in one run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub classifier: String,
    pub run: usize,
    pub auc: f64,
    pub acc_star: f64,
    pub k_star: f64,
    /// AUC restricted to the run's test rows. Equals `auc` for trained
    /// classifiers; for references it restricts the dataset-wide scores.
    pub test_auc: f64,
    pub trained: bool,
}

#[derive(Debug, Clone)]
pub struct SummaryRecord {
    pub classifier: String,
    pub metric: String,
    pub values: Vec<f64>,
    pub summary: RunSummary,
}

/// Full outcome of one benchmarked setting.
#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub label: String,
    pub runs: usize,
    pub master_seed: u64,
    pub records: Vec<RunRecord>,
    pub summaries: Vec<SummaryRecord>,
    /// One ROC per classifier: the dataset-wide curve for references, the
    /// first run's test curve for trained classifiers.
    pub rocs: Vec<(String, RocCurve)>,
    pub dataset_digest: String,
    pub dataset_params: Vec<(String, String)>,
}

impl BenchmarkReport {
    pub fn classifier_values(&self, classifier: &str, metric: &str) -> Vec<f64> {
        self.summaries
            .iter()
            .find(|s| s.classifier == classifier && s.metric == metric)
            .map(|s| s.values.clone())
            .unwrap_or_default()
    }
}

/// Five-number summaries per classifier and metric, in first-appearance
/// order of the classifiers.
pub fn summarize_records(records: &[RunRecord]) -> Result<Vec<SummaryRecord>> {
    let mut classifiers: Vec<String> = Vec::new();
    for r in records {
        if !classifiers.contains(&r.classifier) {
            classifiers.push(r.classifier.clone());
        }
    }
    let mut out = Vec::new();
    for c in &classifiers {
        for (metric, pick) in [
            (
                "auc",
                &(|r: &RunRecord| r.auc) as &dyn Fn(&RunRecord) -> f64,
            ),
            ("acc_star", &|r: &RunRecord| r.acc_star),
        ] {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.classifier == *c)
                .map(pick)
                .collect();
            out.push(SummaryRecord {
                classifier: c.clone(),
                metric: metric.to_string(),
                summary: metrics::summarize_runs(&values)?,
                values,
            });
        }
    }
    Ok(out)
}

struct ReferenceScores {
    name: String,
    scores: ScoreSet,
    auc: f64,
    acc_star: f64,
    k_star: f64,
    curve: RocCurve,
}

fn score_references(
    classifiers: &[Box<dyn Classifier>],
    dataset: &Dataset,
    pair: &ModelPair,
) -> Result<Vec<ReferenceScores>> {
    classifiers
        .iter()
        .filter(|c| !c.needs_training())
        .map(|c| {
            let scores = c.score_dataset(dataset, pair)?;
            let (curve, summary) = metrics::evaluate(&scores)?;
            Ok(ReferenceScores {
                name: c.name(),
                scores,
                auc: summary.auc,
                acc_star: summary.acc_star,
                k_star: summary.k_star,
                curve,
            })
        })
        .collect()
}

/// Run the benchmark protocol on a pre-built dataset: reference
/// classifiers are scored once on the whole dataset (their rows replicate
/// across runs); trained classifiers get a fresh stratified split per run.
/// With `regenerate_per_run` every run gets a fresh dataset and the
/// references are rescored on it.
pub fn run_on_dataset(
    label: &str,
    dataset: &Dataset,
    pair: &ModelPair,
    runs: usize,
    master_seed: u64,
    classifiers: &[Box<dyn Classifier>],
    opts: &BenchOptions,
) -> Result<BenchmarkReport> {
    if classifiers.is_empty() {
        return Err(Error::EmptyInput("classifier selection".into()));
    }
    if runs == 0 {
        return Err(Error::EmptyInput("runs".into()));
    }
    let annotate =
        |e: Error, run: usize| Error::ManifestMismatch(format!("{label} run {run}: {e}"));

    let base_reference = score_references(classifiers, dataset, pair)?;
    let mut records = Vec::new();
    let mut rocs: Vec<(String, RocCurve)> = base_reference
        .iter()
        .map(|r| (r.name.clone(), r.curve.clone()))
        .collect();

    for run in 0..runs {
        let run_seed = rng::stream_seed(master_seed, &[purpose::RUN, run as u64]);
        let run_dataset;
        let run_reference;
        let (dataset_run, reference): (&Dataset, &[ReferenceScores]) = if opts.regenerate_per_run {
            let mut config = dataset.config.clone();
            config.master_seed = run_seed;
            run_dataset = generate_dataset(pair, &config, dataset.fine.is_some())?;
            run_reference = score_references(classifiers, &run_dataset, pair)?;
            (&run_dataset, &run_reference)
        } else {
            (dataset, &base_reference)
        };
        let split = opts.split.apply(dataset_run, run_seed)?;
        let test_rows: Vec<usize> = split.test.clone();

        for c in classifiers {
            if c.needs_training() {
                let scores = c
                    .train_and_score(dataset_run, pair, &split, run_seed)
                    .map_err(|e| annotate(e, run))?;
                let (curve, summary) = metrics::evaluate(&scores)?;
                if run == 0 {
                    rocs.push((c.name(), curve));
                }
                records.push(RunRecord {
                    classifier: c.name(),
                    run,
                    auc: summary.auc,
                    acc_star: summary.acc_star,
                    k_star: summary.k_star,
                    test_auc: summary.auc,
                    trained: true,
                });
            } else {
                let r = reference
                    .iter()
                    .find(|r| r.name == c.name())
                    .expect("reference scored above");
                // Restrict the dataset-wide scores to the run's test rows.
                let positions: Vec<usize> = test_rows
                    .iter()
                    .filter_map(|&p| r.scores.path_ids.iter().position(|&id| id == p))
                    .collect();
                let test_auc = if positions.len() == test_rows.len() && !positions.is_empty() {
                    let (_, s) = metrics::evaluate(&r.scores.subset(&positions))?;
                    s.auc
                } else {
                    r.auc
                };
                records.push(RunRecord {
                    classifier: r.name.clone(),
                    run,
                    auc: r.auc,
                    acc_star: r.acc_star,
                    k_star: r.k_star,
                    test_auc,
                    trained: false,
                });
            }
        }
    }

    let summaries = summarize_records(&records)?;
    Ok(BenchmarkReport {
        label: label.to_string(),
        runs,
        master_seed,
        records,
        summaries,
        rocs,
        dataset_digest: content_digest(dataset),
        dataset_params: dataset.params.clone(),
    })
}

/// Generate the case's dataset and run the protocol on it.
pub fn run_case(
    setting: &CaseSetting,
    runs: usize,
    master_seed: u64,
    classifiers: &[Box<dyn Classifier>],
    opts: &BenchOptions,
) -> Result<BenchmarkReport> {
    let pair = setting.model_pair(&ParamMap::new())?;
    let config = setting.sim_config(opts.paths, master_seed)?;
    let keep_fine = classifiers.iter().any(|c| c.name() == "lrt-hidden-truth");
    let dataset = generate_dataset(&pair, &config, keep_fine)?;
    run_on_dataset(
        &setting.label(),
        &dataset,
        &pair,
        runs,
        master_seed,
        classifiers,
        opts,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    TimeLength,
    Noise,
    TrainingSize,
}

impl std::str::FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "time-length" => SweepKind::TimeLength,
            "noise" => SweepKind::Noise,
            "training-size" => SweepKind::TrainingSize,
            other => return Err(Error::InvalidSweep(format!("unknown kind `{other}`"))),
        })
    }
}

/// The default sweep base: interacting particles at d = 12 (case d,
/// setting 2) with a 500-path test side.
pub fn default_sweep_base() -> CaseSetting {
    resolve_case("d", 2).expect("shipped case")
}

const SWEEP_TEST_PATHS: usize = 500;

/// Sweep one generation parameter, producing one report per value.
///
/// Time-length and noise sweeps generate one dataset per value. The
/// training-size sweep fixes a single dataset (largest training size plus
/// the test side) and varies only how many paths each run trains on, so
/// reference classifiers produce identical rows for every value.
pub fn sweep(
    kind: SweepKind,
    values: &[f64],
    base: &CaseSetting,
    runs: usize,
    master_seed: u64,
    classifiers: &[Box<dyn Classifier>],
    opts: &BenchOptions,
) -> Result<Vec<(f64, BenchmarkReport)>> {
    if values.is_empty() {
        return Err(Error::InvalidSweep("no values".into()));
    }
    for v in values {
        if !(v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidSweep(format!("value {v} must be positive")));
        }
    }
    let mut out = Vec::with_capacity(values.len());
    match kind {
        SweepKind::TimeLength | SweepKind::Noise => {
            for (idx, &v) in values.iter().enumerate() {
                let mut setting = base.clone();
                let mut label = setting.label();
                match kind {
                    SweepKind::TimeLength => {
                        let observations = (v / setting.dt).round() as usize;
                        if (observations as f64 * setting.dt - v).abs() > 1e-9 {
                            return Err(Error::InvalidSweep(format!(
                                "t_span {v} is not a multiple of dt {}",
                                setting.dt
                            )));
                        }
                        setting.t_span = v;
                        setting.observations = observations;
                        label = format!("{label}-tspan-{v}");
                    }
                    SweepKind::Noise => {
                        setting.model_overrides.insert("sigma".into(), v);
                        label = format!("{label}-sigma-{v}");
                    }
                    SweepKind::TrainingSize => unreachable!(),
                }
                setting.case = label.clone();
                let value_seed = rng::stream_seed(master_seed, &[0x5E, idx as u64]);
                let mut report = run_case(&setting, runs, value_seed, classifiers, opts)?;
                report.label = label;
                out.push((v, report));
            }
        }
        SweepKind::TrainingSize => {
            for v in values {
                if v.fract() != 0.0 || !(*v as usize).is_multiple_of(2) {
                    return Err(Error::InvalidSweep(format!(
                        "training size {v} must be an even path count"
                    )));
                }
            }
            let max_train = values.iter().fold(0.0f64, |a, b| a.max(*b)) as usize;
            let pair = base.model_pair(&ParamMap::new())?;
            let config = base.sim_config(max_train + SWEEP_TEST_PATHS, master_seed)?;
            let keep_fine = classifiers.iter().any(|c| c.name() == "lrt-hidden-truth");
            let dataset = generate_dataset(&pair, &config, keep_fine)?;
            for (idx, &v) in values.iter().enumerate() {
                let label = format!("{}-train-{v}", base.label());
                let mut value_opts = opts.clone();
                value_opts.split = SplitSpec::Counts {
                    train: v as usize,
                    test: SWEEP_TEST_PATHS,
                };
                value_opts.regenerate_per_run = false;
                let value_seed = rng::stream_seed(master_seed, &[0x5E, idx as u64]);
                let report = run_on_dataset(
                    &label,
                    &dataset,
                    &pair,
                    runs,
                    value_seed,
                    classifiers,
                    &value_opts,
                )?;
                out.push((v, report));
            }
        }
    }
    Ok(out)
}

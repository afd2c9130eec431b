//! Command-line surface: dataset generation, LRT scoring, the trained
//! baseline, benchmark runs, sweeps, report re-rendering, and analytic
//! references. All randomness flows from `--seed`; commands only write
//! under their `--out` directory.

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use driftbench_core::analytic;
use driftbench_core::bench::{
    self, build_classifiers, resolve_case, BenchOptions, Classifier, SplitSpec, SweepKind,
};
use driftbench_core::io::{self, Layout};
use driftbench_core::lrt::{self, ScoreMode};
use driftbench_core::models::{make_model_pair, ModelPair, ParamMap};
use driftbench_core::simulate::{generate_dataset, SimConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "driftbench",
    version,
    about = "Benchmark time series classifiers against likelihood-ratio references on simulated diffusions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CaseArgs {
    /// Case id: a (constant drifts), b (potentials), c (OU),
    /// d (interacting particles), e (linear vs nonlinear), f (particles,
    /// long horizon).
    #[arg(long)]
    case: String,
    /// Setting index 1..=4 within the case.
    #[arg(long, default_value_t = 1)]
    setting: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a labeled dataset and export it as a bundle.
    Generate {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Retain the fine simulation paths in the bundle.
        #[arg(long)]
        keep_fine: bool,
        /// Dotted-key overrides, e.g. model.sigma=0.4 or sim.paths=400.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, default_value = "long")]
        layout: String,
    },
    /// Score a bundle with a likelihood-ratio classifier.
    Lrt {
        #[arg(long)]
        data: PathBuf,
        /// hidden | numerical | exact
        #[arg(long)]
        mode: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train and evaluate the convolutional-kernel baseline on a bundle.
    Rocket {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        kernels: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 0.75)]
        train_fraction: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the full benchmark protocol on one case setting.
    Bench {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long, default_value_t = 40)]
        runs: usize,
        #[arg(long)]
        seed: u64,
        /// Comma-separated classifier names
        /// (lrt-hidden-truth, lrt-numerical, lrt-exact, rocket).
        #[arg(long, default_value = "lrt-hidden-truth,lrt-numerical,rocket")]
        classifiers: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        paths: usize,
        #[arg(long, default_value_t = 10_000)]
        kernels: usize,
        #[arg(long, default_value_t = 0.75)]
        train_fraction: f64,
        /// Regenerate the dataset each run instead of re-splitting one.
        #[arg(long)]
        regenerate: bool,
        /// Score files of externally run classifiers to rank alongside.
        #[arg(long = "external", value_name = "FILE")]
        externals: Vec<PathBuf>,
    },
    /// Sweep time length, noise scale, or training size.
    Sweep {
        /// time-length | noise | training-size
        #[arg(long)]
        kind: String,
        /// Comma-separated values for the chosen kind.
        #[arg(long)]
        values: String,
        #[arg(long, default_value = "d")]
        case: String,
        #[arg(long, default_value_t = 2)]
        setting: usize,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "lrt-hidden-truth,lrt-numerical,rocket")]
        classifiers: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        paths: usize,
        #[arg(long, default_value_t = 10_000)]
        kernels: usize,
    },
    /// Re-render summary tables and charts from a stored report.
    Report {
        #[arg(long, value_name = "DIR")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Closed-form (bm) or Monte-Carlo (ou) reference rate curves.
    #[command(allow_negative_numbers = true)]
    Analytic {
        /// bm | ou
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0.0)]
        a0: f64,
        #[arg(long, default_value_t = 1.0)]
        a1: f64,
        #[arg(long, default_value_t = -1.0)]
        theta0: f64,
        #[arg(long, default_value_t = -0.5)]
        theta1: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        t_span: f64,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        /// Monte-Carlo sample count per class (ou only).
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_overrides(raw: &[String]) -> anyhow::Result<(ParamMap, ParamMap)> {
    let mut model = ParamMap::new();
    let mut sim = ParamMap::new();
    for item in raw {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("override `{item}` is not KEY=VALUE"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| anyhow!("override `{item}`: value is not a number"))?;
        if let Some(name) = key.strip_prefix("model.") {
            model.insert(name.to_string(), value);
        } else if let Some(name) = key.strip_prefix("sim.") {
            if !["paths", "delta"].contains(&name) {
                bail!("override `{item}`: unknown sim key `{name}` (paths, delta)");
            }
            sim.insert(name.to_string(), value);
        } else {
            bail!("override `{item}`: keys start with model. or sim.");
        }
    }
    Ok((model, sim))
}

fn classifier_list(raw: &str) -> Vec<&str> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

fn score_mode(raw: &str, pair: &ModelPair) -> anyhow::Result<ScoreMode> {
    use driftbench_core::models::Family;
    Ok(match raw {
        "hidden" => ScoreMode::HiddenTruth,
        "numerical" => ScoreMode::Numerical,
        "exact" => match pair.family() {
            Family::ConstantDrift => ScoreMode::ExactBm,
            Family::Ou => ScoreMode::ExactOu,
            other => bail!("family {other} has no exact likelihood-ratio kernel"),
        },
        other => bail!("unknown mode `{other}` (hidden, numerical, exact)"),
    })
}

fn write_metrics_summary(
    summary: &driftbench_core::metrics::MetricsSummary,
    path: &std::path::Path,
) -> anyhow::Result<()> {
    let mut m = io::Manifest::new();
    m.push("auc", io::fmt_float(summary.auc));
    m.push("acc_star", io::fmt_float(summary.acc_star));
    m.push("k_star", io::fmt_float(summary.k_star));
    m.push("fnr_at_star", io::fmt_float(summary.fnr_at_star));
    m.push("tnr_at_star", io::fmt_float(summary.tnr_at_star));
    m.write(path)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate {
            case,
            seed,
            out,
            keep_fine,
            overrides,
            layout,
        } => {
            let layout: Layout = layout.parse()?;
            let setting = resolve_case(&case.case, case.setting)?;
            let (model_overrides, sim_overrides) = parse_overrides(&overrides)?;
            let pair = setting.model_pair(&model_overrides)?;
            let paths = match sim_overrides.get("paths") {
                Some(v) if v.fract() == 0.0 && *v > 0.0 => *v as usize,
                Some(v) => bail!("sim.paths must be a positive integer, got {v}"),
                None => 2000,
            };
            let delta = sim_overrides.get("delta").copied().unwrap_or(setting.delta);
            let config = SimConfig::new(
                delta,
                setting.dt,
                setting.t_span,
                setting.observations,
                paths,
                seed,
            )?;
            let dataset = generate_dataset(&pair, &config, keep_fine)?;
            let bundle = io::export_dataset(&dataset, &out, layout)?;
            println!(
                "wrote {} files to {} (digest {})",
                bundle.files.len(),
                out.display(),
                &bundle.content_digest[..12]
            );
        }
        Command::Lrt { data, mode, out } => {
            let (dataset, pair) = io::import_dataset(&data)?;
            let mode = score_mode(&mode, &pair)?;
            let scores = lrt::lrt_scores(&dataset, &pair, mode)?;
            std::fs::create_dir_all(&out).context("creating output directory")?;
            io::write_scores(&scores, &out.join("scores.csv"))?;
            let (_, summary) = driftbench_core::metrics::evaluate(&scores)?;
            write_metrics_summary(&summary, &out.join("metrics.txt"))?;
            println!(
                "{} scores: auc {:.4}, acc* {:.4}",
                scores.len(),
                summary.auc,
                summary.acc_star
            );
        }
        Command::Rocket {
            data,
            kernels,
            seed,
            runs,
            train_fraction,
            out,
        } => {
            if runs == 0 {
                bail!("runs must be positive");
            }
            let (dataset, pair) = io::import_dataset(&data)?;
            let opts = BenchOptions {
                paths: dataset.len(),
                split: SplitSpec::Fraction(train_fraction),
                kernels,
                ..BenchOptions::default()
            };
            let classifiers = build_classifiers(&["rocket"], &opts)?;
            std::fs::create_dir_all(&out).context("creating output directory")?;
            // One training pass per run; the test-side scores are exported
            // for external re-use and the metrics enter the report.
            let mut records = Vec::new();
            let mut rocs = Vec::new();
            for run in 0..runs {
                let run_seed = driftbench_core::rng::stream_seed(
                    seed,
                    &[driftbench_core::rng::purpose::RUN, run as u64],
                );
                let split = bench::split(&dataset, train_fraction, run_seed)?;
                let scores = classifiers[0].train_and_score(&dataset, &pair, &split, run_seed)?;
                io::write_scores(&scores, &out.join(format!("scores_run_{run}.csv")))?;
                let (curve, summary) = driftbench_core::metrics::evaluate(&scores)?;
                if run == 0 {
                    rocs.push(("rocket".to_string(), curve));
                }
                records.push(bench::RunRecord {
                    classifier: "rocket".into(),
                    run,
                    auc: summary.auc,
                    acc_star: summary.acc_star,
                    k_star: summary.k_star,
                    test_auc: summary.auc,
                    trained: true,
                });
            }
            let report = bench::BenchmarkReport {
                label: "rocket".into(),
                runs,
                master_seed: seed,
                summaries: bench::summarize_records(&records)?,
                records,
                rocs,
                dataset_digest: driftbench_core::simulate::content_digest(&dataset),
                dataset_params: dataset.params.clone(),
            };
            io::emit_report(&report, &out)?;
            println!("wrote report for {runs} runs to {}", out.display());
        }
        Command::Bench {
            case,
            runs,
            seed,
            classifiers,
            out,
            paths,
            kernels,
            train_fraction,
            regenerate,
            externals,
        } => {
            let setting = resolve_case(&case.case, case.setting)?;
            let opts = BenchOptions {
                paths,
                split: SplitSpec::Fraction(train_fraction),
                kernels,
                regenerate_per_run: regenerate,
                ..BenchOptions::default()
            };
            let names = classifier_list(&classifiers);
            let mut selected = build_classifiers(&names, &opts)?;
            for file in &externals {
                let scores = io::read_scores(file)?;
                let label = file
                    .file_stem()
                    .map(|s| s.to_string_lossy().to_string())
                    .unwrap_or_else(|| "external".to_string());
                selected
                    .push(Box::new(bench::ImportedScores { label, scores }) as Box<dyn Classifier>);
            }
            let report = bench::run_case(&setting, runs, seed, &selected, &opts)?;
            io::emit_report(&report, &out)?;
            println!("wrote {} to {}", report.label, out.display());
        }
        Command::Sweep {
            kind,
            values,
            case,
            setting,
            runs,
            seed,
            classifiers,
            out,
            paths,
            kernels,
        } => {
            let kind: SweepKind = kind.parse()?;
            let values: Vec<f64> = values
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| anyhow!("bad value `{v}`"))
                })
                .collect::<anyhow::Result<_>>()?;
            let base = resolve_case(&case, setting)?;
            let opts = BenchOptions {
                paths,
                kernels,
                ..BenchOptions::default()
            };
            let names = classifier_list(&classifiers);
            let selected = build_classifiers(&names, &opts)?;
            let reports = bench::sweep(kind, &values, &base, runs, seed, &selected, &opts)?;
            for (value, report) in &reports {
                let dir = out.join(format!("value_{value}"));
                io::emit_report(report, &dir)?;
            }
            println!("wrote {} sweep reports to {}", reports.len(), out.display());
        }
        Command::Report { r#in, out } => {
            let records = io::read_runs_csv(&r#in.join("runs.csv"))?;
            let summaries = bench::summarize_records(&records)?;
            let mut rocs = Vec::new();
            for entry in std::fs::read_dir(&r#in).context("reading report directory")? {
                let path = entry.context("reading report directory")?.path();
                let name = path
                    .file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .to_string();
                if let Some(stem) = name
                    .strip_prefix("roc_")
                    .and_then(|n| n.strip_suffix(".csv"))
                {
                    rocs.push((stem.to_string(), io::read_roc_csv(&path)?));
                }
            }
            rocs.sort_by(|a, b| a.0.cmp(&b.0));
            let label = io::Manifest::read(&r#in.join("manifest.txt"))
                .ok()
                .and_then(|m| m.get("label").map(str::to_string))
                .unwrap_or_else(|| "report".to_string());
            let report = bench::BenchmarkReport {
                label,
                runs: records.iter().map(|r| r.run).max().unwrap_or(0) + 1,
                master_seed: 0,
                records,
                summaries,
                rocs,
                dataset_digest: String::new(),
                dataset_params: Vec::new(),
            };
            io::emit_report(&report, &out)?;
            println!("re-rendered report to {}", out.display());
        }
        Command::Analytic {
            family,
            a0,
            a1,
            theta0,
            theta1,
            sigma,
            d,
            t_span,
            dt,
            samples,
            seed,
            out,
        } => {
            std::fs::create_dir_all(&out).context("creating output directory")?;
            let grid: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
            let mut rates = String::from("k,fnr,tnr,fnr_std_err,tnr_std_err\n");
            match family.as_str() {
                "bm" => {
                    let mut overrides = ParamMap::new();
                    overrides.insert("a0".into(), a0);
                    overrides.insert("a1".into(), a1);
                    overrides.insert("sigma".into(), sigma);
                    overrides.insert("d".into(), d as f64);
                    let pair = make_model_pair("constant-drift", &overrides)?;
                    for k in grid {
                        let r = analytic::bm_rates(&pair, t_span, k)?;
                        rates.push_str(&format!(
                            "{},{},{},,\n",
                            io::fmt_float(k),
                            io::fmt_float(r.fnr),
                            io::fmt_float(r.tnr)
                        ));
                    }
                    let (acc_star, k_star) = analytic::bm_optimal_accuracy(&pair, t_span)?;
                    let auc = analytic::bm_auc(&pair, t_span)?;
                    let mut m = io::Manifest::new();
                    m.push("family", "bm");
                    m.push("acc_star", io::fmt_float(acc_star));
                    m.push("k_star", io::fmt_float(k_star));
                    m.push("auc", io::fmt_float(auc));
                    m.write(&out.join("summary.txt"))?;
                }
                "ou" => {
                    let mut overrides = ParamMap::new();
                    overrides.insert("theta0".into(), theta0);
                    overrides.insert("theta1".into(), theta1);
                    overrides.insert("sigma".into(), sigma);
                    overrides.insert("d".into(), d as f64);
                    let pair = make_model_pair("ou", &overrides)?;
                    let observations = (t_span / dt).round() as usize;
                    let config = SimConfig::new(dt, dt, t_span, observations, 2, seed)?;
                    let scores = analytic::ou_montecarlo_scores(&pair, &config, samples, seed)?;
                    for k in grid {
                        let r = analytic::rates_from_scores(&scores, k)?;
                        rates.push_str(&format!(
                            "{},{},{},{},{}\n",
                            io::fmt_float(k),
                            io::fmt_float(r.fnr),
                            io::fmt_float(r.tnr),
                            io::fmt_float(r.fnr_std_err.unwrap_or(0.0)),
                            io::fmt_float(r.tnr_std_err.unwrap_or(0.0))
                        ));
                    }
                }
                other => bail!("unknown analytic family `{other}` (bm, ou)"),
            }
            std::fs::write(out.join("rates.csv"), rates).context("writing rates.csv")?;
            println!("wrote analytic references to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Single-line machine-parsable failure.
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! Acceptance suite: one test per shipped criterion (A1-A10), each printing
//! a PASS/FAIL line. Run with `--nocapture` to see the lines as they pass.

use driftbench_core::analytic;
use driftbench_core::bench::{
    build_classifiers, resolve_case, run_case, split, BenchOptions, BenchmarkReport,
};
use driftbench_core::io::{export_dataset, Layout};
use driftbench_core::lrt::{decision_threshold, lrt_scores, ScoreMode};
use driftbench_core::metrics;
use driftbench_core::models::ParamMap;
use driftbench_core::rng;
use driftbench_core::simulate::{generate_dataset, Dataset};
use rand::RngExt;
use std::sync::OnceLock;
use std::time::Instant;

const MASTER_SEED: u64 = 7;
const DESK_KERNELS: usize = 2000;
const DESK_RUNS: usize = 10;

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

fn case_dataset(case: &str, setting: usize, paths: usize, seed: u64, keep_fine: bool) -> Dataset {
    let s = resolve_case(case, setting).unwrap();
    let pair = s.model_pair(&ParamMap::new()).unwrap();
    let config = s.sim_config(paths, seed).unwrap();
    generate_dataset(&pair, &config, keep_fine).unwrap()
}

/// The shared desk-scale (a,1) report used by A5 and A6.
fn report_a1() -> &'static BenchmarkReport {
    static REPORT: OnceLock<BenchmarkReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let setting = resolve_case("a", 1).unwrap();
        let opts = BenchOptions {
            kernels: DESK_KERNELS,
            ..BenchOptions::default()
        };
        let classifiers = build_classifiers(&["lrt-hidden-truth", "rocket"], &opts).unwrap();
        run_case(&setting, DESK_RUNS, MASTER_SEED, &classifiers, &opts).unwrap()
    })
}

#[test]
fn a1_bm_closed_form_reproduction() {
    let start = Instant::now();
    let setting = resolve_case("a", 1).unwrap();
    let pair = setting.model_pair(&ParamMap::new()).unwrap();
    let dataset = case_dataset("a", 1, 2000, MASTER_SEED, true);
    let scores = lrt_scores(&dataset, &pair, ScoreMode::HiddenTruth).unwrap();
    let (_, summary) = metrics::evaluate(&scores).unwrap();

    let (acc_exact, _) = analytic::bm_optimal_accuracy(&pair, 1.0).unwrap();
    let auc_exact = analytic::bm_auc(&pair, 1.0).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let acc_ok = (summary.acc_star - acc_exact).abs() <= 0.035;
    let auc_ok = (summary.auc - auc_exact).abs() <= 0.03;
    verdict(
        "A1",
        acc_ok && auc_ok && elapsed < 30.0,
        &format!(
            "acc* {:.4} vs {:.4}, auc {:.4} vs {:.4}, {:.1}s",
            summary.acc_star, acc_exact, summary.auc, auc_exact, elapsed
        ),
    );
}

#[test]
fn a2_telescoping_exactness() {
    let start = Instant::now();
    let setting = resolve_case("a", 1).unwrap();
    let pair = setting.model_pair(&ParamMap::new()).unwrap();
    let dataset = case_dataset("a", 1, 1000, MASTER_SEED + 1, true);
    let hidden = lrt_scores(&dataset, &pair, ScoreMode::HiddenTruth).unwrap();
    let numerical = lrt_scores(&dataset, &pair, ScoreMode::Numerical).unwrap();
    let exact = lrt_scores(&dataset, &pair, ScoreMode::ExactBm).unwrap();

    let mut worst_ne = 0.0f64;
    let mut worst_hn = 0.0f64;
    for i in 0..dataset.len() {
        worst_ne = worst_ne.max((numerical.scores[i] - exact.scores[i]).abs());
        worst_hn = worst_hn.max((hidden.scores[i] - numerical.scores[i]).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "A2",
        worst_ne <= 1e-10 && worst_hn <= 1e-10 && elapsed < 5.0,
        &format!("|num-exact| {worst_ne:.2e}, |hidden-num| {worst_hn:.2e}, {elapsed:.1}s"),
    );
}

#[test]
fn a3_auc_growth_in_time_length() {
    let start = Instant::now();
    let expected = [0.760, 0.841, 0.921, 0.977];
    let mut observed = Vec::new();
    for setting_idx in 1..=4 {
        let setting = resolve_case("a", setting_idx).unwrap();
        let pair = setting.model_pair(&ParamMap::new()).unwrap();
        let dataset = case_dataset("a", setting_idx, 2000, MASTER_SEED, true);
        let scores = lrt_scores(&dataset, &pair, ScoreMode::HiddenTruth).unwrap();
        let (_, summary) = metrics::evaluate(&scores).unwrap();
        observed.push(summary.auc);
    }
    let elapsed = start.elapsed().as_secs_f64();
    let within = observed
        .iter()
        .zip(expected)
        .all(|(o, e)| (o - e).abs() <= 0.03);
    let increasing = observed.windows(2).all(|w| w[1] > w[0]);
    verdict(
        "A3",
        within && increasing && elapsed < 120.0,
        &format!("aucs {observed:?} vs {expected:?}, {elapsed:.1}s"),
    );
}

#[test]
fn a4_ou_consistency() {
    let start = Instant::now();
    let setting = resolve_case("c", 1).unwrap();
    let pair = setting.model_pair(&ParamMap::new()).unwrap();
    let config = setting.sim_config(2000, MASTER_SEED).unwrap();
    let dataset = generate_dataset(&pair, &config, false).unwrap();
    let scores = lrt_scores(&dataset, &pair, ScoreMode::ExactOu).unwrap();
    let threshold = decision_threshold(0.5);
    let confusion = metrics::confusion(&scores, threshold).unwrap();
    let (emp_fnr, emp_tnr) = (confusion.fnr(), confusion.tnr());
    let m_class = dataset.len() as f64 / 2.0;

    let mc = analytic::ou_rates_montecarlo(&pair, &config, 0.5, 100_000, MASTER_SEED + 2).unwrap();
    let fnr_comb = (emp_fnr * (1.0 - emp_fnr) / m_class + mc.fnr_std_err.unwrap().powi(2)).sqrt();
    let tnr_comb = (emp_tnr * (1.0 - emp_tnr) / m_class + mc.tnr_std_err.unwrap().powi(2)).sqrt();
    let elapsed = start.elapsed().as_secs_f64();
    let fnr_ok = (emp_fnr - mc.fnr).abs() <= 3.0 * fnr_comb;
    let tnr_ok = (emp_tnr - mc.tnr).abs() <= 3.0 * tnr_comb;
    verdict(
        "A4",
        fnr_ok && tnr_ok && elapsed < 120.0,
        &format!(
            "fnr {emp_fnr:.4} vs {:.4} (3se {:.4}), tnr {emp_tnr:.4} vs {:.4} (3se {:.4}), {elapsed:.1}s",
            mc.fnr,
            3.0 * fnr_comb,
            mc.tnr,
            3.0 * tnr_comb
        ),
    );
}

fn dominance_margins(report: &BenchmarkReport) -> Vec<f64> {
    (0..report.runs)
        .map(|run| {
            let hidden = report
                .records
                .iter()
                .find(|r| r.classifier == "lrt-hidden-truth" && r.run == run)
                .unwrap();
            let rocket = report
                .records
                .iter()
                .find(|r| r.classifier == "rocket" && r.run == run)
                .unwrap();
            hidden.test_auc - rocket.test_auc
        })
        .collect()
}

#[test]
fn a5_neyman_pearson_dominance() {
    let mut all_ok = true;
    let mut details = Vec::new();
    for case in ["a", "b", "e"] {
        let margins = if case == "a" {
            dominance_margins(report_a1())
        } else {
            let setting = resolve_case(case, 1).unwrap();
            let opts = BenchOptions {
                kernels: DESK_KERNELS,
                ..BenchOptions::default()
            };
            let classifiers = build_classifiers(&["lrt-hidden-truth", "rocket"], &opts).unwrap();
            let report = run_case(&setting, DESK_RUNS, MASTER_SEED, &classifiers, &opts).unwrap();
            dominance_margins(&report)
        };
        let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
        all_ok &= worst >= -0.02;
        details.push(format!("{case}: worst margin {worst:.4}"));
    }
    verdict("A5", all_ok, &details.join("; "));
}

#[test]
fn a6_baseline_near_optimality_on_bm() {
    let start = Instant::now();
    let report = report_a1();
    let rocket_aucs = report.classifier_values("rocket", "auc");
    let hidden_auc = report.classifier_values("lrt-hidden-truth", "auc")[0];
    let median = metrics::summarize_runs(&rocket_aucs).unwrap().median;
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "A6",
        (median - hidden_auc).abs() <= 0.05 && elapsed < 600.0,
        &format!("rocket median {median:.4} vs hidden {hidden_auc:.4}, {elapsed:.1}s"),
    );
}

#[test]
fn a7_suboptimality_gap_on_interacting_particles() {
    let setting = resolve_case("d", 1).unwrap();
    let opts = BenchOptions {
        kernels: DESK_KERNELS,
        ..BenchOptions::default()
    };
    let classifiers =
        build_classifiers(&["lrt-hidden-truth", "lrt-numerical", "rocket"], &opts).unwrap();
    let report = run_case(&setting, DESK_RUNS, MASTER_SEED, &classifiers, &opts).unwrap();
    let rocket_median = metrics::summarize_runs(&report.classifier_values("rocket", "auc"))
        .unwrap()
        .median;
    let numerical = report.classifier_values("lrt-numerical", "auc")[0];
    let hidden = report.classifier_values("lrt-hidden-truth", "auc")[0];
    let gap_ok = numerical >= rocket_median + 0.05;
    let hidden_ok = rocket_median < hidden - 0.1;
    verdict(
        "A7",
        gap_ok && hidden_ok,
        &format!("rocket median {rocket_median:.4}, numerical {numerical:.4}, hidden {hidden:.4}"),
    );
}

#[test]
fn a8_sampling_error_lemma() {
    let start = Instant::now();
    let setting = resolve_case("a", 1).unwrap();
    let pair = setting.model_pair(&ParamMap::new()).unwrap();
    let dataset = case_dataset("a", 1, 2000, MASTER_SEED, true);
    let scores = lrt_scores(&dataset, &pair, ScoreMode::HiddenTruth).unwrap();
    let threshold = decision_threshold(0.5);

    // FNR over the class-0 scores.
    let class0: Vec<f64> = scores
        .scores
        .iter()
        .zip(&scores.labels)
        .filter(|(_, l)| **l == 0)
        .map(|(s, _)| *s)
        .collect();
    let alpha = class0.iter().filter(|s| **s > threshold).count() as f64 / class0.len() as f64;

    let m = 500usize;
    let reps = 200usize;
    let mut stream = rng::stream(MASTER_SEED, &[0xB0075_u64]);
    let mut rates = Vec::with_capacity(reps);
    for _ in 0..reps {
        let rejected = (0..m)
            .filter(|_| {
                let idx = stream.random_range(0..class0.len());
                class0[idx] > threshold
            })
            .count();
        rates.push(rejected as f64 / m as f64);
    }
    let mean = rates.iter().sum::<f64>() / reps as f64;
    let std =
        (rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (reps - 1) as f64).sqrt();
    let predicted = (alpha * (1.0 - alpha) / m as f64).sqrt();
    let std_ok = (std - predicted).abs() <= 0.2 * predicted;

    let mut hoeffding_ok = true;
    let mut fractions = Vec::new();
    for eps in [0.05, 0.1] {
        let bound = 2.0 * (-(m as f64) * eps * eps / 2.0).exp();
        let fraction =
            rates.iter().filter(|r| (**r - alpha).abs() > eps).count() as f64 / reps as f64;
        hoeffding_ok &= fraction <= bound;
        fractions.push(format!("eps {eps}: {fraction:.3} <= {bound:.3}"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "A8",
        std_ok && hoeffding_ok && elapsed < 60.0,
        &format!(
            "bootstrap std {std:.5} vs clt {predicted:.5}; {}; {elapsed:.1}s",
            fractions.join("; ")
        ),
    );
}

#[test]
fn a9_determinism_across_thread_counts() {
    let start = Instant::now();
    let bundle_bytes = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let dataset = case_dataset("a", 1, 200, MASTER_SEED, true);
                let dir = std::env::temp_dir()
                    .join("driftbench-acceptance")
                    .join(format!("a9-bundle-{threads}-{}", std::process::id()));
                let _ = std::fs::remove_dir_all(&dir);
                let bundle = export_dataset(&dataset, &dir, Layout::Long).unwrap();
                let mut all = Vec::new();
                for f in &bundle.files {
                    all.extend(std::fs::read(f).unwrap());
                }
                all
            })
    };
    let bundles_equal = bundle_bytes(1) == bundle_bytes(4);

    let report_bytes = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let setting = resolve_case("a", 1).unwrap();
                let opts = BenchOptions {
                    paths: 120,
                    kernels: 60,
                    ..BenchOptions::default()
                };
                let classifiers =
                    build_classifiers(&["lrt-hidden-truth", "lrt-numerical", "rocket"], &opts)
                        .unwrap();
                let report = run_case(&setting, 2, MASTER_SEED, &classifiers, &opts).unwrap();
                let dir = std::env::temp_dir()
                    .join("driftbench-acceptance")
                    .join(format!("a9-report-{threads}-{}", std::process::id()));
                let _ = std::fs::remove_dir_all(&dir);
                let files = driftbench_core::io::emit_report(&report, &dir).unwrap();
                let mut all = Vec::new();
                for f in files {
                    all.extend(std::fs::read(&f).unwrap());
                }
                all
            })
    };
    let reports_equal = report_bytes(1) == report_bytes(4);
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "A9",
        bundles_equal && reports_equal && elapsed < 60.0,
        &format!("bundles equal: {bundles_equal}, reports equal: {reports_equal}, {elapsed:.1}s"),
    );
}

#[test]
fn a10_frequency_insensitivity() {
    let start = Instant::now();
    let mut aucs = Vec::new();
    for setting_idx in 1..=4 {
        let setting = resolve_case("e", setting_idx).unwrap();
        let pair = setting.model_pair(&ParamMap::new()).unwrap();
        let dataset = case_dataset("e", setting_idx, 2000, MASTER_SEED, true);
        let scores = lrt_scores(&dataset, &pair, ScoreMode::HiddenTruth).unwrap();
        let (_, summary) = metrics::evaluate(&scores).unwrap();
        aucs.push(summary.auc);
    }
    let range = aucs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - aucs.iter().cloned().fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "A10",
        range < 0.05 && elapsed < 180.0,
        &format!("hidden-truth aucs {aucs:?}, range {range:.4}, {elapsed:.1}s"),
    );
}

/// The splits a trained classifier sees match the shipped protocol sizes.
#[test]
fn protocol_split_sizes() {
    let dataset = case_dataset("a", 1, 2000, MASTER_SEED, false);
    let s = split(&dataset, 0.75, 1).unwrap();
    assert_eq!((s.train.len(), s.test.len()), (1500, 500));
}

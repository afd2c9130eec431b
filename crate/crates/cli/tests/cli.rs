//! End-to-end checks of the command-line surface, driving the compiled
//! binary the way a user would.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_driftbench"))
}

fn work_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir()
        .join("driftbench-cli-tests")
        .join(format!("{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        out.insert(name, std::fs::read(&path).unwrap());
    }
    out
}

fn expect_success(output: &Output) {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn generate_is_deterministic_across_invocations() {
    let dir = work_dir("generate-twice");
    for sub in ["one", "two"] {
        let out = bin()
            .args([
                "generate",
                "--case",
                "a",
                "--setting",
                "1",
                "--seed",
                "7",
                "--keep-fine",
                "--override",
                "sim.paths=60",
                "--out",
            ])
            .arg(dir.join(sub))
            .output()
            .unwrap();
        expect_success(&out);
    }
    assert_eq!(
        read_dir_bytes(&dir.join("one")),
        read_dir_bytes(&dir.join("two"))
    );
}

#[test]
fn lrt_requires_fine_paths_for_hidden_mode() {
    let dir = work_dir("lrt-missing-fine");
    let bundle = dir.join("bundle");
    let out = bin()
        .args([
            "generate",
            "--case",
            "a",
            "--setting",
            "1",
            "--seed",
            "3",
            "--override",
            "sim.paths=20",
            "--out",
        ])
        .arg(&bundle)
        .output()
        .unwrap();
    expect_success(&out);

    let out = bin()
        .args(["lrt", "--mode", "hidden", "--data"])
        .arg(&bundle)
        .arg("--out")
        .arg(dir.join("scores"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().count(), 1, "stderr: {stderr}");
    assert!(stderr.starts_with("error:"));
    assert!(stderr.contains("fine"));
}

#[test]
fn lrt_numerical_writes_scores_and_metrics() {
    let dir = work_dir("lrt-numerical");
    let bundle = dir.join("bundle");
    expect_success(
        &bin()
            .args([
                "generate",
                "--case",
                "c",
                "--setting",
                "1",
                "--seed",
                "5",
                "--override",
                "sim.paths=40",
                "--out",
            ])
            .arg(&bundle)
            .output()
            .unwrap(),
    );
    expect_success(
        &bin()
            .args(["lrt", "--mode", "exact", "--data"])
            .arg(&bundle)
            .arg("--out")
            .arg(dir.join("scores"))
            .output()
            .unwrap(),
    );
    let scores = std::fs::read_to_string(dir.join("scores/scores.csv")).unwrap();
    assert!(scores.lines().any(|l| l.ends_with(",exact-ou")));
    let metrics = std::fs::read_to_string(dir.join("scores/metrics.txt")).unwrap();
    assert!(metrics.contains("auc ="));
}

#[test]
fn unknown_override_key_is_a_single_line_error() {
    let dir = work_dir("bad-override");
    let out = bin()
        .args([
            "generate",
            "--case",
            "a",
            "--setting",
            "1",
            "--seed",
            "1",
            "--override",
            "model.quux=2",
            "--out",
        ])
        .arg(dir.join("bundle"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.starts_with("error:"));
    assert!(stderr.contains("quux"));
}

#[test]
fn bench_emits_report_and_accepts_reimported_scores() {
    let dir = work_dir("bench-external");
    let bundle = dir.join("bundle");
    expect_success(
        &bin()
            .args([
                "generate",
                "--case",
                "a",
                "--setting",
                "1",
                "--seed",
                "11",
                "--keep-fine",
                "--override",
                "sim.paths=60",
                "--out",
            ])
            .arg(&bundle)
            .output()
            .unwrap(),
    );
    // Rocket run exports per-run test scores.
    expect_success(
        &bin()
            .args([
                "rocket",
                "--kernels",
                "50",
                "--seed",
                "11",
                "--runs",
                "1",
                "--data",
            ])
            .arg(&bundle)
            .arg("--out")
            .arg(dir.join("rocket"))
            .output()
            .unwrap(),
    );
    let exported = dir.join("rocket/scores_run_0.csv");
    assert!(exported.exists());

    // A bench on the same seed consumes them as an external classifier.
    expect_success(
        &bin()
            .args([
                "bench",
                "--case",
                "a",
                "--setting",
                "1",
                "--runs",
                "2",
                "--seed",
                "11",
                "--paths",
                "60",
                "--kernels",
                "50",
                "--classifiers",
                "lrt-numerical",
                "--external",
            ])
            .arg(&exported)
            .arg("--out")
            .arg(dir.join("report"))
            .output()
            .unwrap(),
    );
    let runs = std::fs::read_to_string(dir.join("report/runs.csv")).unwrap();
    assert!(runs.lines().any(|l| l.starts_with("scores_run_0,")));
    assert!(dir.join("report/roc_overlay.svg").exists());
    assert!(dir.join("report/box.svg").exists());

    // Tampering with the bundle invalidates the external import.
    let labels_path = bundle.join("labels.csv");
    let labels = std::fs::read_to_string(&labels_path).unwrap();
    std::fs::write(&labels_path, labels.replace("0,0", "0,1")).unwrap();
    let out = bin()
        .args([
            "bench",
            "--case",
            "a",
            "--setting",
            "1",
            "--runs",
            "1",
            "--seed",
            "12",
            "--paths",
            "60",
            "--classifiers",
            "lrt-numerical",
            "--external",
        ])
        .arg(&exported)
        .arg("--out")
        .arg(dir.join("report2"))
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn report_rerenders_stored_tables() {
    let dir = work_dir("report-rerender");
    expect_success(
        &bin()
            .args([
                "bench",
                "--case",
                "a",
                "--setting",
                "1",
                "--runs",
                "2",
                "--seed",
                "3",
                "--paths",
                "40",
                "--kernels",
                "30",
                "--classifiers",
                "lrt-numerical,rocket",
                "--out",
            ])
            .arg(dir.join("report"))
            .output()
            .unwrap(),
    );
    expect_success(
        &bin()
            .args(["report", "--in"])
            .arg(dir.join("report"))
            .arg("--out")
            .arg(dir.join("rerendered"))
            .output()
            .unwrap(),
    );
    let original = std::fs::read_to_string(dir.join("report/summary.csv")).unwrap();
    let rerendered = std::fs::read_to_string(dir.join("rerendered/summary.csv")).unwrap();
    assert_eq!(original, rerendered);
    assert!(dir.join("rerendered/roc_overlay.svg").exists());
}

#[test]
fn analytic_references_match_known_values() {
    let dir = work_dir("analytic");
    expect_success(
        &bin()
            .args([
                "analytic", "--family", "bm", "--a0", "0", "--a1", "1", "--t-span", "1", "--out",
            ])
            .arg(dir.join("bm"))
            .output()
            .unwrap(),
    );
    let summary = std::fs::read_to_string(dir.join("bm/summary.txt")).unwrap();
    let acc: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("acc_star = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((acc - 0.6914624612740131).abs() < 1e-12);
    let rates = std::fs::read_to_string(dir.join("bm/rates.csv")).unwrap();
    assert_eq!(rates.lines().count(), 100); // header + k = 0.01..0.99

    expect_success(
        &bin()
            .args([
                "analytic",
                "--family",
                "ou",
                "--theta0",
                "-1",
                "--theta1",
                "-0.5",
                "--t-span",
                "2",
                "--dt",
                "0.1",
                "--samples",
                "2000",
                "--seed",
                "1",
                "--out",
            ])
            .arg(dir.join("ou"))
            .output()
            .unwrap(),
    );
    let rates = std::fs::read_to_string(dir.join("ou/rates.csv")).unwrap();
    assert_eq!(rates.lines().count(), 100);
}

#[test]
fn sweep_writes_one_report_per_value() {
    let dir = work_dir("sweep");
    expect_success(
        &bin()
            .args([
                "sweep",
                "--kind",
                "time-length",
                "--values",
                "1,2",
                "--case",
                "a",
                "--setting",
                "1",
                "--runs",
                "1",
                "--seed",
                "9",
                "--paths",
                "60",
                "--classifiers",
                "lrt-numerical",
                "--out",
            ])
            .arg(&dir)
            .output()
            .unwrap(),
    );
    assert!(dir.join("value_1/runs.csv").exists());
    assert!(dir.join("value_2/runs.csv").exists());
}

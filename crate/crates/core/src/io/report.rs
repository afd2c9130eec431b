//! Benchmark report emission: run tables, five-number summaries, per
//! classifier ROC curves, and the two SVG charts.

use super::{fmt_float, parse_float, parse_usize, read_file, svg, write_file, Manifest};
use crate::bench::{BenchmarkReport, RunRecord};
use crate::error::{Error, Result};
use crate::TOOL_VERSION;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const RUNS_FILE: &str = "runs.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Write the full file set for one report. Produces one ROC CSV and one
/// overlay entry per classifier, the AUC/ACC* run table, the five-number
/// summary table, two SVGs, and a manifest.
pub fn emit_report(report: &BenchmarkReport, directory: &Path) -> Result<Vec<PathBuf>> {
    if report.records.is_empty() {
        return Err(Error::EmptyInput("report records".into()));
    }
    fs::create_dir_all(directory)
        .map_err(|e| Error::io(format!("creating {}", directory.display()), e))?;
    let mut files = Vec::new();

    let mut runs = String::from("classifier,run,auc,acc_star,k_star,test_auc\n");
    for r in &report.records {
        let _ = writeln!(
            runs,
            "{},{},{},{},{},{}",
            r.classifier,
            r.run,
            fmt_float(r.auc),
            fmt_float(r.acc_star),
            fmt_float(r.k_star),
            fmt_float(r.test_auc)
        );
    }
    let runs_path = directory.join(RUNS_FILE);
    write_file(&runs_path, runs.as_bytes())?;
    files.push(runs_path);

    let mut summary = String::from("classifier,metric,min,q1,median,q3,max,outliers\n");
    for s in &report.summaries {
        let outliers = s
            .summary
            .outliers
            .iter()
            .map(|v| fmt_float(*v))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{},{}",
            s.classifier,
            s.metric,
            fmt_float(s.summary.min),
            fmt_float(s.summary.q1),
            fmt_float(s.summary.median),
            fmt_float(s.summary.q3),
            fmt_float(s.summary.max),
            outliers
        );
    }
    let summary_path = directory.join(SUMMARY_FILE);
    write_file(&summary_path, summary.as_bytes())?;
    files.push(summary_path);

    for (name, curve) in &report.rocs {
        let mut out = String::from("threshold,fpr,tpr\n");
        for (t, (fpr, tpr)) in curve.thresholds.iter().zip(&curve.points) {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_float(*t),
                fmt_float(*fpr),
                fmt_float(*tpr)
            );
        }
        let path = directory.join(format!("roc_{}.csv", sanitize(name)));
        write_file(&path, out.as_bytes())?;
        files.push(path);
    }

    let curves: Vec<(String, &crate::metrics::RocCurve)> =
        report.rocs.iter().map(|(n, c)| (n.clone(), c)).collect();
    let overlay = svg::roc_overlay(&format!("ROC: {}", report.label), &curves);
    let overlay_path = directory.join("roc_overlay.svg");
    write_file(&overlay_path, overlay.as_bytes())?;
    files.push(overlay_path);

    let mut auc_groups = Vec::new();
    let mut acc_groups = Vec::new();
    for s in &report.summaries {
        let group = (s.classifier.clone(), s.values.clone());
        if s.metric == "auc" {
            auc_groups.push(group);
        } else {
            acc_groups.push(group);
        }
    }
    let boxes = svg::box_chart(
        &format!("{} over {} runs: AUC and ACC*", report.label, report.runs),
        &[
            svg::BoxPanel {
                y_label: "AUC".into(),
                groups: auc_groups,
            },
            svg::BoxPanel {
                y_label: "ACC*".into(),
                groups: acc_groups,
            },
        ],
    );
    let box_path = directory.join("box.svg");
    write_file(&box_path, boxes.as_bytes())?;
    files.push(box_path);

    let mut manifest = Manifest::new();
    manifest.push("schema_version", "1");
    manifest.push("tool_version", TOOL_VERSION);
    manifest.push("label", &report.label);
    manifest.push("runs", report.runs.to_string());
    manifest.push("seed", report.master_seed.to_string());
    manifest.push("dataset_digest", &report.dataset_digest);
    for (k, v) in &report.dataset_params {
        manifest.push(format!("dataset.{k}"), v.clone());
    }
    let manifest_path = directory.join("manifest.txt");
    manifest.write(&manifest_path)?;
    files.push(manifest_path);

    Ok(files)
}

/// Read a ROC CSV back (the inverse of the per-classifier emission).
pub fn read_roc_csv(path: &Path) -> Result<crate::metrics::RocCurve> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("threshold,fpr,tpr") => {}
        _ => return Err(Error::schema("roc", "unexpected header")),
    }
    let mut thresholds = Vec::new();
    let mut points = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::schema("roc", format!("bad row `{line}`")));
        }
        thresholds.push(parse_float(fields[0], "roc")?);
        points.push((
            parse_float(fields[1], "roc")?,
            parse_float(fields[2], "roc")?,
        ));
    }
    Ok(crate::metrics::RocCurve { points, thresholds })
}

/// Read a run table back (the inverse of the `runs.csv` emission), for
/// re-rendering summaries and charts from a stored report.
pub fn read_runs_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("classifier,run,auc,acc_star,k_star,test_auc") => {}
        _ => return Err(Error::schema(RUNS_FILE, "unexpected header")),
    }
    let mut records = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::schema(RUNS_FILE, format!("bad row `{line}`")));
        }
        records.push(RunRecord {
            classifier: fields[0].to_string(),
            run: parse_usize(fields[1], RUNS_FILE)?,
            auc: parse_float(fields[2], RUNS_FILE)?,
            acc_star: parse_float(fields[3], RUNS_FILE)?,
            k_star: parse_float(fields[4], RUNS_FILE)?,
            test_auc: parse_float(fields[5], RUNS_FILE)?,
            trained: true,
        });
    }
    if records.is_empty() {
        return Err(Error::schema(RUNS_FILE, "no rows"));
    }
    Ok(records)
}

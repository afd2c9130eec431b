//! Dataset bundles: path data, labels, optional fine paths, and a manifest
//! with per-file digests.

use super::{fmt_float, parse_float, parse_usize, read_file, sha256_file, write_file, Manifest};
use crate::error::{Error, Result};
use crate::models::{pair_from_manifest, ModelPair};
use crate::simulate::{content_digest, Dataset, GridKind, SimConfig, TimeSeriesPath};
use crate::TOOL_VERSION;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const MANIFEST_FILE: &str = "manifest.txt";
pub const DATA_FILE: &str = "data.csv";
pub const LABELS_FILE: &str = "labels.csv";
pub const TIMES_FILE: &str = "times.csv";
pub const FINE_FILE: &str = "fine.csv";

/// On-disk layout of the observed paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// One row per observation: `path_id,label,step_index,time,x_1..x_d`.
    Long,
    /// One row per path (`label` then every coordinate at every step) with
    /// the shared time grid in a separate file.
    Wide,
}

impl Layout {
    fn id(self) -> &'static str {
        match self {
            Layout::Long => "long",
            Layout::Wide => "wide",
        }
    }
}

impl std::str::FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "long" => Ok(Layout::Long),
            "wide" => Ok(Layout::Wide),
            other => Err(Error::schema(
                MANIFEST_FILE,
                format!("unknown layout `{other}`"),
            )),
        }
    }
}

/// Files written for one dataset.
#[derive(Debug, Clone)]
pub struct ExportBundle {
    pub directory: PathBuf,
    pub files: Vec<PathBuf>,
    pub content_digest: String,
}

fn long_csv(paths: &[TimeSeriesPath], labels: &[u8], dim: usize) -> String {
    let mut out = String::new();
    out.push_str("path_id,label,step_index,time");
    for c in 1..=dim {
        let _ = write!(out, ",x_{c}");
    }
    out.push('\n');
    for (pid, (path, label)) in paths.iter().zip(labels).enumerate() {
        for step in 0..path.len() {
            let _ = write!(
                out,
                "{pid},{label},{step},{}",
                fmt_float(path.times()[step])
            );
            for v in path.state(step) {
                let _ = write!(out, ",{}", fmt_float(*v));
            }
            out.push('\n');
        }
    }
    out
}

fn wide_csv(dataset: &Dataset) -> String {
    let dim = dataset.dim();
    let steps = dataset.paths[0].len();
    let mut out = String::new();
    out.push_str("label");
    for step in 0..steps {
        for c in 1..=dim {
            let _ = write!(out, ",x_{step}_{c}");
        }
    }
    out.push('\n');
    for (path, label) in dataset.paths.iter().zip(&dataset.labels) {
        let _ = write!(out, "{label}");
        for step in 0..steps {
            for v in path.state(step) {
                let _ = write!(out, ",{}", fmt_float(*v));
            }
        }
        out.push('\n');
    }
    out
}

fn times_csv(path: &TimeSeriesPath) -> String {
    let mut out = String::from("step_index,time\n");
    for (step, t) in path.times().iter().enumerate() {
        let _ = writeln!(out, "{step},{}", fmt_float(*t));
    }
    out
}

fn labels_csv(labels: &[u8]) -> String {
    let mut out = String::from("path_id,label\n");
    for (pid, label) in labels.iter().enumerate() {
        let _ = writeln!(out, "{pid},{label}");
    }
    out
}

/// Write a dataset bundle. The manifest records the model parameters, the
/// generation config, a content digest of the observed data, and a SHA-256
/// of every data file's bytes.
pub fn export_dataset(dataset: &Dataset, directory: &Path, layout: Layout) -> Result<ExportBundle> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("dataset".into()));
    }
    fs::create_dir_all(directory)
        .map_err(|e| Error::io(format!("creating {}", directory.display()), e))?;
    let mut files = Vec::new();

    let data_path = directory.join(DATA_FILE);
    match layout {
        Layout::Long => write_file(
            &data_path,
            long_csv(&dataset.paths, &dataset.labels, dataset.dim()).as_bytes(),
        )?,
        Layout::Wide => write_file(&data_path, wide_csv(dataset).as_bytes())?,
    }
    files.push(data_path);

    let labels_path = directory.join(LABELS_FILE);
    write_file(&labels_path, labels_csv(&dataset.labels).as_bytes())?;
    files.push(labels_path);

    if layout == Layout::Wide {
        let times_path = directory.join(TIMES_FILE);
        write_file(&times_path, times_csv(&dataset.paths[0]).as_bytes())?;
        files.push(times_path);
    }

    if let Some(fine) = &dataset.fine {
        let fine_path = directory.join(FINE_FILE);
        write_file(
            &fine_path,
            long_csv(fine, &dataset.labels, dataset.dim()).as_bytes(),
        )?;
        files.push(fine_path);
    }

    let digest = content_digest(dataset);
    let mut manifest = Manifest::new();
    manifest.push("schema_version", "1");
    manifest.push("tool_version", TOOL_VERSION);
    manifest.push("layout", layout.id());
    manifest.push("keep_fine", if dataset.fine.is_some() { "1" } else { "0" });
    for (k, v) in &dataset.params {
        manifest.push(k.clone(), v.clone());
    }
    let c = &dataset.config;
    manifest.push("sim.delta", fmt_float(c.delta));
    manifest.push("sim.dt", fmt_float(c.dt));
    manifest.push("sim.t_span", fmt_float(c.t_span));
    manifest.push("sim.observations", c.observations.to_string());
    manifest.push("sim.paths", c.paths.to_string());
    manifest.push("seed", c.master_seed.to_string());
    manifest.push("content_digest", &digest);
    for f in &files {
        let name = f.file_name().unwrap().to_string_lossy().to_string();
        manifest.push(format!("file_sha256.{name}"), sha256_file(f)?);
    }
    let manifest_path = directory.join(MANIFEST_FILE);
    manifest.write(&manifest_path)?;
    files.push(manifest_path);

    Ok(ExportBundle {
        directory: directory.to_path_buf(),
        files,
        content_digest: digest,
    })
}

struct CsvReader<'a> {
    file: &'a str,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_csv(path: &Path, file: &'static str) -> Result<CsvReader<'static>> {
    let text = read_file(path)?;
    let mut lines = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::schema(file, "empty file"))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|s| s.trim().to_string()).collect())
        .collect();
    Ok(CsvReader { file, header, rows })
}

fn parse_long(
    reader: &CsvReader<'_>,
    dim: usize,
    expected_paths: usize,
    grid: GridKind,
) -> Result<Vec<TimeSeriesPath>> {
    let file = reader.file;
    if reader.header.len() != 4 + dim {
        return Err(Error::schema(
            file,
            format!(
                "expected {} columns, found {}",
                4 + dim,
                reader.header.len()
            ),
        ));
    }
    let mut paths: Vec<(Vec<f64>, Vec<f64>)> = vec![(Vec::new(), Vec::new()); expected_paths];
    for row in &reader.rows {
        if row.len() != 4 + dim {
            return Err(Error::schema(file, format!("bad row width {}", row.len())));
        }
        let pid = parse_usize(&row[0], file)?;
        if pid >= expected_paths {
            return Err(Error::schema(file, format!("path id {pid} out of range")));
        }
        paths[pid].0.push(parse_float(&row[3], file)?);
        for v in &row[4..] {
            paths[pid].1.push(parse_float(v, file)?);
        }
    }
    paths
        .into_iter()
        .map(|(times, states)| {
            TimeSeriesPath::new(times, states, dim, grid)
                .map_err(|e| Error::schema(file, e.to_string()))
        })
        .collect()
}

/// Read a bundle back, verifying the per-file digests and the content
/// digest before returning the dataset and its model pair.
pub fn import_dataset(directory: &Path) -> Result<(Dataset, ModelPair)> {
    let manifest = Manifest::read(&directory.join(MANIFEST_FILE))?;
    for (key, recorded) in manifest.with_prefix("file_sha256.") {
        let name = key.trim_start_matches("file_sha256.");
        let path = directory.join(name);
        if !path.exists() {
            return Err(Error::schema(MANIFEST_FILE, format!("missing file {name}")));
        }
        let got = sha256_file(&path)?;
        if got != recorded {
            return Err(Error::DigestMismatch {
                file: name.to_string(),
                expected: recorded,
                got,
            });
        }
    }

    let layout: Layout = manifest.require("layout")?.parse()?;
    let keep_fine = manifest.require("keep_fine")? == "1";
    let d = parse_usize(manifest.require("d")?, MANIFEST_FILE)?;
    let config = SimConfig::new(
        parse_float(manifest.require("sim.delta")?, MANIFEST_FILE)?,
        parse_float(manifest.require("sim.dt")?, MANIFEST_FILE)?,
        parse_float(manifest.require("sim.t_span")?, MANIFEST_FILE)?,
        parse_usize(manifest.require("sim.observations")?, MANIFEST_FILE)?,
        parse_usize(manifest.require("sim.paths")?, MANIFEST_FILE)?,
        manifest
            .require("seed")?
            .parse::<u64>()
            .map_err(|_| Error::schema(MANIFEST_FILE, "bad seed"))?,
    )?;

    let labels_reader = read_csv(&directory.join(LABELS_FILE), LABELS_FILE)?;
    if labels_reader.header != ["path_id", "label"] {
        return Err(Error::schema(LABELS_FILE, "unexpected header"));
    }
    let mut labels = vec![0u8; labels_reader.rows.len()];
    for row in &labels_reader.rows {
        let pid = parse_usize(&row[0], LABELS_FILE)?;
        let label = parse_usize(&row[1], LABELS_FILE)?;
        if pid >= labels.len() || label > 1 {
            return Err(Error::schema(LABELS_FILE, "bad row"));
        }
        labels[pid] = label as u8;
    }
    if labels.len() != config.paths {
        return Err(Error::schema(
            LABELS_FILE,
            format!("{} labels for {} paths", labels.len(), config.paths),
        ));
    }

    let data_reader = read_csv(&directory.join(DATA_FILE), DATA_FILE)?;
    let paths = match layout {
        Layout::Long => {
            let paths = parse_long(&data_reader, d, config.paths, GridKind::Observed)?;
            // Embedded labels must agree with the labels file.
            for row in &data_reader.rows {
                let pid = parse_usize(&row[0], DATA_FILE)?;
                if parse_usize(&row[1], DATA_FILE)? as u8 != labels[pid] {
                    return Err(Error::schema(
                        DATA_FILE,
                        format!("label mismatch at path {pid}"),
                    ));
                }
            }
            paths
        }
        Layout::Wide => {
            let times_reader = read_csv(&directory.join(TIMES_FILE), TIMES_FILE)?;
            let times: Vec<f64> = times_reader
                .rows
                .iter()
                .map(|r| parse_float(&r[1], TIMES_FILE))
                .collect::<Result<_>>()?;
            let expected_cols = 1 + d * times.len();
            if data_reader.header.len() != expected_cols {
                return Err(Error::schema(
                    DATA_FILE,
                    format!(
                        "expected {expected_cols} columns, found {}",
                        data_reader.header.len()
                    ),
                ));
            }
            data_reader
                .rows
                .iter()
                .enumerate()
                .map(|(pid, row)| {
                    if parse_usize(&row[0], DATA_FILE)? as u8 != labels[pid] {
                        return Err(Error::schema(
                            DATA_FILE,
                            format!("label mismatch at path {pid}"),
                        ));
                    }
                    let states = row[1..]
                        .iter()
                        .map(|v| parse_float(v, DATA_FILE))
                        .collect::<Result<Vec<f64>>>()?;
                    TimeSeriesPath::new(times.clone(), states, d, GridKind::Observed)
                        .map_err(|e| Error::schema(DATA_FILE, e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };

    let fine = if keep_fine {
        let fine_reader = read_csv(&directory.join(FINE_FILE), FINE_FILE)?;
        Some(parse_long(&fine_reader, d, config.paths, GridKind::Fine)?)
    } else {
        None
    };

    let dataset = Dataset {
        paths,
        labels,
        fine,
        config,
        params: manifest
            .entries()
            .iter()
            .filter(|(k, _)| {
                k == "family" || k == "d" || k.starts_with("model0.") || k.starts_with("model1.")
            })
            .cloned()
            .collect(),
    };

    let recorded = manifest.require("content_digest")?;
    let recomputed = content_digest(&dataset);
    if recorded != recomputed {
        return Err(Error::DigestMismatch {
            file: DATA_FILE.to_string(),
            expected: recorded.to_string(),
            got: recomputed,
        });
    }

    let pair = pair_from_manifest(&dataset.params)?;
    if pair.dim() != dataset.dim() {
        return Err(Error::schema(MANIFEST_FILE, "model dimension mismatch"));
    }
    Ok((dataset, pair))
}

//! Score files: one row per scored path, tied to a dataset by its content
//! digest so externally computed scores can be ranked against the same
//! references.

use super::{fmt_float, parse_float, parse_usize, read_file, write_file};
use crate::error::{Error, Result};
use crate::lrt::{ScoreMode, ScoreSet};
use std::fmt::Write as _;
use std::path::Path;

const SCORES_FILE: &str = "scores";

/// Write a score set: a digest comment line, a header, then
/// `path_id,label,score,mode` rows.
pub fn write_scores(scores: &ScoreSet, path: &Path) -> Result<()> {
    let mut out = String::new();
    if let Some(digest) = &scores.provenance {
        let _ = writeln!(out, "# manifest_digest={digest}");
    }
    out.push_str("path_id,label,score,mode\n");
    for i in 0..scores.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            scores.path_ids[i],
            scores.labels[i],
            fmt_float(scores.scores[i]),
            scores.mode
        );
    }
    write_file(path, out.as_bytes())
}

/// Read a score file. The digest comment is required for imports that will
/// be validated against a dataset; rows must share one mode.
pub fn read_scores(path: &Path) -> Result<ScoreSet> {
    let text = read_file(path)?;
    let mut provenance = None;
    let mut header_seen = false;
    let mut path_ids = Vec::new();
    let mut labels = Vec::new();
    let mut scores = Vec::new();
    let mut mode: Option<ScoreMode> = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                if k.trim() == "manifest_digest" {
                    provenance = Some(v.trim().to_string());
                }
            }
            continue;
        }
        if !header_seen {
            if line != "path_id,label,score,mode" {
                return Err(Error::schema(SCORES_FILE, "unexpected header"));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::schema(
                SCORES_FILE,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        path_ids.push(parse_usize(fields[0], SCORES_FILE)?);
        let label = parse_usize(fields[1], SCORES_FILE)?;
        if label > 1 {
            return Err(Error::schema(
                SCORES_FILE,
                format!("label {label} not binary"),
            ));
        }
        labels.push(label as u8);
        let score = parse_float(fields[2], SCORES_FILE)?;
        if !score.is_finite() {
            return Err(Error::schema(SCORES_FILE, "non-finite score"));
        }
        scores.push(score);
        let row_mode: ScoreMode = fields[3].parse()?;
        match mode {
            None => mode = Some(row_mode),
            Some(m) if m == row_mode => {}
            Some(m) => {
                return Err(Error::schema(
                    SCORES_FILE,
                    format!("mixed modes {m} and {row_mode}"),
                ))
            }
        }
    }
    let mode = mode.ok_or_else(|| Error::schema(SCORES_FILE, "no score rows"))?;
    ScoreSet::new(scores, labels, path_ids, mode, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_round_trip() {
        let dir = std::env::temp_dir().join("driftbench-scores-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("scores.csv");
        let scores = ScoreSet::new(
            vec![0.25, -1.5, std::f64::consts::E],
            vec![0, 1, 1],
            vec![0, 1, 2],
            ScoreMode::Numerical,
            Some("abc123".into()),
        )
        .unwrap();
        write_scores(&scores, &path).unwrap();
        let back = read_scores(&path).unwrap();
        assert_eq!(back.provenance.as_deref(), Some("abc123"));
        assert_eq!(back.mode, ScoreMode::Numerical);
        assert_eq!(back.path_ids, scores.path_ids);
        for (a, b) in back.scores.iter().zip(&scores.scores) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn malformed_scores_are_rejected() {
        let dir = std::env::temp_dir().join("driftbench-scores-bad");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("scores.csv");
        std::fs::write(&path, "path_id,label,score,mode\n0,2,1.0,numerical\n").unwrap();
        assert!(read_scores(&path).is_err());
        std::fs::write(
            &path,
            "path_id,label,score,mode\n0,0,1.0,numerical\n1,1,2.0,exact-bm\n",
        )
        .unwrap();
        assert!(read_scores(&path).is_err());
    }
}

//! Self-contained SVG 1.1 line and box plots; no external renderer.

use crate::metrics::RocCurve;
use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 48.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn open(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = write!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/><text x="{}" y="22" font-family="sans-serif" font-size="15" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    );
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_LEFT + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT
            - MARGIN_BOTTOM
            - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str, x_ticks: &[f64]) {
    let _ = write!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        MARGIN_LEFT,
        MARGIN_TOP,
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    );
    for &t in x_ticks {
        let x = frame.x(t);
        let _ = write!(
            out,
            r#"<line x1="{x}" y1="{0}" x2="{x}" y2="{1}" stroke="black"/><text x="{x}" y="{2}" font-family="sans-serif" font-size="11" text-anchor="middle">{t:.2}</text>"#,
            HEIGHT - MARGIN_BOTTOM,
            HEIGHT - MARGIN_BOTTOM + 5.0,
            HEIGHT - MARGIN_BOTTOM + 18.0
        );
    }
    for i in 0..=4 {
        let v = frame.y0 + (frame.y1 - frame.y0) * i as f64 / 4.0;
        let y = frame.y(v);
        let _ = write!(
            out,
            r#"<line x1="{0}" y1="{y}" x2="{1}" y2="{y}" stroke="black"/><text x="{2}" y="{3}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.2}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT,
            MARGIN_LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{x_label}</text>"#,
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 10.0
    );
    let _ = write!(
        out,
        r#"<text x="16" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {0})">{y_label}</text>"#,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0
    );
}

/// ROC curves of several classifiers over the chance diagonal.
pub fn roc_overlay(title: &str, curves: &[(String, &RocCurve)]) -> String {
    let mut out = String::new();
    open(&mut out, title);
    let frame = Frame {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
    };
    axes(
        &mut out,
        &frame,
        "false positive rate",
        "true positive rate",
        &[0.0, 0.25, 0.5, 0.75, 1.0],
    );
    let _ = write!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="6,4"/>"#,
        frame.x(0.0),
        frame.y(0.0),
        frame.x(1.0),
        frame.y(1.0)
    );
    for (i, (name, curve)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (fpr, tpr) in &curve.points {
            let _ = write!(points, "{:.2},{:.2} ", frame.x(*fpr), frame.y(*tpr));
        }
        let _ = write!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.trim_end()
        );
        let ly = MARGIN_TOP + 16.0 + 16.0 * i as f64;
        let _ = write!(
            out,
            r#"<line x1="{0}" y1="{ly}" x2="{1}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{2}" y="{3}" font-family="sans-serif" font-size="12">{name}</text>"#,
            WIDTH - 200.0,
            WIDTH - 170.0,
            WIDTH - 164.0,
            ly + 4.0
        );
    }
    out.push_str("</svg>");
    out
}

/// One panel of a box-and-whisker chart.
pub struct BoxPanel {
    pub y_label: String,
    pub groups: Vec<(String, Vec<f64>)>,
}

/// Box-and-whisker chart with one sub-axis per panel, side by side in a
/// single document. Whiskers reach the most extreme values within 1.5 IQR
/// of the quartiles; points beyond are drawn as circles.
pub fn box_chart(title: &str, panels: &[BoxPanel]) -> String {
    let n = panels.len().max(1) as f64;
    let total_width = WIDTH * n;
    let mut out = String::new();
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{total_width}" height="{HEIGHT}" viewBox="0 0 {total_width} {HEIGHT}">"#
    );
    let _ = write!(
        out,
        r#"<rect width="{total_width}" height="{HEIGHT}" fill="white"/><text x="{}" y="22" font-family="sans-serif" font-size="15" text-anchor="middle">{title}</text>"#,
        total_width / 2.0
    );
    for (panel_idx, panel) in panels.iter().enumerate() {
        let shift = WIDTH * panel_idx as f64;
        let _ = write!(out, r#"<g transform="translate({shift} 0)">"#);
        box_panel(&mut out, panel);
        out.push_str("</g>");
    }
    out.push_str("</svg>");
    out
}

fn box_panel(out: &mut String, panel: &BoxPanel) {
    let groups = &panel.groups;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, values) in groups {
        for v in values {
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
    }
    if !lo.is_finite() || lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    let frame = Frame {
        x0: 0.0,
        x1: groups.len() as f64,
        y0: lo - pad,
        y1: hi + pad,
    };
    axes(out, &frame, "", &panel.y_label, &[]);
    for (i, (name, values)) in groups.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let center = frame.x(i as f64 + 0.5);
        let half = 0.3 * (frame.x(1.0) - frame.x(0.0));
        let summary = match crate::metrics::summarize_runs(values) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let in_fence: Vec<f64> = values
            .iter()
            .copied()
            .filter(|v| !summary.outliers.contains(v))
            .collect();
        let whisker_lo = in_fence.iter().copied().fold(f64::INFINITY, f64::min);
        let whisker_hi = in_fence.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (bq1, bq3) = (frame.y(summary.q1), frame.y(summary.q3));
        let _ = write!(
            out,
            r#"<line x1="{center}" y1="{}" x2="{center}" y2="{bq3}" stroke="{color}"/><line x1="{center}" y1="{bq1}" x2="{center}" y2="{}" stroke="{color}"/>"#,
            frame.y(whisker_hi),
            frame.y(whisker_lo)
        );
        let _ = write!(
            out,
            r#"<rect x="{}" y="{bq3}" width="{}" height="{}" fill="none" stroke="{color}"/>"#,
            center - half,
            2.0 * half,
            (bq1 - bq3).abs().max(0.5)
        );
        let median_y = frame.y(summary.median);
        let _ = write!(
            out,
            r#"<line x1="{}" y1="{median_y}" x2="{}" y2="{median_y}" stroke="{color}" stroke-width="2"/>"#,
            center - half,
            center + half
        );
        for o in &summary.outliers {
            let _ = write!(
                out,
                r#"<circle cx="{center}" cy="{}" r="3" fill="none" stroke="{color}"/>"#,
                frame.y(*o)
            );
        }
        let _ = write!(
            out,
            r#"<text x="{center}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{name}</text>"#,
            HEIGHT - MARGIN_BOTTOM + 18.0
        );
    }
}

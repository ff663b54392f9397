//! Minimal SVG scatter plots with per-point annotations.

use nalgebra::DMatrix;
use std::fmt::Write as _;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];
const SIZE: f64 = 640.0;
const MARGIN: f64 = 48.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Scatter of the first two coordinate columns (the second is taken as 0
/// for one-dimensional input). `groups` holds a cluster index per point and
/// `group_names` the legend entries.
pub fn scatter(title: &str, labels: &[String], coords: &DMatrix<f64>, groups: Option<(&[usize], &[String])>) -> String {
    let n = coords.nrows();
    let point = |i: usize| -> (f64, f64) {
        let x = coords[(i, 0)];
        let y = if coords.ncols() > 1 { coords[(i, 1)] } else { 0.0 };
        (x, y)
    };
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let (x, y) = point(i);
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let span = if span.is_finite() && span > 0.0 { span } else { 1.0 };
    let (cx, cy) = if n > 0 { ((x0 + x1) / 2.0, (y0 + y1) / 2.0) } else { (0.0, 0.0) };
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let to_px = |x: f64, y: f64| (SIZE / 2.0 + (x - cx) * scale, SIZE / 2.0 - (y - cy) * scale);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    for i in 0..n {
        let (x, y) = point(i);
        let (px, py) = to_px(x, y);
        let colour = groups.map_or(PALETTE[0], |(g, _)| PALETTE[g[i] % PALETTE.len()]);
        let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="4" fill="{colour}"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10">{}</text>"#,
            px + 6.0,
            py - 4.0,
            escape(&labels[i])
        );
    }
    if let Some((_, names)) = groups {
        for (k, name) in names.iter().enumerate() {
            let y = 44.0 + 16.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<circle cx="16" cy="{:.1}" r="5" fill="{}"/><text x="26" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
                y,
                PALETTE[k % PALETTE.len()],
                y + 4.0,
                escape(name)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

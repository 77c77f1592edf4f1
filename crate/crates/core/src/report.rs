//! JSON reports and static SVG histograms.

use crate::error::Result;
use crate::stats::EmpiricalDistribution;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

const BINS: usize = 60;
const RANGE: f64 = 4.0;
const W: f64 = 360.0;
const H: f64 = 220.0;
const PAD: f64 = 24.0;

fn panel(out: &mut String, values: &[f64], label: &str, dx: f64) {
    let mut counts = [0usize; BINS];
    let width = 2.0 * RANGE / BINS as f64;
    for &v in values {
        if (-RANGE..RANGE).contains(&v) {
            counts[((v + RANGE) / width) as usize] += 1;
        }
    }
    let n = values.len().max(1) as f64;
    let density: Vec<f64> = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    let top = density.iter().copied().fold(0.45f64, f64::max);
    let px = |x: f64| dx + PAD + (x + RANGE) / (2.0 * RANGE) * (W - 2.0 * PAD);
    let py = |d: f64| H - PAD - d / top * (H - 2.0 * PAD);
    let _ = writeln!(out, r##"<g><text x="{:.1}" y="14" font-size="12" font-family="sans-serif">{label}</text>"##, dx + PAD);
    for (k, d) in density.iter().enumerate() {
        if *d == 0.0 {
            continue;
        }
        let x0 = px(-RANGE + k as f64 * width);
        let x1 = px(-RANGE + (k + 1) as f64 * width);
        let y = py(*d);
        let _ = writeln!(
            out,
            r##"<rect x="{x0:.1}" y="{y:.1}" width="{:.1}" height="{:.1}" fill="#7a9cc6"/>"##,
            x1 - x0,
            H - PAD - y
        );
    }
    let mut path = String::new();
    for k in 0..=200 {
        let x = -RANGE + 2.0 * RANGE * k as f64 / 200.0;
        let d = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let _ = write!(path, "{}{:.1},{:.1} ", if k == 0 { "M" } else { "L" }, px(x), py(d));
    }
    let _ = writeln!(out, r##"<path d="{}" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##, path.trim_end());
    let _ = writeln!(
        out,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/></g>"##,
        px(-RANGE),
        H - PAD,
        px(RANGE),
        H - PAD
    );
}

/// Histograms of both coordinates against the standard normal density.
pub fn histogram_svg(dist: &EmpiricalDistribution) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{H}" viewBox="0 0 {} {H}">"##,
        2.0 * W,
        2.0 * W
    );
    let xs: Vec<f64> = dist.samples.iter().map(|s| s.x).collect();
    let ys: Vec<f64> = dist.samples.iter().map(|s| s.y).collect();
    panel(&mut out, &xs, &format!("Re, T={}, n={}", dist.t, dist.count()), 0.0);
    panel(&mut out, &ys, &format!("Im, T={}, n={}", dist.t, dist.count()), W);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_is_small_and_static() {
        let pts: Vec<(f64, f64)> = (0..20_000).map(|k| ((k as f64 * 0.37).sin() * 2.0, (k as f64 * 0.11).cos())).collect();
        let svg = histogram_svg(&EmpiricalDistribution::from_points(&pts, 100.0));
        assert!(svg.len() <= 50 * 1024);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<script"));
    }

    #[test]
    fn json_has_trailing_newline() {
        let s = to_json(&serde_json::json!({"a": 0.1})).unwrap();
        assert!(s.ends_with("}\n"));
    }
}

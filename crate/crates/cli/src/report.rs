//! CSV, JSON and SVG output for sweeps.

use crate::config::{ExperimentConfig, FitKind, SketchName};
use crate::error::{CliError, Result};
use crate::sweep::{aggregate, fit_slope, MStat, MethodSweep, SlopeFit, SweepPoint, SweepResult};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 3] = [ReportFormat::Csv, ReportFormat::Json, ReportFormat::Svg];
}

impl std::str::FromStr for ReportFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg" => Ok(ReportFormat::Svg),
            _ => Err(CliError::config(format!("unknown report format {s:?}; expected csv, json or svg"))),
        }
    }
}

pub const CSV_HEADER: &str = "m,trial,rel_error";

/// One line per accepted point; errors use the shortest round-tripping form.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::with_capacity(24 * (points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{},{},{:?}", p.m, p.trial, p.rel_error);
    }
    out
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepPoint>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(CliError::config(format!("sweep CSV must start with {CSV_HEADER:?}"))),
    }
    let mut points = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || CliError::config(format!("line {}: expected m,trial,rel_error, got {line:?}", i + 1));
        let mut f = line.split(',');
        let (Some(m), Some(t), Some(e), None) = (f.next(), f.next(), f.next(), f.next()) else {
            return Err(bad());
        };
        let point = SweepPoint {
            m: m.trim().parse().map_err(|_| bad())?,
            trial: t.trim().parse().map_err(|_| bad())?,
            rel_error: e.trim().parse().map_err(|_| bad())?,
        };
        if !(point.rel_error >= 0.0) {
            return Err(CliError::config(format!("line {}: relative error must be non-negative", i + 1)));
        }
        points.push(point);
    }
    Ok(points)
}

pub fn load_sweep_csv(path: &Path) -> Result<Vec<SweepPoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_sweep_csv(&text)
}

/// Rebuilds a series from raw points.
pub fn series_from_points(
    method: SketchName,
    points: Vec<SweepPoint>,
    kind: FitKind,
    floor: f64,
    max_m: Option<usize>,
) -> MethodSweep {
    MethodSweep {
        method,
        per_m: aggregate(&points),
        fit: fit_slope(&points, kind, floor, max_m),
        points,
        flagged: Vec::new(),
    }
}

#[derive(Serialize)]
struct FitJson<'a> {
    kind: FitKind,
    intercept: f64,
    used: &'a [usize],
}

#[derive(Serialize)]
struct SeriesJson<'a> {
    config: Option<&'a ExperimentConfig>,
    method: SketchName,
    per_m: &'a [MStat],
    slope: Option<f64>,
    slope_fit: Option<FitJson<'a>>,
    flagged: usize,
}

pub fn series_json(series: &MethodSweep, config: Option<&ExperimentConfig>) -> String {
    let doc = SeriesJson {
        config,
        method: series.method,
        per_m: &series.per_m,
        slope: series.fit.as_ref().map(|f| f.slope),
        slope_fit: series.fit.as_ref().map(|f: &SlopeFit| FitJson {
            kind: f.kind,
            intercept: f.intercept,
            used: &f.used,
        }),
        flagged: series.flagged.len(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report JSON is serializable");
    text.push('\n');
    text
}

const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Mean error against `m` on log–log axes, bars at `mean ± 2σ`.
pub fn sweep_svg(series: &[MethodSweep]) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (72.0, 130.0, 24.0, 52.0);
    let stats: Vec<&MStat> = series.iter().flat_map(|s| &s.per_m).collect();
    let positive = |v: f64| v.is_finite() && v > 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in &stats {
        for v in [s.mean, s.mean + 2.0 * s.std, s.mean - 2.0 * s.std] {
            if positive(v) {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !lo.is_finite() {
        lo = 1e-16;
        hi = 1.0;
    }
    let (ylo, mut yhi) = (lo.log10().floor(), hi.log10().ceil());
    if yhi <= ylo {
        yhi = ylo + 1.0;
    }
    let mmin = stats.iter().map(|s| s.m).min().unwrap_or(1).max(1) as f64;
    let mmax = stats.iter().map(|s| s.m).max().unwrap_or(2).max(2) as f64;
    let (xlo, mut xhi) = (mmin.log2(), mmax.log2());
    if xhi <= xlo {
        xhi = xlo + 1.0;
    }
    let pw = w - left - right;
    let ph = h - top - bottom;
    let px = |m: f64| left + (m.log2() - xlo) / (xhi - xlo) * pw;
    let py = |v: f64| top + (yhi - v.max(10f64.powf(ylo)).log10()) / (yhi - ylo) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for e in (ylo as i64)..=(yhi as i64) {
        let y = py(10f64.powi(e as i32));
        let _ = writeln!(
            out,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0
        );
    }
    let mut ticks: Vec<usize> = stats.iter().map(|s| s.m).collect();
    ticks.sort_unstable();
    ticks.dedup();
    for m in ticks {
        let x = px(m as f64);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{m}</text>"#,
            top + ph + 16.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">sketch size m</text>"#,
        left + pw / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">relative error</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(out, r#"<g class="series" data-method="{}">"#, s.method.as_str());
        let pts: Vec<String> = s
            .per_m
            .iter()
            .filter(|p| positive(p.mean))
            .map(|p| format!("{:.2},{:.2}", px(p.m as f64), py(p.mean)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        for p in s.per_m.iter().filter(|p| positive(p.mean)) {
            let x = px(p.m as f64);
            let upper = p.mean + 2.0 * p.std;
            let lower = if p.mean - 2.0 * p.std > 0.0 { p.mean - 2.0 * p.std } else { 10f64.powf(ylo) };
            let _ = writeln!(
                out,
                r#"<line class="bar" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/><circle cx="{x:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                py(upper),
                py(lower),
                py(p.mean)
            );
        }
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            s.method.as_str()
        );
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `sweep_<method>.csv`, `sweep_<method>.json` and `sweep.svg` into
/// `dir`, for the requested formats. Returns the written paths.
pub fn emit_series(
    series: &[MethodSweep],
    config: Option<&ExperimentConfig>,
    formats: &[ReportFormat],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(CliError::config("nothing to report: the sweep has no accepted points"));
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files: Vec<(PathBuf, String)> = Vec::new();
    for s in series {
        let name = s.method.as_str();
        if formats.contains(&ReportFormat::Csv) {
            files.push((dir.join(format!("sweep_{name}.csv")), sweep_csv(&s.points)));
        }
        if formats.contains(&ReportFormat::Json) {
            files.push((dir.join(format!("sweep_{name}.json")), series_json(s, config)));
        }
    }
    if formats.contains(&ReportFormat::Svg) {
        files.push((dir.join("sweep.svg"), sweep_svg(series)));
    }
    for (path, body) in &files {
        std::fs::write(path, body).map_err(|e| CliError::io(path, e))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

pub fn emit_report(result: &SweepResult, formats: &[ReportFormat], dir: &Path) -> Result<Vec<PathBuf>> {
    emit_series(&result.series, Some(&result.config), formats, dir)
}

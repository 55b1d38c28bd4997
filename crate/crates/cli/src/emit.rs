//! CSV, SVG and metadata output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clustered_vandermonde::fit::SlopeFit;
use serde::Serialize;

use crate::config::{Config, Experiment, RNG_ID};
use crate::error::{CliError, CliResult};
use crate::fit::{fit_slope, points, Field, MIN_FIT_SAMPLES};
use crate::record::{write_csv, SweepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

/// One plotted point cloud with its fitted line.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub fit: Option<SlopeFit>,
}

fn series_for(records: &[SweepRecord], x: Field, y: Field, label: String, keep: impl Fn(&SweepRecord) -> bool + Copy) -> Series {
    let (xs, ys) = points(records, x, y, keep);
    let fit = if xs.len() >= MIN_FIT_SAMPLES { fit_slope(records, x, y, keep).ok() } else { None };
    Series { label, xs, ys, fit }
}

/// Default plot of a sweep: beta against the varied axis per theta for
/// angles, every singular value or coefficient error against `N h`
/// otherwise. Out-of-regime samples are left out.
pub fn default_series(records: &[SweepRecord]) -> (Field, Field, Vec<Series>) {
    let Some(first) = records.first() else {
        return (Field::Nh, Field::Beta, Vec::new());
    };
    match first.experiment {
        Experiment::Angles => {
            let x = if records.iter().any(|r| r.n != first.n) { Field::N } else { Field::Nh };
            let mut groups: BTreeMap<String, Vec<SweepRecord>> = BTreeMap::new();
            for r in records {
                let key = r.theta.map(|t| format!("{t:.3e}")).unwrap_or_default();
                groups.entry(key).or_default().push(r.clone());
            }
            let series = groups
                .into_iter()
                .map(|(key, recs)| series_for(&recs, x, Field::Beta, format!("theta = {key}"), |_| true))
                .collect();
            (x, Field::Beta, series)
        }
        Experiment::Spectrum => {
            let s = first.sigma.len();
            let series =
                (0..s).map(|j| series_for(records, Field::Nh, Field::Sigma(j), Field::Sigma(j).label(), |r| r.valid)).collect();
            (Field::Nh, Field::Sigma(0), series)
        }
        Experiment::Leastsq => {
            let s = first.delta_a.len();
            let series = (0..s)
                .map(|l| {
                    let c = first.cluster.get(l).copied().unwrap_or(0);
                    let label = format!("{} (cluster {})", Field::DeltaA(l).label(), c + 1);
                    series_for(records, Field::Nh, Field::DeltaA(l), label, |r| r.valid)
                })
                .collect();
            (Field::Nh, Field::DeltaA(0), series)
        }
    }
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn decade_span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite() && *v > 0.0)
        .map(f64::log10)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    if hi > lo { (lo, hi) } else { (lo, lo + 1.0) }
}

/// Log-log scatter plot with fitted lines; slopes appear in the legend.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (760.0, 520.0);
    let (left, right, top, bottom) = (80.0, 230.0, 40.0, 60.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let (x0, x1) = decade_span(series.iter().flat_map(|s| s.xs.iter().copied()));
    let (y0, y1) = decade_span(series.iter().flat_map(|s| s.ys.iter().copied()));
    let px = |x: f64| left + (x.log10() - x0) / (x1 - x0) * pw;
    let py = |y: f64| top + ph - (y.log10() - y0) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(out, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for d in (x0 as i32)..=(x1 as i32) {
        let x = px(10f64.powi(d));
        let _ = writeln!(out, r##"<line x1="{x:.2}" y1="{top}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##, top + ph);
        let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#, top + ph + 16.0);
    }
    for d in (y0 as i32)..=(y1 as i32) {
        let y = py(10f64.powi(d));
        let _ = writeln!(out, r##"<line x1="{left}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, left + pw);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#, left - 6.0, y + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, left + pw / 2.0, h - 16.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    );
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for (x, y) in s.xs.iter().zip(&s.ys) {
            if *x > 0.0 && *y > 0.0 {
                let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}" fill-opacity="0.6"/>"#, px(*x), py(*y));
            }
        }
        let mut legend = s.label.clone();
        if let Some(f) = s.fit {
            let (a, b) = s.xs.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
                px(a),
                py(f.predict(a)),
                px(b),
                py(f.predict(b))
            );
            let _ = write!(legend, ", slope {:.2}", f.slope);
        }
        let ly = top + 10.0 + 18.0 * k as f64;
        let lx = left + pw + 14.0;
        let _ = writeln!(out, r#"<circle cx="{lx}" cy="{ly}" r="4" fill="{color}"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 10.0, ly + 4.0, escape(&legend));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: String,
    seed: u64,
    rng: &'static str,
    rng_scheme: &'static str,
    records: usize,
    created_unix: u64,
    config: &'a Config,
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

/// Writes `<experiment>.csv` and/or `<experiment>.svg` plus
/// `<experiment>_metadata.json` under `out`. Returns the paths written.
pub fn emit(records: &[SweepRecord], cfg: &Config, seed: u64, out: &Path, format: Format) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let stem = cfg.experiment.to_string();
    let mut written = Vec::new();
    if format.csv() {
        let path = out.join(format!("{stem}.csv"));
        write_csv(records, create(&path)?)?;
        written.push(path);
    }
    if format.svg() {
        let path = out.join(format!("{stem}.svg"));
        let (x, y, series) = default_series(records);
        let y_label = match y {
            Field::Sigma(_) => "sigma_j(V_N / sqrt(N))".to_string(),
            Field::DeltaA(_) => "delta a_l".to_string(),
            other => other.label(),
        };
        let svg = render_svg(&format!("{stem} sweep, seed {seed}"), &x.label(), &y_label, &series);
        std::fs::write(&path, svg).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    let path = out.join(format!("{stem}_metadata.json"));
    let meta = Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: stem,
        seed,
        rng: RNG_ID,
        rng_scheme: "rand_chacha ChaCha8Rng seeded from --seed; sample i uses stream i",
        records: records.len(),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        config: cfg,
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Csv(e.to_string()))?;
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    written.push(path);
    Ok(written)
}

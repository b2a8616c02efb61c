//! Hand-written SVG charts. Output depends only on the input rows, so equal
//! inputs give byte-identical files.

use std::fmt::Write;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::experiment::{SummaryRow, TraceRow};

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("malformed CSV {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("no rows to plot")]
    Empty,
    #[error("unknown plot kind {0:?} (expected accuracy-vs-epoch or aal-bars)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    AccuracyVsEpoch,
    AalBars,
}

impl FromStr for PlotKind {
    type Err = PlotError;
    fn from_str(s: &str) -> Result<Self, PlotError> {
        match s {
            "accuracy-vs-epoch" => Ok(Self::AccuracyVsEpoch),
            "aal-bars" => Ok(Self::AalBars),
            _ => Err(PlotError::UnknownKind(s.to_string())),
        }
    }
}

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 400.0;
/// Plot area in pixels; the legend sits to the right of it.
pub const LEFT: f64 = 70.0;
pub const RIGHT: f64 = 500.0;
pub const TOP: f64 = 30.0;
pub const BOTTOM: f64 = 340.0;
/// Fraction of each bar slot occupied by the bar.
pub const BAR_FILL: f64 = 0.6;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn read_rows<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<Vec<T>, PlotError> {
    let err = |source| PlotError::Csv {
        path: path.display().to_string(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(err)
}

/// Reads the CSV files at `paths` and renders the chart.
pub fn plot_files(kind: PlotKind, paths: &[&Path]) -> Result<String, PlotError> {
    match kind {
        PlotKind::AccuracyVsEpoch => {
            let mut rows = Vec::new();
            for p in paths {
                rows.extend(read_rows::<TraceRow>(p)?);
            }
            accuracy_vs_epoch(&rows)
        }
        PlotKind::AalBars => {
            let mut rows = Vec::new();
            for p in paths {
                rows.extend(read_rows::<SummaryRow>(p)?);
            }
            aal_bars(&rows)
        }
    }
}

fn strategy_of(run_id: &str) -> &str {
    run_id.split('_').next().unwrap_or(run_id)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<path d="M{LEFT} {TOP}V{BOTTOM}H{RIGHT}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0:.3}" text-anchor="middle" transform="rotate(-90 16 {0:.3})">{1}</text>"#,
        (TOP + BOTTOM) / 2.0,
        escape(y_label)
    );
}

fn y_tick(out: &mut String, y: f64, label: &str) {
    let _ = writeln!(
        out,
        r#"<line x1="{:.3}" y1="{y:.3}" x2="{LEFT}" y2="{y:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" text-anchor="end">{label}</text>"#,
        LEFT - 4.0,
        LEFT - 6.0,
        y + 4.0
    );
}

fn legend(out: &mut String, entries: &[(String, &str, bool)]) {
    for (i, (label, color, dashed)) in entries.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * i as f64;
        let dash = if *dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.3}" y="{:.3}">{}</text>"#,
            RIGHT + 12.0,
            RIGHT + 32.0,
            RIGHT + 38.0,
            y + 4.0,
            escape(label)
        );
    }
}

/// One polyline per strategy and variant, averaged over runs, on a [0, 1]
/// accuracy axis. Baseline lines are dashed.
pub fn accuracy_vs_epoch(rows: &[TraceRow]) -> Result<String, PlotError> {
    if rows.is_empty() {
        return Err(PlotError::Empty);
    }
    let max_epoch = rows.iter().map(|r| r.epoch).max().unwrap_or(0).max(1);
    // (strategy, variant) with per-epoch (sum, count)
    type Series = ((String, String), Vec<(f64, usize)>);
    let mut series: Vec<Series> = Vec::new();
    for r in rows {
        let key = (strategy_of(&r.run_id).to_string(), r.variant.clone());
        let idx = match series.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                series.push((key, vec![(0.0, 0); max_epoch + 1]));
                series.len() - 1
            }
        };
        let slot = &mut series[idx].1[r.epoch];
        slot.0 += r.avg_honest_test_acc;
        slot.1 += 1;
    }
    let first_variant = &series[0].0 .1;
    let show_variant = series.iter().any(|((_, v), _)| v != first_variant);

    let px = |e: usize| LEFT + (RIGHT - LEFT) * e as f64 / max_epoch as f64;
    let py = |a: f64| BOTTOM - (BOTTOM - TOP) * a;
    let mut out = String::new();
    header(&mut out, "epoch", "average honest test accuracy");
    for k in 0..=4 {
        let a = k as f64 / 4.0;
        y_tick(&mut out, py(a), &format!("{a}"));
    }
    for k in 0..=4 {
        let e = (max_epoch * k) / 4;
        let x = px(e);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.3}" y1="{BOTTOM}" x2="{x:.3}" y2="{:.3}" stroke="black"/><text x="{x:.3}" y="{:.3}" text-anchor="middle">{e}</text>"#,
            BOTTOM + 4.0,
            BOTTOM + 18.0
        );
    }
    let mut entries = Vec::new();
    for (i, ((strategy, variant), points)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dashed = variant == "baseline";
        let pts: Vec<String> = points
            .iter()
            .enumerate()
            .filter(|(_, (_, c))| *c > 0)
            .map(|(e, (s, c))| format!("{:.3},{:.3}", px(e), py(s / *c as f64)))
            .collect();
        let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline class="series" data-strategy="{}" data-variant="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
            escape(strategy),
            escape(variant),
            pts.join(" ")
        );
        let label = if show_variant {
            format!("{strategy} {variant}")
        } else {
            strategy.clone()
        };
        entries.push((label, color, dashed));
    }
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Vertical extent of the bar axis: always includes zero.
pub fn bar_range(means: &[f64]) -> (f64, f64) {
    let lo = means.iter().copied().fold(0.0, f64::min);
    let mut hi = means.iter().copied().fold(0.0, f64::max);
    if hi == lo {
        hi = lo + 1.0;
    }
    (lo, hi)
}

/// Mean AAL per strategy, in the order strategies first appear.
pub fn strategy_means(rows: &[SummaryRow]) -> Vec<(String, f64)> {
    let mut acc: Vec<(String, f64, usize)> = Vec::new();
    for r in rows {
        match acc.iter_mut().find(|(s, _, _)| *s == r.strategy) {
            Some(e) => {
                e.1 += r.aal;
                e.2 += 1;
            }
            None => acc.push((r.strategy.clone(), r.aal, 1)),
        }
    }
    acc.into_iter().map(|(s, t, c)| (s, t / c as f64)).collect()
}

/// One bar per strategy with height proportional to its mean AAL over all rows.
pub fn aal_bars(rows: &[SummaryRow]) -> Result<String, PlotError> {
    if rows.is_empty() {
        return Err(PlotError::Empty);
    }
    let means = strategy_means(rows);
    let values: Vec<f64> = means.iter().map(|m| m.1).collect();
    let (lo, hi) = bar_range(&values);
    let py = |v: f64| TOP + (BOTTOM - TOP) * (hi - v) / (hi - lo);
    let mut out = String::new();
    header(&mut out, "strategy", "mean AAL");
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        y_tick(&mut out, py(v), &format!("{v:.1}"));
    }
    let slot = (RIGHT - LEFT) / means.len() as f64;
    let mut entries = Vec::new();
    for (i, (strategy, mean)) in means.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let x = LEFT + slot * (i as f64 + (1.0 - BAR_FILL) / 2.0);
        let y = py(mean.max(0.0));
        let h = py(mean.min(0.0)) - y;
        let _ = writeln!(
            out,
            r#"<rect class="bar" data-strategy="{}" x="{x:.3}" y="{y:.3}" width="{:.3}" height="{h:.3}" fill="{color}"/>"#,
            escape(strategy),
            slot * BAR_FILL
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            LEFT + slot * (i as f64 + 0.5),
            BOTTOM + 18.0,
            escape(strategy)
        );
        entries.push((strategy.clone(), color, false));
    }
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    Ok(out)
}

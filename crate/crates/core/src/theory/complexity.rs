use std::time::Instant;

use serde::Serialize;

use super::TheoryError;
use crate::graph::{generate, GenOptions};
use crate::metrics::mean_stderr;
use crate::placement::place_maxspan;
use crate::rng::stream;
use crate::GraphFamily;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub n: usize,
    pub n_advs: usize,
    pub median_secs: f64,
    /// Coefficient of variation of the repeated timings.
    pub cv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub rows: Vec<ComplexityRow>,
    /// Least-squares slope of `ln(time)` against `ln(n)`.
    pub slope: f64,
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

/// Times `place_maxspan` on one ER(`p`) graph per size. Each size gets
/// `repeats` timed runs; the median is reported.
pub fn complexity_probe(
    sizes: &[usize],
    n_adv_fraction: f64,
    p: f64,
    repeats: usize,
    seed: u64,
) -> Result<ComplexityReport, TheoryError> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(TheoryError::InvalidScenario(format!(
            "sizes {sizes:?} must be at least two ascending values"
        )));
    }
    if repeats == 0 || !(0.0..=1.0).contains(&n_adv_fraction) {
        return Err(TheoryError::InvalidScenario(format!(
            "repeats = {repeats}, fraction = {n_adv_fraction}"
        )));
    }
    let opts = GenOptions {
        require_strong_connectivity: false,
        ..Default::default()
    };
    let mut rows = Vec::with_capacity(sizes.len());
    for (k, &n) in sizes.iter().enumerate() {
        let g = generate(GraphFamily::ErdosRenyi { p }, n, opts, &mut stream(seed, k as u64))?;
        let n_advs = ((n as f64 * n_adv_fraction).round() as usize).clamp(1, n);
        let mut times = Vec::with_capacity(repeats);
        for r in 0..repeats {
            let mut rng = stream(seed ^ 0xABCD, (k * repeats + r) as u64);
            let start = Instant::now();
            let set = place_maxspan(&g, n_advs, &mut rng)?;
            times.push(start.elapsed().as_secs_f64());
            std::hint::black_box(set);
        }
        let (mean, se) = mean_stderr(&times);
        let sd = se * (times.len() as f64).sqrt();
        times.sort_by(f64::total_cmp);
        rows.push(ComplexityRow {
            n,
            n_advs,
            median_secs: times[times.len() / 2],
            cv: if mean > 0.0 { sd / mean } else { 0.0 },
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.median_secs.max(1e-9)).collect();
    Ok(ComplexityReport {
        slope: loglog_slope(&xs, &ys),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_laws() {
        let xs = [10.0, 20.0, 40.0, 80.0];
        let cubic: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(3)).collect();
        assert!((loglog_slope(&xs, &cubic) - 3.0).abs() < 1e-12);
        let flat = [2.0; 4];
        assert!(loglog_slope(&xs, &flat).abs() < 1e-12);
    }

    #[test]
    fn probe_reports_every_size() {
        let r = complexity_probe(&[20, 40], 0.1, 0.2, 3, 1).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[0].n_advs, 2);
        assert!(r.rows.iter().all(|row| row.cv >= 0.0 && row.median_secs >= 0.0));
        assert!(r.slope.is_finite());
    }

    #[test]
    fn sizes_must_ascend() {
        assert!(complexity_probe(&[40, 20], 0.1, 0.2, 1, 0).is_err());
        assert!(complexity_probe(&[40], 0.1, 0.2, 1, 0).is_err());
    }
}

//! Attack accuracy loss (AAL) and relative attack advantage.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("trace lengths differ ({baseline} baseline vs {attacked} attacked epochs)")]
    LengthMismatch { baseline: usize, attacked: usize },
    #[error("epoch {index} does not line up across traces ({baseline} vs {attacked})")]
    EpochMismatch {
        index: usize,
        baseline: usize,
        attacked: usize,
    },
    #[error("attack advantage is undefined when the runner-up AAL is zero")]
    ZeroReference,
}

/// Average honest-node test accuracy after one epoch, as a fraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub accuracy: f64,
    pub n_honest_alive: usize,
}

/// Sum over epochs `t_attack..=last` of the percentage-point gap
/// `100 * (baseline - attacked)`.
pub fn compute_aal(
    baseline: &[EpochMetrics],
    attacked: &[EpochMetrics],
    t_attack: usize,
) -> Result<f64, MetricError> {
    if baseline.len() != attacked.len() {
        return Err(MetricError::LengthMismatch {
            baseline: baseline.len(),
            attacked: attacked.len(),
        });
    }
    let mut total = 0.0;
    for (index, (b, a)) in baseline.iter().zip(attacked).enumerate() {
        if b.epoch != a.epoch {
            return Err(MetricError::EpochMismatch {
                index,
                baseline: b.epoch,
                attacked: a.epoch,
            });
        }
        if b.epoch >= t_attack {
            total += 100.0 * b.accuracy - 100.0 * a.accuracy;
        }
    }
    Ok(total)
}

/// `(best - next) / next * 100`.
pub fn attack_advantage(aal_best: f64, aal_next: f64) -> Result<f64, MetricError> {
    if aal_next == 0.0 {
        return Err(MetricError::ZeroReference);
    }
    Ok((aal_best - aal_next) / aal_next * 100.0)
}

/// Sample mean and standard error of the mean (zero for fewer than two).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

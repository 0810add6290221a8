//! Logical-error-rate and pseudothreshold estimation.

use crate::decode::Decoder;
use crate::dem::DetectorModel;
use crate::sample::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RateError {
    #[error("no logical qubits to fail (k = 0)")]
    NoLogicals,
    #[error("no p_L = p crossing in the scanned window [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },
}

/// Logical error probability per logical qubit per round, with a Wilson 95%
/// interval propagated from the raw shot-failure fraction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RateEstimate {
    pub p_l: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub shots: usize,
    pub failures: usize,
    pub rounds: usize,
    pub k: usize,
    pub seed: u64,
}

/// Wilson 95% interval for a binomial fraction.
pub fn wilson_interval(failures: usize, shots: usize) -> (f64, f64) {
    if shots == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let n = shots as f64;
    let phat = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (phat + z * z / (2.0 * n)) / denom;
    let half = (z / denom) * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Convert a whole-experiment failure fraction to a per-logical-per-round
/// rate: `r = 1 − (1 − f)^(1/(k·rounds))`.
pub fn per_logical_per_round(f: f64, k: usize, rounds: usize) -> f64 {
    if k == 0 || rounds == 0 {
        return 0.0;
    }
    1.0 - (1.0 - f).powf(1.0 / (k as f64 * rounds as f64))
}

/// Sample `shots` shots from the model, decode them, and convert the failure
/// fraction to a per-logical-per-round estimate.
pub fn logical_error_rate(
    model: &DetectorModel,
    decoder: &dyn Decoder,
    rounds: usize,
    shots: usize,
    seed: u64,
) -> Result<RateEstimate, RateError> {
    let k = model.n_logs;
    if k == 0 {
        return Err(RateError::NoLogicals);
    }
    let batch = sample(model, shots, seed);
    let failures = (0..shots)
        .into_par_iter()
        .filter(|&s| {
            let (pred, miss) = decoder.decode(&batch.syndromes[s]);
            miss || pred != batch.logical_truth[s]
        })
        .count();
    let f = failures as f64 / shots.max(1) as f64;
    let (lo, hi) = wilson_interval(failures, shots);
    Ok(RateEstimate {
        p_l: per_logical_per_round(f, k, rounds),
        ci_lo: per_logical_per_round(lo, k, rounds),
        ci_hi: per_logical_per_round(hi, k, rounds),
        shots,
        failures,
        rounds,
        k,
        seed,
    })
}

/// Bracket of the pseudothreshold (p where p_L(p) = p).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudothresholdBracket {
    pub p_lo: f64,
    pub p_hi: f64,
    pub evaluations: Vec<(f64, RateEstimate)>,
}

/// Scan a log grid for a sign change of p_L(p) − p, then bisect in log space
/// until the bracket is tight or the CI swallows the difference.
#[allow(clippy::too_many_arguments)]
pub fn pseudothreshold(
    mut rate_at: impl FnMut(f64) -> Result<RateEstimate, RateError>,
    p_min: f64,
    p_max: f64,
    grid_points: usize,
    bisections: usize,
) -> Result<PseudothresholdBracket, RateError> {
    assert!(p_min > 0.0 && p_max > p_min && grid_points >= 2);
    let mut evaluations = Vec::new();
    let lg_min = p_min.ln();
    let lg_max = p_max.ln();
    let mut below: Option<f64> = None; // p where p_L < p (good side)
    let mut above: Option<f64> = None;
    for i in 0..grid_points {
        let p = (lg_min + (lg_max - lg_min) * i as f64 / (grid_points - 1) as f64).exp();
        let est = rate_at(p)?;
        let good = est.p_l < p;
        evaluations.push((p, est));
        if good {
            below = Some(p);
        } else if below.is_some() && above.is_none() {
            above = Some(p);
        }
    }
    let (mut lo, mut hi) = match (below, above) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => {
            return Err(RateError::NoCrossing { lo: p_min, hi: p_max });
        }
    };
    for _ in 0..bisections {
        let mid = ((lo.ln() + hi.ln()) / 2.0).exp();
        let est = rate_at(mid)?;
        // stop early once the CI covers the crossing
        let ci_covers = est.ci_lo <= mid && mid <= est.ci_hi;
        let good = est.p_l < mid;
        evaluations.push((mid, est));
        if good {
            lo = mid;
        } else {
            hi = mid;
        }
        if ci_covers {
            break;
        }
    }
    Ok(PseudothresholdBracket { p_lo: lo, p_hi: hi, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(0, 1000);
        assert!(lo == 0.0 && hi < 0.01);
        let (lo, hi) = wilson_interval(500, 1000);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!(hi - lo < 0.07);
    }

    #[test]
    fn per_round_normalization_monotone() {
        assert!(per_logical_per_round(0.5, 4, 4) < 0.5);
        assert!(per_logical_per_round(0.2, 2, 2) < per_logical_per_round(0.4, 2, 2));
        assert_eq!(per_logical_per_round(0.0, 4, 4), 0.0);
    }

    #[test]
    fn pseudothreshold_quadratic_toy() {
        // p_L = 100 p²: crossing at p = 0.01
        let rate_at = |p: f64| -> Result<RateEstimate, RateError> {
            let pl = (100.0 * p * p).min(1.0);
            Ok(RateEstimate {
                p_l: pl,
                ci_lo: pl * 0.9,
                ci_hi: pl * 1.1,
                shots: 1,
                failures: 0,
                rounds: 1,
                k: 1,
                seed: 0,
            })
        };
        let b = pseudothreshold(rate_at, 1e-4, 1e-1, 7, 12).unwrap();
        assert!(b.p_lo <= 0.01 && 0.01 <= b.p_hi * 1.5, "bracket {} {}", b.p_lo, b.p_hi);
    }
}

//! Decay-rate estimation from simulated trajectories: least-squares fit of
//! `ln |z(t)|` over a tail window.

use mbo_core::dynamics::Trajectory;

/// Samples below this norm are dropped from fits; log-space floor well above
/// the subnormal range.
pub const NORM_FLOOR: f64 = 1e-280;

/// Minimum usable samples for a non-degenerate fit.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Fitted decay exponent of a trajectory tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Decay exponent (`|z| ~ exp(-alpha_hat t)`); NaN when degenerate.
    pub alpha_hat: f64,
    pub r_squared: f64,
    pub tail_fraction: f64,
    /// Set when the tail had fewer than [`MIN_FIT_SAMPLES`] usable samples
    /// (deadbeat or underflowed trajectories).
    pub degenerate: bool,
}

/// Fit the decay exponent over the trailing `tail_fraction` of samples.
pub fn fit_rate(traj: &Trajectory<f64>, tail_fraction: f64) -> RateFit {
    assert!(
        tail_fraction > 0.0 && tail_fraction <= 1.0,
        "tail fraction must lie in (0, 1]"
    );
    let n = traj.len();
    let take = ((n as f64) * tail_fraction).round().max(1.0) as usize;
    let start = n.saturating_sub(take);
    let points: Vec<(f64, f64)> = traj.times[start..]
        .iter()
        .zip(&traj.states[start..])
        .filter_map(|(&t, z)| {
            let norm = z.norm();
            (norm > NORM_FLOOR).then(|| (t, norm.ln()))
        })
        .collect();
    if points.len() < MIN_FIT_SAMPLES {
        return RateFit {
            alpha_hat: f64::NAN,
            r_squared: f64::NAN,
            tail_fraction,
            degenerate: true,
        };
    }
    let m = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let stt = points.iter().map(|p| (p.0 - mean_t).powi(2)).sum::<f64>();
    let sty = points
        .iter()
        .map(|p| (p.0 - mean_t) * (p.1 - mean_y))
        .sum::<f64>();
    let slope = sty / stt;
    let ss_tot = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum::<f64>();
    let ss_res = points
        .iter()
        .map(|p| (p.1 - (mean_y + slope * (p.0 - mean_t))).powi(2))
        .sum::<f64>();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    RateFit {
        alpha_hat: -slope,
        r_squared,
        tail_fraction,
        degenerate: false,
    }
}

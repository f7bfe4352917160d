//! Time-varying damping schedules: the Riccati-driven continuous damping with
//! its sublinear envelope, closed-form fundamental solutions of the
//! linearized time-varying dynamics, and the discrete coefficient recurrence
//! with its own closed-form solutions.

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError<T: Real> {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("increasing damping (d0 = {d0} < d_inf = {d_inf}) is not supported")]
    IncreasingBranch { d0: T, d_inf: T },
    #[error("curvature h = {h} equals d_inf^2; evaluate the degenerate limit instead")]
    DegenerateCurvature { h: T },
    #[error("curvature step product h T^2 = {ht2} is out of domain (must be < 1)")]
    OutOfDomain { ht2: T },
    #[error("coefficient recurrence left its feasible domain at k = {k}")]
    Infeasible { k: usize },
    #[error("damping left the stability domain 0 < d T < 1 at k = {k} (d T = {dt})")]
    StabilityDomain { k: usize, dt: T },
}

/// Continuous damping schedule `d(t)` solving `d' = -d^2 + d_inf^2` with
/// `d(t0) = d0 >= d_inf`.
///
/// The decreasing branch through `d0 > d_inf` is the reciprocal-tanh
/// solution `d(t) = d_inf / tanh(d_inf (t + c_d))`; `d0 = d_inf` stays
/// constant. The increasing branch is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleCt<T> {
    pub d0: T,
    pub d_inf: T,
    pub t0: T,
    /// Integration constant fixed by `d(t0) = d0`; infinite when `d0 = d_inf`.
    pub c_d: T,
}

impl<T: Real> ScheduleCt<T> {
    pub fn new(d0: T, d_inf: T, t0: T) -> Result<Self, ScheduleError<T>> {
        if !(d_inf > T::zero()) || !d_inf.is_finite() || !(d0 > T::zero()) || !d0.is_finite() {
            return Err(ScheduleError::InvalidArgument(
                "require finite d0 > 0 and d_inf > 0".into(),
            ));
        }
        if d0 < d_inf {
            return Err(ScheduleError::IncreasingBranch { d0, d_inf });
        }
        // coth(d_inf (t0 + c_d)) = d0 / d_inf.
        let c_d = if d0 == d_inf {
            T::infinity()
        } else {
            (d_inf / d0).atanh() / d_inf - t0
        };
        Ok(Self { d0, d_inf, t0, c_d })
    }

    /// Damping value at time `t >= t0`.
    pub fn damping(&self, t: T) -> T {
        debug_assert!(t >= self.t0);
        if self.c_d.is_infinite() {
            return self.d_inf;
        }
        let x = self.d_inf * (t + self.c_d);
        // coth(x); tanh saturates to 1 for large x, recovering d_inf.
        self.d_inf / x.tanh()
    }

    /// Sublinear prefactor `rho(t) = d_inf + d(t)`.
    pub fn rho(&self, t: T) -> T {
        self.d_inf + self.damping(t)
    }

    /// Envelope ratio `rho(t) / rho(t0)`, optionally multiplied by the
    /// asymptotic exponential `exp(-d_inf (t - t0))`.
    ///
    /// With the exponential the product equals `exp(-int_{t0}^t d)` exactly.
    pub fn envelope(&self, t: T, with_exponential: bool) -> T {
        let ratio = self.rho(t) / self.rho(self.t0);
        if with_exponential {
            ratio * (-self.d_inf * (t - self.t0)).exp()
        } else {
            ratio
        }
    }

    /// Magnitudes of the two fundamental solutions
    /// `(rho(t)/rho(t0)) |exp((-d_inf +- sqrt(d_inf^2 - h)) (t - t0))|`
    /// at curvature `h`, slow branch first.
    pub fn fundamental(&self, h: T, t: T) -> Result<(T, T), ScheduleError<T>> {
        if !(h > T::zero()) {
            return Err(ScheduleError::InvalidArgument("h must be positive".into()));
        }
        let dinf2 = self.d_inf * self.d_inf;
        if h == dinf2 {
            return Err(ScheduleError::DegenerateCurvature { h });
        }
        let ratio = self.rho(t) / self.rho(self.t0);
        let dt = t - self.t0;
        let disc = dinf2 - h;
        if disc > T::zero() {
            let root = disc.sqrt();
            Ok((
                ratio * ((-self.d_inf + root) * dt).exp(),
                ratio * ((-self.d_inf - root) * dt).exp(),
            ))
        } else {
            // Complex pair: both magnitudes coincide.
            let m = ratio * (-self.d_inf * dt).exp();
            Ok((m, m))
        }
    }
}

/// Discrete damping schedule: sequences `(d_k, beta_k)` tied by
/// `beta_k = T (1 - 2 d_k T)` under the constant-coefficient recurrence
/// `4 beta_{k+1} / T = alpha (1 + beta_{k+1}/T)(1 + beta_k/T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleDt<T> {
    pub step_size: T,
    pub d: Vec<T>,
    pub beta: Vec<T>,
    /// Recurrence constant `alpha = 4 b / (1 + b)^2`, `b = 1 - 2 d_inf T`.
    pub alpha_rec: T,
}

impl<T: Real> ScheduleDt<T> {
    /// Number of stored coefficients (`k_max + 1`).
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }
}

/// Build the discrete schedule from `(T, d0, d_inf)` for `k = 0..=k_max`.
pub fn dt_schedule<T: Real>(
    step_size: T,
    d0: T,
    d_inf: T,
    k_max: usize,
) -> Result<ScheduleDt<T>, ScheduleError<T>> {
    if k_max < 1 {
        return Err(ScheduleError::InvalidArgument("k_max must be >= 1".into()));
    }
    if !(step_size > T::zero()) || !step_size.is_finite() {
        return Err(ScheduleError::InvalidArgument(
            "step size must be positive and finite".into(),
        ));
    }
    for (name, d) in [("d0", d0), ("d_inf", d_inf)] {
        let dt = d * step_size;
        if !(dt > T::zero() && dt < T::one()) {
            return Err(ScheduleError::InvalidArgument(format!(
                "require 0 < {name} * T < 1 (got {dt})"
            )));
        }
    }

    let b = T::one() - T::two() * d_inf * step_size;
    let alpha = T::lit(4.0) * b / ((T::one() + b) * (T::one() + b));

    let n = k_max + 1;
    let mut d = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    // x_k = beta_k / T; beta_0 = T (1 - 2 d0 T).
    let mut x = T::one() - T::two() * d0 * step_size;
    for k in 0..n {
        let dk = (T::one() - x) / (T::two() * step_size);
        let dkt = dk * step_size;
        if !(dkt > T::zero() && dkt < T::one()) {
            return Err(ScheduleError::StabilityDomain { k, dt: dkt });
        }
        d.push(dk);
        beta.push(step_size * x);
        let denom = T::lit(4.0) - alpha * (T::one() + x);
        if !(denom > T::zero()) {
            return Err(ScheduleError::Infeasible { k });
        }
        x = alpha * (T::one() + x) / denom;
    }
    Ok(ScheduleDt {
        step_size,
        d,
        beta,
        alpha_rec: alpha,
    })
}

/// Natural logs of the two fundamental-solution magnitudes
/// `|1 - h T^2 +- sqrt((1 - h T^2)^2 - alpha (1 - h T^2))|^{k - k0}
///  prod_{j = k0+1}^{k-1} (1 - d_j T)`,
/// slow branch first.
///
/// Powers and products are accumulated as sums of logarithms; the bare
/// product underflows around k ~ 1e3 for moderate damping.
pub fn dt_fundamental_log<T: Real>(
    sched: &ScheduleDt<T>,
    h: T,
    k: usize,
    k0: usize,
) -> Result<(T, T), ScheduleError<T>> {
    if k < k0 {
        return Err(ScheduleError::InvalidArgument("require k >= k0".into()));
    }
    let t = sched.step_size;
    let w = T::one() - h * t * t;
    if !(w > T::zero()) {
        return Err(ScheduleError::OutOfDomain { ht2: h * t * t });
    }
    if k > sched.len() {
        return Err(ScheduleError::InvalidArgument(format!(
            "schedule holds {} coefficients, need index {}",
            sched.len(),
            k - 1
        )));
    }

    let power = T::from_usize(k - k0).unwrap();
    let disc = w * w - sched.alpha_rec * w;
    let (ln_slow, ln_fast) = if disc >= T::zero() {
        let root = disc.sqrt();
        ((w + root).abs().ln(), (w - root).abs().ln())
    } else {
        // Complex pair: |root|^2 = alpha w.
        let ln_mag = T::half((sched.alpha_rec * w).ln());
        (ln_mag, ln_mag)
    };

    // prod_{j = k0+1}^{k-1} (1 - d_j T), empty when k <= k0 + 1.
    let mut ln_prod = T::zero();
    for j in (k0 + 1)..k {
        ln_prod += (T::one() - sched.d[j] * t).ln();
    }

    Ok((power * ln_slow + ln_prod, power * ln_fast + ln_prod))
}

/// Magnitudes of the two discrete fundamental solutions, slow branch first.
pub fn dt_fundamental<T: Real>(
    sched: &ScheduleDt<T>,
    h: T,
    k: usize,
    k0: usize,
) -> Result<(T, T), ScheduleError<T>> {
    let (a, b) = dt_fundamental_log(sched, h, k, k0)?;
    Ok((a.exp(), b.exp()))
}

//! Closed-form eigenvalues of the linearized dynamics, worst-case convergence
//! rates over a curvature interval, stability conditions, and classification
//! of how the rate scales with the condition number.
//!
//! Rates are computed with curvature normalized to `[1/kappa, 1]`; the
//! `*_on` variants sweep a caller-supplied `[mu, L]` interval instead.

use num_complex::Complex;
use thiserror::Error;

use crate::dynamics::AlgorithmParams;
use crate::scalar::Real;

/// Tolerance on the fitted log-log slope for the accelerated verdict.
pub const ACCELERATION_SLOPE_TOL: f64 = 0.05;

/// Number of log-spaced curvature samples backing the worst-case search; the
/// analytic branch points and interval endpoints are always added, so the
/// grid only guards the closed-form candidates.
pub const WORST_CASE_GRID: usize = 2048;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError<T: Real> {
    #[error("eigenvalues at h = {h} are not a complex pair (discriminant {discriminant})")]
    RealRegime { h: T, discriminant: T },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Whether a sampled eigenvalue pair is real, complex conjugate, or at the
/// critical boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Real,
    Complex,
    Critical,
}

impl Regime {
    fn of<T: Real>(discriminant: T) -> Self {
        if discriminant > T::zero() {
            Regime::Real
        } else if discriminant < T::zero() {
            Regime::Complex
        } else {
            Regime::Critical
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Real => "real",
            Regime::Complex => "complex",
            Regime::Critical => "critical",
        }
    }
}

/// Continuous- or discrete-time analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Continuous,
    Discrete,
}

/// Eigenvalue pair at one curvature sample together with the rate metric
/// (max real part in continuous mode, max magnitude in discrete mode).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSample<T> {
    pub h: T,
    pub eigenvalues: (Complex<T>, Complex<T>),
    pub metric: T,
    pub regime: Regime,
}

/// Worst-case rate over a curvature interval.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport<T> {
    pub mode: Mode,
    pub samples: Vec<EigenSample<T>>,
    /// Decay exponent: `-max Re` (continuous) or `-ln max |lambda|` per step
    /// (discrete; infinite for nilpotent deadbeat updates).
    pub worst_rate: T,
    pub worst_h: T,
    pub stable: bool,
}

/// Eigenvalues `-d - beta h / 2 +- sqrt((d + beta h / 2)^2 - h)` of the
/// linearized continuous flow at curvature `h`.
pub fn ct_eigenvalues<T: Real>(d: T, beta: T, h: T) -> (Complex<T>, Complex<T>) {
    let s = d + T::half(beta * h);
    let disc = s * s - h;
    if disc >= T::zero() {
        let root = disc.sqrt();
        (
            Complex::new(-s + root, T::zero()),
            Complex::new(-s - root, T::zero()),
        )
    } else {
        let omega = (-disc).sqrt();
        (Complex::new(-s, omega), Complex::new(-s, -omega))
    }
}

/// Eigenvalues `1 - T (s +- sqrt(s^2 - h))` with `s = d + beta h / 2 + T h / 2`
/// of the linearized discrete update at curvature `h`.
pub fn dt_eigenvalues<T: Real>(step_size: T, d: T, beta: T, h: T) -> (Complex<T>, Complex<T>) {
    let s = d + T::half(beta * h) + T::half(step_size * h);
    let disc = s * s - h;
    if disc >= T::zero() {
        let root = disc.sqrt();
        (
            Complex::new(T::one() - step_size * (s - root), T::zero()),
            Complex::new(T::one() - step_size * (s + root), T::zero()),
        )
    } else {
        let omega = step_size * (-disc).sqrt();
        let re = T::one() - step_size * s;
        (Complex::new(re, omega), Complex::new(re, -omega))
    }
}

/// Magnitude `sqrt(1 - 2 d T - beta h T)` of the discrete eigenvalues on the
/// complex branch (also exact at the critical boundary).
pub fn dt_complex_magnitude<T: Real>(
    step_size: T,
    d: T,
    beta: T,
    h: T,
) -> Result<T, SpectralError<T>> {
    let s = d + T::half(beta * h) + T::half(step_size * h);
    let disc = s * s - h;
    if disc > T::zero() {
        return Err(SpectralError::RealRegime {
            h,
            discriminant: disc,
        });
    }
    Ok((T::one() - T::two() * d * step_size - beta * h * step_size).sqrt())
}

/// Nesterov's constant-step parameters for curvature bounds `(L, kappa)`:
/// `T = 1/sqrt(L)`, `d = sqrt(L)/(sqrt(kappa)+1)`,
/// `beta = (sqrt(kappa)-1)/((sqrt(kappa)+1) sqrt(L))`.
pub fn nesterov_params<T: Real>(l: T, kappa: T) -> AlgorithmParams<T> {
    let sl = l.sqrt();
    let sk = kappa.sqrt();
    AlgorithmParams::new(
        sl.recip(),
        sl / (sk + T::one()),
        (sk - T::one()) / ((sk + T::one()) * sl),
    )
}

/// Linear stability of the discrete update on curvatures `[mu, L]`:
/// `0 < T (2d + beta h) <= 2 - h T^2` at both endpoints.
///
/// Both sides are linear in `h`, so the endpoints decide the interval. The
/// upper comparison allows a few ulps of slack so closed-form boundary
/// parameterizations land inside.
pub fn dt_stability_ok<T: Real>(step_size: T, d: T, beta: T, mu: T, l: T) -> bool {
    assert!(mu > T::zero() && l >= mu, "require 0 < mu <= L");
    let ok = |h: T| {
        let lhs = step_size * (T::two() * d + beta * h);
        let rhs = T::two() - h * step_size * step_size;
        let slack = T::lit(8.0) * T::epsilon() * (T::one() + lhs.abs() + rhs.abs());
        lhs > T::zero() && lhs <= rhs + slack
    };
    ok(mu) && ok(l)
}

/// Real roots of `a h^2 + b h + c = 0` (degenerate cases included).
///
/// Uses the cancellation-free form: the small root comes from `c / q`, not
/// from subtracting nearly equal terms, which matters when `a` is tiny
/// (vanishing curvature-damping weight).
fn quadratic_roots<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    if a == T::zero() {
        if b == T::zero() {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        return Vec::new();
    }
    let root = disc.sqrt();
    let q = if b >= T::zero() {
        -T::half(b + root)
    } else {
        T::half(root - b)
    };
    if q == T::zero() {
        // b and the discriminant both vanish: a double root at zero.
        return vec![T::zero()];
    }
    vec![q / a, c / q]
}

/// Curvatures where the continuous discriminant `(d + beta h / 2)^2 - h`
/// changes sign.
fn ct_branch_points<T: Real>(d: T, beta: T) -> Vec<T> {
    // beta^2/4 h^2 + (d beta - 1) h + d^2 = 0
    quadratic_roots(beta * beta / T::lit(4.0), d * beta - T::one(), d * d)
}

/// Curvatures where the discrete discriminant `s^2 - h` changes sign.
fn dt_branch_points<T: Real>(step_size: T, d: T, beta: T) -> Vec<T> {
    let half_bt = T::half(beta + step_size);
    quadratic_roots(half_bt * half_bt, d * (beta + step_size) - T::one(), d * d)
}

/// Log-spaced curvature grid over `[mu, l]` plus the analytic candidates.
fn curvature_samples<T: Real>(mu: T, l: T, extra: &[T]) -> Vec<T> {
    let mut hs = Vec::with_capacity(WORST_CASE_GRID + extra.len() + 2);
    hs.push(mu);
    if l > mu {
        let (ln_mu, ln_l) = (mu.ln(), l.ln());
        let n = T::from_usize(WORST_CASE_GRID - 1).unwrap();
        for i in 1..WORST_CASE_GRID - 1 {
            let f = T::from_usize(i).unwrap() / n;
            hs.push((ln_mu + f * (ln_l - ln_mu)).exp());
        }
        hs.push(l);
    }
    hs.extend(extra.iter().copied().filter(|&h| h > mu && h < l));
    hs.sort_by(|a, b| a.partial_cmp(b).expect("finite curvatures"));
    hs.dedup();
    hs
}

fn sweep<T: Real>(
    mode: Mode,
    mu: T,
    l: T,
    eig_at: impl Fn(T) -> (Complex<T>, Complex<T>),
    branch_points: &[T],
) -> RateReport<T> {
    let hs = curvature_samples(mu, l, branch_points);
    let mut samples = Vec::with_capacity(hs.len());
    let mut worst_metric = T::neg_infinity();
    let mut worst_h = mu;
    for h in hs {
        let (e1, e2) = eig_at(h);
        let metric = match mode {
            Mode::Continuous => e1.re.max(e2.re),
            Mode::Discrete => e1.norm().max(e2.norm()),
        };
        let disc = if e1.im != T::zero() {
            -T::one()
        } else if e1.re == e2.re {
            T::zero()
        } else {
            T::one()
        };
        // Strict comparison keeps the smallest worst-case curvature on ties.
        if metric > worst_metric {
            worst_metric = metric;
            worst_h = h;
        }
        samples.push(EigenSample {
            h,
            eigenvalues: (e1, e2),
            metric,
            regime: Regime::of(disc),
        });
    }
    let (worst_rate, stable) = match mode {
        Mode::Continuous => (-worst_metric, worst_metric < T::zero()),
        Mode::Discrete => (-worst_metric.ln(), worst_metric < T::one()),
    };
    RateReport {
        mode,
        samples,
        worst_rate,
        worst_h,
        stable,
    }
}

/// Worst-case continuous decay rate over curvatures `[mu, l]`.
pub fn ct_worst_rate_on<T: Real>(d: T, beta: T, mu: T, l: T) -> RateReport<T> {
    sweep(
        Mode::Continuous,
        mu,
        l,
        |h| ct_eigenvalues(d, beta, h),
        &ct_branch_points(d, beta),
    )
}

/// Worst-case continuous decay rate with curvature normalized to
/// `[1/kappa, 1]`.
pub fn ct_worst_rate<T: Real>(d: T, beta: T, kappa: T) -> RateReport<T> {
    assert!(kappa >= T::one(), "kappa must be >= 1");
    ct_worst_rate_on(d, beta, kappa.recip(), T::one())
}

/// Worst-case discrete per-step rate over curvatures `[mu, l]`.
pub fn dt_worst_rate_on<T: Real>(step_size: T, d: T, beta: T, mu: T, l: T) -> RateReport<T> {
    sweep(
        Mode::Discrete,
        mu,
        l,
        |h| dt_eigenvalues(step_size, d, beta, h),
        &dt_branch_points(step_size, d, beta),
    )
}

/// Worst-case discrete per-step rate with curvature normalized to
/// `[1/kappa, 1]`.
pub fn dt_worst_rate<T: Real>(step_size: T, d: T, beta: T, kappa: T) -> RateReport<T> {
    assert!(kappa >= T::one(), "kappa must be >= 1");
    dt_worst_rate_on(step_size, d, beta, kappa.recip(), T::one())
}

/// How the worst-case rate scales with the condition number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccelClass {
    /// Rate scales like `1/sqrt(kappa)`: fitted slope within tolerance of -1/2.
    Accelerated,
    /// Rate deteriorates faster, typically like `1/kappa`.
    SubAccelerated,
    /// Rate deteriorates more slowly than `1/sqrt(kappa)` over the fitted
    /// grid, i.e. a kappa-independent bottleneck dominates.
    OverDampedLimited,
}

impl AccelClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AccelClass::Accelerated => "accelerated",
            AccelClass::SubAccelerated => "sub-accelerated",
            AccelClass::OverDampedLimited => "over-damped-limited",
        }
    }
}

/// Rate at one grid point of an acceleration scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint<T> {
    pub kappa: T,
    pub rate: T,
    pub stable: bool,
}

/// Fitted scaling of the worst-case rate against the condition number.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelerationVerdict<T> {
    /// Least-squares slope of `ln rate` against `ln kappa`.
    pub slope: T,
    pub classification: AccelClass,
    pub kappa_grid: Vec<T>,
    pub points: Vec<RatePoint<T>>,
    /// Set when unstable or degenerate points were dropped from the fit.
    pub excluded_points: bool,
}

/// Evaluate a parameter rule `kappa -> (d, beta)` across a condition-number
/// grid and fit the log-log slope of the worst-case rate.
///
/// Continuous mode when `step_size` is `None`, discrete otherwise. The grid
/// needs at least four points spanning three decades. Unstable points are
/// excluded from the fit and flagged.
pub fn classify_acceleration<T: Real>(
    rule: impl Fn(T) -> (T, T),
    kappa_grid: &[T],
    step_size: Option<T>,
) -> Result<AccelerationVerdict<T>, SpectralError<T>> {
    if kappa_grid.len() < 4 {
        return Err(SpectralError::InvalidArgument(
            "kappa grid needs at least 4 points".into(),
        ));
    }
    let lo = kappa_grid.iter().cloned().fold(T::infinity(), T::min);
    let hi = kappa_grid.iter().cloned().fold(T::zero(), T::max);
    if hi / lo < T::lit(1e3) {
        return Err(SpectralError::InvalidArgument(
            "kappa grid must span at least three decades".into(),
        ));
    }

    let mut points = Vec::with_capacity(kappa_grid.len());
    for &kappa in kappa_grid {
        let (d, beta) = rule(kappa);
        let report = match step_size {
            None => ct_worst_rate(d, beta, kappa),
            Some(t) => dt_worst_rate(t, d, beta, kappa),
        };
        points.push(RatePoint {
            kappa,
            rate: report.worst_rate,
            stable: report.stable,
        });
    }

    let fit: Vec<(T, T)> = points
        .iter()
        .filter(|p| p.stable && p.rate.is_finite() && p.rate > T::zero())
        .map(|p| (p.kappa.ln(), p.rate.ln()))
        .collect();
    let excluded_points = fit.len() != points.len();
    if fit.len() < 2 {
        return Err(SpectralError::InvalidArgument(
            "fewer than two stable grid points; cannot fit a slope".into(),
        ));
    }
    let n = T::from_usize(fit.len()).unwrap();
    let mean_x = fit.iter().map(|&(x, _)| x).sum::<T>() / n;
    let mean_y = fit.iter().map(|&(_, y)| y).sum::<T>() / n;
    let sxy = fit
        .iter()
        .map(|&(x, y)| (x - mean_x) * (y - mean_y))
        .sum::<T>();
    let sxx = fit.iter().map(|&(x, _)| (x - mean_x).powi(2)).sum::<T>();
    let slope = sxy / sxx;

    let tol = T::lit(ACCELERATION_SLOPE_TOL);
    let classification = if (slope + T::half(T::one())).abs() <= tol {
        AccelClass::Accelerated
    } else if slope < -T::half(T::one()) {
        AccelClass::SubAccelerated
    } else {
        AccelClass::OverDampedLimited
    };

    Ok(AccelerationVerdict {
        slope,
        classification,
        kappa_grid: kappa_grid.to_vec(),
        points,
        excluded_points,
    })
}

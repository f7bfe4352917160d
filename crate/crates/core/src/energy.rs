//! Energy machinery: the Hamiltonian and its decay rate, the order-2 shadow
//! energy conserved by the symplectic Euler map, drift audits, the closed-form
//! theory constants, Lyapunov-style functions, the convex-case stability
//! matrix, and region-of-attraction membership.

use thiserror::Error;

use crate::dynamics::{symplectic_step, AlgorithmParams, State};
use crate::objective::{CurvatureBounds, Objective};
use crate::scalar::{dot, Real};

/// Errors from energy-level operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError<T: Real> {
    #[error("audit diverged at step {step}")]
    Diverged { step: usize },
    #[error("step size {step_size} exceeds the validity bound {bound}")]
    OutOfValidity { step_size: T, bound: T },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

/// Total energy `H(q, p) = |p|^2 / 2 + f(q)`.
pub fn hamiltonian<T: Real>(obj: &Objective<T>, z: &State<T>) -> T {
    let kinetic = T::half(z.p.iter().map(|&p| p * p).sum());
    kinetic + obj.value(&z.q)
}

/// Instantaneous energy rate `f_np(q, p) . p` along the continuous flow;
/// strictly negative away from rest for admissible damping.
pub fn ct_energy_rate<T: Real>(obj: &Objective<T>, z: &State<T>, params: &AlgorithmParams<T>) -> T {
    let fnp = crate::dynamics::non_potential_force(obj, z, params);
    dot(&fnp, &z.p)
}

/// Order-2 shadow energy `H(z) - (T/2) grad f(q) . p`.
///
/// On quadratics this is exactly invariant under the symplectic Euler map;
/// for smooth objectives the per-step drift is cubic in the step size.
pub fn shadow_energy<T: Real>(obj: &Objective<T>, z: &State<T>, step_size: T) -> T {
    let g = obj.gradient(&z.q);
    hamiltonian(obj, z) - T::half(step_size) * dot(&g, &z.p)
}

/// Per-step shadow-energy drift along the conservative symplectic map.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyAudit<T> {
    /// `|shadow(z_{k+1}) - shadow(z_k)|` for each step taken.
    pub per_step_drift: Vec<T>,
    pub max_drift: T,
    /// `log2` of the max-drift ratio under step halving, when measured.
    pub order_estimate: Option<T>,
}

/// Drift series for a single step size.
pub fn shadow_drift_audit<T: Real>(
    obj: &Objective<T>,
    step_size: T,
    z0: &State<T>,
    n_steps: usize,
) -> Result<EnergyAudit<T>, EnergyError<T>> {
    let mut drifts = Vec::with_capacity(n_steps);
    let mut z = z0.clone();
    let mut shadow = shadow_energy(obj, &z, step_size);
    for k in 0..n_steps {
        z = symplectic_step(obj, step_size, &z);
        if !z.is_finite() {
            return Err(EnergyError::Diverged { step: k + 1 });
        }
        let next = shadow_energy(obj, &z, step_size);
        drifts.push((next - shadow).abs());
        shadow = next;
    }
    let max_drift = drifts.iter().cloned().fold(T::zero(), T::max);
    Ok(EnergyAudit {
        per_step_drift: drifts,
        max_drift,
        order_estimate: None,
    })
}

/// Audit the shadow-energy drift at `step_size` and again at half the step,
/// estimating the order of the per-step drift from the ratio.
pub fn energy_audit<T: Real>(
    obj: &Objective<T>,
    step_size: T,
    z0: &State<T>,
    n_steps: usize,
) -> Result<EnergyAudit<T>, EnergyError<T>> {
    let mut audit = shadow_drift_audit(obj, step_size, z0, n_steps)?;
    let halved = shadow_drift_audit(obj, T::half(step_size), z0, n_steps * 2)?;
    if audit.max_drift > T::zero() && halved.max_drift > T::zero() {
        audit.order_estimate = Some((audit.max_drift / halved.max_drift).log2());
    }
    Ok(audit)
}

/// Closed-form constants of the shadow-energy conservation bound for a given
/// Lipschitz constant of the energy gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants<T> {
    pub l_h: T,
    /// `(2 ln 2 - 1) / (2 e L_H)`.
    pub t0: T,
    /// `e (2.9 + 0.1 T0) (1 + e T0 / 3)`.
    pub c_delta_h: T,
    /// `356 L_H^2`.
    pub c_f: T,
}

impl<T: Real> TheoryConstants<T> {
    pub fn new(l_h: T) -> Result<Self, EnergyError<T>> {
        if !(l_h > T::zero()) {
            return Err(EnergyError::InvalidArgument("L_H must be positive".into()));
        }
        let e = T::E();
        let t0 = (T::two() * T::LN_2() - T::one()) / (T::two() * e * l_h);
        let c_delta_h = e * (T::lit(2.9) + T::lit(0.1) * t0) * (T::one() + e * t0 / T::lit(3.0));
        Ok(Self {
            l_h,
            t0,
            c_delta_h,
            c_f: T::lit(356.0) * l_h * l_h,
        })
    }

    /// Right side of the per-step conservation bound at step `t`, per unit
    /// squared gradient norm: `T C_dH exp(-T0 / T)`, valid for `T <= T0 / 3`.
    pub fn drift_bound(&self, step_size: T) -> Result<T, EnergyError<T>> {
        let bound = self.t0 / T::lit(3.0);
        if !(step_size > T::zero()) || step_size > bound {
            return Err(EnergyError::OutOfValidity { step_size, bound });
        }
        Ok(step_size * self.c_delta_h * (-self.t0 / step_size).exp())
    }

    /// Largest initial norm the conservation bound covers for analyticity
    /// radius `r`: `(r/2) (1 + 3.63 L_H T (1 + e T0 / 3))^{-1}`.
    pub fn validity_radius(&self, r: T, step_size: T) -> T {
        let e = T::E();
        T::half(r)
            / (T::one()
                + T::lit(3.63) * self.l_h * step_size * (T::one() + e * self.t0 / T::lit(3.0)))
    }
}

/// Squared norm of the energy gradient `(grad f(q), p)` at a state.
pub fn energy_gradient_sq<T: Real>(obj: &Objective<T>, z: &State<T>) -> T {
    let g = obj.gradient(&z.q);
    dot(&g, &g) + dot(&z.p, &z.p)
}

/// Effective damping bounds `(d1, d2) = (2d - C_f beta, 2d + C_f_bar beta)`
/// and the feasibility flag `d1 > 0`.
pub fn d_bounds<T: Real>(d: T, beta: T, curv: &CurvatureBounds<T>) -> (T, T, bool) {
    let d1 = T::two() * d - curv.c_f * beta;
    let d2 = T::two() * d + curv.c_f_bar * beta;
    (d1, d2, d1 > T::zero())
}

/// Lyapunov candidate `shadow(z) + (T d1 / 2) grad f(q) . p`.
pub fn lyapunov_v<T: Real>(obj: &Objective<T>, z: &State<T>, step_size: T, d1: T) -> T {
    let g = obj.gradient(&z.q);
    shadow_energy(obj, z, step_size) + T::half(step_size * d1) * dot(&g, &z.p)
}

/// The 2x2 symmetric matrix whose positive semidefiniteness certifies energy
/// decrease of the discrete scheme on convex objectives, with `tau = beta /
/// (1 - 2 d T)`:
///
/// `[[2dT - 2 d^2 T^2, -dT (T - tau)], [-dT (T - tau), T tau - T^2 (tau^2 L + 1) / 2]]`
pub fn convex_stability_matrix<T: Real>(
    step_size: T,
    d: T,
    beta: T,
    l: T,
) -> Result<([[T; 2]; 2], bool), EnergyError<T>> {
    let dt = d * step_size;
    if !(dt < T::one()) || !(dt > T::zero()) {
        return Err(EnergyError::InvalidArgument(
            "require 0 < d * step < 1".into(),
        ));
    }
    let tau = beta / (T::one() - T::two() * dt);
    let a = T::two() * dt - T::two() * dt * dt;
    let b = -dt * (step_size - tau);
    let c = step_size * tau - T::half(step_size * step_size) * (tau * tau * l + T::one());
    let m = [[a, b], [b, c]];
    // Closed-form eigenvalues of a symmetric 2x2 matrix.
    let mean = T::half(a + c);
    let radius = (T::half(a - c).powi(2) + b * b).sqrt();
    let min_eig = mean - radius;
    Ok((m, min_eig >= -T::lit(1e-12)))
}

/// Energy of the discrete iterate in the sheared coordinates
/// `q_hat = q + (beta / (1 - 2dT) - T) p`, `p_hat = p`; non-increasing along
/// the discrete scheme on convex objectives when the stability matrix is PSD.
pub fn convex_transformed_energy<T: Real>(
    obj: &Objective<T>,
    z: &State<T>,
    step_size: T,
    d: T,
    beta: T,
) -> Result<T, EnergyError<T>> {
    let dt = d * step_size;
    if !(dt < T::one()) || !(dt > T::zero()) {
        return Err(EnergyError::InvalidArgument(
            "require 0 < d * step < 1".into(),
        ));
    }
    let shift = beta / (T::one() - T::two() * dt) - step_size;
    let q_hat: Vec<T> = z.q.iter().zip(&z.p).map(|(&q, &p)| q + shift * p).collect();
    let hat = State::new(q_hat, z.p.clone());
    Ok(hamiltonian(obj, &hat))
}

/// Whether `z` lies in the origin's connected component of the open energy
/// sublevel set below the declared critical value.
///
/// A point belongs to that component iff `H(z)` is below the critical value
/// and its position is connected to the origin inside the configuration-space
/// sublevel set: shrinking momentum to zero only lowers the energy, and any
/// connecting path projects to a configuration path below the level.
pub fn region_membership<T: Real>(
    obj: &Objective<T>,
    z: &State<T>,
) -> Result<bool, EnergyError<T>> {
    let f_hat = obj.critical_value_hat().ok_or_else(|| {
        EnergyError::Unsupported(
            "objective declares no critical value; region membership is undefined".into(),
        )
    })?;
    if !(hamiltonian(obj, z) < f_hat) {
        return Ok(false);
    }
    match obj.dimension() {
        1 => {
            let (lo, hi) = sublevel_interval_1d(obj, f_hat);
            Ok(z.q[0] > lo && z.q[0] < hi)
        }
        2 => Ok(sublevel_component_contains_2d(
            |x| obj.value(x),
            f_hat,
            [z.q[0], z.q[1]],
            512,
        )),
        n => Err(EnergyError::Unsupported(format!(
            "region membership is implemented for 1-D and 2-D configuration spaces, got {n}-D"
        ))),
    }
}

/// Open interval around the origin on which a 1-D objective stays below
/// `f_hat`. Closed form for the double well; outward bisection otherwise.
fn sublevel_interval_1d<T: Real>(obj: &Objective<T>, f_hat: T) -> (T, T) {
    if obj.kind_name() == "double_well" && f_hat == T::lit(0.25) {
        // (q^2 - 2q)^2 / 4 < 1/4 around the origin gives (1 - sqrt(2), 1).
        return (T::one() - T::SQRT_2(), T::one());
    }
    let right = boundary_scan(|q| obj.value(&[q]), f_hat, T::one());
    let left = boundary_scan(|q| obj.value(&[-q]), f_hat, T::one());
    (-left, right)
}

/// Distance from the origin to the first crossing of `f = f_hat` along one
/// direction, found by doubling then bisection; effectively unbounded when no
/// crossing exists below the scan horizon.
fn boundary_scan<T: Real>(f: impl Fn(T) -> T, f_hat: T, scale: T) -> T {
    let mut hi = scale * T::lit(1e-3);
    let horizon = scale * T::lit(1e9);
    while f(hi) < f_hat {
        hi = hi + hi;
        if hi > horizon {
            return T::infinity();
        }
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = T::half(lo + hi);
        if f(mid) < f_hat {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    T::half(lo + hi)
}

/// Grid flood fill on `[-r, r]^2`: does the strict sublevel component of `f`
/// containing the origin also contain `x`?
///
/// The box half-width doubles until the component stops touching the
/// boundary, so the component is resolved whenever it is bounded.
pub fn sublevel_component_contains_2d<T: Real>(
    f: impl Fn(&[T]) -> T,
    f_hat: T,
    x: [T; 2],
    resolution: usize,
) -> bool {
    let mut r = T::one();
    for _ in 0..16 {
        match flood_fill(&f, f_hat, x, r, resolution) {
            FloodOutcome::Contained(hit) => return hit,
            FloodOutcome::TouchesBoundary => r = r + r,
        }
    }
    false
}

enum FloodOutcome {
    Contained(bool),
    TouchesBoundary,
}

fn flood_fill<T: Real>(
    f: &impl Fn(&[T]) -> T,
    f_hat: T,
    x: [T; 2],
    r: T,
    resolution: usize,
) -> FloodOutcome {
    let n = resolution.max(8);
    let coord = |i: usize| -> T {
        let u = T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap();
        (T::two() * u - T::one()) * r
    };
    let idx_of = |v: T| -> Option<usize> {
        let u = (v / r + T::one()) / T::two();
        let i = (u * T::from_usize(n - 1).unwrap()).round().to_isize()?;
        (0..n as isize).contains(&i).then_some(i as usize)
    };
    let inside = |i: usize, j: usize| f(&[coord(i), coord(j)]) < f_hat;

    let (oi, oj) = match (idx_of(T::zero()), idx_of(T::zero())) {
        (Some(a), Some(b)) => (a, b),
        _ => return FloodOutcome::Contained(false),
    };
    if !inside(oi, oj) {
        return FloodOutcome::Contained(false);
    }

    let mut visited = vec![false; n * n];
    let mut stack = vec![(oi, oj)];
    visited[oi * n + oj] = true;
    let mut touches = false;
    while let Some((i, j)) = stack.pop() {
        if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
            touches = true;
        }
        let neighbors = [
            (i.wrapping_sub(1), j),
            (i + 1, j),
            (i, j.wrapping_sub(1)),
            (i, j + 1),
        ];
        for (ni, nj) in neighbors {
            if ni < n && nj < n && !visited[ni * n + nj] && inside(ni, nj) {
                visited[ni * n + nj] = true;
                stack.push((ni, nj));
            }
        }
    }
    if touches {
        return FloodOutcome::TouchesBoundary;
    }
    let hit = match (idx_of(x[0]), idx_of(x[1])) {
        (Some(i), Some(j)) => visited[i * n + j] && inside(i, j),
        _ => false,
    };
    FloodOutcome::Contained(hit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::dt_step;
    use crate::objective::Objective;

    #[test]
    fn hamiltonian_hand_values() {
        let quad = Objective::quadratic(vec![1.0]).unwrap();
        assert_eq!(hamiltonian(&quad, &State::origin(1)), 0.0);
        assert_eq!(hamiltonian(&quad, &State::new(vec![1.0], vec![0.0])), 0.5);
        let dw = Objective::double_well();
        // (0.25 - 1)^2 / 4
        assert_eq!(
            hamiltonian(&dw, &State::new(vec![0.5], vec![0.0])),
            0.140625
        );
    }

    #[test]
    fn energy_rate_at_rest_and_under_isotropic_damping() {
        let quad = Objective::quadratic(vec![1.0]).unwrap();
        let params = AlgorithmParams::new(0.1f64, 0.3, 0.0);
        let rest = State::new(vec![0.7], vec![0.0]);
        assert_eq!(ct_energy_rate(&quad, &rest, &params), 0.0);
        let moving = State::new(vec![0.7], vec![0.4]);
        let rate = ct_energy_rate(&quad, &moving, &params);
        assert!((rate - (-2.0 * 0.3 * 0.16)).abs() < 1e-15);
        assert!(rate < 0.0);
    }

    #[test]
    fn energy_rate_combines_both_damping_channels_on_quadratics() {
        let quad = Objective::quadratic(vec![1.0]).unwrap();
        let params = AlgorithmParams::new(0.1f64, 0.3, 0.2);
        let z = State::new(vec![0.9], vec![1.0]);
        let rate = ct_energy_rate(&quad, &z, &params);
        assert!((rate - (-0.8)).abs() < 1e-14, "rate {rate}");
    }

    #[test]
    fn shadow_energy_limits_and_hand_value() {
        let quad = Objective::quadratic(vec![1.0]).unwrap();
        let z = State::new(vec![1.0], vec![0.0]);
        assert_eq!(shadow_energy(&quad, &z, 0.0), hamiltonian(&quad, &z));
        assert_eq!(shadow_energy(&quad, &z, 0.5), 0.5);
        // One conservative symplectic step later the shadow energy is equal.
        let z1 = symplectic_step(&quad, 0.5, &z);
        assert_eq!(z1, State::new(vec![0.75], vec![-0.5]));
        assert_eq!(shadow_energy(&quad, &z1, 0.5), 0.5);
    }

    #[test]
    fn shadow_energy_vanishes_with_its_gradient_at_critical_rest_points() {
        let dw = Objective::double_well();
        for q in [0.0, 2.0] {
            let z = State::new(vec![q], vec![0.0]);
            assert_eq!(shadow_energy(&dw, &z, 0.3), hamiltonian(&dw, &z));
        }
    }

    #[test]
    fn quadratic_shadow_is_exactly_conserved() {
        let quad = Objective::quadratic(vec![0.6]).unwrap();
        let z0 = State::new(vec![1.0], vec![0.3]);
        let audit = shadow_drift_audit(&quad, 0.4, &z0, 20_000).unwrap();
        assert!(audit.max_drift < 1e-12, "drift {}", audit.max_drift);
    }

    #[test]
    fn quartic_drift_order_is_cubic() {
        let quartic = Objective::quartic_well(1.0).unwrap();
        let z0 = State::new(vec![1.0], vec![0.0]);
        let audit = energy_audit(&quartic, 0.01f64, &z0, 5_000).unwrap();
        let order = audit.order_estimate.unwrap();
        assert!((order - 3.0).abs() < 0.3, "order {order}");
    }

    #[test]
    fn empty_audit_reports_zero_drift() {
        let quad = Objective::quadratic(vec![1.0]).unwrap();
        let audit = shadow_drift_audit(&quad, 0.1, &State::origin(1), 0).unwrap();
        assert!(audit.per_step_drift.is_empty());
        assert_eq!(audit.max_drift, 0.0);
    }

    #[test]
    fn theory_constants_reference_values() {
        let c = TheoryConstants::<f64>::new(1.0).unwrap();
        assert!((0.0705..=0.0715).contains(&c.t0), "T0 = {}", c.t0);
        assert!((8.3..=8.5).contains(&c.c_delta_h), "C = {}", c.c_delta_h);
        assert_eq!(c.c_f, 356.0);
        let bound = c.drift_bound(0.001).unwrap();
        assert!(
            (bound - 1.2e-33).abs() < 0.12e-33,
            "bound {bound:.3e} vs 1.2e-33"
        );
        // T0 is inverse-linear in the Lipschitz constant.
        let c2 = TheoryConstants::<f64>::new(2.0).unwrap();
        assert!((c2.t0 - c.t0 / 2.0).abs() < 1e-15);
        assert!(matches!(
            c.drift_bound(c.t0),
            Err(EnergyError::OutOfValidity { .. })
        ));
    }

    #[test]
    fn damping_bounds_hand_values() {
        let quad = Objective::quadratic(vec![1.0]).unwrap();
        let b = quad.curvature_bounds().unwrap();
        let (d1, d2, feasible) = d_bounds(0.4, 0.0, &b);
        assert_eq!((d1, d2), (0.8, 0.8));
        assert!(feasible);
        // Convex case: d1 independent of beta.
        let (d1, _, _) = d_bounds(0.4, 3.0, &b);
        assert_eq!(d1, 0.8);

        let dw = Objective::<f64>::double_well();
        let bw = dw.curvature_bounds().unwrap();
        let (d1, d2, feasible) = d_bounds(0.5, 0.4, &bw);
        assert!((d1 - 0.6).abs() < 1e-15);
        assert!((d2 - (1.0 + 5.0 * 0.4)).abs() < 1e-15);
        assert!(feasible);

        // Nonconvex infeasible: beta above 2d / C_f drives d1 negative.
        let (d1, _, feasible) = d_bounds(0.5, 1.2, &bw);
        assert!(d1 < 0.0 && !feasible);
    }

    #[test]
    fn lyapunov_reduces_to_shadow_and_vanishes_at_origin() {
        let quad = Objective::quadratic(vec![1.0]).unwrap();
        let z = State::new(vec![0.8], vec![-0.2]);
        assert_eq!(
            lyapunov_v(&quad, &z, 0.1, 0.0),
            shadow_energy(&quad, &z, 0.1)
        );
        assert_eq!(lyapunov_v(&quad, &State::origin(1), 0.1, 0.4), 0.0);
    }

    #[test]
    fn lyapunov_decreases_along_damped_iterates() {
        let quad = Objective::quadratic(vec![1.0]).unwrap();
        let params = AlgorithmParams::new(0.1, 0.1, 0.0);
        let d1 = 2.0 * params.damping;
        let mut z = State::new(vec![1.0], vec![0.0]);
        let mut v = lyapunov_v(&quad, &z, params.step_size, d1);
        for _ in 0..10_000 {
            z = dt_step(&quad, &params, &z);
            let next = lyapunov_v(&quad, &z, params.step_size, d1);
            assert!(next <= v + 1e-15, "V increased: {next} > {v}");
            v = next;
            if z.norm() < 1e-10 {
                break;
            }
        }
    }

    #[test]
    fn stability_matrix_hand_values() {
        // tau = T makes the off-diagonal vanish; boundary case T = 1/sqrt(L).
        let (m, psd) = convex_stability_matrix(1.0f64, 0.25, 0.5, 1.0).unwrap();
        assert!((m[0][0] - 0.375).abs() < 1e-15);
        assert!(m[0][1].abs() < 1e-15);
        assert!(m[1][1].abs() < 1e-15);
        assert!(psd);

        let (m, psd) = convex_stability_matrix(1.0f64, 0.25, 0.5, 2.0).unwrap();
        assert!((m[1][1] - (1.0 - 1.5)).abs() < 1e-15);
        assert!(!psd);

        assert!(convex_stability_matrix(2.0, 0.6, 0.1, 1.0).is_err());
    }

    #[test]
    fn transformed_energy_decreases_with_the_matched_beta() {
        let quad = Objective::quadratic(vec![0.3, 1.0]).unwrap();
        let (step, d) = (0.9, 0.4);
        let beta = step * (1.0 - 2.0 * d * step);
        let params = AlgorithmParams::new(step, d, beta);
        let mut z = State::new(vec![1.0, -0.5], vec![0.0, 0.3]);
        let mut e = convex_transformed_energy(&quad, &z, step, d, beta).unwrap();
        for _ in 0..10_000 {
            z = dt_step(&quad, &params, &z);
            let next = convex_transformed_energy(&quad, &z, step, d, beta).unwrap();
            assert!(next <= e + 1e-14, "transformed energy rose: {next} > {e}");
            e = next;
        }
    }

    #[test]
    fn transformed_energy_decreases_with_a_sheared_change_of_variables() {
        // beta != T(1 - 2dT) but the stability matrix is still PSD.
        let (step, d, beta, l) = (0.8, 0.25, 0.4, 1.0);
        let (_, psd) = convex_stability_matrix(step, d, beta, l).unwrap();
        assert!(psd);
        let quad = Objective::quadratic(vec![0.3, 1.0]).unwrap();
        let params = AlgorithmParams::new(step, d, beta);
        let mut z = State::new(vec![1.0, 0.8], vec![-0.2, 0.1]);
        let mut e = convex_transformed_energy(&quad, &z, step, d, beta).unwrap();
        for _ in 0..10_000 {
            z = dt_step(&quad, &params, &z);
            let next = convex_transformed_energy(&quad, &z, step, d, beta).unwrap();
            assert!(next <= e + 1e-14, "transformed energy rose: {next} > {e}");
            e = next;
        }
    }

    #[test]
    fn region_membership_on_the_double_well() {
        let dw = Objective::<f64>::double_well();
        // H = 0.140625 < 0.25 and q inside (1 - sqrt 2, 1).
        assert!(region_membership(&dw, &State::new(vec![0.5], vec![0.0])).unwrap());
        // Kinetic energy alone exceeds the saddle value.
        assert!(!region_membership(&dw, &State::new(vec![0.0], vec![0.8])).unwrap());
        assert!(region_membership(&dw, &State::origin(1)).unwrap());
        // Below the level but on the far side of the saddle.
        assert!(!region_membership(&dw, &State::new(vec![1.9], vec![0.0])).unwrap());

        let quad = Objective::<f64>::quadratic(vec![1.0]).unwrap();
        assert!(matches!(
            region_membership(&quad, &State::origin(1)),
            Err(EnergyError::Unsupported(_))
        ));
    }

    #[test]
    fn region_membership_via_declared_critical_value() {
        let quad = Objective::<f64>::quadratic(vec![1.0])
            .unwrap()
            .with_critical_value(0.5);
        assert!(region_membership(&quad, &State::new(vec![0.9], vec![0.0])).unwrap());
        assert!(!region_membership(&quad, &State::new(vec![1.1], vec![0.0])).unwrap());
    }

    #[test]
    fn flood_fill_separates_disconnected_components() {
        // Two wells at x = 0 and x = 2 separated by a barrier of height 1/4,
        // extended to 2-D with a quadratic transverse direction.
        let f = |x: &[f64]| {
            let w = x[0] * x[0] - 2.0 * x[0];
            w * w / 4.0 + 0.5 * x[1] * x[1]
        };
        assert!(sublevel_component_contains_2d(f, 0.25, [0.3, 0.1], 256));
        assert!(!sublevel_component_contains_2d(f, 0.25, [2.0, 0.0], 256));
        assert!(!sublevel_component_contains_2d(f, 0.25, [0.0, 0.8], 256));
    }

    #[test]
    fn flood_fill_grows_the_box_to_cover_the_component() {
        // Sublevel set is a disk of radius ~3.16, larger than the initial box.
        let f = |x: &[f64]| 0.05 * (x[0] * x[0] + x[1] * x[1]);
        assert!(sublevel_component_contains_2d(f, 0.5, [3.0, 0.0], 128));
        assert!(!sublevel_component_contains_2d(f, 0.5, [3.5, 0.0], 128));
    }
}

//! Objective functions with analytic gradients, curvature metadata, and the
//! builtin catalogue used by the experiments.
//!
//! Every objective is normalized so that the studied minimizer sits at the
//! origin with value zero; builtins whose textbook minimum is elsewhere are
//! shifted internally.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{norm, Real};

/// Errors from objective construction and metadata queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObjectiveError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

/// Curvature summary: local extremes at the minimizer plus the bounds that
/// control the damping terms.
///
/// `mu` and `l` are the smallest and largest Hessian eigenvalues at the
/// minimizer, `kappa = l / mu`. `c_f` bounds the Hessian from below globally
/// (`c_f = 0` iff the objective is convex); `c_f_bar` bounds it from above on
/// the region where trajectories are analyzed (all of space for quadratics).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBounds<T> {
    pub mu: T,
    pub l: T,
    pub kappa: T,
    pub c_f: T,
    pub c_f_bar: T,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind<T> {
    /// f(x) = 1/2 sum h_i x_i^2 with a diagonal spectrum, sorted ascending.
    Quadratic { spectrum: Vec<T> },
    /// f(q) = (q^2 - 2q)^2 / 4: minima at 0 and 2, saddle at 1.
    DoubleWell,
    /// f(q) = q^4/4 + (eps/2) q^2; degenerate at eps = 0.
    QuarticWell { eps: T },
    /// Standard 2-D Rosenbrock shifted so the minimizer (1,1) moves to 0.
    Rosenbrock,
}

/// A differentiable objective with declared minimizer at the origin.
///
/// Immutable after construction; share freely across concurrent workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective<T> {
    kind: Kind<T>,
    dimension: usize,
    critical_value_hat: Option<T>,
}

impl<T: Real> Objective<T> {
    /// Diagonal quadratic `f(x) = 1/2 sum h_i x_i^2`.
    ///
    /// The spectrum is sorted ascending; entries must be positive and finite.
    pub fn quadratic(mut spectrum: Vec<T>) -> Result<Self, ObjectiveError> {
        if spectrum.is_empty() {
            return Err(ObjectiveError::InvalidArgument(
                "quadratic spectrum must be non-empty".into(),
            ));
        }
        if spectrum.iter().any(|h| !(*h > T::zero()) || !h.is_finite()) {
            return Err(ObjectiveError::InvalidArgument(
                "quadratic spectrum entries must be positive and finite".into(),
            ));
        }
        spectrum.sort_by(|a, b| a.partial_cmp(b).expect("finite spectrum"));
        let dimension = spectrum.len();
        Ok(Self {
            kind: Kind::Quadratic { spectrum },
            dimension,
            critical_value_hat: None,
        })
    }

    /// Quadratic with condition number `kappa`: endpoints `1/kappa` and `1`
    /// are pinned exactly, interior entries are log-uniform in `[1/kappa, 1]`
    /// drawn from a seeded generator.
    pub fn quadratic_log_uniform(kappa: T, n: usize, seed: u64) -> Result<Self, ObjectiveError> {
        if !(kappa >= T::one()) || !kappa.is_finite() {
            return Err(ObjectiveError::InvalidArgument(
                "kappa must be finite and >= 1".into(),
            ));
        }
        if n == 1 {
            if kappa != T::one() {
                return Err(ObjectiveError::InvalidArgument(
                    "n = 1 requires kappa = 1".into(),
                ));
            }
            return Self::quadratic(vec![T::one()]);
        }
        if n < 2 {
            return Err(ObjectiveError::InvalidArgument("n must be >= 1".into()));
        }
        let mut spectrum = Vec::with_capacity(n);
        spectrum.push(T::one() / kappa);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ln_lo = -(kappa.to_f64().expect("finite kappa")).ln();
        for _ in 0..n - 2 {
            let u: f64 = rng.random();
            spectrum.push(T::lit((ln_lo * (1.0 - u)).exp().min(1.0)));
        }
        spectrum.push(T::one());
        Self::quadratic(spectrum)
    }

    /// The scalar double well `f(q) = (q^2 - 2q)^2 / 4`.
    ///
    /// Local minima at 0 and 2, saddle at 1 with value 1/4, which is the
    /// nearest non-minimum critical value.
    pub fn double_well() -> Self {
        Self {
            kind: Kind::DoubleWell,
            dimension: 1,
            critical_value_hat: Some(T::lit(0.25)),
        }
    }

    /// The scalar quartic `f(q) = q^4/4 + (eps/2) q^2` with `eps >= 0`.
    pub fn quartic_well(eps: T) -> Result<Self, ObjectiveError> {
        if !(eps >= T::zero()) || !eps.is_finite() {
            return Err(ObjectiveError::InvalidArgument(
                "quartic_well eps must be finite and >= 0".into(),
            ));
        }
        Ok(Self {
            kind: Kind::QuarticWell { eps },
            dimension: 1,
            critical_value_hat: None,
        })
    }

    /// 2-D Rosenbrock, shifted so the minimizer is the origin.
    pub fn rosenbrock() -> Self {
        Self {
            kind: Kind::Rosenbrock,
            dimension: 2,
            critical_value_hat: None,
        }
    }

    /// Builtin catalogue entry by name with key-value parameters.
    pub fn builtin(name: &str, params: &[(&str, f64)]) -> Result<Self, ObjectiveError> {
        let get = |key: &str| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        match name {
            "quadratic" => {
                let kappa = get("kappa").ok_or_else(|| {
                    ObjectiveError::InvalidArgument("quadratic requires kappa=<float>".into())
                })?;
                let n = get("n").unwrap_or(2.0) as usize;
                let seed = get("seed").unwrap_or(0.0) as u64;
                Self::quadratic_log_uniform(T::lit(kappa), n, seed)
            }
            "double_well" => Ok(Self::double_well()),
            "quartic_well" => {
                let eps = get("eps").ok_or_else(|| {
                    ObjectiveError::InvalidArgument("quartic_well requires eps=<float>".into())
                })?;
                Self::quartic_well(T::lit(eps))
            }
            "rosenbrock" => Ok(Self::rosenbrock()),
            other => Err(ObjectiveError::InvalidArgument(format!(
                "unknown objective `{other}`"
            ))),
        }
    }

    /// Parse a selector string.
    ///
    /// Grammar: `quadratic:kappa=<float>[,n=<int>,seed=<int>]`, `double_well`,
    /// `quartic_well:eps=<float>`, `rosenbrock`.
    pub fn from_selector(selector: &str) -> Result<Self, ObjectiveError> {
        let selector = selector.trim();
        let (name, rest) = match selector.split_once(':') {
            Some((n, r)) => (n, r),
            None => (selector, ""),
        };
        let mut params = Vec::new();
        if !rest.is_empty() {
            for item in rest.split(',') {
                let (k, v) = item.split_once('=').ok_or_else(|| {
                    ObjectiveError::InvalidArgument(format!(
                        "selector parameter `{item}` is not key=value"
                    ))
                })?;
                let value: f64 = v.trim().parse().map_err(|_| {
                    ObjectiveError::InvalidArgument(format!(
                        "selector parameter `{item}` has a non-numeric value"
                    ))
                })?;
                params.push((k.trim(), value));
            }
        }
        let params: Vec<(&str, f64)> = params;
        Self::builtin(name, &params)
    }

    /// Attach (or override) the nearest non-minimum critical value.
    ///
    /// Region-of-attraction queries need this metadata; builtins without a
    /// second critical point leave it unset.
    pub fn with_critical_value(mut self, f_hat: T) -> Self {
        self.critical_value_hat = Some(f_hat);
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Stable identifier for CSV and manifests.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Quadratic { .. } => "quadratic",
            Kind::DoubleWell => "double_well",
            Kind::QuarticWell { .. } => "quartic_well",
            Kind::Rosenbrock => "rosenbrock",
        }
    }

    /// The minimizer in normalized coordinates: always the origin.
    pub fn minimizer(&self) -> Vec<T> {
        vec![T::zero(); self.dimension]
    }

    /// Value `f(x)` at the nearest non-minimum critical point, when declared.
    pub fn critical_value_hat(&self) -> Option<T> {
        self.critical_value_hat
    }

    /// Diagonal Hessian spectrum for quadratic objectives.
    pub fn quadratic_spectrum(&self) -> Option<&[T]> {
        match &self.kind {
            Kind::Quadratic { spectrum } => Some(spectrum),
            _ => None,
        }
    }

    /// True when the objective is convex on all of space.
    pub fn is_convex(&self) -> bool {
        matches!(self.kind, Kind::Quadratic { .. } | Kind::QuarticWell { .. })
    }

    /// Objective value.
    pub fn value(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dimension);
        match &self.kind {
            Kind::Quadratic { spectrum } => {
                T::half(spectrum.iter().zip(x).map(|(&h, &xi)| h * xi * xi).sum())
            }
            Kind::DoubleWell => {
                let q = x[0];
                let w = q * q - T::two() * q;
                w * w / T::lit(4.0)
            }
            Kind::QuarticWell { eps } => {
                let q = x[0];
                q * q * q * q / T::lit(4.0) + T::half(*eps) * q * q
            }
            Kind::Rosenbrock => {
                let (a, b) = (x[0], x[1]);
                let u = b - a * a - T::two() * a;
                a * a + T::lit(100.0) * u * u
            }
        }
    }

    /// Gradient, written into `out`.
    pub fn gradient_into(&self, x: &[T], out: &mut [T]) {
        debug_assert_eq!(x.len(), self.dimension);
        debug_assert_eq!(out.len(), self.dimension);
        match &self.kind {
            Kind::Quadratic { spectrum } => {
                for ((o, &h), &xi) in out.iter_mut().zip(spectrum).zip(x) {
                    *o = h * xi;
                }
            }
            Kind::DoubleWell => {
                // f'(q) = (q^2 - 2q)(q - 1) = q (q - 1) (q - 2)
                let q = x[0];
                out[0] = q * (q - T::one()) * (q - T::two());
            }
            Kind::QuarticWell { eps } => {
                let q = x[0];
                out[0] = q * q * q + *eps * q;
            }
            Kind::Rosenbrock => {
                let (a, b) = (x[0], x[1]);
                let u = b - a * a - T::two() * a;
                let du_da = -(T::two() * a + T::two());
                out[0] = T::two() * a + T::lit(200.0) * u * du_da;
                out[1] = T::lit(200.0) * u;
            }
        }
    }

    /// Gradient as a freshly allocated vector.
    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dimension];
        self.gradient_into(x, &mut out);
        out
    }

    /// Hessian eigenvalues at the minimizer, ascending.
    pub fn local_spectrum(&self) -> Vec<T> {
        match &self.kind {
            Kind::Quadratic { spectrum } => spectrum.clone(),
            // f''(q) = 3q^2 - 6q + 2, so f''(0) = 2.
            Kind::DoubleWell => vec![T::two()],
            Kind::QuarticWell { eps } => vec![*eps],
            // Hessian at the shifted origin is [[802, -400], [-400, 200]].
            Kind::Rosenbrock => {
                let tr = T::lit(1002.0);
                let det = T::lit(400.0);
                let root = (tr * tr - T::lit(4.0) * det).sqrt();
                vec![T::half(tr - root), T::half(tr + root)]
            }
        }
    }

    /// Crude Lipschitz constant of the energy gradient `(p, grad f(q))` on
    /// the unit phase-space ball: `max(1, L)` with `L` the top curvature at
    /// the minimizer.
    pub fn suggested_energy_lipschitz(&self) -> T {
        let spectrum = self.local_spectrum();
        spectrum[spectrum.len() - 1].max(T::one())
    }

    /// Exact curvature constants for objectives that declare them.
    ///
    /// Rosenbrock has no finite global curvature bounds and the degenerate
    /// quartic violates `mu > 0`; both are rejected.
    pub fn curvature_bounds(&self) -> Result<CurvatureBounds<T>, ObjectiveError> {
        match &self.kind {
            Kind::Quadratic { spectrum } => {
                let mu = spectrum[0];
                let l = spectrum[spectrum.len() - 1];
                Ok(CurvatureBounds {
                    mu,
                    l,
                    kappa: l / mu,
                    c_f: T::zero(),
                    c_f_bar: l,
                })
            }
            Kind::DoubleWell => Ok(CurvatureBounds {
                mu: T::two(),
                l: T::two(),
                kappa: T::one(),
                // min of f''(q) = 3(q-1)^2 - 1 over all q is -1 at the saddle;
                // max over [1 - sqrt(2), 1] (the origin's sublevel interval at
                // the saddle value) is f''(1 - sqrt(2)) = 5.
                c_f: T::one(),
                c_f_bar: T::lit(5.0),
            }),
            Kind::QuarticWell { eps } => {
                if *eps <= T::zero() {
                    return Err(ObjectiveError::Unsupported(
                        "quartic_well with eps = 0 has a degenerate minimum".into(),
                    ));
                }
                Ok(CurvatureBounds {
                    mu: *eps,
                    l: *eps,
                    kappa: T::one(),
                    c_f: T::zero(),
                    // f''(q) = 3q^2 + eps on the unit interval |q| <= 1.
                    c_f_bar: T::lit(3.0) + *eps,
                })
            }
            Kind::Rosenbrock => Err(ObjectiveError::Unsupported(
                "rosenbrock declares no finite global curvature bounds; \
                 use local_spectrum for the Hessian at the minimizer"
                    .into(),
            )),
        }
    }
}

/// Max absolute error between central finite differences and the analytic
/// gradient at `x`.
pub fn check_gradient<T: Real>(obj: &Objective<T>, x: &[T], h_fd: T) -> T {
    assert!(h_fd > T::zero(), "finite-difference step must be positive");
    let grad = obj.gradient(x);
    let mut xs = x.to_vec();
    let mut worst = T::zero();
    for i in 0..x.len() {
        let xi = xs[i];
        xs[i] = xi + h_fd;
        let fp = obj.value(&xs);
        xs[i] = xi - h_fd;
        let fm = obj.value(&xs);
        xs[i] = xi;
        let fd = (fp - fm) / (T::two() * h_fd);
        worst = worst.max((fd - grad[i]).abs());
    }
    worst
}

/// Gradient norm at a point; small at critical points.
pub fn gradient_norm<T: Real>(obj: &Objective<T>, x: &[T]) -> T {
    norm(&obj.gradient(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_builtins() -> Vec<Objective<f64>> {
        vec![
            Objective::quadratic(vec![0.01, 1.0]).unwrap(),
            Objective::double_well(),
            Objective::quartic_well(0.7).unwrap(),
            Objective::rosenbrock(),
        ]
    }

    #[test]
    fn scalar_identity_quadratic() {
        let obj = Objective::quadratic(vec![1.0]).unwrap();
        assert_eq!(obj.value(&[1.0]), 0.5);
        assert_eq!(obj.gradient(&[1.0]), vec![1.0]);
    }

    #[test]
    fn quadratic_curvature_is_forced_by_construction() {
        let obj = Objective::<f64>::quadratic(vec![0.01, 1.0]).unwrap();
        let b = obj.curvature_bounds().unwrap();
        assert_eq!(b.mu, 0.01);
        assert_eq!(b.l, 1.0);
        assert_eq!(b.kappa, 1.0 / 0.01);
        assert!((b.kappa - 100.0).abs() < 1e-12);
        assert_eq!(b.c_f, 0.0);
        assert_eq!(b.c_f_bar, 1.0);

        let single = Objective::<f64>::quadratic(vec![1.0]).unwrap();
        assert_eq!(single.curvature_bounds().unwrap().kappa, 1.0);
    }

    #[test]
    fn log_uniform_spectrum_pins_endpoints_exactly() {
        let kappa = 100.0;
        let obj = Objective::<f64>::quadratic_log_uniform(kappa, 10, 7).unwrap();
        let s = obj.quadratic_spectrum().unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(s[0], 1.0 / kappa);
        assert_eq!(s[9], 1.0);
        assert!(s.windows(2).all(|w| w[0] <= w[1]));
        for &h in s {
            assert!(h >= 1.0 / kappa && h <= 1.0);
        }
        let again = Objective::<f64>::quadratic_log_uniform(kappa, 10, 7).unwrap();
        assert_eq!(obj, again);
    }

    #[test]
    fn rejects_bad_quadratic_spectra() {
        assert!(Objective::<f64>::quadratic(vec![]).is_err());
        assert!(Objective::<f64>::quadratic(vec![1.0, -0.5]).is_err());
        assert!(Objective::<f64>::quadratic(vec![0.0]).is_err());
    }

    #[test]
    fn double_well_saddle_metadata() {
        let obj = Objective::<f64>::double_well();
        // f at the saddle q = 1 is (1 - 2)^2 / 4.
        assert_eq!(obj.critical_value_hat(), Some(0.25));
        assert_eq!(obj.value(&[1.0]), 0.25);
        let b = obj.curvature_bounds().unwrap();
        assert_eq!(b.mu, 2.0);
        assert_eq!(b.c_f, 1.0);
        assert_eq!(b.c_f_bar, 5.0);
        // Second well at q = 2 is also a critical point.
        assert!(gradient_norm(&obj, &[2.0]) < 1e-12);
    }

    #[test]
    fn degenerate_quartic_is_admitted_but_unsupported_for_curvature() {
        let obj = Objective::<f64>::quartic_well(0.0).unwrap();
        assert_eq!(obj.gradient(&[0.0]), vec![0.0]);
        assert_eq!(obj.local_spectrum(), vec![0.0]);
        assert!(matches!(
            obj.curvature_bounds(),
            Err(ObjectiveError::Unsupported(_))
        ));
    }

    #[test]
    fn rosenbrock_minimizer_is_origin() {
        let obj = Objective::<f64>::rosenbrock();
        assert_eq!(obj.value(&[0.0, 0.0]), 0.0);
        assert!(gradient_norm(&obj, &[0.0, 0.0]) < 1e-12);
        let spec = obj.local_spectrum();
        // trace 1002 and determinant 400 of [[802, -400], [-400, 200]]
        assert!((spec[0] + spec[1] - 1002.0).abs() < 1e-9);
        assert!((spec[0] * spec[1] - 400.0).abs() < 1e-6);
        assert!(obj.curvature_bounds().is_err());
    }

    #[test]
    fn builtins_vanish_at_the_minimizer() {
        for obj in all_builtins() {
            let x0 = obj.minimizer();
            assert_eq!(obj.value(&x0), 0.0, "{}", obj.kind_name());
            assert!(
                gradient_norm(&obj, &x0) < 1e-12,
                "{} gradient at minimizer",
                obj.kind_name()
            );
        }
    }

    #[test]
    fn quadratic_gradient_is_the_spectrum_product() {
        let obj = Objective::<f64>::quadratic(vec![0.3, 2.0, 7.5]).unwrap();
        let x = [0.4, -1.1, 0.2];
        let g = obj.gradient(&x);
        let s = obj.quadratic_spectrum().unwrap();
        for i in 0..3 {
            assert!((g[i] - s[i] * x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn central_differences_agree_on_quadratics() {
        let obj = Objective::quadratic(vec![0.5, 3.0]).unwrap();
        assert!(check_gradient(&obj, &[0.7, -0.4], 1e-5) < 1e-9);
    }

    #[test]
    fn gradient_check_on_seeded_points_in_the_unit_ball() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for obj in all_builtins() {
            for _ in 0..100 {
                let mut x: Vec<f64> = (0..obj.dimension())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let n = norm(&x);
                if n > 1.0 {
                    x.iter_mut().for_each(|v| *v /= n);
                }
                let err = check_gradient(&obj, &x, 1e-5);
                assert!(err < 1e-6, "{}: fd error {err}", obj.kind_name());
            }
        }
    }

    #[test]
    fn fd_error_shrinks_quadratically_on_rosenbrock() {
        let obj = Objective::<f64>::rosenbrock();
        let e1 = check_gradient(&obj, &[0.3, 0.3], 1e-4);
        let e2 = check_gradient(&obj, &[0.3, 0.3], 5e-5);
        let ratio = e1 / e2;
        assert!((3.2..=4.8).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn energy_lipschitz_metadata() {
        assert_eq!(
            Objective::<f64>::double_well().suggested_energy_lipschitz(),
            2.0
        );
        assert_eq!(
            Objective::<f64>::quartic_well(0.5)
                .unwrap()
                .suggested_energy_lipschitz(),
            1.0
        );
        let quad = Objective::<f64>::quadratic(vec![0.1, 3.5]).unwrap();
        assert_eq!(quad.suggested_energy_lipschitz(), 3.5);
    }

    #[test]
    fn selector_grammar() {
        let q = Objective::<f64>::from_selector("quadratic:kappa=100,n=4,seed=3").unwrap();
        let s = q.quadratic_spectrum().unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0], 0.01);
        assert_eq!(s[3], 1.0);

        assert_eq!(
            Objective::<f64>::from_selector("double_well").unwrap(),
            Objective::double_well()
        );
        let qw = Objective::<f64>::from_selector("quartic_well:eps=0.25").unwrap();
        assert_eq!(qw.local_spectrum(), vec![0.25]);
        assert!(Objective::<f64>::from_selector("rosenbrock").is_ok());

        assert!(Objective::<f64>::from_selector("himmelblau").is_err());
        assert!(Objective::<f64>::from_selector("quadratic").is_err());
        assert!(Objective::<f64>::from_selector("quadratic:kappa=abc").is_err());
        assert!(Objective::<f64>::from_selector("quartic_well").is_err());
    }

    #[test]
    fn objectives_are_shareable_across_threads() {
        fn assert_send_sync<V: Send + Sync>() {}
        assert_send_sync::<Objective<f64>>();
        assert_send_sync::<Objective<f32>>();

        let obj = std::sync::Arc::new(Objective::<f64>::rosenbrock());
        let handles: Vec<_> = (0..4)
            .map(|i| {
                let obj = std::sync::Arc::clone(&obj);
                std::thread::spawn(move || obj.value(&[0.1 * i as f64, 0.0]))
            })
            .collect();
        for h in handles {
            assert!(h.join().unwrap().is_finite());
        }
    }

    #[test]
    fn f32_instantiation_matches_f64_values() {
        let o32 = Objective::<f32>::double_well();
        let o64 = Objective::<f64>::double_well();
        assert!((o32.value(&[0.5]) as f64 - o64.value(&[0.5])).abs() < 1e-6);
    }
}

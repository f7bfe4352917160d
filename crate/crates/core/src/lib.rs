//! Momentum-based optimization viewed as a dynamical system.
//!
//! The crate provides:
//!
//! - [`objective`]: differentiable objectives with analytic gradients and
//!   curvature metadata, including the builtin test catalogue;
//! - [`dynamics`]: the continuous momentum flow, the discrete update, and its
//!   dissipation / symplectic-Euler split;
//! - [`spectral`]: closed-form eigenvalues of the linearization, worst-case
//!   convergence rates, stability conditions, and acceleration
//!   classification;
//! - [`schedules`]: time-varying damping (continuous Riccati damping and the
//!   discrete coefficient recurrence) with closed-form fundamental solutions;
//! - [`energy`]: Hamiltonian bookkeeping, the order-2 shadow energy and its
//!   drift audits, Lyapunov-style functions, and region-of-attraction
//!   membership.
//!
//! All numerics are generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the aliases below fix the common concrete choices.

pub mod dynamics;
pub mod energy;
pub mod objective;
pub mod scalar;
pub mod schedules;
pub mod spectral;

pub use scalar::Real;

pub type Objective32 = objective::Objective<f32>;
pub type Objective64 = objective::Objective<f64>;
pub type State32 = dynamics::State<f32>;
pub type State64 = dynamics::State<f64>;
pub type AlgorithmParams32 = dynamics::AlgorithmParams<f32>;
pub type AlgorithmParams64 = dynamics::AlgorithmParams<f64>;
pub type Trajectory32 = dynamics::Trajectory<f32>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type RateReport32 = spectral::RateReport<f32>;
pub type RateReport64 = spectral::RateReport<f64>;
pub type ScheduleCt32 = schedules::ScheduleCt<f32>;
pub type ScheduleCt64 = schedules::ScheduleCt<f64>;
pub type ScheduleDt32 = schedules::ScheduleDt<f32>;
pub type ScheduleDt64 = schedules::ScheduleDt<f64>;

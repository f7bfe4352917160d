//! Phase-space dynamics: the continuous momentum flow, the discrete update,
//! and its split into a dissipation map followed by a symplectic Euler step.

use std::io::{self, Write};

use thiserror::Error;

use crate::energy::hamiltonian;
use crate::objective::Objective;
use crate::scalar::Real;

/// Errors from trajectory integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError<T: Real> {
    #[error("trajectory diverged at t = {time} (component {index})")]
    Diverged { time: T, index: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Phase-space state `(q, p)` with matching dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    pub q: Vec<T>,
    pub p: Vec<T>,
}

impl<T: Real> State<T> {
    pub fn new(q: Vec<T>, p: Vec<T>) -> Self {
        assert_eq!(q.len(), p.len(), "q and p must have equal dimension");
        Self { q, p }
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            q: vec![T::zero(); dim],
            p: vec![T::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Euclidean norm of the full phase-space vector.
    pub fn norm(&self) -> T {
        let sq = self.q.iter().map(|&x| x * x).sum::<T>();
        let sp = self.p.iter().map(|&x| x * x).sum::<T>();
        (sq + sp).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(&self.p).all(|x| x.is_finite())
    }

    fn first_non_finite(&self) -> Option<usize> {
        self.q.iter().chain(&self.p).position(|x| !x.is_finite())
    }
}

/// Parameters `(step_size, damping, beta)` of the momentum dynamics.
///
/// `step_size` is ignored by the continuous flow. `damping` is the isotropic
/// coefficient (zero gives the conservative flow used by energy audits;
/// optimization runs want it positive), `beta` weights the curvature-averaged
/// damping term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmParams<T> {
    pub step_size: T,
    pub damping: T,
    pub beta: T,
}

impl<T: Real> AlgorithmParams<T> {
    pub fn new(step_size: T, damping: T, beta: T) -> Self {
        Self {
            step_size,
            damping,
            beta,
        }
    }
}

/// Time-indexed states with their total energies.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<State<T>>,
    pub energies: Vec<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            energies: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> Option<&State<T>> {
        self.states.last()
    }

    fn record(&mut self, t: T, state: State<T>, energy: T) {
        self.times.push(t);
        self.energies.push(energy);
        self.states.push(state);
    }

    /// Write `t,q0..q{n-1},p0..p{n-1},H` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.states.first().map_or(0, State::dim);
        write!(w, "t")?;
        for i in 0..n {
            write!(w, ",q{i}")?;
        }
        for i in 0..n {
            write!(w, ",p{i}")?;
        }
        writeln!(w, ",H")?;
        for ((t, z), h) in self.times.iter().zip(&self.states).zip(&self.energies) {
            write!(w, "{t:.16e}")?;
            for v in &z.q {
                write!(w, ",{v:.16e}")?;
            }
            for v in &z.p {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w, ",{h:.16e}")?;
        }
        Ok(())
    }
}

impl<T: Real> Default for Trajectory<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Non-potential force `-2 d p - (grad f(q + beta p) - grad f(q))`.
pub fn non_potential_force<T: Real>(
    obj: &Objective<T>,
    state: &State<T>,
    params: &AlgorithmParams<T>,
) -> Vec<T> {
    let mut out = vec![T::zero(); state.dim()];
    non_potential_force_into(obj, state, params, &mut out);
    out
}

fn non_potential_force_into<T: Real>(
    obj: &Objective<T>,
    state: &State<T>,
    params: &AlgorithmParams<T>,
    out: &mut [T],
) {
    let two_d = T::two() * params.damping;
    if params.beta == T::zero() {
        for (o, &pi) in out.iter_mut().zip(&state.p) {
            *o = -two_d * pi;
        }
        return;
    }
    let shifted: Vec<T> = state
        .q
        .iter()
        .zip(&state.p)
        .map(|(&q, &p)| q + params.beta * p)
        .collect();
    let g_shift = obj.gradient(&shifted);
    let g = obj.gradient(&state.q);
    for i in 0..out.len() {
        out[i] = -two_d * state.p[i] - (g_shift[i] - g[i]);
    }
}

/// One discrete update: momentum absorbs the force and the gradient, then the
/// position moves with the new momentum.
///
/// Bit-identical to [`split_step`]'s composition: both compute
/// `p' = (p + T f_np) - T grad f(q)` in that association.
pub fn dt_step<T: Real>(obj: &Objective<T>, params: &AlgorithmParams<T>, z: &State<T>) -> State<T> {
    let t = params.step_size;
    let fnp = non_potential_force(obj, z, params);
    let g = obj.gradient(&z.q);
    let mut p_new = Vec::with_capacity(z.dim());
    let mut q_new = Vec::with_capacity(z.dim());
    for i in 0..z.dim() {
        let pi = (z.p[i] + t * fnp[i]) - t * g[i];
        p_new.push(pi);
        q_new.push(z.q[i] + t * pi);
    }
    State { q: q_new, p: p_new }
}

/// Momentum contraction `(q, p) -> (q, p + T f_np(q, p))`.
pub fn dissipation_step<T: Real>(
    obj: &Objective<T>,
    params: &AlgorithmParams<T>,
    z: &State<T>,
) -> State<T> {
    let t = params.step_size;
    let fnp = non_potential_force(obj, z, params);
    let p = z.p.iter().zip(&fnp).map(|(&pi, &fi)| pi + t * fi).collect();
    State { q: z.q.clone(), p }
}

/// Symplectic Euler step `p+ = p - T grad f(q)`, `q+ = q + T p+`.
pub fn symplectic_step<T: Real>(obj: &Objective<T>, step_size: T, z: &State<T>) -> State<T> {
    let g = obj.gradient(&z.q);
    let mut p_new = Vec::with_capacity(z.dim());
    let mut q_new = Vec::with_capacity(z.dim());
    for i in 0..z.dim() {
        let pi = z.p[i] - step_size * g[i];
        p_new.push(pi);
        q_new.push(z.q[i] + step_size * pi);
    }
    State { q: q_new, p: p_new }
}

/// The dissipation map followed by the symplectic Euler step.
///
/// Returns the intermediate state and the final one; the composition
/// reproduces [`dt_step`] exactly.
pub fn split_step<T: Real>(
    obj: &Objective<T>,
    params: &AlgorithmParams<T>,
    z: &State<T>,
) -> (State<T>, State<T>) {
    let intermediate = dissipation_step(obj, params, z);
    let next = symplectic_step(obj, params.step_size, &intermediate);
    (intermediate, next)
}

/// Momentum descent without the shifted gradient evaluation: equivalent to
/// [`dt_step`] with `damping = 1/sqrt(kappa)` and `beta = 0`.
pub fn heavy_ball_step<T: Real>(
    obj: &Objective<T>,
    step_size: T,
    kappa: T,
    z: &State<T>,
) -> State<T> {
    assert!(kappa >= T::one(), "kappa must be >= 1");
    let params = AlgorithmParams::new(step_size, kappa.sqrt().recip(), T::zero());
    dt_step(obj, &params, z)
}

/// Iterate the discrete update `n_steps` times, recording every state.
pub fn dt_trajectory<T: Real>(
    obj: &Objective<T>,
    params: &AlgorithmParams<T>,
    z0: &State<T>,
    n_steps: usize,
) -> Result<Trajectory<T>, DynamicsError<T>> {
    let mut traj = Trajectory::new();
    let mut z = z0.clone();
    traj.record(T::zero(), z.clone(), hamiltonian(obj, &z));
    for k in 1..=n_steps {
        z = dt_step(obj, params, &z);
        if let Some(index) = z.first_non_finite() {
            return Err(DynamicsError::Diverged {
                time: T::from_usize(k).expect("step count fits"),
                index,
            });
        }
        traj.record(
            T::from_usize(k).expect("step count fits"),
            z.clone(),
            hamiltonian(obj, &z),
        );
    }
    Ok(traj)
}

/// Fixed-step classical Runge-Kutta integration of
/// `dq/dt = p`, `dp/dt = -grad f(q) + f_np(q, p)`, recording every step.
///
/// The step count is `round(t_end / dt)`; adaptive stepping is deliberately
/// not offered so that repeated runs are bit-reproducible.
pub fn ct_flow<T: Real>(
    obj: &Objective<T>,
    params: &AlgorithmParams<T>,
    z0: &State<T>,
    t_end: T,
    dt: T,
) -> Result<Trajectory<T>, DynamicsError<T>> {
    ct_flow_sampled(obj, params, z0, t_end, dt, 1)
}

/// Like [`ct_flow`] but recording only every `record_every`-th step (the
/// initial and final states are always recorded).
pub fn ct_flow_sampled<T: Real>(
    obj: &Objective<T>,
    params: &AlgorithmParams<T>,
    z0: &State<T>,
    t_end: T,
    dt: T,
    record_every: usize,
) -> Result<Trajectory<T>, DynamicsError<T>> {
    if !(dt > T::zero()) {
        return Err(DynamicsError::InvalidArgument("dt must be positive".into()));
    }
    if t_end < T::zero() {
        return Err(DynamicsError::InvalidArgument(
            "t_end must be non-negative".into(),
        ));
    }
    let record_every = record_every.max(1);
    let n_steps = (t_end / dt)
        .round()
        .to_usize()
        .ok_or_else(|| DynamicsError::InvalidArgument("t_end / dt does not fit in usize".into()))?;

    let dim = z0.dim();
    let mut traj = Trajectory::new();
    traj.record(T::zero(), z0.clone(), hamiltonian(obj, z0));

    let mut z = z0.clone();
    let mut stage = Stage::new(dim);
    for k in 1..=n_steps {
        rk4_step(obj, params, &mut z, dt, &mut stage);
        if let Some(index) = z.first_non_finite() {
            return Err(DynamicsError::Diverged {
                time: dt * T::from_usize(k).expect("step count fits"),
                index,
            });
        }
        if k % record_every == 0 || k == n_steps {
            let t = dt * T::from_usize(k).expect("step count fits");
            traj.record(t, z.clone(), hamiltonian(obj, &z));
        }
    }
    Ok(traj)
}

/// Scratch buffers for the RK4 stages, reused across steps.
struct Stage<T> {
    kq: [Vec<T>; 4],
    kp: [Vec<T>; 4],
    yq: Vec<T>,
    yp: Vec<T>,
    shifted: Vec<T>,
    grad: Vec<T>,
}

impl<T: Real> Stage<T> {
    fn new(dim: usize) -> Self {
        let z = || vec![T::zero(); dim];
        Self {
            kq: [z(), z(), z(), z()],
            kp: [z(), z(), z(), z()],
            yq: z(),
            yp: z(),
            shifted: z(),
            grad: z(),
        }
    }
}

/// Right-hand side; note `-grad f(q) + f_np(q, p)` collapses to
/// `-grad f(q + beta p) - 2 d p`, one gradient evaluation per stage.
fn eval_rhs<T: Real>(
    obj: &Objective<T>,
    params: &AlgorithmParams<T>,
    q: &[T],
    p: &[T],
    dq: &mut [T],
    dp: &mut [T],
    shifted: &mut [T],
    grad: &mut [T],
) {
    let two_d = T::two() * params.damping;
    if params.beta == T::zero() {
        obj.gradient_into(q, grad);
    } else {
        for i in 0..q.len() {
            shifted[i] = q[i] + params.beta * p[i];
        }
        obj.gradient_into(shifted, grad);
    }
    for i in 0..q.len() {
        dq[i] = p[i];
        dp[i] = -grad[i] - two_d * p[i];
    }
}

fn rk4_step<T: Real>(
    obj: &Objective<T>,
    params: &AlgorithmParams<T>,
    z: &mut State<T>,
    dt: T,
    s: &mut Stage<T>,
) {
    let dim = z.dim();
    let half = T::half(dt);

    let [ref mut k1q, ref mut k2q, ref mut k3q, ref mut k4q] = s.kq;
    let [ref mut k1p, ref mut k2p, ref mut k3p, ref mut k4p] = s.kp;

    eval_rhs(
        obj,
        params,
        &z.q,
        &z.p,
        k1q,
        k1p,
        &mut s.shifted,
        &mut s.grad,
    );
    for i in 0..dim {
        s.yq[i] = z.q[i] + half * k1q[i];
        s.yp[i] = z.p[i] + half * k1p[i];
    }
    eval_rhs(
        obj,
        params,
        &s.yq,
        &s.yp,
        k2q,
        k2p,
        &mut s.shifted,
        &mut s.grad,
    );
    for i in 0..dim {
        s.yq[i] = z.q[i] + half * k2q[i];
        s.yp[i] = z.p[i] + half * k2p[i];
    }
    eval_rhs(
        obj,
        params,
        &s.yq,
        &s.yp,
        k3q,
        k3p,
        &mut s.shifted,
        &mut s.grad,
    );
    for i in 0..dim {
        s.yq[i] = z.q[i] + dt * k3q[i];
        s.yp[i] = z.p[i] + dt * k3p[i];
    }
    eval_rhs(
        obj,
        params,
        &s.yq,
        &s.yp,
        k4q,
        k4p,
        &mut s.shifted,
        &mut s.grad,
    );

    let sixth = dt / T::lit(6.0);
    for i in 0..dim {
        z.q[i] += sixth * (k1q[i] + T::two() * k2q[i] + T::two() * k3q[i] + k4q[i]);
        z.p[i] += sixth * (k1p[i] + T::two() * k2p[i] + T::two() * k3p[i] + k4p[i]);
    }
}

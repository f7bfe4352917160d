//! Named experiments: deterministic CSV emission plus a manifest recording
//! the config hash, seed, files, and summary metrics. Reruns with the same
//! config are byte-identical: fixed grids, seeded randomness, sorted output.

use std::fs;

use mbo_core::dynamics::{ct_flow_sampled, dt_trajectory, symplectic_step, AlgorithmParams, State};
use mbo_core::energy::{energy_audit, hamiltonian, region_membership, shadow_energy};
use mbo_core::objective::Objective;
use mbo_core::schedules::{dt_schedule, ScheduleCt, ScheduleDt};
use mbo_core::spectral::{classify_acceleration, ct_eigenvalues, dt_eigenvalues, dt_worst_rate};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, RunMode};
use crate::csvio::{fmt_float, write_csv, Manifest};
use crate::error::HarnessError;
use crate::fit::fit_rate;

/// Parse a phase-space state written as `q0,..,qn;p0,..,pn` (the momentum
/// block is optional and defaults to rest).
pub fn parse_state(text: &str) -> Result<State<f64>, HarnessError> {
    let parse_vec = |part: &str| -> Result<Vec<f64>, HarnessError> {
        part.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| HarnessError::Config(format!("bad state component `{s}`")))
            })
            .collect()
    };
    let (q, p) = match text.split_once(';') {
        Some((qs, ps)) => (parse_vec(qs)?, parse_vec(ps)?),
        None => {
            let q = parse_vec(text)?;
            let p = vec![0.0; q.len()];
            (q, p)
        }
    };
    if q.len() != p.len() {
        return Err(HarnessError::Config(
            "state q and p blocks have different lengths".into(),
        ));
    }
    Ok(State::new(q, p))
}

/// Damping rule used by the rate scans.
fn damping_rule(
    rule: &str,
    scale: f64,
    beta: f64,
) -> Result<impl Fn(f64) -> (f64, f64), HarnessError> {
    enum RuleKind {
        InvSqrt,
        Const,
        Inv,
    }
    let kind = match rule {
        "inv_sqrt" => RuleKind::InvSqrt,
        "const" => RuleKind::Const,
        "inv" => RuleKind::Inv,
        other => {
            return Err(HarnessError::Config(format!(
                "unknown rule `{other}`; expected inv_sqrt, const, or inv"
            )))
        }
    };
    Ok(move |kappa: f64| {
        let d = match kind {
            RuleKind::InvSqrt => scale / kappa.sqrt(),
            RuleKind::Const => scale,
            RuleKind::Inv => scale / kappa,
        };
        (d, beta)
    })
}

/// Run a named experiment, returning the manifest (already written to disk).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Manifest, HarnessError> {
    fs::create_dir_all(&cfg.out_dir)?;
    let mut manifest = Manifest::new(&cfg.name, cfg.seed, cfg.config_hash());
    match cfg.name.as_str() {
        "eig_loci_ct" | "eig_loci_dt" => eig_loci(cfg, &mut manifest)?,
        "rate_vs_kappa_ct" | "rate_vs_kappa_dt" => rate_vs_kappa(cfg, &mut manifest)?,
        "schedule_envelope" => schedule_envelope(cfg, &mut manifest)?,
        "tv_rate_curves" => tv_rate_curves(cfg, &mut manifest)?,
        "heavyball_accel" => heavyball_accel(cfg, &mut manifest)?,
        "energy_conservation" => energy_conservation(cfg, &mut manifest)?,
        "region_demo" => region_demo(cfg, &mut manifest)?,
        other => {
            return Err(HarnessError::Config(format!(
                "unknown experiment `{other}`"
            )))
        }
    }
    manifest.write(&cfg.out_dir)?;
    Ok(manifest)
}

fn emit(
    cfg: &ExperimentConfig,
    manifest: &mut Manifest,
    file: &str,
    header: &str,
    rows: &[String],
) -> Result<(), HarnessError> {
    write_csv(&cfg.out_dir.join(file), header, rows)?;
    manifest.files.push(file.to_string());
    Ok(())
}

/// Eigenvalue loci as the curvature sweeps the normalized interval, for a
/// small damping grid and three curvature-damping weights.
fn eig_loci(cfg: &ExperimentConfig, manifest: &mut Manifest) -> Result<(), HarnessError> {
    let betas = [0.0, 0.2, 0.4];
    let ds = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2];
    let n_h = 401;
    let discrete = cfg.mode == RunMode::Dt;
    let mut rows = Vec::new();
    let mut max_circle_spread: f64 = 0.0;
    for beta in betas {
        for d in ds {
            let mut complex_mags: Vec<f64> = Vec::new();
            for i in 0..n_h {
                let h = i as f64 / (n_h - 1) as f64;
                let (e1, e2) = if discrete {
                    dt_eigenvalues(cfg.step_size, d, beta, h)
                } else {
                    ct_eigenvalues(d, beta, h)
                };
                let metric = if discrete {
                    e1.norm().max(e2.norm())
                } else {
                    e1.re.max(e2.re)
                };
                let regime = if e1.im != 0.0 {
                    "complex"
                } else if e1.re == e2.re {
                    "critical"
                } else {
                    "real"
                };
                if discrete && beta == 0.0 && e1.im != 0.0 {
                    complex_mags.push(e1.norm());
                }
                rows.push(format!(
                    "{},{},{},{},{},{},{},{},{}",
                    fmt_float(beta),
                    fmt_float(d),
                    fmt_float(h),
                    fmt_float(e1.re),
                    fmt_float(e1.im),
                    fmt_float(e2.re),
                    fmt_float(e2.im),
                    fmt_float(metric),
                    regime
                ));
            }
            if complex_mags.len() > 1 {
                let lo = complex_mags.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = complex_mags.iter().cloned().fold(0.0, f64::max);
                max_circle_spread = max_circle_spread.max(hi - lo);
            }
        }
    }
    let file = format!("{}.csv", cfg.name);
    emit(
        cfg,
        manifest,
        &file,
        "beta,d,h,re1,im1,re2,im2,metric,regime",
        &rows,
    )?;
    if discrete {
        manifest.push_metric("max_circle_spread_beta0", max_circle_spread);
    }
    Ok(())
}

/// Worst-case rate against the condition number for a damping rule, plus the
/// fitted log-log slope.
fn rate_vs_kappa(cfg: &ExperimentConfig, manifest: &mut Manifest) -> Result<(), HarnessError> {
    let rule = damping_rule(&cfg.rule, cfg.damping, cfg.beta)?;
    let step = (cfg.mode == RunMode::Dt).then_some(cfg.step_size);
    let verdict = classify_acceleration(&rule, &cfg.kappa_list, step)?;
    let mut rows = Vec::new();
    for p in &verdict.points {
        let (d, beta) = rule(p.kappa);
        rows.push(format!(
            "{},{},{},{},{}",
            fmt_float(p.kappa),
            fmt_float(d),
            fmt_float(beta),
            fmt_float(p.rate),
            u8::from(p.stable)
        ));
    }
    let file = format!("{}.csv", cfg.name);
    emit(cfg, manifest, &file, "kappa,d,beta,rate,stable", &rows)?;
    manifest.push_metric("slope", verdict.slope);
    manifest.push_text_metric("classification", verdict.classification.as_str());
    manifest.push_text_metric("excluded_points", &verdict.excluded_points.to_string());
    Ok(())
}

/// Rows `k_or_t,d,beta,envelope` for a damping schedule; shared with the CLI
/// `schedule` subcommand.
pub fn schedule_rows(
    mode: RunMode,
    step_size: f64,
    d0: f64,
    d_inf: f64,
    t_end: f64,
    dt: f64,
    k_max: usize,
) -> Result<Vec<String>, HarnessError> {
    let mut rows = Vec::new();
    match mode {
        RunMode::Ct => {
            let sched = ScheduleCt::new(d0, d_inf, 0.0)?;
            let n = (t_end / dt).round() as usize;
            for i in 0..=n {
                let t = i as f64 * dt;
                rows.push(format!(
                    "{},{},{},{}",
                    fmt_float(t),
                    fmt_float(sched.damping(t)),
                    fmt_float(0.0),
                    fmt_float(sched.envelope(t, true))
                ));
            }
        }
        RunMode::Dt => {
            let sched = dt_schedule(step_size, d0, d_inf, k_max)?;
            // Sublinear prefactor prod_{j=1}^{k-1} (1 - d_j T), log space.
            let mut ln_prod = 0.0;
            for k in 0..=k_max {
                if k >= 2 {
                    ln_prod += (1.0 - sched.d[k - 1] * step_size).ln();
                }
                rows.push(format!(
                    "{},{},{},{}",
                    fmt_float(k as f64),
                    fmt_float(sched.d[k]),
                    fmt_float(sched.beta[k]),
                    fmt_float(ln_prod.exp())
                ));
            }
        }
    }
    Ok(rows)
}

fn schedule_envelope(cfg: &ExperimentConfig, manifest: &mut Manifest) -> Result<(), HarnessError> {
    let rows = schedule_rows(
        cfg.mode,
        cfg.step_size,
        cfg.d0,
        cfg.d_inf,
        cfg.t_end,
        cfg.dt,
        cfg.k_max,
    )?;
    emit(
        cfg,
        manifest,
        "schedule_envelope.csv",
        "k_or_t,d,beta,envelope",
        &rows,
    )?;
    if cfg.mode == RunMode::Ct {
        let sched = ScheduleCt::new(cfg.d0, cfg.d_inf, 0.0)?;
        manifest.push_metric("envelope_ratio_end", sched.envelope(cfg.t_end, false));
        manifest.push_metric(
            "envelope_ratio_limit",
            2.0 * cfg.d_inf / (cfg.d_inf + cfg.d0),
        );
    }
    Ok(())
}

/// Fundamental-solution magnitude curves under the time-varying schedule
/// `d_inf = 1/sqrt(2 kappa)`, `d0 = 1`.
fn tv_rate_curves(cfg: &ExperimentConfig, manifest: &mut Manifest) -> Result<(), HarnessError> {
    let mut rows = Vec::new();
    match cfg.mode {
        RunMode::Ct => {
            for &kappa in &cfg.kappa_list {
                let d_inf = 1.0 / (2.0 * kappa).sqrt();
                let sched = ScheduleCt::new(cfg.d0, d_inf, 0.0)?;
                let n = (cfg.t_end / cfg.dt).round() as usize;
                for i in 0..=n {
                    let t = i as f64 * cfg.dt;
                    let (slow, _) = sched.fundamental(1.0 / kappa, t)?;
                    rows.push(format!(
                        "{},{},{}",
                        fmt_float(kappa),
                        fmt_float(t),
                        fmt_float(slow)
                    ));
                }
            }
            emit(
                cfg,
                manifest,
                "tv_rate_curves.csv",
                "kappa,t,magnitude",
                &rows,
            )?;
        }
        RunMode::Dt => {
            for &kappa in &cfg.kappa_list {
                let d_inf = 1.0 / (2.0 * kappa).sqrt();
                let sched = dt_schedule(cfg.step_size, cfg.d0, d_inf, cfg.k_max)?;
                for h in [1.0 / kappa, 1.0] {
                    append_dt_magnitude_rows(&mut rows, &sched, kappa, h, cfg.k_max);
                }
            }
            emit(
                cfg,
                manifest,
                "tv_rate_curves.csv",
                "kappa,h,k,magnitude",
                &rows,
            )?;
        }
    }
    Ok(())
}

/// Magnitude of the discrete fundamental solution for `k = 0..=k_max`,
/// accumulated incrementally in log space.
pub fn append_dt_magnitude_rows(
    rows: &mut Vec<String>,
    sched: &ScheduleDt<f64>,
    kappa: f64,
    h: f64,
    k_max: usize,
) {
    let t = sched.step_size;
    let w = 1.0 - h * t * t;
    let disc = w * w - sched.alpha_rec * w;
    let ln_slow = if disc >= 0.0 {
        (w + disc.sqrt()).abs().ln()
    } else {
        0.5 * (sched.alpha_rec * w).ln()
    };
    let mut ln_prod = 0.0;
    for k in 0..=k_max {
        if k >= 2 {
            ln_prod += (1.0 - sched.d[k - 1] * t).ln();
        }
        let magnitude = (k as f64 * ln_slow + ln_prod).exp();
        rows.push(format!(
            "{},{},{},{}",
            fmt_float(kappa),
            fmt_float(h),
            fmt_float(k as f64),
            fmt_float(magnitude)
        ));
    }
}

/// Heavy-ball simulation against the spectral prediction across condition
/// numbers.
fn heavyball_accel(cfg: &ExperimentConfig, manifest: &mut Manifest) -> Result<(), HarnessError> {
    let mut rows = Vec::new();
    let mut max_rel_err: f64 = 0.0;
    for &kappa in &cfg.kappa_list {
        let obj = Objective::quadratic(vec![1.0 / kappa, 1.0])?;
        let d = 1.0 / kappa.sqrt();
        let params = AlgorithmParams::new(cfg.step_size, d, 0.0);
        let z0 = State::new(vec![1.0, 1.0], vec![0.0, 0.0]);
        let traj = dt_trajectory(&obj, &params, &z0, cfg.steps)?;
        let fit = fit_rate(&traj, 0.5);
        let predicted = dt_worst_rate(cfg.step_size, d, 0.0, kappa).worst_rate;
        let rel_err = (fit.alpha_hat - predicted).abs() / predicted;
        max_rel_err = max_rel_err.max(rel_err);
        rows.push(format!(
            "{},{},{},{},{}",
            fmt_float(kappa),
            fmt_float(fit.alpha_hat),
            fmt_float(predicted),
            fmt_float(rel_err),
            fmt_float(fit.r_squared)
        ));
    }
    emit(
        cfg,
        manifest,
        "heavyball_accel.csv",
        "kappa,alpha_hat,predicted,rel_err,r_squared",
        &rows,
    )?;
    manifest.push_metric("max_rel_err", max_rel_err);
    Ok(())
}

/// Shadow-energy drift along the conservative symplectic map, plus the
/// step-halving order estimate.
fn energy_conservation(
    cfg: &ExperimentConfig,
    manifest: &mut Manifest,
) -> Result<(), HarnessError> {
    let obj: Objective<f64> = Objective::from_selector(&cfg.objective)?;
    let z0 = default_start(&obj);
    let step = cfg.step_size;
    let mut rows = Vec::new();
    let mut z = z0.clone();
    let mut shadow = shadow_energy(&obj, &z, step);
    rows.push(format!(
        "0,{},{},{}",
        fmt_float(hamiltonian(&obj, &z)),
        fmt_float(shadow),
        fmt_float(0.0)
    ));
    for k in 1..=cfg.steps {
        z = symplectic_step(&obj, step, &z);
        if !z.is_finite() {
            return Err(mbo_core::energy::EnergyError::Diverged { step: k }.into());
        }
        let next = shadow_energy(&obj, &z, step);
        rows.push(format!(
            "{k},{},{},{}",
            fmt_float(hamiltonian(&obj, &z)),
            fmt_float(next),
            fmt_float((next - shadow).abs())
        ));
        shadow = next;
    }
    emit(
        cfg,
        manifest,
        "energy_conservation.csv",
        "k,H,shadow,drift",
        &rows,
    )?;
    let audit = energy_audit(&obj, step, &z0, cfg.steps)?;
    manifest.push_metric("max_drift", audit.max_drift);
    manifest.push_metric("order", audit.order_estimate.unwrap_or(f64::NAN));
    Ok(())
}

fn default_start(obj: &Objective<f64>) -> State<f64> {
    State::new(vec![1.0; obj.dimension()], vec![0.0; obj.dimension()])
}

/// Membership grid over the phase plane plus seeded in-region starts
/// simulated to convergence.
fn region_demo(cfg: &ExperimentConfig, manifest: &mut Manifest) -> Result<(), HarnessError> {
    let obj: Objective<f64> = Objective::from_selector(&cfg.objective)?;
    if obj.dimension() != 1 {
        return Err(HarnessError::Config(
            "region_demo expects a one-dimensional objective".into(),
        ));
    }

    let (nq, np) = (131, 91);
    let mut rows = Vec::with_capacity(nq * np);
    for i in 0..nq {
        let q = -1.0 + 2.6 * i as f64 / (nq - 1) as f64;
        for j in 0..np {
            let p = -0.9 + 1.8 * j as f64 / (np - 1) as f64;
            let member = region_membership(&obj, &State::new(vec![q], vec![p]))?;
            rows.push(format!(
                "{},{},{}",
                fmt_float(q),
                fmt_float(p),
                u8::from(member)
            ));
        }
    }
    emit(cfg, manifest, "region_grid.csv", "q,p,member", &rows)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let params = AlgorithmParams::new(0.0, cfg.damping, cfg.beta);
    let mut rows = Vec::new();
    let mut converged_count = 0usize;
    let mut worst_energy_rise: f64 = 0.0;
    let total = 20;
    let mut produced = 0;
    while produced < total {
        let q = rng.random_range(-0.5..1.0);
        let p = rng.random_range(-0.7..0.7);
        let z0 = State::new(vec![q], vec![p]);
        if !region_membership(&obj, &z0)? || z0.norm() < 0.05 {
            continue;
        }
        produced += 1;
        let traj = ct_flow_sampled(&obj, &params, &z0, cfg.t_end, cfg.dt, 100)?;
        for pair in traj.energies.windows(2) {
            worst_energy_rise = worst_energy_rise.max(pair[1] - pair[0]);
        }
        let final_norm = traj.last_state().map_or(f64::NAN, State::norm);
        let converged = final_norm < 1e-6;
        converged_count += usize::from(converged);
        rows.push(format!(
            "{},{},{},{}",
            fmt_float(q),
            fmt_float(p),
            fmt_float(final_norm),
            u8::from(converged)
        ));
    }
    emit(
        cfg,
        manifest,
        "region_starts.csv",
        "start_q,start_p,final_norm,converged",
        &rows,
    )?;
    manifest.push_metric("fraction_converged", converged_count as f64 / total as f64);
    manifest.push_metric("worst_energy_rise", worst_energy_rise);
    Ok(())
}

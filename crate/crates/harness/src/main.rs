//! `mbo`: analyze spectra, simulate trajectories, build damping schedules,
//! audit shadow-energy drift, run named experiments, and regenerate figure
//! data. Exit codes: 0 success, 2 configuration error, 3 divergence.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mbo::config::{ExperimentConfig, RunMode};
use mbo::csvio::{fmt_float, write_csv};
use mbo::error::HarnessError;
use mbo::experiments::{parse_state, run_experiment, schedule_rows};
use mbo::figures::emit_figure_data;

use mbo_core::dynamics::{ct_flow, dt_trajectory, symplectic_step, AlgorithmParams};
use mbo_core::energy::{
    energy_audit, energy_gradient_sq, hamiltonian, shadow_drift_audit, shadow_energy,
    TheoryConstants,
};
use mbo_core::objective::Objective;
use mbo_core::spectral::{ct_worst_rate, dt_worst_rate, RateReport};

#[derive(Parser)]
#[command(
    name = "mbo",
    version,
    about = "Momentum dynamics: spectra, trajectories, schedules, and energy audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue locus and worst-case rate over the curvature interval [1/kappa, 1]
    Analyze {
        /// ct (continuous) or dt (discrete)
        #[arg(long, default_value = "ct")]
        mode: String,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Step size (discrete mode only)
        #[arg(long = "T", default_value_t = 0.5)]
        step: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Integrate the momentum dynamics and write the trajectory CSV
    Simulate {
        #[arg(long)]
        objective: String,
        #[arg(long, default_value = "ct")]
        mode: String,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Step size (discrete mode only)
        #[arg(long = "T", default_value_t = 0.5)]
        step: f64,
        /// Steps (discrete mode only)
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long = "t-end", default_value_t = 40.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Initial state `q0,..;p0,..` (momentum defaults to rest)
        #[arg(long)]
        z0: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Build a damping schedule and its envelope
    Schedule {
        #[arg(long, default_value = "ct")]
        mode: String,
        #[arg(long)]
        d0: f64,
        #[arg(long)]
        dinf: f64,
        #[arg(long = "T", default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = 300)]
        kmax: usize,
        #[arg(long, default_value_t = 50.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Audit shadow-energy drift along the conservative symplectic map
    EnergyAudit {
        #[arg(long)]
        objective: String,
        #[arg(long = "T")]
        step: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        z0: String,
        /// Rerun at half the step and report the drift order
        #[arg(long, default_value_t = false)]
        halve: bool,
        /// Analyticity radius; enables the closed-form drift bound report
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a named experiment from a config file
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a preset figure dataset
    Figure {
        #[arg(long)]
        id: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Analyze {
            mode,
            d,
            beta,
            step,
            kappa,
            out,
        } => analyze(&mode, d, beta, step, kappa, &out),
        Command::Simulate {
            objective,
            mode,
            d,
            beta,
            step,
            steps,
            t_end,
            dt,
            z0,
            out,
        } => simulate(
            &objective, &mode, d, beta, step, steps, t_end, dt, &z0, &out,
        ),
        Command::Schedule {
            mode,
            d0,
            dinf,
            step,
            kmax,
            tmax,
            dt,
            out,
        } => {
            let mode = RunMode::parse(&mode)?;
            fs::create_dir_all(&out)?;
            let rows = schedule_rows(mode, step, d0, dinf, tmax, dt, kmax)?;
            let path = out.join("schedule.csv");
            write_csv(&path, "k_or_t,d,beta,envelope", &rows)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::EnergyAudit {
            objective,
            step,
            steps,
            z0,
            halve,
            radius,
            out,
        } => audit(&objective, step, steps, &z0, halve, radius, &out),
        Command::Experiment { config, out } => {
            let text = fs::read_to_string(&config)?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if let Some(dir) = out {
                cfg.out_dir = dir;
            }
            let manifest = run_experiment(&cfg)?;
            println!("experiment={}", manifest.experiment);
            println!("out={}", cfg.out_dir.display());
            for (key, value) in &manifest.metrics {
                println!("metric.{key}={value}");
            }
            Ok(())
        }
        Command::Figure { id, out } => {
            let manifest = emit_figure_data(&id, &out)?;
            for file in &manifest.files {
                println!("wrote {}", out.join(file).display());
            }
            Ok(())
        }
    }
}

fn analyze(
    mode: &str,
    d: f64,
    beta: f64,
    step: f64,
    kappa: f64,
    out: &PathBuf,
) -> Result<(), HarnessError> {
    if !(kappa >= 1.0) {
        return Err(HarnessError::Config("kappa must be >= 1".into()));
    }
    let mode = RunMode::parse(mode)?;
    let report: RateReport<f64> = match mode {
        RunMode::Ct => ct_worst_rate(d, beta, kappa),
        RunMode::Dt => dt_worst_rate(step, d, beta, kappa),
    };
    fs::create_dir_all(out)?;
    let rows: Vec<String> = report
        .samples
        .iter()
        .map(|s| {
            format!(
                "{},{},{},{},{},{},{}",
                fmt_float(s.h),
                fmt_float(s.eigenvalues.0.re),
                fmt_float(s.eigenvalues.0.im),
                fmt_float(s.eigenvalues.1.re),
                fmt_float(s.eigenvalues.1.im),
                fmt_float(s.metric),
                s.regime.as_str()
            )
        })
        .collect();
    let path = out.join("analyze.csv");
    write_csv(&path, "h,re1,im1,re2,im2,metric,regime", &rows)?;
    println!("wrote {}", path.display());
    println!(
        "worst_rate={} worst_h={} stable={}",
        fmt_float(report.worst_rate),
        fmt_float(report.worst_h),
        report.stable
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    objective: &str,
    mode: &str,
    d: f64,
    beta: f64,
    step: f64,
    steps: usize,
    t_end: f64,
    dt: f64,
    z0: &str,
    out: &PathBuf,
) -> Result<(), HarnessError> {
    let obj: Objective<f64> = Objective::from_selector(objective)?;
    let z0 = parse_state(z0)?;
    if z0.dim() != obj.dimension() {
        return Err(HarnessError::Config(format!(
            "state dimension {} does not match objective dimension {}",
            z0.dim(),
            obj.dimension()
        )));
    }
    let mode = RunMode::parse(mode)?;
    let traj = match mode {
        RunMode::Ct => ct_flow(&obj, &AlgorithmParams::new(step, d, beta), &z0, t_end, dt)?,
        RunMode::Dt => dt_trajectory(&obj, &AlgorithmParams::new(step, d, beta), &z0, steps)?,
    };
    fs::create_dir_all(out)?;
    let path = out.join("trajectory.csv");
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    fs::write(&path, buf)?;
    println!("wrote {}", path.display());
    let final_norm = traj.last_state().map_or(f64::NAN, |z| z.norm());
    println!(
        "samples={} final_norm={}",
        traj.len(),
        fmt_float(final_norm)
    );
    Ok(())
}

fn audit(
    objective: &str,
    step: f64,
    steps: usize,
    z0: &str,
    halve: bool,
    radius: Option<f64>,
    out: &PathBuf,
) -> Result<(), HarnessError> {
    let obj: Objective<f64> = Objective::from_selector(objective)?;
    let z0 = parse_state(z0)?;
    if z0.dim() != obj.dimension() {
        return Err(HarnessError::Config(format!(
            "state dimension {} does not match objective dimension {}",
            z0.dim(),
            obj.dimension()
        )));
    }

    let mut rows = Vec::with_capacity(steps + 1);
    let mut z = z0.clone();
    let mut shadow = shadow_energy(&obj, &z, step);
    rows.push(format!(
        "0,{},{},{}",
        fmt_float(hamiltonian(&obj, &z)),
        fmt_float(shadow),
        fmt_float(0.0)
    ));
    for k in 1..=steps {
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
    fs::create_dir_all(out)?;
    let path = out.join("energy_audit.csv");
    write_csv(&path, "k,H,shadow,drift", &rows)?;
    println!("wrote {}", path.display());

    let (max_drift, order) = if halve {
        let a = energy_audit(&obj, step, &z0, steps)?;
        (a.max_drift, a.order_estimate.unwrap_or(f64::NAN))
    } else {
        let a = shadow_drift_audit(&obj, step, &z0, steps)?;
        (a.max_drift, f64::NAN)
    };
    println!(
        "max_drift={} order={}",
        fmt_float(max_drift),
        fmt_float(order)
    );

    if let Some(r) = radius {
        let constants = TheoryConstants::new(obj.suggested_energy_lipschitz())?;
        let bound = constants
            .drift_bound(step)
            .map(|b| b * energy_gradient_sq(&obj, &z0));
        let z0_max = constants.validity_radius(r, step);
        match bound {
            Ok(b) => println!(
                "theory_t0={} theory_bound={} z0_max={} valid={}",
                fmt_float(constants.t0),
                fmt_float(b),
                fmt_float(z0_max),
                z0.norm() <= z0_max
            ),
            Err(e) => println!(
                "theory_t0={} theory_bound=out-of-validity ({e})",
                fmt_float(constants.t0)
            ),
        }
    }
    Ok(())
}

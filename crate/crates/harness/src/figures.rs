//! Preset figure datasets: eigenvalue loci, the damping schedule with its
//! envelope, and the time-varying rate curves in both time formulations.

use std::fs;
use std::path::Path;

use mbo_core::schedules::{dt_schedule, ScheduleCt};
use mbo_core::spectral::{ct_eigenvalues, dt_eigenvalues};

use crate::config::RunMode;
use crate::csvio::{fmt_float, write_csv, Manifest};
use crate::error::HarnessError;
use crate::experiments::append_dt_magnitude_rows;

pub const FIGURE_IDS: [&str; 5] = ["fig2", "fig4", "fig5", "fig6", "fig7"];

/// Write the preset dataset for one figure id into `out`; returns the
/// manifest (already written alongside the CSVs).
pub fn emit_figure_data(figure: &str, out: &Path) -> Result<Manifest, HarnessError> {
    fs::create_dir_all(out)?;
    let mut manifest = Manifest::new(figure, 0, crate::csvio::fnv1a64(figure.as_bytes()));
    match figure {
        "fig2" => loci(out, &mut manifest, RunMode::Ct, 0.0)?,
        "fig4" => loci(out, &mut manifest, RunMode::Dt, 0.8)?,
        "fig5" => fig5(out, &mut manifest)?,
        "fig6" => fig6(out, &mut manifest)?,
        "fig7" => fig7(out, &mut manifest)?,
        other => {
            return Err(HarnessError::Config(format!(
                "unknown figure `{other}`; expected one of {FIGURE_IDS:?}"
            )))
        }
    }
    manifest.write(out)?;
    Ok(manifest)
}

fn loci(
    out: &Path,
    manifest: &mut Manifest,
    mode: RunMode,
    step_size: f64,
) -> Result<(), HarnessError> {
    let mut rows = Vec::new();
    for beta in [0.0, 0.2, 0.4] {
        for d in [0.2, 0.4, 0.6, 0.8, 1.0, 1.2] {
            for i in 0..=400 {
                let h = i as f64 / 400.0;
                let (e1, e2) = match mode {
                    RunMode::Ct => ct_eigenvalues(d, beta, h),
                    RunMode::Dt => dt_eigenvalues(step_size, d, beta, h),
                };
                rows.push(format!(
                    "{},{},{},{},{},{},{}",
                    fmt_float(beta),
                    fmt_float(d),
                    fmt_float(h),
                    fmt_float(e1.re),
                    fmt_float(e1.im),
                    fmt_float(e2.re),
                    fmt_float(e2.im)
                ));
            }
        }
    }
    let name = format!("{}.csv", manifest.experiment);
    write_csv(&out.join(&name), "beta,d,h,re1,im1,re2,im2", &rows)?;
    manifest.files.push(name);
    Ok(())
}

/// Damping decay `d(0) = 1`, `d_inf = 1/sqrt(10)` with the envelope ratio
/// and the full envelope.
fn fig5(out: &Path, manifest: &mut Manifest) -> Result<(), HarnessError> {
    let d0 = 1.0;
    let d_inf = 1.0 / 10f64.sqrt();
    let sched = ScheduleCt::new(d0, d_inf, 0.0)?;
    let mut rows = Vec::new();
    for i in 0..=5000 {
        let t = i as f64 * 0.01;
        rows.push(format!(
            "{},{},{},{}",
            fmt_float(t),
            fmt_float(sched.damping(t)),
            fmt_float(sched.envelope(t, false)),
            fmt_float(sched.envelope(t, true))
        ));
    }
    write_csv(&out.join("fig5.csv"), "t,d,ratio,envelope", &rows)?;
    manifest.files.push("fig5.csv".to_string());
    manifest.push_metric("ratio_end", sched.envelope(50.0, false));
    manifest.push_metric("ratio_limit", 2.0 * d_inf / (d_inf + d0));
    Ok(())
}

/// Continuous fundamental-solution magnitudes for `d_inf = 1/sqrt(2 kappa)`,
/// `d0 = 1`, evaluated at the soft curvature end `h = 1/kappa`.
fn fig6(out: &Path, manifest: &mut Manifest) -> Result<(), HarnessError> {
    let mut rows = Vec::new();
    for kappa in [1.0f64, 10.0, 1e2, 1e3, 1e4] {
        let d_inf = 1.0 / (2.0 * kappa).sqrt();
        let sched = ScheduleCt::new(1.0, d_inf, 0.0)?;
        for i in 0..=6000 {
            let t = i as f64 * 0.01;
            let (slow, _) = sched.fundamental(1.0 / kappa, t)?;
            rows.push(format!(
                "{},{},{}",
                fmt_float(kappa),
                fmt_float(t),
                fmt_float(slow)
            ));
        }
    }
    write_csv(&out.join("fig6.csv"), "kappa,t,magnitude", &rows)?;
    manifest.files.push("fig6.csv".to_string());
    Ok(())
}

/// Discrete counterparts: `T = 0.5`, `beta_0 = 0`, `d0 = 1`,
/// `d_inf = 1/sqrt(2 kappa)`, curvatures `h = 1/kappa` and `h = 1`.
fn fig7(out: &Path, manifest: &mut Manifest) -> Result<(), HarnessError> {
    let step = 0.5;
    let k_max = 1500;
    let mut rows = Vec::new();
    for kappa in [1.0f64, 10.0, 1e2, 1e3, 1e4] {
        let d_inf = 1.0 / (2.0 * kappa).sqrt();
        let sched = dt_schedule(step, 1.0, d_inf, k_max)?;
        for h in [1.0 / kappa, 1.0] {
            append_dt_magnitude_rows(&mut rows, &sched, kappa, h, k_max);
        }
    }
    write_csv(&out.join("fig7.csv"), "kappa,h,k,magnitude", &rows)?;
    manifest.files.push("fig7.csv".to_string());
    Ok(())
}

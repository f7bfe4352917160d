//! Experiment configuration: flat `key = value` text with `#` comments and
//! bracketed section headers (sections are organizational only).

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::csvio::fnv1a64;
use crate::error::HarnessError;

/// Known experiment names.
pub const EXPERIMENT_NAMES: [&str; 9] = [
    "eig_loci_ct",
    "eig_loci_dt",
    "rate_vs_kappa_ct",
    "rate_vs_kappa_dt",
    "schedule_envelope",
    "tv_rate_curves",
    "heavyball_accel",
    "energy_conservation",
    "region_demo",
];

/// Continuous or discrete mode, as written in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Ct,
    Dt,
}

impl RunMode {
    pub fn parse(s: &str) -> Result<Self, HarnessError> {
        match s {
            "ct" => Ok(RunMode::Ct),
            "dt" => Ok(RunMode::Dt),
            other => Err(HarnessError::Config(format!(
                "mode must be `ct` or `dt`, got `{other}`"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Ct => "ct",
            RunMode::Dt => "dt",
        }
    }
}

/// Resolved experiment configuration with per-experiment defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub mode: RunMode,
    pub objective: String,
    pub kappa_list: Vec<f64>,
    pub step_size: f64,
    pub damping: f64,
    pub beta: f64,
    pub rule: String,
    pub d0: f64,
    pub d_inf: f64,
    pub t_end: f64,
    pub dt: f64,
    pub steps: usize,
    pub k_max: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Defaults for a named experiment.
    pub fn preset(name: &str) -> Result<Self, HarnessError> {
        if !EXPERIMENT_NAMES.contains(&name) {
            return Err(HarnessError::Config(format!(
                "unknown experiment `{name}`; expected one of {EXPERIMENT_NAMES:?}"
            )));
        }
        let mut cfg = Self {
            name: name.to_string(),
            mode: if name.ends_with("_ct") {
                RunMode::Ct
            } else {
                RunMode::Dt
            },
            objective: "double_well".to_string(),
            kappa_list: vec![10.0, 1e2, 1e3, 1e4, 1e5, 1e6],
            step_size: 0.5,
            damping: 1.0,
            beta: 0.0,
            rule: "inv_sqrt".to_string(),
            d0: 1.0,
            d_inf: 1.0 / 10f64.sqrt(),
            t_end: 40.0,
            dt: 1e-3,
            steps: 20_000,
            k_max: 1500,
            seed: 0,
            out_dir: PathBuf::from("."),
        };
        match name {
            "eig_loci_ct" => {}
            "eig_loci_dt" => cfg.step_size = 0.8,
            "rate_vs_kappa_ct" | "rate_vs_kappa_dt" => {}
            "schedule_envelope" => {
                cfg.mode = RunMode::Ct;
                cfg.t_end = 50.0;
                cfg.dt = 0.01;
                cfg.k_max = 300;
            }
            "tv_rate_curves" => {
                cfg.mode = RunMode::Ct;
                cfg.kappa_list = vec![1.0, 10.0, 1e2, 1e3, 1e4];
                cfg.t_end = 60.0;
                cfg.dt = 0.01;
            }
            "heavyball_accel" => {
                cfg.mode = RunMode::Dt;
                cfg.kappa_list = vec![1e2, 1e3, 1e4];
            }
            "energy_conservation" => {
                cfg.mode = RunMode::Dt;
                cfg.objective = "quartic_well:eps=1".to_string();
                cfg.step_size = 0.01;
                cfg.steps = 5000;
            }
            "region_demo" => {
                cfg.mode = RunMode::Ct;
                cfg.t_end = 200.0;
                cfg.dt = 0.01;
                cfg.damping = 0.5;
            }
            _ => unreachable!("name validated above"),
        }
        Ok(cfg)
    }

    /// Parse config text: `key = value` lines, `#` comments, `[section]`
    /// headers. Unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let map = key_value_map(text)?;
        let name = map
            .get("name")
            .ok_or_else(|| HarnessError::Config("config is missing `name`".into()))?;
        let mut cfg = Self::preset(name)?;
        for (key, value) in &map {
            let parse_f64 = || -> Result<f64, HarnessError> {
                value.parse().map_err(|_| {
                    HarnessError::Config(format!("key `{key}` needs a number, got `{value}`"))
                })
            };
            let parse_usize = || -> Result<usize, HarnessError> {
                value.parse().map_err(|_| {
                    HarnessError::Config(format!("key `{key}` needs an integer, got `{value}`"))
                })
            };
            match key.as_str() {
                "name" => {}
                "mode" => cfg.mode = RunMode::parse(value)?,
                "objective" => cfg.objective = value.clone(),
                "rule" => cfg.rule = value.clone(),
                "kappa_list" => {
                    cfg.kappa_list = value
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<f64>()
                                .map_err(|_| HarnessError::Config(format!("bad kappa entry `{s}`")))
                        })
                        .collect::<Result<_, _>>()?;
                }
                "T" => cfg.step_size = parse_f64()?,
                "d" => cfg.damping = parse_f64()?,
                "beta" => cfg.beta = parse_f64()?,
                "d0" => cfg.d0 = parse_f64()?,
                "dinf" => cfg.d_inf = parse_f64()?,
                "t_end" => cfg.t_end = parse_f64()?,
                "dt" => cfg.dt = parse_f64()?,
                "steps" => cfg.steps = parse_usize()?,
                "kmax" => cfg.k_max = parse_usize()?,
                "seed" => {
                    cfg.seed = value.parse().map_err(|_| {
                        HarnessError::Config(format!("key `seed` needs a u64, got `{value}`"))
                    })?;
                }
                "out" => cfg.out_dir = PathBuf::from(value),
                other => {
                    return Err(HarnessError::Config(format!(
                        "unknown config key `{other}`"
                    )))
                }
            }
        }
        Ok(cfg)
    }

    /// Canonical `key=value` text: every field, sorted, diff-friendly.
    pub fn canonical_string(&self) -> String {
        let kappas = self
            .kappa_list
            .iter()
            .map(|k| format!("{k:e}"))
            .collect::<Vec<_>>()
            .join(",");
        let mut lines = vec![
            format!("T={:e}", self.step_size),
            format!("beta={:e}", self.beta),
            format!("d={:e}", self.damping),
            format!("d0={:e}", self.d0),
            format!("dinf={:e}", self.d_inf),
            format!("dt={:e}", self.dt),
            format!("kappa_list={kappas}"),
            format!("kmax={}", self.k_max),
            format!("mode={}", self.mode.as_str()),
            format!("name={}", self.name),
            format!("objective={}", self.objective),
            format!("rule={}", self.rule),
            format!("seed={}", self.seed),
            format!("steps={}", self.steps),
            format!("t_end={:e}", self.t_end),
        ];
        lines.sort();
        lines.join("\n")
    }

    pub fn config_hash(&self) -> u64 {
        fnv1a64(self.canonical_string().as_bytes())
    }
}

fn key_value_map(text: &str) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            HarnessError::Config(format!("line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim().to_string();
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(HarnessError::Config(format!(
                "line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_overrides() {
        let text = "\
# rate scan
[experiment]
name = rate_vs_kappa_dt
seed = 9

[params]
T = 0.25            # step
kappa_list = 10, 1e3, 1e6
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.name, "rate_vs_kappa_dt");
        assert_eq!(cfg.mode, RunMode::Dt);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.step_size, 0.25);
        assert_eq!(cfg.kappa_list, vec![10.0, 1e3, 1e6]);
    }

    #[test]
    fn rejects_unknown_names_keys_and_bad_values() {
        assert!(ExperimentConfig::parse("name = nonsense").is_err());
        assert!(ExperimentConfig::parse("name = region_demo\nwat = 1").is_err());
        assert!(ExperimentConfig::parse("name = region_demo\nT = fast").is_err());
        assert!(ExperimentConfig::parse("T = 0.5").is_err());
        assert!(ExperimentConfig::parse("name = region_demo\nseed = -1").is_err());
    }

    #[test]
    fn canonical_string_is_stable_under_reordering() {
        let a = ExperimentConfig::parse("name = region_demo\nseed = 3\ndt = 0.02").unwrap();
        let b = ExperimentConfig::parse("dt = 0.02\nseed = 3\nname = region_demo").unwrap();
        assert_eq!(a.canonical_string(), b.canonical_string());
        assert_eq!(a.config_hash(), b.config_hash());
        let c = ExperimentConfig::parse("name = region_demo\nseed = 4\ndt = 0.02").unwrap();
        assert_ne!(a.config_hash(), c.config_hash());
    }

    #[test]
    fn every_experiment_has_a_preset() {
        for name in EXPERIMENT_NAMES {
            let cfg = ExperimentConfig::preset(name).unwrap();
            assert_eq!(cfg.name, name);
        }
    }
}

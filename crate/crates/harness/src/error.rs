//! Harness-level error type and its process exit codes.

use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Objective(#[from] mbo_core::objective::ObjectiveError),
    #[error(transparent)]
    Dynamics(#[from] mbo_core::dynamics::DynamicsError<f64>),
    #[error(transparent)]
    Spectral(#[from] mbo_core::spectral::SpectralError<f64>),
    #[error(transparent)]
    Schedule(#[from] mbo_core::schedules::ScheduleError<f64>),
    #[error(transparent)]
    Energy(#[from] mbo_core::energy::EnergyError<f64>),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 3 for divergence.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Dynamics(mbo_core::dynamics::DynamicsError::Diverged { .. }) => 3,
            HarnessError::Energy(mbo_core::energy::EnergyError::Diverged { .. }) => 3,
            _ => 2,
        }
    }
}

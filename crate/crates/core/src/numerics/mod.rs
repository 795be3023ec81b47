//! Numerical experiments on a periodic grid: the mollified linear heat
//! equation, Wick constants and powers, the two-dimensional cubic equation
//! with and without renormalisation, and a one-dimensional toy
//! distribution.

mod grid;
mod mollifier;
mod phi4;
mod she;
mod toy;
mod wick;

pub use grid::{FieldTransform, Spectral, TorusGrid};
pub use mollifier::{MollifierSpec, Profile};
pub use phi4::{
    run_ladder, solve_phi4_2, solve_phi4_direct, InitialData, LadderConfig, LadderReport, LadderRow, Phi4Options,
    Phi4Run,
};
pub use she::{solve_she, stationary_samples, FieldSample, NoiseSource, OuStepper, SheOptions};
pub use toy::{bare_coupling, toy_distribution, toy_limit, EtaProfile, ToyQuadrature};
pub use wick::{covariance, covariance_table, mode_variances, wick_constant, wick_power};

#[derive(Debug, thiserror::Error)]
pub enum NumericsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid mollifier: {0}")]
    InvalidMollifier(String),
    #[error("Wick power of order {0} is not supported (use 1, 2 or 3)")]
    WickOrder(u32),
    #[error("solution blew up at t = {time} (sup norm {sup:e})")]
    BlowUp { time: f64, sup: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

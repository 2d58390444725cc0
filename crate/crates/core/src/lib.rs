//! Spectral simulation of the viscous Burgers equation on the circle driven
//! by tempered α-stable Lévy noise, with the estimators used to study
//! intermittency in the vanishing-viscosity limit.

pub mod error;
pub mod harness;
pub mod levy;
pub mod quadrature;
pub mod rng;
pub mod solver;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use harness::{
    parse_config, run_experiment, verify_suite, ExperimentConfig, RunReport, VerifyLevel,
    VerifyOptions, VerifyReport,
};
pub use levy::{CylindricalNoiseConfig, CylindricalSampler, LevyMeasureConfig};
pub use solver::{Scheme, Simulation, SolverConfig, TimeStep};
pub use spectral::{DealiasRule, FourierField, PhysicalField};
pub use stats::{AveragingWindow, ScalingFit, SpectrumConfig, StatAccumulator, StatRequests};

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

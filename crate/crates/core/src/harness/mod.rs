//! Configuration, experiment orchestration and self-verification.

mod config;
mod experiment;
mod verify;

pub use config::{
    parse_config, Auto, ExperimentConfig, InitialCondition, Method, NoiseSection, OutputSection,
    SolverSection, StatisticsSection, SweepSection,
};
pub use experiment::{run_experiment, Check, NamedFit, NuReport, RunReport, MIN_ENSEMBLE};
pub use verify::{inviscid_convergence, scaling_config, verify_suite, VerifyLevel, VerifyOptions, VerifyReport};

//! Time integration of `∂ₜu = ν∂ₓₓu − u∂ₓu + η` on the unit circle, and two
//! independent references: the Cole–Hopf solution of the unforced viscous
//! problem and a Godunov finite-volume solver for the inviscid limit.

mod cole_hopf;
mod entropy;
mod godunov;
mod pseudo_spectral;

pub use cole_hopf::cole_hopf_reference;
pub use entropy::sine_entropy_solution;
pub use godunov::{
    godunov_flux, godunov_step, inviscid_integrate, CellField, InviscidConfig, InviscidOutcome,
};
pub use pseudo_spectral::{
    auto_resolution, nonlinear_term, step, Integration, NonlinearOperator, Simulation,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy::CylindricalNoiseConfig;
use crate::spectral::{DealiasRule, FourierField};

/// Abort threshold on `|u|∞`; solutions of interest are of order one.
pub const BLOWUP_THRESHOLD: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// First-order exponential Euler on the mild formulation; the noise
    /// increment is added after the decay factor.
    ExpEuler,
    /// Fourth-order exponential Runge–Kutta (Cox–Matthews) for the drift,
    /// with the same end-of-step noise kick. Used for deterministic checks.
    Etdrk4,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp-euler" => Ok(Scheme::ExpEuler),
            "etdrk4" => Ok(Scheme::Etdrk4),
            other => Err(Error::validation(
                "scheme",
                format!("unknown scheme `{other}` (expected `exp-euler` or `etdrk4`)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeStep {
    /// `min(0.25 / (ν λ_N), cfl_safety / (2πN |u|∞))`, re-evaluated
    /// every [`AUTO_DT_INTERVAL`] steps.
    Auto,
    Fixed(f64),
}

/// Steps between re-evaluations of an automatic time step.
pub const AUTO_DT_INTERVAL: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub nu: f64,
    pub dt: TimeStep,
    pub max_mode: usize,
    pub enable_nonlinearity: bool,
    pub noise: Option<CylindricalNoiseConfig>,
    pub scheme: Scheme,
    pub dealias: DealiasRule,
    pub cfl_safety: f64,
    /// Physical grid points per retained mode for the pseudo-spectral product.
    pub grid_factor: usize,
}

impl SolverConfig {
    pub fn new(nu: f64, max_mode: usize) -> Self {
        Self {
            nu,
            dt: TimeStep::Auto,
            max_mode,
            enable_nonlinearity: true,
            noise: None,
            scheme: Scheme::ExpEuler,
            dealias: DealiasRule::TWO_THIRDS,
            cfl_safety: 0.5,
            grid_factor: 4,
        }
    }

    pub fn with_noise(mut self, noise: CylindricalNoiseConfig) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = TimeStep::Fixed(dt);
        self
    }

    pub fn grid_size(&self) -> usize {
        self.grid_factor * self.max_mode
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::validation("nu", format!("{} is not in (0, 1]", self.nu)));
        }
        if self.max_mode == 0 {
            return Err(Error::validation("max_mode", "must be positive"));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::validation("dt", format!("{dt} must be positive")));
            }
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::validation(
                "cfl_safety",
                format!("{} is not in (0, 1]", self.cfl_safety),
            ));
        }
        if self.grid_factor * self.max_mode < 2 * self.max_mode + 2 {
            return Err(Error::validation(
                "grid_factor",
                format!("{} leaves no room above the retained modes", self.grid_factor),
            ));
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        Ok(())
    }

    /// Stiffness limit `0.25 / (ν λ_N)`.
    pub fn stiff_dt(&self) -> f64 {
        0.25 / (self.nu * crate::levy::eigenvalue(self.max_mode))
    }

    /// Transport limit `cfl_safety / (2πN |u|∞)`.
    pub fn transport_dt(&self, u_max: f64) -> f64 {
        if u_max <= 0.0 {
            f64::INFINITY
        } else {
            self.cfl_safety / (2.0 * std::f64::consts::PI * self.max_mode as f64 * u_max)
        }
    }
}

/// Receives the state at sampling times during integration.
pub trait Observer {
    fn observe(&mut self, step: u64, t: f64, u: &FourierField) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(u64, f64, &FourierField) -> Result<()>,
{
    fn observe(&mut self, step: u64, t: f64, u: &FourierField) -> Result<()> {
        self(step, t, u)
    }
}

/// When observers are called.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SampleStride {
    /// Every `n` steps, including step 0.
    Steps(u64),
    /// At the first step reaching each of `start, start + every, …`.
    Time { start: f64, every: f64 },
}

impl SampleStride {
    pub fn every_step() -> Self {
        SampleStride::Steps(1)
    }
}

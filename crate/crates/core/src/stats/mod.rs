//! Estimators for time-and-ensemble averaged statistics: structure
//! functions, the layer-averaged energy spectrum, Sobolev moments, the
//! Oleinik statistic, and log-log exponent fits.

mod accumulator;
mod fit;

pub use accumulator::{
    oleinik_statistic, OleinikStatistic, StatAccumulator, StatRequests,
};
pub use fit::{fit_power_law, ScalingFit};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The double average `⟨⟨·⟩⟩ = (1/σ) ∫_T^{T+σ} 𝔼[·] dt`, discretized as
/// an equal-weight mean over samples every `sample_interval` time units
/// within `[T, T+σ]` and over `ensemble_size` trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AveragingWindow {
    pub burn_in: f64,
    pub sigma: f64,
    pub sample_interval: f64,
    pub ensemble_size: usize,
}

impl Default for AveragingWindow {
    fn default() -> Self {
        Self {
            burn_in: 1.0,
            sigma: 5.0,
            sample_interval: 0.02,
            ensemble_size: 8,
        }
    }
}

impl AveragingWindow {
    pub fn end(&self) -> f64 {
        self.burn_in + self.sigma
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.burn_in >= 1.0 && self.burn_in.is_finite()) {
            return Err(Error::validation(
                "burn_in",
                format!("{} must be at least 1", self.burn_in),
            ));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::validation("sigma", format!("{} must be positive", self.sigma)));
        }
        if !(self.sample_interval > 0.0 && self.sample_interval <= self.sigma) {
            return Err(Error::validation(
                "sample_interval",
                format!("{} must lie in (0, sigma]", self.sample_interval),
            ));
        }
        if self.ensemble_size == 0 {
            return Err(Error::validation("ensemble_size", "must be positive"));
        }
        Ok(())
    }

    /// Number of samples per trajectory: `T, T + h, …` up to `T + σ`.
    pub fn samples_per_trajectory(&self) -> usize {
        (self.sigma / self.sample_interval + 1e-9).floor() as usize + 1
    }
}

/// Layer width `M` of the energy spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub layer_width: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { layer_width: 2.0 }
    }
}

impl SpectrumConfig {
    pub fn new(layer_width: f64) -> Result<Self> {
        let c = Self { layer_width };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.layer_width > 1.0 && self.layer_width.is_finite()) {
            return Err(Error::validation(
                "layer_width",
                format!("{} must exceed 1", self.layer_width),
            ));
        }
        Ok(())
    }

    /// Inclusive integer bounds of `J_n = {k ≥ 1 : n/M ≤ k ≤ nM}`.
    pub fn layer(&self, n: usize) -> (usize, usize) {
        let n = n as f64;
        let lo = (n / self.layer_width - 1e-9).ceil().max(1.0) as usize;
        let hi = (n * self.layer_width + 1e-9).floor() as usize;
        (lo, hi)
    }

    /// Largest `n` whose layer fits within `max_mode`.
    pub fn max_layer(&self, max_mode: usize) -> usize {
        (max_mode as f64 / self.layer_width + 1e-9).floor() as usize
    }
}

/// `S_p(l) = ⟨⟨∫|u(x+l) − u(x)|^p dx⟩⟩`.
pub fn structure_function(acc: &StatAccumulator, p: f64, l: f64) -> Result<f64> {
    acc.structure_function(p, l)
}

/// `E_n = (2n(M − 1/M))⁻¹ Σ_{k∈J_n} ½⟨⟨|û_k|²⟩⟩`, summing over both signs
/// of `k`.
pub fn energy_spectrum(acc: &StatAccumulator, n: usize, cfg: &SpectrumConfig) -> Result<f64> {
    acc.energy_spectrum(n, cfg)
}

/// `⟨⟨‖u‖_n^k⟩⟩`.
pub fn sobolev_moment(acc: &StatAccumulator, n: f64, k: f64) -> Result<f64> {
    acc.sobolev_moment(n, k)
}

/// `S_p(l)^{1/p} / S_q(l)^{1/q}`.
pub fn flatness_ratio(acc: &StatAccumulator, p: f64, q: f64, l: f64) -> Result<f64> {
    let sp = acc.structure_function(p, l)?;
    let sq = acc.structure_function(q, l)?;
    if sq == 0.0 {
        return Err(Error::ZeroDenominator(format!("S_{q}({l})")));
    }
    if p == q {
        return Ok(1.0);
    }
    Ok(sp.powf(1.0 / p) / sq.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_defaults_and_validation() {
        let w = AveragingWindow::default();
        assert!(w.validate().is_ok());
        assert_eq!(w.end(), 6.0);
        assert_eq!(w.samples_per_trajectory(), 251);
        assert!(AveragingWindow { burn_in: 0.5, ..w }.validate().is_err());
        assert!(AveragingWindow { sigma: 0.0, ..w }.validate().is_err());
        assert!(AveragingWindow { ensemble_size: 0, ..w }.validate().is_err());
    }

    #[test]
    fn layers() {
        let c = SpectrumConfig::default();
        assert_eq!(c.layer(1), (1, 2));
        assert_eq!(c.layer(3), (2, 6));
        assert_eq!(c.layer(4), (2, 8));
        assert_eq!(c.max_layer(1024), 512);
        assert!(SpectrumConfig::new(1.0).is_err());
        let odd = SpectrumConfig::new(1.5).unwrap();
        assert_eq!(odd.layer(3), (2, 4));
    }
}

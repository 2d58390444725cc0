//! Experiment configuration: a sectioned TOML document whose every key has
//! a default, so an empty document is a complete configuration.

use std::path::PathBuf;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::levy::{CylindricalNoiseConfig, LevyMeasureConfig};
use crate::solver::{auto_resolution, Scheme, SolverConfig, TimeStep};
use crate::stats::{AveragingWindow, SpectrumConfig, StatRequests};

/// A value that may be given as the string `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Auto<T> {
    Auto,
    Value(T),
}

impl<T> Default for Auto<T> {
    fn default() -> Self {
        Auto::Auto
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Auto<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw<T> {
            Text(String),
            Value(T),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) if s == "auto" => Ok(Auto::Auto),
            Raw::Text(s) => Err(D::Error::custom(format!(
                "expected `auto` or a value, found `{s}`"
            ))),
            Raw::Value(v) => Ok(Auto::Value(v)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Pseudo-spectral viscous solver.
    Spectral,
    /// Finite-volume entropy solver for the inviscid equation; `nu` and
    /// the spectral settings are ignored.
    Godunov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    Zero,
    /// `u₀ = sin(2πx)`.
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub nu: f64,
    pub dt: Auto<f64>,
    pub max_mode: Auto<usize>,
    /// Defaults to the end of the averaging window.
    pub t_end: Auto<f64>,
    pub scheme: Scheme,
    pub cfl_safety: f64,
    pub grid_factor: usize,
    pub enable_nonlinearity: bool,
    pub method: Method,
    /// Cell count of the Godunov solver.
    pub cells: usize,
    pub initial: InitialCondition,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            nu: 2e-3,
            dt: Auto::Auto,
            max_mode: Auto::Auto,
            t_end: Auto::Auto,
            scheme: Scheme::ExpEuler,
            cfl_safety: 0.5,
            grid_factor: 4,
            enable_nonlinearity: true,
            method: Method::Spectral,
            cells: 2048,
            initial: InitialCondition::Zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub enabled: bool,
    pub alpha: f64,
    pub gamma0: f64,
    /// Defaults to the value giving `β₁ = 1`.
    pub amplitude: Auto<f64>,
    pub small_jump_cutoff: f64,
    pub intensity_scale: f64,
    pub seed: u64,
    /// Multiplier on the sine-mode coefficients `β_{−k}`.
    pub sine_scale: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let m = LevyMeasureConfig::default();
        Self {
            enabled: true,
            alpha: m.alpha,
            gamma0: CylindricalNoiseConfig::DEFAULT_GAMMA0,
            amplitude: Auto::Auto,
            small_jump_cutoff: m.small_jump_cutoff,
            intensity_scale: m.intensity_scale,
            seed: 0,
            sine_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatisticsSection {
    pub p_values: Vec<f64>,
    /// Defaults to 8 log-spaced lengths per decade over `[1e-4, 0.5]`.
    pub l_values: Auto<Vec<f64>>,
    pub sobolev: Vec<(f64, f64)>,
    pub layer_width: f64,
    /// Layer indices `n` used for the spectral slope.
    pub spectrum_fit: (f64, f64),
    /// Defaults to `[10ν, 0.1]`.
    pub inertial_range: Auto<(f64, f64)>,
    /// Defaults to `[ν/10, ν]`.
    pub dissipation_range: Auto<(f64, f64)>,
}

impl Default for StatisticsSection {
    fn default() -> Self {
        Self {
            p_values: vec![0.5, 1.0, 2.0, 3.0],
            l_values: Auto::Auto,
            sobolev: vec![(0.0, 2.0), (1.0, 2.0), (2.0, 2.0)],
            layer_width: 2.0,
            spectrum_fit: (4.0, 80.0),
            inertial_range: Auto::Auto,
            dissipation_range: Auto::Auto,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// Viscosities to run; empty means `[solver.nu]`.
    pub nu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Dump each trajectory's final state as `traj{ID}_t{TIME}.csv`.
    pub snapshots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            snapshots: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub solver: SolverSection,
    pub noise: NoiseSection,
    pub averaging: AveragingWindow,
    pub statistics: StatisticsSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Key named in a deserialization message, or the key of the line the
/// error points at.
fn offending_key(text: &str, err: &toml::de::Error) -> String {
    let msg = err.message();
    if let Some(rest) = msg.strip_prefix("unknown field `") {
        if let Some(end) = rest.find('`') {
            return rest[..end].to_string();
        }
    }
    err.span()
        .and_then(|span| {
            let start = text[..span.start.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
            let line = text[start..].lines().next()?;
            let key = line.split('=').next()?.trim();
            (!key.is_empty() && !key.starts_with('[')).then(|| key.to_string())
        })
        .unwrap_or_else(|| "document".to_string())
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    if let Err(e) = toml::from_str::<toml::Table>(text) {
        let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
        return Err(Error::Syntax {
            line,
            column,
            message: e.message().trim().to_string(),
        });
    }
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let location = e
            .span()
            .map(|s| {
                let (l, c) = line_column(text, s.start);
                format!(" (line {l}, column {c})")
            })
            .unwrap_or_default();
        Error::Validation {
            key: offending_key(text, &e),
            reason: format!("{}{location}", e.message().trim()),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn log_spaced(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let steps = ((hi / lo).log10() * per_decade as f64).round() as usize;
    (0..=steps)
        .map(|i| lo * (hi / lo).powf(i as f64 / steps as f64))
        .collect()
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        for &nu in self.viscosities().iter() {
            if !(nu > 0.0 && nu <= 1.0) {
                return Err(Error::validation("nu", format!("{nu} is not in (0, 1]")));
            }
        }
        if let Auto::Value(dt) = s.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::validation("solver.dt", format!("{dt} must be positive")));
            }
        }
        if let Auto::Value(0) = s.max_mode {
            return Err(Error::validation("solver.max_mode", "must be positive"));
        }
        if let Auto::Value(t) = s.t_end {
            if !(t >= self.averaging.end()) {
                return Err(Error::validation(
                    "solver.t_end",
                    format!("{t} ends before the averaging window [{}, {}]", self.averaging.burn_in, self.averaging.end()),
                ));
            }
        }
        if s.method == Method::Godunov && s.cells < 8 {
            return Err(Error::validation("solver.cells", format!("{} cells are too few", s.cells)));
        }
        self.averaging.validate().map_err(|e| prefix("averaging", e))?;
        if !(self.noise.sine_scale >= 0.0) {
            return Err(Error::validation("noise.sine_scale", "must be nonnegative"));
        }
        if let Auto::Value(a) = self.noise.amplitude {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::validation("noise.amplitude", format!("{a} must be nonnegative")));
            }
        }
        self.measure()
            .and_then(|m| m.validate())
            .map_err(|e| prefix("noise", e))?;
        if !(self.noise.gamma0 > 1.0) {
            return Err(Error::validation(
                "noise.gamma0",
                format!("{} must exceed 1", self.noise.gamma0),
            ));
        }
        let st = &self.statistics;
        SpectrumConfig::new(st.layer_width).map_err(|e| prefix("statistics", e))?;
        let (lo, hi) = st.spectrum_fit;
        if !(lo >= 1.0 && lo < hi) {
            return Err(Error::validation(
                "statistics.spectrum_fit",
                format!("[{lo}, {hi}] must satisfy 1 ≤ lo < hi"),
            ));
        }
        for &nu in self.viscosities().iter() {
            let modes = self.observed_modes(nu);
            if hi * st.layer_width > modes as f64 + 1e-9 {
                return Err(Error::validation(
                    "statistics.spectrum_fit",
                    format!("layer {hi} needs mode {} beyond the {modes} resolved at ν = {nu}", hi * st.layer_width),
                ));
            }
            self.requests(nu).validate().map_err(|e| prefix("statistics", e))?;
            // Derived ranges may be empty at large ν; the fit then reports
            // itself unavailable instead of failing the whole run.
            let explicit = [
                ("inertial_range", self.statistics.inertial_range),
                ("dissipation_range", self.statistics.dissipation_range),
            ];
            for (name, range) in explicit.iter().filter_map(|(n, r)| match r {
                Auto::Value(r) => Some((n, *r)),
                Auto::Auto => None,
            }) {
                if !(range.0 > 0.0 && range.0 < range.1 && range.1 < 1.0) {
                    return Err(Error::validation(
                        format!("statistics.{name}"),
                        format!("[{}, {}] must be an ordered subrange of (0, 1)", range.0, range.1),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Viscosities of the run, in run order.
    pub fn viscosities(&self) -> Vec<f64> {
        if self.sweep.nu.is_empty() {
            vec![self.solver.nu]
        } else {
            self.sweep.nu.clone()
        }
    }

    /// Spectral modes at viscosity `nu`: the configured count, or the
    /// power of two at or above `2/ν`.
    pub fn max_mode(&self, nu: f64) -> usize {
        match self.solver.max_mode {
            Auto::Value(n) => n,
            Auto::Auto => auto_resolution(nu),
        }
    }

    /// Modes the statistics see: the spectral modes, or for the Godunov
    /// solver the modes its cell grid resolves.
    pub fn observed_modes(&self, nu: f64) -> usize {
        match self.solver.method {
            Method::Spectral => self.max_mode(nu),
            Method::Godunov => (self.solver.cells - 2) / 2,
        }
    }

    pub fn t_end(&self) -> f64 {
        match self.solver.t_end {
            Auto::Value(t) => t,
            Auto::Auto => self.averaging.end(),
        }
    }

    pub fn measure(&self) -> Result<LevyMeasureConfig> {
        LevyMeasureConfig::new(
            self.noise.alpha,
            self.noise.small_jump_cutoff,
            self.noise.intensity_scale,
        )
    }

    /// Noise over `max_mode` modes, or `None` when disabled.
    pub fn noise_config(&self, max_mode: usize) -> Result<Option<CylindricalNoiseConfig>> {
        if !self.noise.enabled {
            return Ok(None);
        }
        let amplitude = match self.noise.amplitude {
            Auto::Value(a) => a,
            Auto::Auto => CylindricalNoiseConfig::unit_amplitude(self.noise.gamma0),
        };
        let mut c = CylindricalNoiseConfig::new(self.noise.gamma0, amplitude, max_mode, self.measure()?)?;
        c.sine_scale = self.noise.sine_scale;
        Ok(Some(c))
    }

    pub fn solver_config(&self, nu: f64) -> Result<SolverConfig> {
        let n = self.max_mode(nu);
        let s = &self.solver;
        let mut cfg = SolverConfig::new(nu, n);
        cfg.dt = match s.dt {
            Auto::Auto => TimeStep::Auto,
            Auto::Value(dt) => TimeStep::Fixed(dt),
        };
        cfg.scheme = s.scheme;
        cfg.cfl_safety = s.cfl_safety;
        cfg.grid_factor = s.grid_factor;
        cfg.enable_nonlinearity = s.enable_nonlinearity;
        cfg.noise = self.noise_config(n)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn l_values(&self) -> Vec<f64> {
        match &self.statistics.l_values {
            Auto::Value(v) => v.clone(),
            Auto::Auto => log_spaced(1e-4, 0.5, 8),
        }
    }

    pub fn requests(&self, nu: f64) -> StatRequests {
        StatRequests {
            p_values: self.statistics.p_values.clone(),
            l_values: self.l_values(),
            sobolev: self.statistics.sobolev.clone(),
            max_mode: self.observed_modes(nu),
            grid_factor: match self.solver.method {
                Method::Spectral => self.solver.grid_factor,
                Method::Godunov => 4,
            },
        }
    }

    pub fn spectrum(&self) -> SpectrumConfig {
        SpectrumConfig {
            layer_width: self.statistics.layer_width,
        }
    }

    pub fn inertial_range(&self, nu: f64) -> (f64, f64) {
        match self.statistics.inertial_range {
            Auto::Value(r) => r,
            Auto::Auto => (10.0 * nu, 0.1),
        }
    }

    pub fn dissipation_range(&self, nu: f64) -> (f64, f64) {
        match self.statistics.dissipation_range {
            Auto::Value(r) => r,
            Auto::Auto => (nu / 10.0, nu),
        }
    }

    /// SHA-256 of the canonical JSON form; equal configurations hash
    /// equally however they were written. The output section is left out
    /// so that reruns into another directory compare equal.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = OutputSection::default();
        let json = serde_json::to_string(&canonical).expect("configuration serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

fn prefix(section: &str, e: Error) -> Error {
    match e {
        Error::Validation { key, reason } => Error::Validation {
            key: format!("{section}.{key}"),
            reason,
        },
        other => other,
    }
}

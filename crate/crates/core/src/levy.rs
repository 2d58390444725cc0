//! Cylindrical Lévy noise with bounded jumps.
//!
//! Each scalar process `L_k` has triplet `(0, 0, μ)` with the truncated
//! α-stable jump measure `μ(dy) = s · τ(|y|) |y|^{-1-α} dy`, where `τ` is a
//! cosine taper from 1 at `|y| = 1` down to 0 at `|y| = 2`. Increments are
//! drawn by splitting `μ` at a cutoff `δ`: jumps with `|y| ≥ δ` form a
//! compound Poisson process, and the compensated small jumps are replaced by
//! a Gaussian with the same variance.
//!
//! The cylindrical process is `L(t) = Σ_k β_k L_k(t) e_k` with
//! `β_k = amplitude · λ_k^{-γ₀}` and `λ_k = 4π²k²`.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::rng::StepStreams;
use crate::spectral::FourierField;

/// `τ ≡ 1` on `|y| ≤ INNER_RADIUS`.
pub const INNER_RADIUS: f64 = 1.0;
/// `τ ≡ 0` on `|y| ≥ OUTER_RADIUS`; no jump exceeds this size.
pub const OUTER_RADIUS: f64 = 2.0;

const QUAD_TOL: f64 = 1e-12;
const MAX_REJECTIONS: u32 = 10_000;

/// Eigenvalue `λ_k = 4π²k²` of `−∂ₓₓ` for mode `k`.
#[inline]
pub fn eigenvalue(k: usize) -> f64 {
    4.0 * PI * PI * (k * k) as f64
}

/// Cosine taper `τ(r)`.
#[inline]
pub fn taper(r: f64) -> f64 {
    if r <= INNER_RADIUS {
        1.0
    } else if r >= OUTER_RADIUS {
        0.0
    } else {
        0.5 * (1.0 + (PI * (r - INNER_RADIUS)).cos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyMeasureConfig {
    pub alpha: f64,
    pub small_jump_cutoff: f64,
    pub intensity_scale: f64,
}

impl Default for LevyMeasureConfig {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            small_jump_cutoff: 0.05,
            intensity_scale: 1.0,
        }
    }
}

impl LevyMeasureConfig {
    pub fn new(alpha: f64, small_jump_cutoff: f64, intensity_scale: f64) -> Result<Self> {
        let m = Self {
            alpha,
            small_jump_cutoff,
            intensity_scale,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(Error::validation("alpha", format!("{} is not in (1, 2)", self.alpha)));
        }
        if !(self.small_jump_cutoff > 0.0 && self.small_jump_cutoff < INNER_RADIUS) {
            return Err(Error::validation(
                "small_jump_cutoff",
                format!("{} is not in (0, {INNER_RADIUS})", self.small_jump_cutoff),
            ));
        }
        if !(self.intensity_scale >= 0.0 && self.intensity_scale.is_finite()) {
            return Err(Error::validation(
                "intensity_scale",
                format!("{} must be finite and nonnegative", self.intensity_scale),
            ));
        }
        Ok(())
    }

    pub fn inner_radius(&self) -> f64 {
        INNER_RADIUS
    }

    pub fn outer_radius(&self) -> f64 {
        OUTER_RADIUS
    }

    /// Density of `μ` at `y ≠ 0`.
    pub fn density(&self, y: f64) -> Result<f64> {
        if y == 0.0 || !y.is_finite() {
            return Err(Error::Domain(format!("Lévy density undefined at y = {y}")));
        }
        let r = y.abs();
        Ok(self.intensity_scale * taper(r) * r.powf(-1.0 - self.alpha))
    }

    /// `2 ∫_a^b τ(y) y^{power} dy` over `0 < a ≤ b`, split at the taper
    /// onset so each piece is smooth.
    fn symmetric_integral(&self, power: f64, a: f64, b: f64) -> Result<f64> {
        let b = b.min(OUTER_RADIUS);
        if a >= b {
            return Ok(0.0);
        }
        let mut total = 0.0;
        if a < INNER_RADIUS {
            let hi = b.min(INNER_RADIUS);
            total += power_antiderivative(power, a, hi);
        }
        if b > INNER_RADIUS {
            let lo = a.max(INNER_RADIUS);
            total += quadrature::integrate(|y| taper(y) * y.powf(power), lo, b, QUAD_TOL)?;
        }
        Ok(2.0 * self.intensity_scale * total)
    }

    /// Total mass of `μ` on `{|y| ≥ cutoff}`.
    pub fn tail_rate(&self, cutoff: f64) -> Result<f64> {
        if cutoff <= 0.0 {
            return Err(Error::Domain("tail rate diverges at cutoff 0".into()));
        }
        self.symmetric_integral(-1.0 - self.alpha, cutoff, OUTER_RADIUS)
    }

    /// Rate `λ_δ` of jumps with `|y| ≥ δ`.
    pub fn jump_rate(&self) -> Result<f64> {
        self.tail_rate(self.small_jump_cutoff)
    }

    /// Variance `σ_δ² = ∫_{|y|<δ} y² μ(dy)` of the jumps below the cutoff.
    pub fn small_jump_variance(&self) -> f64 {
        small_jump_variance(self.alpha, self.small_jump_cutoff, self.intensity_scale)
    }

    /// Even moment `∫ y^order μ(dy)` over the whole support, `order ≥ 2`.
    pub fn moment(&self, order: u32) -> Result<f64> {
        if order < 2 || order % 2 == 1 {
            return Err(Error::Domain(format!("moment order {order} must be even and ≥ 2")));
        }
        let power = order as f64 - 1.0 - self.alpha;
        // ∫_0^1 y^power dy converges because power > −1.
        let inner = 2.0 * self.intensity_scale / (power + 1.0);
        Ok(inner + self.symmetric_integral(power, INNER_RADIUS, OUTER_RADIUS)?)
    }

    /// Variance of an increment over `dt`: `dt ∫ y² μ(dy)`.
    pub fn increment_variance(&self, dt: f64) -> Result<f64> {
        Ok(dt * self.moment(2)?)
    }
}

/// `∫_a^b y^power dy` for `0 < a ≤ b`.
fn power_antiderivative(power: f64, a: f64, b: f64) -> f64 {
    if (power + 1.0).abs() < 1e-15 {
        (b / a).ln()
    } else {
        (b.powf(power + 1.0) - a.powf(power + 1.0)) / (power + 1.0)
    }
}

/// `2 s δ^{2−α} / (2−α)`, valid for `δ ≤ 1`.
pub fn small_jump_variance(alpha: f64, cutoff: f64, intensity_scale: f64) -> f64 {
    2.0 * intensity_scale * cutoff.powf(2.0 - alpha) / (2.0 - alpha)
}

/// Rates of the two parts of the split measure; fixed for a given
/// [`LevyMeasureConfig`] and independent of the step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRates {
    pub alpha: f64,
    pub cutoff: f64,
    /// `λ_δ`
    pub jump_rate: f64,
    /// `σ_δ²`
    pub small_jump_variance: f64,
}

impl SplitRates {
    pub fn new(m: &LevyMeasureConfig) -> Result<Self> {
        m.validate()?;
        Ok(Self {
            alpha: m.alpha,
            cutoff: m.small_jump_cutoff,
            jump_rate: m.jump_rate()?,
            small_jump_variance: m.small_jump_variance(),
        })
    }
}

/// Precomputed sampler of `ΔL` over a fixed step `dt`.
#[derive(Debug)]
pub struct IncrementSampler {
    dt: f64,
    gaussian: Option<Normal<f64>>,
    poisson: Option<Poisson<f64>>,
    alpha: f64,
    cutoff_pow: f64,
    span: f64,
    rejection_failures: AtomicU64,
}

impl Clone for IncrementSampler {
    fn clone(&self) -> Self {
        Self {
            dt: self.dt,
            gaussian: self.gaussian,
            poisson: self.poisson,
            alpha: self.alpha,
            cutoff_pow: self.cutoff_pow,
            span: self.span,
            rejection_failures: AtomicU64::new(self.rejection_failures()),
        }
    }
}

impl IncrementSampler {
    pub fn new(m: &LevyMeasureConfig, dt: f64) -> Result<Self> {
        Self::from_rates(&SplitRates::new(m)?, dt)
    }

    pub fn from_rates(rates: &SplitRates, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step {dt} must be positive")));
        }
        let sd = (rates.small_jump_variance * dt).sqrt();
        let gaussian = if sd > 0.0 {
            Some(Normal::new(0.0, sd).map_err(|e| Error::Domain(e.to_string()))?)
        } else {
            None
        };
        let mean_jumps = rates.jump_rate * dt;
        let poisson = if mean_jumps > 0.0 {
            Some(Poisson::new(mean_jumps).map_err(|e| Error::Domain(e.to_string()))?)
        } else {
            None
        };
        let cutoff_pow = rates.cutoff.powf(-rates.alpha);
        Ok(Self {
            dt,
            gaussian,
            poisson,
            alpha: rates.alpha,
            cutoff_pow,
            span: cutoff_pow - OUTER_RADIUS.powf(-rates.alpha),
            rejection_failures: AtomicU64::new(0),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of jump draws that exhausted the rejection budget.
    pub fn rejection_failures(&self) -> u64 {
        self.rejection_failures.load(Ordering::Relaxed)
    }

    /// One jump from `μ` restricted to `|y| ≥ δ`: a sign-symmetric Pareto
    /// proposal on `[δ, 2]` thinned by `τ`.
    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut r = INNER_RADIUS;
        let mut accepted = false;
        for _ in 0..MAX_REJECTIONS {
            let u: f64 = rng.random();
            r = (self.cutoff_pow - u * self.span).powf(-1.0 / self.alpha);
            if r <= INNER_RADIUS || rng.random::<f64>() < taper(r) {
                accepted = true;
                break;
            }
        }
        if !accepted {
            self.rejection_failures.fetch_add(1, Ordering::Relaxed);
            r = r.min(INNER_RADIUS);
        }
        if rng.random::<bool>() {
            r
        } else {
            -r
        }
    }

    /// `ΔL = G + Σ_{i≤P} Y_i` with `G ~ N(0, σ_δ² dt)`, `P ~ Poisson(λ_δ dt)`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut x = match &self.gaussian {
            Some(g) => g.sample(rng),
            None => 0.0,
        };
        if let Some(p) = &self.poisson {
            let jumps = p.sample(rng) as u64;
            for _ in 0..jumps {
                x += self.sample_jump(rng);
            }
        }
        x
    }
}

/// One scalar increment of `L_k` over `dt`.
pub fn sample_scalar_increment<R: Rng + ?Sized>(
    dt: f64,
    m: &LevyMeasureConfig,
    rng: &mut R,
) -> Result<f64> {
    Ok(IncrementSampler::new(m, dt)?.sample(rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylindricalNoiseConfig {
    pub gamma0: f64,
    pub amplitude: f64,
    pub max_mode: usize,
    pub measure: LevyMeasureConfig,
    /// `β_{-k} / β_k`; 1 gives a spatially homogeneous force.
    pub sine_scale: f64,
}

impl CylindricalNoiseConfig {
    pub const DEFAULT_GAMMA0: f64 = 1.1;

    /// Amplitude for which `β_1 = 1`.
    pub fn unit_amplitude(gamma0: f64) -> f64 {
        eigenvalue(1).powf(gamma0)
    }

    pub fn new(gamma0: f64, amplitude: f64, max_mode: usize, measure: LevyMeasureConfig) -> Result<Self> {
        let c = Self {
            gamma0,
            amplitude,
            max_mode,
            measure,
            sine_scale: 1.0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_defaults(max_mode: usize) -> Self {
        Self {
            gamma0: Self::DEFAULT_GAMMA0,
            amplitude: Self::unit_amplitude(Self::DEFAULT_GAMMA0),
            max_mode,
            measure: LevyMeasureConfig::default(),
            sine_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 1.0 && self.gamma0.is_finite()) {
            return Err(Error::validation("gamma0", format!("{} must exceed 1", self.gamma0)));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::validation(
                "amplitude",
                format!("{} must be finite and nonnegative", self.amplitude),
            ));
        }
        if !(self.sine_scale >= 0.0 && self.sine_scale.is_finite()) {
            return Err(Error::validation(
                "sine_scale",
                format!("{} must be finite and nonnegative", self.sine_scale),
            ));
        }
        self.measure.validate()
    }

    /// `β_k = amplitude · λ_k^{-γ₀}` for `k ≥ 1`.
    pub fn beta(&self, k: usize) -> f64 {
        self.amplitude * eigenvalue(k).powf(-self.gamma0)
    }

    /// Coefficient on `e_k` for signed `k`.
    pub fn beta_signed(&self, k: i64) -> f64 {
        let b = self.beta(k.unsigned_abs() as usize);
        if k < 0 {
            b * self.sine_scale
        } else {
            b
        }
    }

    /// Mean energy input per unit time into the cosine mode `k`:
    /// `β_k² ∫ y² μ(dy)`.
    pub fn mode_energy_rate(&self, k: usize) -> Result<f64> {
        Ok(self.beta(k).powi(2) * self.measure.moment(2)?)
    }
}

/// Sampler for the cylindrical increment `Σ_k β_k ΔL_k e_k`. Mode `k` of
/// step `n` always draws from stream `(seed, trajectory, k, n)`.
#[derive(Debug)]
pub struct CylindricalSampler {
    rates: SplitRates,
    cosine_betas: Vec<f64>,
    sine_betas: Vec<f64>,
    seed: u64,
    trajectory: u64,
    scalar: Option<IncrementSampler>,
    rejection_failures: u64,
}

impl CylindricalSampler {
    pub fn new(c: &CylindricalNoiseConfig, seed: u64, trajectory: u64) -> Result<Self> {
        c.validate()?;
        let cosine_betas: Vec<f64> = (1..=c.max_mode).map(|k| c.beta(k)).collect();
        let sine_betas = cosine_betas.iter().map(|b| b * c.sine_scale).collect();
        Ok(Self {
            rates: SplitRates::new(&c.measure)?,
            cosine_betas,
            sine_betas,
            seed,
            trajectory,
            scalar: None,
            rejection_failures: 0,
        })
    }

    pub fn max_mode(&self) -> usize {
        self.cosine_betas.len()
    }

    pub fn rejection_failures(&self) -> u64 {
        self.rejection_failures + self.scalar.as_ref().map_or(0, |s| s.rejection_failures())
    }

    fn ensure_scalar(&mut self, dt: f64) -> Result<()> {
        if self.scalar.as_ref().is_none_or(|s| s.dt() != dt) {
            if let Some(old) = self.scalar.take() {
                self.rejection_failures += old.rejection_failures();
            }
            self.scalar = Some(IncrementSampler::from_rates(&self.rates, dt)?);
        }
        Ok(())
    }

    /// Draws the increment over `dt` for `step` into `out`. Modes of `out`
    /// beyond the noise's own are zeroed; noise modes beyond `out` are
    /// dropped.
    pub fn sample_into(&mut self, step: u64, dt: f64, out: &mut FourierField) -> Result<()> {
        self.ensure_scalar(dt)?;
        let scalar = self.scalar.as_ref().expect("sampler initialized");
        out.coeffs_mut().fill(num_complex::Complex64::new(0.0, 0.0));
        let n = out.max_mode();
        let streams = StepStreams::new(self.seed, self.trajectory, step);
        for (i, (&bc, &bs)) in self.cosine_betas.iter().zip(&self.sine_betas).take(n).enumerate() {
            let k = (i + 1) as i64;
            if bc != 0.0 {
                let mut rng = streams.rng(k);
                out.add_real_basis(k, bc * scalar.sample(&mut rng));
            }
            if bs != 0.0 {
                let mut rng = streams.rng(-k);
                out.add_real_basis(-k, bs * scalar.sample(&mut rng));
            }
        }
        Ok(())
    }

    pub fn sample(&mut self, step: u64, dt: f64) -> Result<FourierField> {
        let mut out = FourierField::zeros(self.max_mode());
        self.sample_into(step, dt, &mut out)?;
        Ok(out)
    }
}

/// Cylindrical increment over `dt` for step `step` of trajectory
/// `trajectory`; each of the `2N` modes draws from its own stream.
pub fn sample_cylindrical_increment(
    dt: f64,
    c: &CylindricalNoiseConfig,
    seed: u64,
    trajectory: u64,
    step: u64,
) -> Result<FourierField> {
    CylindricalSampler::new(c, seed, trajectory)?.sample(step, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    fn measure(alpha: f64, delta: f64) -> LevyMeasureConfig {
        LevyMeasureConfig::new(alpha, delta, 1.0).unwrap()
    }

    /// Composite Simpson rule with `n` (even) panels.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    /// `2 ∫_a^2 τ(y) y^power dy` by Simpson on a log-spaced substitution
    /// `y = e^s`, independent of the implementation's split and
    /// Gauss–Kronrod rule.
    fn oracle_integral(power: f64, a: f64) -> f64 {
        let taper = |r: f64| {
            if r <= 1.0 {
                1.0
            } else if r >= 2.0 {
                0.0
            } else {
                0.5 * (1.0 + (PI * (r - 1.0)).cos())
            }
        };
        2.0 * simpson(
            |s: f64| {
                let y = s.exp();
                taper(y) * y.powf(power) * y
            },
            a.ln(),
            2f64.ln(),
            400_000,
        )
    }

    #[test]
    fn density_examples() {
        let m = measure(1.5, 0.1);
        assert!((m.density(0.5).unwrap() - 5.656_854_249_492_38).abs() < 1e-12);
        assert!((m.density(-0.5).unwrap() - 5.656_854_249_492_38).abs() < 1e-12);
        assert_eq!(m.density(2.5).unwrap(), 0.0);
        let taper_value = 0.5 * 1.5f64.powf(-2.5);
        assert!((m.density(1.5).unwrap() - taper_value).abs() < 1e-14);
        assert!((m.density(1.5).unwrap() - 0.181_444).abs() < 1e-6);
        assert!(matches!(m.density(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn jump_rate_matches_quadrature_oracle() {
        let m = measure(1.5, 0.5);
        let taper_part = oracle_integral(-2.5, 1.0);
        // 2∫_1^2 τ(y) y^{-2.5} dy, frozen from an independent adaptive quadrature.
        assert!((taper_part - 0.577_044_259_731_092).abs() < 1e-10, "{taper_part}");
        let analytic = 4.0 / 3.0 * (2f64.powf(1.5) - 1.0);
        assert!((analytic - 2.437_902_832_994_92).abs() < 1e-12);
        let rate = m.jump_rate().unwrap();
        assert!((rate - (analytic + taper_part)).abs() < 1e-10 * rate);
        assert!((m.tail_rate(1.0).unwrap() - taper_part).abs() < 1e-10 * taper_part);
    }

    #[test]
    fn jump_rate_vanishes_near_outer_radius() {
        let m = measure(1.5, 0.5);
        assert!(m.tail_rate(2.0 - 1e-9).unwrap() < 1e-20);
        assert_eq!(m.tail_rate(2.0).unwrap(), 0.0);
    }

    #[test]
    fn small_jump_variance_examples() {
        assert!((measure(1.5, 0.1).small_jump_variance() - 1.264_911_064).abs() < 1e-9);
        assert!((measure(1.9, 0.1).small_jump_variance() - 15.886_564_5).abs() < 1e-6);
        assert!(small_jump_variance(1.5, 1e-300, 1.0) < 1e-140);
    }

    #[test]
    fn rate_and_variance_move_oppositely_in_cutoff() {
        let deltas = [0.01, 0.05, 0.1, 0.3, 0.6, 0.9];
        let rates: Vec<f64> = deltas.iter().map(|&d| measure(1.3, d).jump_rate().unwrap()).collect();
        let vars: Vec<f64> = deltas.iter().map(|&d| measure(1.3, d).small_jump_variance()).collect();
        assert!(rates.windows(2).all(|w| w[1] < w[0]));
        assert!(vars.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn moments_match_quadrature_oracle() {
        let m = measure(1.5, 0.1);
        // y² y^{-1-α} = y^{-1/2} is integrable at 0; split the oracle at 1.
        let second = 2.0 / 0.5 + oracle_integral(-0.5, 1.0);
        let fourth = 2.0 / 2.5 + oracle_integral(1.5, 1.0);
        assert!((m.moment(2).unwrap() - second).abs() < 1e-10 * second);
        assert!((m.moment(4).unwrap() - fourth).abs() < 1e-10 * fourth);
        // Small-jump variance plus the second moment of the big jumps.
        let split = m.small_jump_variance() + oracle_integral(-0.5, 0.1);
        assert!((m.moment(2).unwrap() - split).abs() < 1e-9 * split);
    }

    #[test]
    fn null_measure_gives_zero_increments() {
        let m = LevyMeasureConfig::new(1.5, 0.1, 0.0).unwrap();
        let s = IncrementSampler::new(&m, 0.01).unwrap();
        let mut rng = StreamKey::new(0, 0, 1, 0).rng();
        for _ in 0..100 {
            assert_eq!(s.sample(&mut rng), 0.0);
        }
    }

    #[test]
    fn jumps_are_bounded_and_above_cutoff() {
        let m = measure(1.2, 0.05);
        let s = IncrementSampler::new(&m, 1.0).unwrap();
        let mut rng = StreamKey::new(5, 0, 0, 0).rng();
        for _ in 0..100_000 {
            let y = s.sample_jump(&mut rng);
            assert!(y.abs() >= 0.05 && y.abs() <= OUTER_RADIUS);
        }
        assert_eq!(s.rejection_failures(), 0);
    }

    #[test]
    fn jump_distribution_matches_measure() {
        // Fraction of big jumps in (1, 2] against μ((1,2]) / μ([δ,2]).
        let m = measure(1.5, 0.2);
        let s = IncrementSampler::new(&m, 1.0).unwrap();
        let mut rng = StreamKey::new(6, 0, 0, 0).rng();
        let n = 400_000;
        let big = (0..n).filter(|_| s.sample_jump(&mut rng).abs() > 1.0).count() as f64 / n as f64;
        let expected = oracle_integral(-2.5, 1.0) / oracle_integral(-2.5, 0.2);
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((big - expected).abs() < 4.0 * se, "{big} vs {expected}");
    }

    #[test]
    fn cylindrical_zero_cases() {
        let mut c = CylindricalNoiseConfig::with_defaults(0);
        let inc = sample_cylindrical_increment(0.01, &c, 1, 0, 0).unwrap();
        assert_eq!(inc.max_mode(), 0);
        c.max_mode = 8;
        c.amplitude = 0.0;
        let inc = sample_cylindrical_increment(0.01, &c, 1, 0, 0).unwrap();
        assert_eq!(inc, FourierField::zeros(8));
    }

    #[test]
    fn default_amplitude_gives_unit_first_beta() {
        let c = CylindricalNoiseConfig::with_defaults(4);
        assert!((c.beta(1) - 1.0).abs() < 1e-14);
        assert!((c.beta(2) - 4f64.powf(-1.1)).abs() < 1e-14);
        // Energy injection ratio between the first two modes.
        assert!((c.beta(2).powi(2) / c.beta(1).powi(2) - 4f64.powf(-2.2)).abs() < 1e-14);
        assert!((1..4).all(|k| c.beta(k + 1) < c.beta(k)));
    }

    #[test]
    fn validation_rejects_out_of_range() {
        assert!(LevyMeasureConfig::new(2.5, 0.1, 1.0).is_err());
        assert!(LevyMeasureConfig::new(1.5, 1.0, 1.0).is_err());
        assert!(CylindricalNoiseConfig::new(1.0, 1.0, 4, LevyMeasureConfig::default()).is_err());
    }

    #[test]
    fn increments_reproducible_per_step() {
        let c = CylindricalNoiseConfig::with_defaults(16);
        let mut s = CylindricalSampler::new(&c, 77, 3).unwrap();
        let first = s.sample(12, 0.01).unwrap();
        assert_eq!(first, s.sample(12, 0.01).unwrap());
        assert_ne!(first, s.sample(13, 0.01).unwrap());
        let mut other = CylindricalSampler::new(&c, 77, 4).unwrap();
        assert_ne!(first, other.sample(12, 0.01).unwrap());
    }
}

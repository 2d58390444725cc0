use num_complex::Complex64;

use super::{Observer, SampleStride, Scheme, SolverConfig, TimeStep, AUTO_DT_INTERVAL, BLOWUP_THRESHOLD};
use crate::error::{Error, Result};
use crate::levy::{eigenvalue, CylindricalSampler};
use crate::spectral::{DealiasRule, FourierField, Transform};

/// Smallest power of two with at least `2/ν` modes, so the dissipation
/// scale `~ν⁻¹` is resolved.
pub fn auto_resolution(nu: f64) -> usize {
    ((2.0 / nu).ceil() as usize).max(1).next_power_of_two()
}

/// Pseudo-spectral evaluation of `Q(u) = u∂ₓu = ½∂ₓ(u²)` with dealiasing.
pub struct NonlinearOperator {
    transform: Transform,
    dealias: DealiasRule,
    physical: Vec<f64>,
}

impl NonlinearOperator {
    pub fn new(grid_size: usize, dealias: DealiasRule) -> Self {
        Self {
            transform: Transform::new(grid_size),
            dealias,
            physical: vec![0.0; grid_size],
        }
    }

    /// Writes `Q̂_k(u)` into `out` and returns `|u|∞` on the grid.
    pub fn eval(&mut self, u: &[Complex64], out: &mut [Complex64]) -> Result<f64> {
        self.transform.synthesize_into(u, &mut self.physical)?;
        let mut u_max = 0.0f64;
        for x in self.physical.iter_mut() {
            u_max = u_max.max(x.abs());
            *x *= *x;
        }
        self.transform.analyze_into(&mut self.physical, out)?;
        for (i, c) in out.iter_mut().enumerate() {
            // ½ · 2πik
            let factor = std::f64::consts::PI * (i + 1) as f64;
            *c = Complex64::new(-c.im * factor, c.re * factor);
        }
        self.dealias.apply_in_place(out);
        Ok(u_max)
    }

    /// `|u|∞` on the grid without forming the product.
    pub fn sup_norm(&mut self, u: &[Complex64]) -> Result<f64> {
        self.transform.synthesize_into(u, &mut self.physical)?;
        Ok(self.physical.iter().fold(0.0, |m, x| m.max(x.abs())))
    }
}

/// `Q(u) = ½∂ₓ(u²)` with the 2/3 rule on a `4N` grid.
pub fn nonlinear_term(f: &FourierField) -> Result<FourierField> {
    let mut op = NonlinearOperator::new(4 * f.max_mode().max(1), DealiasRule::TWO_THIRDS);
    let mut out = FourierField::zeros(f.max_mode());
    op.eval(f.coeffs(), out.coeffs_mut())?;
    Ok(out)
}

/// One step from `u` with a given noise increment; `cfg.dt` must be fixed.
pub fn step(u: &FourierField, cfg: &SolverConfig, increment: &FourierField) -> Result<FourierField> {
    let TimeStep::Fixed(dt) = cfg.dt else {
        return Err(Error::validation("dt", "a single step needs a fixed time step"));
    };
    let mut sim = Simulation::new(&SolverConfig { noise: None, ..cfg.clone() }, 0, 0)?;
    let mut state = u.resized(cfg.max_mode);
    sim.advance(&mut state, 0, dt, Some(increment))?;
    Ok(state)
}

/// Per-mode coefficients of the exponential integrators for one `dt`.
struct Coefficients {
    dt: f64,
    decay: Vec<f64>,
    half_decay: Vec<f64>,
    etd: Option<EtdCoefficients>,
}

struct EtdCoefficients {
    q: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
}

impl Coefficients {
    fn new(nu: f64, max_mode: usize, dt: f64, scheme: Scheme) -> Self {
        let rates: Vec<f64> = (1..=max_mode).map(|k| -nu * eigenvalue(k)).collect();
        let decay = rates.iter().map(|l| (l * dt).exp()).collect();
        let half_decay = rates.iter().map(|l| (0.5 * l * dt).exp()).collect();
        let etd = (scheme == Scheme::Etdrk4).then(|| EtdCoefficients::new(&rates, dt));
        Self {
            dt,
            decay,
            half_decay,
            etd,
        }
    }
}

impl EtdCoefficients {
    /// Cox–Matthews weights evaluated by contour averaging around `hL` to
    /// avoid cancellation for small `|hL|`.
    fn new(rates: &[f64], dt: f64) -> Self {
        const POINTS: usize = 32;
        let roots: Vec<Complex64> = (0..POINTS)
            .map(|j| {
                Complex64::from_polar(1.0, std::f64::consts::PI * (j as f64 + 0.5) / POINTS as f64)
            })
            .collect();
        let n = rates.len();
        let (mut q, mut f1, mut f2, mut f3) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        for &l in rates {
            let (mut sq, mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0, 0.0);
            for r in &roots {
                let z = r + l * dt;
                let ez = z.exp();
                let z3 = z * z * z;
                sq += (((z * 0.5).exp() - 1.0) / z).re;
                s1 += ((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3).re;
                s2 += ((2.0 + z + ez * (z - 2.0)) / z3).re;
                s3 += ((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3).re;
            }
            let m = POINTS as f64;
            q.push(dt * sq / m);
            f1.push(dt * s1 / m);
            f2.push(dt * s2 / m);
            f3.push(dt * s3 / m);
        }
        Self { q, f1, f2, f3 }
    }
}

/// Outcome of [`Simulation::integrate`].
#[derive(Debug, Clone)]
pub struct Integration {
    pub state: FourierField,
    pub steps: u64,
    pub time: f64,
    pub last_dt: f64,
    pub rejection_failures: u64,
}

/// One trajectory of the forced Burgers equation.
pub struct Simulation {
    cfg: SolverConfig,
    op: NonlinearOperator,
    noise: Option<CylindricalSampler>,
    coefficients: Option<Coefficients>,
    increment: FourierField,
    stages: [Vec<Complex64>; 6],
}

impl Simulation {
    /// Noise streams are keyed by `(seed, trajectory)`.
    pub fn new(cfg: &SolverConfig, seed: u64, trajectory: u64) -> Result<Self> {
        cfg.validate()?;
        let noise = match &cfg.noise {
            Some(n) if n.amplitude > 0.0 && n.max_mode > 0 => {
                Some(CylindricalSampler::new(n, seed, trajectory)?)
            }
            _ => None,
        };
        let n = cfg.max_mode;
        let zero = || vec![Complex64::new(0.0, 0.0); n];
        Ok(Self {
            cfg: cfg.clone(),
            op: NonlinearOperator::new(cfg.grid_size(), cfg.dealias),
            noise,
            coefficients: None,
            increment: FourierField::zeros(n),
            stages: [zero(), zero(), zero(), zero(), zero(), zero()],
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn rejection_failures(&self) -> u64 {
        self.noise.as_ref().map_or(0, |n| n.rejection_failures())
    }

    fn ensure_coefficients(&mut self, dt: f64) {
        if self.coefficients.as_ref().is_none_or(|c| c.dt != dt) {
            self.coefficients = Some(Coefficients::new(
                self.cfg.nu,
                self.cfg.max_mode,
                dt,
                self.cfg.scheme,
            ));
        }
    }

    /// `Q̂(u)` into stage buffer `slot`, returning `|u|∞`.
    fn drift(&mut self, u: &[Complex64], slot: usize) -> Result<f64> {
        if self.cfg.enable_nonlinearity {
            self.op.eval(u, &mut self.stages[slot])
        } else {
            self.stages[slot].fill(Complex64::new(0.0, 0.0));
            Ok(0.0)
        }
    }

    fn check_transport(&self, dt: f64, u_max: f64) -> Result<()> {
        if self.cfg.enable_nonlinearity {
            let limit = self.cfg.transport_dt(u_max);
            if dt > limit * (1.0 + 1e-12) {
                return Err(Error::StepSize { dt, limit });
            }
        }
        Ok(())
    }

    /// Advances `u` by `dt` in place. An explicit `increment` replaces the
    /// sampled noise for this step. Returns `|u|∞` before the step.
    pub fn advance(
        &mut self,
        u: &mut FourierField,
        step: u64,
        dt: f64,
        increment: Option<&FourierField>,
    ) -> Result<f64> {
        let u_max = self.drift(u.coeffs(), 0)?;
        self.check_transport(dt, u_max)?;
        self.advance_with_drift(u, step, dt, increment)?;
        Ok(u_max)
    }

    /// Completes a step whose first drift evaluation is already in stage 0.
    fn advance_with_drift(
        &mut self,
        u: &mut FourierField,
        step: u64,
        dt: f64,
        increment: Option<&FourierField>,
    ) -> Result<()> {
        match self.cfg.scheme {
            Scheme::ExpEuler => {
                self.ensure_coefficients(dt);
                let decay = &self.coefficients.as_ref().expect("coefficients set").decay;
                for ((x, q), e) in u.coeffs_mut().iter_mut().zip(&self.stages[0]).zip(decay) {
                    *x = (*x - q * dt) * e;
                }
            }
            Scheme::Etdrk4 => self.etdrk4(u, dt)?,
        }
        match increment {
            Some(inc) => {
                for (x, d) in u.coeffs_mut().iter_mut().zip(inc.coeffs()) {
                    *x += d;
                }
            }
            None => {
                if let Some(noise) = self.noise.as_mut() {
                    noise.sample_into(step, dt, &mut self.increment)?;
                    for (x, d) in u.coeffs_mut().iter_mut().zip(self.increment.coeffs()) {
                        *x += d;
                    }
                }
            }
        }
        Ok(())
    }

    /// Stage 0 holds `Q̂(u)`. The drift is `N(u) = −Q̂(u)`.
    fn etdrk4(&mut self, u: &mut FourierField, dt: f64) -> Result<()> {
        self.ensure_coefficients(dt);
        let coef = self.coefficients.take().expect("coefficients set");
        let etd = coef.etd.as_ref().expect("ETDRK4 coefficients");
        let n = u.max_mode();
        let u0 = u.coeffs().to_vec();

        // a = E₂u + Q·N(u)
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            a[k] = coef.half_decay[k] * u0[k] - etd.q[k] * self.stages[0][k];
        }
        self.drift(&a, 1)?;
        // b = E₂u + Q·N(a)
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            b[k] = coef.half_decay[k] * u0[k] - etd.q[k] * self.stages[1][k];
        }
        self.drift(&b, 2)?;
        // c = E₂a + Q·(2N(b) − N(u))
        let mut c = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            c[k] = coef.half_decay[k] * a[k]
                - etd.q[k] * (2.0 * self.stages[2][k] - self.stages[0][k]);
        }
        self.drift(&c, 3)?;
        let out = u.coeffs_mut();
        for k in 0..n {
            out[k] = coef.decay[k] * u0[k]
                - etd.f1[k] * self.stages[0][k]
                - 2.0 * etd.f2[k] * (self.stages[1][k] + self.stages[2][k])
                - etd.f3[k] * self.stages[3][k];
        }
        self.coefficients = Some(coef);
        Ok(())
    }

    fn auto_dt(&self, u_max: f64) -> f64 {
        self.cfg.stiff_dt().min(self.cfg.transport_dt(u_max))
    }

    fn blow_up(step: u64, time: f64, reason: String, u: &FourierField) -> Error {
        Error::BlowUp {
            step,
            time,
            reason,
            state: Box::new(u.clone()),
        }
    }

    /// Integrates from `u0` to `t_end`, calling every observer according
    /// to `stride`. Deterministic given the configuration, seed and
    /// trajectory id.
    pub fn integrate(
        &mut self,
        u0: &FourierField,
        t_end: f64,
        stride: SampleStride,
        observers: &mut [&mut dyn Observer],
    ) -> Result<Integration> {
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::Domain(format!("end time {t_end} must be nonnegative")));
        }
        let mut u = u0.resized(self.cfg.max_mode);
        let mut t = 0.0;
        let mut step: u64 = 0;
        let mut dt = match self.cfg.dt {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Auto => 0.0,
        };
        let mut next_sample = match stride {
            SampleStride::Time { start, .. } => start,
            SampleStride::Steps(_) => 0.0,
        };
        let mut notify = |step: u64, t: f64, u: &FourierField, next: &mut f64| -> Result<()> {
            let due = match stride {
                SampleStride::Steps(n) => n > 0 && step % n == 0,
                SampleStride::Time { every, .. } => {
                    if t + 1e-12 >= *next {
                        while *next <= t + 1e-12 {
                            *next += every;
                        }
                        true
                    } else {
                        false
                    }
                }
            };
            if due {
                for obs in observers.iter_mut() {
                    obs.observe(step, t, u)?;
                }
            }
            Ok(())
        };
        notify(0, 0.0, &u, &mut next_sample)?;

        let tiny = 1e-12 * t_end.max(1.0);
        while t_end - t > tiny {
            let u_max = self.drift(u.coeffs(), 0)?;
            if !(u_max <= BLOWUP_THRESHOLD) {
                return Err(Self::blow_up(step, t, format!("|u|∞ = {u_max:e}"), &u));
            }
            if matches!(self.cfg.dt, TimeStep::Auto) && step % AUTO_DT_INTERVAL == 0 {
                dt = self.auto_dt(u_max);
            }
            let h = dt.min(t_end - t);
            self.check_transport(h, u_max)?;
            self.advance_with_drift(&mut u, step, h, None)?;
            if !u.is_finite() {
                return Err(Self::blow_up(step, t, "non-finite coefficients".into(), &u));
            }
            step += 1;
            t = if t_end - (t + h) <= tiny { t_end } else { t + h };
            notify(step, t, &u, &mut next_sample)?;
        }
        Ok(Integration {
            state: u,
            steps: step,
            time: t,
            last_dt: dt,
            rejection_failures: self.rejection_failures(),
        })
    }
}

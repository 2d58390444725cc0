//! Finite-volume entropy solver for the inviscid equation
//! `∂ₜu + ∂ₓ(u²/2) = η` on the unit circle.

use num_complex::Complex64;

use super::Observer;
use crate::error::{Error, Result};
use crate::levy::{CylindricalNoiseConfig, CylindricalSampler};
use crate::spectral::{shift, FourierField, Transform};

/// Cell averages over a uniform partition of `[0, 1)`; cell `j` covers
/// `[j/G, (j+1)/G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField {
    cells: Vec<f64>,
}

impl CellField {
    pub fn new(cells: Vec<f64>) -> Self {
        Self { cells }
    }

    /// Midpoint values `f((j + ½)/G)`.
    pub fn from_fn(cells: usize, f: impl Fn(f64) -> f64) -> Self {
        let g = cells as f64;
        Self {
            cells: (0..cells).map(|j| f((j as f64 + 0.5) / g)).collect(),
        }
    }

    /// Exact cell averages of a band-limited field.
    pub fn from_fourier(u: &FourierField, cells: usize) -> Result<Self> {
        let g = cells as f64;
        let averaged = FourierField::from_coeffs(
            u.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let a = std::f64::consts::PI * (i + 1) as f64 / g;
                    c * (a.sin() / a)
                })
                .collect(),
        );
        Ok(Self {
            cells: cell_centers(&averaged, cells)?,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.cells.len() as f64
    }

    /// `∫ u dx`.
    pub fn mass(&self) -> f64 {
        self.cells.iter().sum::<f64>() * self.dx()
    }

    pub fn sup_norm(&self) -> f64 {
        self.cells.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `∫ |u − v| dx`.
    pub fn l1_distance(&self, other: &[f64]) -> f64 {
        self.cells
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.dx()
    }

    /// Fourier coefficients `û_1..=û_N` treating the cell averages as
    /// midpoint samples. `N ≤ (G − 2)/2`.
    pub fn to_fourier(&self, max_mode: usize) -> Result<FourierField> {
        let g = self.cells.len();
        let mean = self.cells.iter().sum::<f64>() / g as f64;
        let mut samples: Vec<f64> = self.cells.iter().map(|c| c - mean).collect();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); max_mode];
        Transform::new(g).analyze_into(&mut samples, &mut coeffs)?;
        // Samples sit at (j + ½)/G; undo the half-cell offset.
        Ok(shift(&FourierField::from_coeffs(coeffs), -0.5 / g as f64))
    }
}

/// Values of `u` at the cell midpoints `(j + ½)/G`.
fn cell_centers(u: &FourierField, cells: usize) -> Result<Vec<f64>> {
    let shifted = shift(u, 0.5 / cells as f64);
    let mut out = vec![0.0; cells];
    Transform::new(cells).synthesize_into(shifted.coeffs(), &mut out)?;
    Ok(out)
}

#[inline]
fn flux(u: f64) -> f64 {
    0.5 * u * u
}

/// Godunov flux for `f(u) = u²/2` from the exact Riemann solution at the
/// interface.
#[inline]
pub fn godunov_flux(left: f64, right: f64) -> f64 {
    if left > right {
        // Shock with speed (left + right)/2.
        if left + right > 0.0 {
            flux(left)
        } else {
            flux(right)
        }
    } else if left > 0.0 {
        flux(left)
    } else if right < 0.0 {
        flux(right)
    } else {
        // Transonic rarefaction: the sonic state u = 0 sits on the interface.
        0.0
    }
}

fn update(cells: &mut [f64], dt: f64, scratch: &mut Vec<f64>) -> Result<()> {
    let g = cells.len();
    let dx = 1.0 / g as f64;
    let max = cells.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if max > 0.0 && dt > dx / max * (1.0 + 1e-12) {
        return Err(Error::StepSize {
            dt,
            limit: dx / max,
        });
    }
    // scratch[j] = F_{j+½}
    scratch.resize(g, 0.0);
    for j in 0..g {
        scratch[j] = godunov_flux(cells[j], cells[(j + 1) % g]);
    }
    let ratio = dt / dx;
    for j in 0..g {
        let left = scratch[(j + g - 1) % g];
        cells[j] -= ratio * (scratch[j] - left);
    }
    Ok(())
}

/// Advances by `dt` in as many equal Godunov sub-steps as the CFL bound
/// requires.
fn transport(cells: &mut [f64], dt: f64, courant: f64, scratch: &mut Vec<f64>) -> Result<()> {
    let dx = 1.0 / cells.len() as f64;
    let max = cells.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let pieces = if max > 0.0 {
        (dt * max / (courant * dx)).ceil().max(1.0) as usize
    } else {
        1
    };
    let h = dt / pieces as f64;
    for _ in 0..pieces {
        update(cells, h, scratch)?;
    }
    Ok(())
}

/// One conservative Godunov step; `dt ≤ Δx / max|u|`.
pub fn godunov_step(c: &CellField, dt: f64) -> Result<CellField> {
    let mut cells = c.cells.clone();
    update(&mut cells, dt, &mut Vec::new())?;
    Ok(CellField { cells })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InviscidConfig {
    /// Courant number for the full step; each transport half-step uses
    /// half of it.
    pub courant: f64,
    /// Upper bound on the splitting step, which sets the noise resolution.
    pub max_dt: f64,
    /// Modes of the Fourier view handed to observers.
    pub observed_modes: usize,
    pub seed: u64,
    pub trajectory: u64,
    /// Observers are called at `start, start + every, …`.
    pub sample_start: f64,
    pub sample_every: f64,
}

impl InviscidConfig {
    pub fn new(cells: usize) -> Self {
        Self {
            courant: 0.5,
            max_dt: 1e-3,
            observed_modes: (cells - 2) / 2,
            seed: 0,
            trajectory: 0,
            sample_start: 0.0,
            sample_every: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InviscidOutcome {
    pub state: CellField,
    pub steps: u64,
    pub time: f64,
}

/// Forced entropy solution by Strang splitting: transport half-step, noise
/// kick evaluated at cell centers, transport half-step.
pub fn inviscid_integrate(
    u0: &CellField,
    noise: Option<&CylindricalNoiseConfig>,
    t_end: f64,
    cfg: &InviscidConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<InviscidOutcome> {
    if !(cfg.courant > 0.0 && cfg.courant <= 1.0 && cfg.max_dt > 0.0) {
        return Err(Error::validation(
            "courant",
            format!("courant {} / max_dt {} out of range", cfg.courant, cfg.max_dt),
        ));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!("end time {t_end} must be nonnegative")));
    }
    let g = u0.len();
    if g < 4 {
        return Err(Error::Resolution(format!("{g} cells are too few")));
    }
    let dx = 1.0 / g as f64;
    let noise_modes = noise.map_or(0, |n| n.max_mode.min((g - 2) / 2));
    let mut sampler = match noise {
        Some(n) if n.amplitude > 0.0 && noise_modes > 0 => {
            let mut n = *n;
            n.max_mode = noise_modes;
            Some(CylindricalSampler::new(&n, cfg.seed, cfg.trajectory)?)
        }
        _ => None,
    };
    let mut increment = FourierField::zeros(noise_modes);
    let mut kick = vec![0.0; g];
    let mut transform = Transform::new(g);
    let mut scratch = Vec::with_capacity(g);

    let mut cells = u0.cells.clone();
    let mut t = 0.0;
    let mut step: u64 = 0;
    let mut next_sample = cfg.sample_start;
    let tiny = 1e-12 * t_end.max(1.0);

    let mut notify = |step: u64, t: f64, cells: &[f64], next: &mut f64| -> Result<()> {
        if observers.is_empty() || t + 1e-12 < *next {
            return Ok(());
        }
        while *next <= t + 1e-12 {
            *next += cfg.sample_every;
        }
        let view = CellField::new(cells.to_vec()).to_fourier(cfg.observed_modes)?;
        for obs in observers.iter_mut() {
            obs.observe(step, t, &view)?;
        }
        Ok(())
    };
    notify(0, 0.0, &cells, &mut next_sample)?;

    while t_end - t > tiny {
        let max = cells.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if !max.is_finite() || max > super::BLOWUP_THRESHOLD {
            let view = CellField::new(cells.clone()).to_fourier(cfg.observed_modes.min((g - 2) / 2));
            return Err(Error::BlowUp {
                step,
                time: t,
                reason: format!("|u|∞ = {max:e}"),
                state: Box::new(view.unwrap_or_else(|_| FourierField::zeros(0))),
            });
        }
        let dt_cfl = if max > 0.0 { cfg.courant * dx / max } else { f64::INFINITY };
        let dt = dt_cfl.min(cfg.max_dt).min(t_end - t);
        transport(&mut cells, 0.5 * dt, cfg.courant, &mut scratch)?;
        if let Some(s) = sampler.as_mut() {
            s.sample_into(step, dt, &mut increment)?;
            let shifted = shift(&increment, 0.5 * dx);
            transform.synthesize_into(shifted.coeffs(), &mut kick)?;
            let mean = kick.iter().sum::<f64>() / g as f64;
            for (c, k) in cells.iter_mut().zip(&kick) {
                *c += k - mean;
            }
        }
        // A large jump can raise |u|∞ past the step's CFL bound.
        transport(&mut cells, 0.5 * dt, cfg.courant, &mut scratch)?;
        step += 1;
        t = if t_end - (t + dt) <= tiny { t_end } else { t + dt };
        notify(step, t, &cells, &mut next_sample)?;
    }
    Ok(InviscidOutcome {
        state: CellField { cells },
        steps: step,
        time: t,
    })
}

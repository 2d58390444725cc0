//! Real, zero-mean periodic fields on the unit circle `[0, 1)`.
//!
//! A [`FourierField`] stores the complex coefficients `û_k` for `k = 1..=N`.
//! Negative wavenumbers are implied by Hermitian symmetry
//! (`û_{-k} = conj(û_k)`) and the mean `û_0` is identically zero, so every
//! value of this type is a real field with zero mass by construction.
//!
//! The real trigonometric basis is `e_k = √2 cos(2πkx)` for `k > 0` and
//! `e_k = √2 sin(2π|k|x)` for `k < 0`; a real-basis coefficient pair
//! `(a_k, a_{-k})` maps to `û_k = (a_k − i a_{-k}) / √2`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

/// Tolerance on the sample mean accepted by [`analyze`].
pub const MEAN_TOLERANCE: f64 = 1e-10;

const TWO_PI: f64 = 2.0 * PI;

/// Complex Fourier coefficients `û_1..=û_N` of a real zero-mean field.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    coeffs: Vec<Complex64>,
}

/// Point samples `u(j/G)` on the uniform grid of `G` points.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    samples: Vec<f64>,
}

impl FourierField {
    pub fn zeros(max_mode: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); max_mode],
        }
    }

    /// Builds a field from `û_1..=û_N`; `coeffs[0]` is mode 1.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    /// Builds a field from coefficients on the real basis `e_k`, given as
    /// `(k, a_k)` pairs with `k ≠ 0`.
    pub fn from_real_basis(max_mode: usize, terms: &[(i64, f64)]) -> Result<Self> {
        let mut field = Self::zeros(max_mode);
        for &(k, a) in terms {
            let m = k.unsigned_abs() as usize;
            if k == 0 || m > max_mode {
                return Err(Error::Range(format!(
                    "basis index {k} outside 1..={max_mode}"
                )));
            }
            field.add_real_basis(k, a);
        }
        Ok(field)
    }

    /// Adds `a · e_k` in place. `k` must be nonzero and `|k| ≤ N`.
    #[inline]
    pub fn add_real_basis(&mut self, k: i64, a: f64) {
        let m = k.unsigned_abs() as usize;
        let scaled = a / SQRT_2;
        if k > 0 {
            self.coeffs[m - 1].re += scaled;
        } else {
            self.coeffs[m - 1].im -= scaled;
        }
    }

    /// Real-basis coefficients `(a_k, a_{-k})` of mode `k ≥ 1`.
    pub fn real_basis(&self, k: usize) -> (f64, f64) {
        let c = self.coeffs[k - 1];
        (SQRT_2 * c.re, -SQRT_2 * c.im)
    }

    pub fn max_mode(&self) -> usize {
        self.coeffs.len()
    }

    /// `û_k` for `1 ≤ k ≤ N`.
    #[inline]
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs[k - 1]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Copy truncated or zero-padded to `max_mode` modes.
    pub fn resized(&self, max_mode: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(max_mode, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// Writes the snapshot format: header `k,re,im`, one row per mode.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let fail = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(["k", "re", "im"]).map_err(fail)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                crate::fmt_f64(c.re),
                crate::fmt_f64(c.im),
            ])
            .map_err(fail)?;
        }
        w.flush()
            .map_err(|e| Error::Format(format!("flushing snapshot: {e}")))
    }

    /// Reads a snapshot written by [`FourierField::write_csv`]. Modes may
    /// appear in any order; missing modes are zero.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers().map_err(|e| Error::Format(e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != ["k", "re", "im"] {
            return Err(Error::Format(format!(
                "expected header `k,re,im`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record.map_err(|e| Error::Format(e.to_string()))?;
            let parse = |i: usize| -> Result<&str> {
                record
                    .get(i)
                    .ok_or_else(|| Error::Format(format!("short row: {record:?}")))
            };
            let k: usize = parse(0)?
                .trim()
                .parse()
                .map_err(|e| Error::Format(format!("mode index: {e}")))?;
            let re: f64 = parse(1)?
                .trim()
                .parse()
                .map_err(|e| Error::Format(format!("real part: {e}")))?;
            let im: f64 = parse(2)?
                .trim()
                .parse()
                .map_err(|e| Error::Format(format!("imaginary part: {e}")))?;
            if k == 0 {
                return Err(Error::Format("mode 0 is not stored".into()));
            }
            rows.push((k, Complex64::new(re, im)));
        }
        let max_mode = rows.iter().map(|&(k, _)| k).max().unwrap_or(0);
        let mut field = Self::zeros(max_mode);
        for (k, c) in rows {
            field.coeffs[k - 1] = c;
        }
        Ok(field)
    }
}

impl PhysicalField {
    pub fn new(samples: Vec<f64>) -> Self {
        Self { samples }
    }

    /// Samples `f(j/G)` for `j = 0..G`.
    pub fn from_fn(grid_size: usize, f: impl Fn(f64) -> f64) -> Self {
        let g = grid_size as f64;
        Self {
            samples: (0..grid_size).map(|j| f(j as f64 / g)).collect(),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, &s| m.max(s.abs()))
    }

    /// Riemann sum of `|u|^p` over the circle, i.e. `|u|_p^p`.
    pub fn abs_moment(&self, p: f64) -> f64 {
        abs_power_sum(&self.samples, p) / self.samples.len() as f64
    }
}

/// `Σ |x|^p` with the common exponents special-cased.
pub(crate) fn abs_power_sum(xs: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        xs.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        xs.iter().map(|x| x * x).sum()
    } else if p == 3.0 {
        xs.iter().map(|x| (x * x * x).abs()).sum()
    } else if p == 0.5 {
        xs.iter().map(|x| x.abs().sqrt()).sum()
    } else {
        xs.iter().map(|x| x.abs().powf(p)).sum()
    }
}

fn check_grid(grid_size: usize, max_mode: usize) -> Result<()> {
    if grid_size < 2 * max_mode + 2 {
        return Err(Error::Resolution(format!(
            "grid of {grid_size} points cannot represent {max_mode} modes (need at least {})",
            2 * max_mode + 2
        )));
    }
    Ok(())
}

struct Plans {
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
}

thread_local! {
    static PLANNER: RefCell<(RealFftPlanner<f64>, HashMap<usize, Arc<Plans>>)> =
        RefCell::new((RealFftPlanner::new(), HashMap::new()));
}

fn plans(grid_size: usize) -> Arc<Plans> {
    PLANNER.with(|cell| {
        let (planner, cache) = &mut *cell.borrow_mut();
        cache
            .entry(grid_size)
            .or_insert_with(|| {
                Arc::new(Plans {
                    forward: planner.plan_fft_forward(grid_size),
                    inverse: planner.plan_fft_inverse(grid_size),
                })
            })
            .clone()
    })
}

/// Reusable FFT buffers for one grid size. Hot loops hold one of these to
/// avoid reallocating on every transform.
pub struct Transform {
    grid_size: usize,
    plans: Arc<Plans>,
    spectrum: Vec<Complex64>,
    scratch_fwd: Vec<Complex64>,
    scratch_inv: Vec<Complex64>,
}

impl Transform {
    pub fn new(grid_size: usize) -> Self {
        let plans = plans(grid_size);
        let spectrum = plans.forward.make_output_vec();
        let scratch_fwd = plans.forward.make_scratch_vec();
        let scratch_inv = plans.inverse.make_scratch_vec();
        Self {
            grid_size,
            plans,
            spectrum,
            scratch_fwd,
            scratch_inv,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Evaluates `Σ_{k=1..N} 2 Re(c_k e^{2πikj/G})` into `out`.
    pub fn synthesize_into(&mut self, coeffs: &[Complex64], out: &mut [f64]) -> Result<()> {
        check_grid(self.grid_size, coeffs.len())?;
        debug_assert_eq!(out.len(), self.grid_size);
        self.spectrum.fill(Complex64::new(0.0, 0.0));
        self.spectrum[1..=coeffs.len()].copy_from_slice(coeffs);
        self.plans
            .inverse
            .process_with_scratch(&mut self.spectrum, out, &mut self.scratch_inv)
            .map_err(|e| Error::Resolution(e.to_string()))
    }

    /// Computes `(1/G) Σ_j x_j e^{−2πikj/G}` for `k = 1..=coeffs.len()`.
    /// The mean (mode 0) is dropped without checking. `input` is used as
    /// scratch space.
    pub fn analyze_into(&mut self, input: &mut [f64], coeffs: &mut [Complex64]) -> Result<()> {
        check_grid(self.grid_size, coeffs.len())?;
        debug_assert_eq!(input.len(), self.grid_size);
        self.plans
            .forward
            .process_with_scratch(input, &mut self.spectrum, &mut self.scratch_fwd)
            .map_err(|e| Error::Resolution(e.to_string()))?;
        let norm = 1.0 / self.grid_size as f64;
        for (c, s) in coeffs.iter_mut().zip(&self.spectrum[1..]) {
            *c = s * norm;
        }
        Ok(())
    }
}

/// Evaluates the field on the grid `x_j = j/G`.
pub fn synthesize(f: &FourierField, grid_size: usize) -> Result<PhysicalField> {
    check_grid(grid_size, f.max_mode())?;
    let mut out = vec![0.0; grid_size];
    Transform::new(grid_size).synthesize_into(&f.coeffs, &mut out)?;
    Ok(PhysicalField { samples: out })
}

/// Discrete Fourier coefficients `û_1..=û_N` of grid samples.
pub fn analyze(p: &PhysicalField, max_mode: usize) -> Result<FourierField> {
    check_grid(p.grid_size(), max_mode)?;
    let mean = p.mean();
    if mean.abs() > MEAN_TOLERANCE {
        return Err(Error::MassConservation {
            mean,
            tolerance: MEAN_TOLERANCE,
        });
    }
    let mut input = p.samples.clone();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); max_mode];
    Transform::new(p.grid_size()).analyze_into(&mut input, &mut coeffs)?;
    Ok(FourierField { coeffs })
}

/// Homogeneous Sobolev norm `‖u‖_θ = sqrt((2π)^{2θ} Σ_{k≥1} 2 k^{2θ} |û_k|²)`.
pub fn sobolev_norm(f: &FourierField, theta: f64) -> f64 {
    sobolev_norm_sq(f, theta).sqrt()
}

pub(crate) fn sobolev_norm_sq(f: &FourierField, theta: f64) -> f64 {
    let two_theta = 2.0 * theta;
    let sum: f64 = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = (i + 1) as f64;
            let weight = if theta == 0.0 {
                1.0
            } else if theta == 1.0 {
                k * k
            } else if theta == 2.0 {
                k * k * k * k
            } else {
                k.powf(two_theta)
            };
            2.0 * weight * c.norm_sqr()
        })
        .sum();
    TWO_PI.powf(two_theta) * sum
}

/// Spectral derivative: `û_k ↦ (2πik)^order û_k`.
pub fn derivative(f: &FourierField, order: u32) -> FourierField {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::new(0.0, TWO_PI * (i + 1) as f64).powu(order))
        .collect();
    FourierField { coeffs }
}

/// Spectral representation of `x ↦ u(x + l) − u(x)`.
pub fn shift_increment(f: &FourierField, l: f64) -> FourierField {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let phase = Complex64::from_polar(1.0, TWO_PI * (i + 1) as f64 * l);
            c * (phase - 1.0)
        })
        .collect();
    FourierField { coeffs }
}

/// Spectral shift `x ↦ u(x + l)`.
pub fn shift(f: &FourierField, l: f64) -> FourierField {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::from_polar(1.0, TWO_PI * (i + 1) as f64 * l))
        .collect();
    FourierField { coeffs }
}

/// Truncation rule for the quadratic nonlinearity: modes above
/// `floor(numerator · N / denominator)` are zeroed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DealiasRule {
    pub numerator: usize,
    pub denominator: usize,
}

impl DealiasRule {
    pub const TWO_THIRDS: DealiasRule = DealiasRule {
        numerator: 2,
        denominator: 3,
    };

    /// Highest retained mode for an `N`-mode field.
    pub fn cutoff(&self, max_mode: usize) -> usize {
        (self.numerator * max_mode / self.denominator).min(max_mode)
    }

    pub fn apply_in_place(&self, coeffs: &mut [Complex64]) {
        let cut = self.cutoff(coeffs.len());
        coeffs[cut..].fill(Complex64::new(0.0, 0.0));
    }
}

impl Default for DealiasRule {
    fn default() -> Self {
        Self::TWO_THIRDS
    }
}

/// 2/3-rule truncation: `û_k = 0` for `k > floor(2N/3)`.
pub fn dealias(f: &FourierField) -> FourierField {
    let mut out = f.clone();
    DealiasRule::TWO_THIRDS.apply_in_place(&mut out.coeffs);
    out
}

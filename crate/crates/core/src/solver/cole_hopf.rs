//! Cole–Hopf solution of the unforced viscous Burgers equation.
//!
//! With `u = −2ν ∂ₓ ln φ`, the potential `φ` solves the heat equation, so
//!
//! ```text
//! u(t, x) = −2ν ∂ₓ ln ∫ K_t(x − y) exp(−U₀(y) / 2ν) dy,   U₀' = u₀,
//! ```
//!
//! where `K_t` is the heat kernel of variance `2νt`. Zero-mean `u₀` makes
//! `U₀` periodic, so the integral is taken over one period against the
//! periodized kernel with the trapezoid rule.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{analyze, synthesize, FourierField, PhysicalField};

/// Nodes per kernel standard deviation below which the quadrature is
/// rejected as under-resolved.
const MIN_NODES_PER_WIDTH: f64 = 8.0;

/// Evaluates `u(t, ·)` on the grid of `u0` by `quad_points`-node
/// quadrature of the Cole–Hopf formula.
pub fn cole_hopf_reference(
    u0: &PhysicalField,
    nu: f64,
    t: f64,
    quad_points: usize,
) -> Result<PhysicalField> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("Cole–Hopf evaluation needs t > 0, got {t}")));
    }
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("Cole–Hopf evaluation needs ν > 0, got {nu}")));
    }
    let grid = u0.grid_size();
    if grid < 2 {
        return Err(Error::Resolution("initial data needs at least 2 samples".into()));
    }
    let max_mode = (grid - 2) / 2;
    if quad_points < 2 * max_mode + 2 {
        return Err(Error::Resolution(format!(
            "{quad_points} quadrature nodes cannot resolve {max_mode}-mode initial data"
        )));
    }
    let variance = 2.0 * nu * t;
    let width = variance.sqrt();
    if width * (quad_points as f64) < MIN_NODES_PER_WIDTH {
        return Err(Error::Resolution(format!(
            "kernel width {width:e} spans fewer than {MIN_NODES_PER_WIDTH} of {quad_points} nodes"
        )));
    }

    // Periodic antiderivative of u0, evaluated at the quadrature nodes.
    let coeffs = analyze(u0, max_mode)?;
    let antiderivative = FourierField::from_coeffs(
        coeffs
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c / Complex64::new(0.0, 2.0 * PI * (i + 1) as f64))
            .collect(),
    );
    let potential = synthesize(&antiderivative, quad_points)?;
    let exponent: Vec<f64> = potential
        .samples()
        .iter()
        .map(|p| -p / (2.0 * nu))
        .collect();
    // Constant factors cancel in the logarithmic derivative.
    let shift = exponent.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponent.iter().map(|e| (e - shift).exp()).collect();

    let images = (10.0 * width).ceil() as i64 + 1;
    let kernel = |z: f64| -> (f64, f64) {
        let (mut k, mut dk) = (0.0, 0.0);
        for m in -images..=images {
            let s = z + m as f64;
            let g = (-s * s / (2.0 * variance)).exp();
            k += g;
            dk -= s / variance * g;
        }
        (k, dk)
    };

    let h = 1.0 / quad_points as f64;
    let samples = (0..grid)
        .map(|i| {
            let x = i as f64 / grid as f64;
            let (mut phi, mut dphi) = (0.0, 0.0);
            for (j, w) in weights.iter().enumerate() {
                let (k, dk) = kernel(x - j as f64 * h);
                phi += k * w;
                dphi += dk * w;
            }
            -2.0 * nu * dphi / phi
        })
        .collect::<Vec<f64>>();
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::Resolution(
            "Cole–Hopf potential underflowed; viscosity too small for this quadrature".into(),
        ));
    }
    Ok(PhysicalField::new(samples))
}

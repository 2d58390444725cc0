//! Shared fixtures for the benchmarks.

use burgers_core::{CylindricalNoiseConfig, FourierField, SolverConfig};

/// A smooth field with a k⁻¹ amplitude profile over all `max_mode` modes,
/// roughly the shape of a developed turbulent state.
pub fn rough_field(max_mode: usize) -> FourierField {
    let terms: Vec<(i64, f64)> = (1..=max_mode as i64)
        .flat_map(|k| {
            let a = 0.3 / k as f64;
            [(k, a * (k as f64).cos()), (-k, a * (0.7 * k as f64).sin())]
        })
        .collect();
    FourierField::from_real_basis(max_mode, &terms).expect("modes fit")
}

/// Production-like solver settings at viscosity `nu` with noise enabled.
pub fn forced_config(nu: f64) -> SolverConfig {
    let n = burgers_core::solver::auto_resolution(nu);
    SolverConfig::new(nu, n).with_noise(CylindricalNoiseConfig::with_defaults(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        let u = rough_field(64);
        assert_eq!(u.max_mode(), 64);
        assert!(u.is_finite());
        let cfg = forced_config(2e-3);
        assert_eq!(cfg.max_mode, 1024);
        assert!(cfg.validate().is_ok());
    }
}

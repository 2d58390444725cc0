use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope; zero for two-parameter exact fits.
    pub slope_stderr: f64,
    pub fit_range: (f64, f64),
    pub points: usize,
}

impl ScalingFit {
    /// `slope ± z·stderr`.
    pub fn band(&self, z: f64) -> (f64, f64) {
        (self.slope - z * self.slope_stderr, self.slope + z * self.slope_stderr)
    }
}

/// Fits `y ≈ e^b x^a` over the points with `x ∈ [lo, hi]`.
pub fn fit_power_law(points: &[(f64, f64)], range: (f64, f64)) -> Result<ScalingFit> {
    let (lo, hi) = range;
    if !(lo > 0.0 && lo <= hi) {
        return Err(Error::Range(format!("fit range [{lo}, {hi}] must be positive and ordered")));
    }
    let slack = 1e-12;
    let selected: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|(x, _)| *x >= lo * (1.0 - slack) && *x <= hi * (1.0 + slack))
        .collect();
    if selected.len() < 3 {
        return Err(Error::Fit(format!(
            "{} points in [{lo}, {hi}], need at least 3",
            selected.len()
        )));
    }
    if let Some((x, y)) = selected.iter().find(|(_, y)| !(*y > 0.0 && y.is_finite())) {
        return Err(Error::Domain(format!("cannot take the logarithm of y = {y} at x = {x}")));
    }
    let logs: Vec<(f64, f64)> = selected.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    let slope_stderr = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        slope_stderr,
        fit_range: range,
        points: logs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x| (x, 3.0 / (x * x))).collect();
        let f = fit_power_law(&pts, (1.0, 8.0)).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-14);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
        assert_eq!(f.points, 4);
    }

    #[test]
    fn constant_has_zero_slope() {
        let pts: Vec<(f64, f64)> = (1..6).map(|x| (x as f64, 2.5)).collect();
        let f = fit_power_law(&pts, (1.0, 5.0)).unwrap();
        assert!(f.slope.abs() < 1e-15);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let pts: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let x = 1.5f64.powi(i);
                (x, x.powi(-2) * (1.0 + noise.sample(&mut rng)))
            })
            .collect();
        let f = fit_power_law(&pts, (1.0, 1e6)).unwrap();
        assert!(f.slope > -2.1 && f.slope < -1.9, "{}", f.slope);
        let (lo, hi) = f.band(4.0);
        assert!(lo < -2.0 && hi > -2.0);
    }

    #[test]
    fn range_selects_points() {
        let pts: Vec<(f64, f64)> = (1..=10).map(|x| (x as f64, if x <= 5 { 1.0 } else { 1e3 })).collect();
        let f = fit_power_law(&pts, (1.0, 5.0)).unwrap();
        assert_eq!(f.points, 5);
        assert_eq!(f.slope, 0.0);
    }

    #[test]
    fn errors() {
        let pts = [(1.0, 1.0), (2.0, 2.0), (3.0, 0.0)];
        assert!(matches!(fit_power_law(&pts[..2], (1.0, 3.0)), Err(Error::Fit(_))));
        assert!(matches!(fit_power_law(&pts, (1.0, 3.0)), Err(Error::Domain(_))));
        assert!(matches!(fit_power_law(&pts, (3.0, 1.0)), Err(Error::Range(_))));
    }
}

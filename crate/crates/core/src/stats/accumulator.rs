use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpectrumConfig;
use crate::error::{Error, Result};
use crate::spectral::{abs_power_sum, sobolev_norm_sq, FourierField, Transform};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Which statistics an accumulator collects. Accumulators only merge with
/// others built from an equal request set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatRequests {
    /// Increment moments `p` of the structure functions.
    pub p_values: Vec<f64>,
    /// Increment lengths `l ∈ (0, 1)`.
    pub l_values: Vec<f64>,
    /// Sobolev moments `(n, k)` for `⟨⟨‖u‖_n^k⟩⟩`.
    pub sobolev: Vec<(f64, f64)>,
    /// Modes tracked for the spectrum.
    pub max_mode: usize,
    /// Increment integrals use a grid of `grid_factor · max_mode` points.
    pub grid_factor: usize,
}

impl StatRequests {
    pub fn new(max_mode: usize) -> Self {
        Self {
            p_values: Vec::new(),
            l_values: Vec::new(),
            sobolev: Vec::new(),
            max_mode,
            grid_factor: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_mode == 0 {
            return Err(Error::validation("max_mode", "must be positive"));
        }
        if self.grid_factor * self.max_mode < 2 * self.max_mode + 2 {
            return Err(Error::validation("grid_factor", "grid cannot resolve the tracked modes"));
        }
        if let Some(p) = self.p_values.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(Error::validation("p_values", format!("{p} must be positive")));
        }
        if let Some(l) = self.l_values.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(Error::validation("l_values", format!("{l} is not in (0, 1)")));
        }
        if let Some((n, k)) = self.sobolev.iter().find(|(n, k)| !(*n >= 0.0 && *k >= 1.0)) {
            return Err(Error::validation(
                "sobolev",
                format!("({n}, {k}) needs n ≥ 0 and k ≥ 1"),
            ));
        }
        Ok(())
    }

    fn grid_size(&self) -> usize {
        self.grid_factor * self.max_mode
    }
}

fn position(values: &[f64], x: f64) -> Option<usize> {
    values
        .iter()
        .position(|v| (v - x).abs() <= 1e-12 * v.abs().max(x.abs()))
}

/// `(t·|u|∞, t·|∂ₓu|₁, t·max_x(∂ₓu)⁺)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OleinikStatistic {
    pub u_inf: f64,
    pub du_l1: f64,
    pub du_plus: f64,
}

impl OleinikStatistic {
    fn max(self, o: Self) -> Self {
        Self {
            u_inf: self.u_inf.max(o.u_inf),
            du_l1: self.du_l1.max(o.du_l1),
            du_plus: self.du_plus.max(o.du_plus),
        }
    }
}

/// Oleinik statistic of one snapshot, evaluated on a `4N`-point grid.
pub fn oleinik_statistic(u: &FourierField, t: f64) -> Result<OleinikStatistic> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("Oleinik statistic needs t > 0, got {t}")));
    }
    let grid = (4 * u.max_mode()).max(4);
    oleinik_on_grid(u, t, &mut Transform::new(grid))
}

fn oleinik_on_grid(u: &FourierField, t: f64, tr: &mut Transform) -> Result<OleinikStatistic> {
    let g = tr.grid_size();
    let mut values = vec![0.0; g];
    tr.synthesize_into(u.coeffs(), &mut values)?;
    let u_inf = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let du: Vec<Complex64> = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::new(0.0, TWO_PI * (i + 1) as f64))
        .collect();
    tr.synthesize_into(&du, &mut values)?;
    let du_l1 = abs_power_sum(&values, 1.0) / g as f64;
    let du_plus = values.iter().fold(0.0f64, |m, v| m.max(*v));
    Ok(OleinikStatistic {
        u_inf: t * u_inf,
        du_l1: t * du_l1,
        du_plus: t * du_plus,
    })
}

/// Mergeable running sums realizing `⟨⟨·⟩⟩` over a time window and an
/// ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatAccumulator {
    requests: StatRequests,
    /// Closed window of accepted snapshot times; the hull of both windows
    /// after a merge.
    window: (f64, f64),
    count: u64,
    /// `Σ|û_k|²`, index `k − 1`.
    mode_energy: Vec<f64>,
    /// `Σ∫|u(x+l) − u(x)|^p dx`, index `l_index · P + p_index`.
    increments: Vec<f64>,
    /// `Σ‖u‖_n^k` in request order.
    sobolev: Vec<f64>,
    oleinik: OleinikStatistic,
}

impl StatAccumulator {
    pub fn new(requests: StatRequests, window: (f64, f64)) -> Result<Self> {
        requests.validate()?;
        if !(window.0 <= window.1) {
            return Err(Error::Domain(format!(
                "window [{}, {}] is empty",
                window.0, window.1
            )));
        }
        Ok(Self {
            mode_energy: vec![0.0; requests.max_mode],
            increments: vec![0.0; requests.p_values.len() * requests.l_values.len()],
            sobolev: vec![0.0; requests.sobolev.len()],
            requests,
            window,
            count: 0,
            oleinik: OleinikStatistic::default(),
        })
    }

    pub fn requests(&self) -> &StatRequests {
        &self.requests
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Adds the snapshot `u` at time `t`. Fields with more modes than
    /// requested are truncated.
    pub fn accumulate(&mut self, u: &FourierField, t: f64) -> Result<()> {
        let (start, end) = self.window;
        let slack = 1e-9 * end.abs().max(1.0);
        if !(t >= start - slack && t <= end + slack) {
            return Err(Error::Window { time: t, start, end });
        }
        let u = if u.max_mode() == self.requests.max_mode {
            std::borrow::Cow::Borrowed(u)
        } else {
            std::borrow::Cow::Owned(u.resized(self.requests.max_mode))
        };
        let coeffs = u.coeffs();
        let mut tr = Transform::new(self.requests.grid_size());

        for (e, c) in self.mode_energy.iter_mut().zip(coeffs) {
            *e += c.norm_sqr();
        }
        for (s, &(n, k)) in self.sobolev.iter_mut().zip(&self.requests.sobolev) {
            *s += sobolev_norm_sq(&u, n).powf(0.5 * k);
        }

        let g = tr.grid_size();
        let np = self.requests.p_values.len();
        if np > 0 {
            let mut shifted = vec![Complex64::new(0.0, 0.0); coeffs.len()];
            let mut values = vec![0.0; g];
            for (li, &l) in self.requests.l_values.iter().enumerate() {
                for (i, (s, c)) in shifted.iter_mut().zip(coeffs).enumerate() {
                    let phase = Complex64::from_polar(1.0, TWO_PI * (i + 1) as f64 * l);
                    *s = c * (phase - 1.0);
                }
                tr.synthesize_into(&shifted, &mut values)?;
                for (pi, &p) in self.requests.p_values.iter().enumerate() {
                    self.increments[li * np + pi] += abs_power_sum(&values, p) / g as f64;
                }
            }
        }

        if t > 0.0 {
            self.oleinik = self.oleinik.max(oleinik_on_grid(&u, t, &mut tr)?);
        }
        self.count += 1;
        Ok(())
    }

    /// Componentwise sums; maxima combine by max.
    pub fn merge(&self, other: &StatAccumulator) -> Result<StatAccumulator> {
        if self.requests != other.requests {
            return Err(Error::Schema);
        }
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(StatAccumulator {
            requests: self.requests.clone(),
            window: (
                self.window.0.min(other.window.0),
                self.window.1.max(other.window.1),
            ),
            count: self.count + other.count,
            mode_energy: add(&self.mode_energy, &other.mode_energy),
            increments: add(&self.increments, &other.increments),
            sobolev: add(&self.sobolev, &other.sobolev),
            oleinik: self.oleinik.max(other.oleinik),
        })
    }

    fn denominator(&self) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::MissingStatistic("no snapshots accumulated".into()));
        }
        Ok(self.count as f64)
    }

    /// `⟨⟨|û_k|²⟩⟩`.
    pub fn mean_mode_energy(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.requests.max_mode {
            return Err(Error::Range(format!(
                "mode {k} outside 1..={}",
                self.requests.max_mode
            )));
        }
        Ok(self.mode_energy[k - 1] / self.denominator()?)
    }

    pub fn structure_function(&self, p: f64, l: f64) -> Result<f64> {
        let missing = || Error::MissingStatistic(format!("S_{p}({l})"));
        let pi = position(&self.requests.p_values, p).ok_or_else(missing)?;
        let li = position(&self.requests.l_values, l).ok_or_else(missing)?;
        Ok(self.increments[li * self.requests.p_values.len() + pi] / self.denominator()?)
    }

    /// `S_2(l)` from the averaged spectrum: `Σ_{k≥1} 8 sin²(πkl) ⟨⟨|û_k|²⟩⟩`.
    pub fn spectral_structure_function(&self, l: f64) -> Result<f64> {
        let d = self.denominator()?;
        Ok(self
            .mode_energy
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let s = (std::f64::consts::PI * (i + 1) as f64 * l).sin();
                8.0 * s * s * e
            })
            .sum::<f64>()
            / d)
    }

    pub fn energy_spectrum(&self, n: usize, cfg: &SpectrumConfig) -> Result<f64> {
        cfg.validate()?;
        if n == 0 {
            return Err(Error::Range("spectrum layer index starts at 1".into()));
        }
        let (lo, hi) = cfg.layer(n);
        if hi > self.requests.max_mode {
            return Err(Error::Range(format!(
                "layer {n} reaches mode {hi} beyond {}",
                self.requests.max_mode
            )));
        }
        let d = self.denominator()?;
        // ½|û_k|² + ½|û_{−k}|² = |û_k|².
        let sum: f64 = self.mode_energy[lo - 1..hi].iter().sum();
        let m = cfg.layer_width;
        Ok(sum / d / (2.0 * n as f64 * (m - 1.0 / m)))
    }

    /// `(n, E_n)` for every layer within the tracked modes.
    pub fn spectrum(&self, cfg: &SpectrumConfig) -> Result<Vec<(usize, f64)>> {
        (1..=cfg.max_layer(self.requests.max_mode))
            .map(|n| Ok((n, self.energy_spectrum(n, cfg)?)))
            .collect()
    }

    pub fn sobolev_moment(&self, n: f64, k: f64) -> Result<f64> {
        let i = self
            .requests
            .sobolev
            .iter()
            .position(|&(a, b)| a == n && b == k)
            .ok_or_else(|| Error::MissingStatistic(format!("‖u‖_{n}^{k}")))?;
        Ok(self.sobolev[i] / self.denominator()?)
    }

    /// Maxima of the Oleinik statistic over accumulated snapshots.
    pub fn oleinik(&self) -> OleinikStatistic {
        self.oleinik
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{analyze, PhysicalField};
    use crate::stats::{energy_spectrum, flatness_ratio, sobolev_moment, structure_function};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn requests(n: usize) -> StatRequests {
        StatRequests {
            p_values: vec![0.5, 1.0, 2.0, 3.0],
            l_values: vec![0.01, 0.1, 0.25, 0.5],
            sobolev: vec![(0.0, 2.0), (1.0, 2.0), (2.0, 2.0), (1.0, 1.0)],
            max_mode: n,
            grid_factor: 4,
        }
    }

    fn sine(n: usize) -> FourierField {
        FourierField::from_real_basis(n, &[(-1, 1.0 / 2f64.sqrt())]).unwrap()
    }

    fn sawtooth(n: usize) -> FourierField {
        // ½ − x = Σ_k sin(2πkx)/(πk), so û_k = −i/(2πk).
        FourierField::from_coeffs(
            (1..=n)
                .map(|k| Complex64::new(0.0, -1.0 / (2.0 * PI * k as f64)))
                .collect(),
        )
    }

    fn random_field(seed: u64, n: usize) -> FourierField {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        FourierField::from_coeffs(
            (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
    }

    fn single(u: &FourierField, req: StatRequests) -> StatAccumulator {
        let mut acc = StatAccumulator::new(req, (0.0, 10.0)).unwrap();
        acc.accumulate(u, 1.0).unwrap();
        acc
    }

    fn assert_close(a: &StatAccumulator, b: &StatAccumulator, tol: f64) {
        assert_eq!(a.count, b.count);
        let pairs = a
            .mode_energy
            .iter()
            .zip(&b.mode_energy)
            .chain(a.increments.iter().zip(&b.increments))
            .chain(a.sobolev.iter().zip(&b.sobolev));
        for (x, y) in pairs {
            assert!((x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300), "{x} vs {y}");
        }
        assert_eq!(a.oleinik, b.oleinik);
    }

    #[test]
    fn single_sample_mean_is_the_sample() {
        let u = random_field(1, 16);
        let acc = single(&u, requests(16));
        let expected = crate::spectral::sobolev_norm(&u, 0.0).powi(2);
        assert!((sobolev_moment(&acc, 0.0, 2.0).unwrap() - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn constant_trajectory_means_are_constant() {
        let u = random_field(2, 16);
        let one = single(&u, requests(16));
        let mut many = StatAccumulator::new(requests(16), (0.0, 10.0)).unwrap();
        for i in 0..7 {
            many.accumulate(&u, 1.0 + i as f64).unwrap();
        }
        for &(p, l) in &[(0.5, 0.01), (3.0, 0.5)] {
            let a = structure_function(&one, p, l).unwrap();
            let b = structure_function(&many, p, l).unwrap();
            assert!((a - b).abs() < 1e-13 * a);
        }
        let a = sobolev_moment(&one, 2.0, 2.0).unwrap();
        let b = sobolev_moment(&many, 2.0, 2.0).unwrap();
        assert!((a - b).abs() < 1e-13 * a);
    }

    #[test]
    fn half_windows_merge_to_full_window() {
        let snapshots: Vec<(f64, FourierField)> =
            (0..10).map(|i| (1.0 + 0.5 * i as f64, random_field(10 + i, 24))).collect();
        let mut full = StatAccumulator::new(requests(24), (1.0, 6.0)).unwrap();
        let mut first = StatAccumulator::new(requests(24), (1.0, 3.5)).unwrap();
        let mut second = StatAccumulator::new(requests(24), (3.5, 6.0)).unwrap();
        for (t, u) in &snapshots {
            full.accumulate(u, *t).unwrap();
            if *t < 3.5 {
                first.accumulate(u, *t).unwrap();
            } else {
                second.accumulate(u, *t).unwrap();
            }
        }
        let merged = first.merge(&second).unwrap();
        assert_close(&merged, &full, 1e-12);
        assert_eq!(merged.window(), (1.0, 6.0));
    }

    #[test]
    fn merge_identity_and_commutativity() {
        let a = single(&random_field(3, 12), requests(12));
        let b = single(&random_field(4, 12), requests(12));
        let empty = StatAccumulator::new(requests(12), (0.0, 10.0)).unwrap();
        assert_eq!(a.merge(&empty).unwrap(), a);
        assert_eq!(a.merge(&b).unwrap(), b.merge(&a).unwrap());
    }

    #[test]
    fn merge_order_of_four_trajectories() {
        let accs: Vec<StatAccumulator> = (0..4)
            .map(|i| {
                let mut acc = StatAccumulator::new(requests(20), (0.0, 10.0)).unwrap();
                for j in 0..3 {
                    acc.accumulate(&random_field(100 * i + j, 20), 1.0 + j as f64).unwrap();
                }
                acc
            })
            .collect();
        let left = accs[0]
            .merge(&accs[1])
            .unwrap()
            .merge(&accs[2].merge(&accs[3]).unwrap())
            .unwrap();
        let right = accs[3]
            .merge(&accs[0])
            .unwrap()
            .merge(&accs[2])
            .unwrap()
            .merge(&accs[1])
            .unwrap();
        assert_close(&left, &right, 1e-12);
    }

    #[test]
    fn merge_rejects_different_requests() {
        let a = StatAccumulator::new(requests(8), (0.0, 1.0)).unwrap();
        let b = StatAccumulator::new(requests(9), (0.0, 1.0)).unwrap();
        assert!(matches!(a.merge(&b), Err(Error::Schema)));
    }

    #[test]
    fn window_is_enforced() {
        let mut acc = StatAccumulator::new(requests(8), (1.0, 6.0)).unwrap();
        assert!(matches!(
            acc.accumulate(&sine(8), 0.5),
            Err(Error::Window { .. })
        ));
        assert!(acc.accumulate(&sine(8), 6.0).is_ok());
        assert_eq!(acc.count(), 1);
    }

    #[test]
    fn empty_accumulator_has_no_means() {
        let acc = StatAccumulator::new(requests(8), (0.0, 1.0)).unwrap();
        assert!(matches!(
            structure_function(&acc, 1.0, 0.1),
            Err(Error::MissingStatistic(_))
        ));
    }

    #[test]
    fn zero_field_statistics_vanish() {
        let acc = single(&FourierField::zeros(16), requests(16));
        assert_eq!(structure_function(&acc, 2.0, 0.1).unwrap(), 0.0);
        assert_eq!(energy_spectrum(&acc, 2, &SpectrumConfig::default()).unwrap(), 0.0);
        assert_eq!(sobolev_moment(&acc, 1.0, 2.0).unwrap(), 0.0);
        assert!(matches!(
            flatness_ratio(&acc, 1.0, 2.0, 0.1),
            Err(Error::ZeroDenominator(_))
        ));
    }

    #[test]
    fn sine_half_period_structure_function() {
        let acc = single(&sine(8), requests(8));
        assert!((structure_function(&acc, 2.0, 0.5).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn sawtooth_first_order_structure_function() {
        // u(x+l) − u(x) is −l off an interval of length l and 1 − l on it.
        let n = 2048;
        let acc = single(&sawtooth(n), requests(n));
        let s1 = structure_function(&acc, 1.0, 0.1).unwrap();
        assert!((s1 - 0.18).abs() < 2e-3, "{s1}");
    }

    #[test]
    fn missing_pair_is_reported() {
        let acc = single(&sine(8), requests(8));
        assert!(matches!(
            structure_function(&acc, 4.0, 0.1),
            Err(Error::MissingStatistic(_))
        ));
        assert!(matches!(
            structure_function(&acc, 1.0, 0.3),
            Err(Error::MissingStatistic(_))
        ));
        assert!(matches!(
            sobolev_moment(&acc, 3.0, 2.0),
            Err(Error::MissingStatistic(_))
        ));
    }

    #[test]
    fn spectrum_examples() {
        let cfg = SpectrumConfig::default();
        let e1 = FourierField::from_real_basis(8, &[(1, 1.0)]).unwrap();
        let acc = single(&e1, requests(8));
        assert!((energy_spectrum(&acc, 1, &cfg).unwrap() - 1.0 / 6.0).abs() < 1e-15);

        let acc = single(&sawtooth(8), requests(8));
        let expected = 5.0 / (48.0 * PI * PI);
        assert!((energy_spectrum(&acc, 1, &cfg).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.010_554).abs() < 1e-6);

        assert!(matches!(
            energy_spectrum(&acc, 5, &cfg),
            Err(Error::Range(_))
        ));
        assert_eq!(acc.spectrum(&cfg).unwrap().len(), 4);
    }

    #[test]
    fn first_sobolev_moment_of_basis_mode() {
        let e1 = FourierField::from_real_basis(4, &[(1, 1.0)]).unwrap();
        let acc = single(&e1, requests(4));
        assert!((sobolev_moment(&acc, 1.0, 2.0).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        assert!((sobolev_moment(&acc, 1.0, 1.0).unwrap() - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn second_order_structure_function_matches_spectrum() {
        let mut acc = StatAccumulator::new(requests(64), (0.0, 10.0)).unwrap();
        for i in 0..5 {
            acc.accumulate(&random_field(50 + i, 64), 1.0).unwrap();
        }
        for &l in &[0.01, 0.1, 0.25, 0.5] {
            let direct = structure_function(&acc, 2.0, l).unwrap();
            let spectral = acc.spectral_structure_function(l).unwrap();
            assert!((direct - spectral).abs() <= 1e-10 * spectral, "{direct} vs {spectral}");
        }
    }

    #[test]
    fn partitioning_layers_sum_to_half_energy() {
        // With M = 2 the layers of n = 1, 6, 26 are [1,2], [3,12], [13,52].
        let u = random_field(7, 52);
        let acc = single(&u, requests(52));
        let cfg = SpectrumConfig::default();
        let layer_energy: f64 = [1usize, 6, 26]
            .iter()
            .map(|&n| energy_spectrum(&acc, n, &cfg).unwrap() * 2.0 * n as f64 * 1.5)
            .sum();
        let half = 0.5 * sobolev_moment(&acc, 0.0, 2.0).unwrap();
        assert!((layer_energy - half).abs() < 1e-13 * half);
    }

    #[test]
    fn flatness_of_equal_orders_is_one() {
        let acc = single(&random_field(8, 16), requests(16));
        assert_eq!(flatness_ratio(&acc, 2.0, 2.0, 0.1).unwrap(), 1.0);
        let r = flatness_ratio(&acc, 3.0, 1.0, 0.1).unwrap();
        let s3 = structure_function(&acc, 3.0, 0.1).unwrap();
        let s1 = structure_function(&acc, 1.0, 0.1).unwrap();
        assert!((r - s3.cbrt() / s1).abs() < 1e-14 * r);
    }

    #[test]
    fn oleinik_examples() {
        let zero = oleinik_statistic(&FourierField::zeros(8), 1.0).unwrap();
        assert_eq!(zero, OleinikStatistic::default());

        let s = oleinik_statistic(&sine(8), 2.0).unwrap();
        assert!((s.du_plus - 4.0 * PI).abs() < 1e-12);
        assert!((s.u_inf - 2.0).abs() < 1e-12);
        // ∫|2π cos(2πx)| dx = 4; the grid sum at G = 32 is off by O(G⁻²)
        // through the kinks of |cos|.
        assert!((s.du_l1 - 8.0).abs() < 0.03, "{}", s.du_l1);
        let fine = oleinik_statistic(&sine(1024), 2.0).unwrap();
        assert!((fine.du_l1 - 8.0).abs() < 1e-5);

        assert!(matches!(
            oleinik_statistic(&sine(8), 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn oleinik_of_band_limited_sawtooth() {
        // The truncated series keeps the jump: |u|∞ carries the Gibbs
        // overshoot, the total variation counts the unit slope and the unit
        // jump, and the jump makes the positive slope of order N.
        let n = 256;
        let s = oleinik_statistic(&sawtooth(n), 1.0).unwrap();
        assert!(s.u_inf > 0.5 && s.u_inf < 0.5 * 1.18 + 0.01, "{}", s.u_inf);
        assert!(s.du_l1 >= 2.0 - 1e-9, "{}", s.du_l1);
        assert!(s.du_plus > n as f64, "{}", s.du_plus);
        // Away from the jump the slope is −1 up to Gibbs ripples.
        let g = 4 * n;
        let mut vals = vec![0.0; g];
        let du = crate::spectral::derivative(&sawtooth(n), 1);
        Transform::new(g).synthesize_into(du.coeffs(), &mut vals).unwrap();
        let mid = vals[g / 4..3 * g / 4].iter().sum::<f64>() / (g / 2) as f64;
        assert!((mid + 1.0).abs() < 0.1, "{mid}");
    }

    #[test]
    fn oleinik_max_is_taken_over_snapshots() {
        let mut acc = StatAccumulator::new(requests(8), (0.0, 10.0)).unwrap();
        acc.accumulate(&sine(8), 1.0).unwrap();
        acc.accumulate(&sine(8), 3.0).unwrap();
        assert!((acc.oleinik().du_plus - 6.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn increments_on_grid_agree_with_fine_grid() {
        let u = random_field(9, 8);
        let acc = single(&u, requests(8));
        let l = 0.25;
        let fine = crate::spectral::synthesize(&crate::spectral::shift_increment(&u, l), 4096)
            .unwrap();
        let s3 = fine.abs_moment(3.0);
        assert!((structure_function(&acc, 3.0, l).unwrap() - s3).abs() < 1e-3 * s3);
        let p = PhysicalField::from_fn(64, |x| (2.0 * PI * x).sin());
        assert!(analyze(&p, 8).is_ok());
    }

    proptest! {
        #[test]
        fn structure_functions_follow_moment_ordering(seed in any::<u64>()) {
            // Hölder: S_p^{1/p} ≤ S_q^{1/q} for p ≤ q on a probability space.
            let u = random_field(seed, 12);
            let acc = single(&u, requests(12));
            for &l in &[0.01, 0.1, 0.25, 0.5] {
                let ps = [0.5, 1.0, 2.0, 3.0];
                let norms: Vec<f64> = ps
                    .iter()
                    .map(|&p| structure_function(&acc, p, l).unwrap().powf(1.0 / p))
                    .collect();
                for w in norms.windows(2) {
                    prop_assert!(w[0] <= w[1] * (1.0 + 1e-12));
                }
            }
        }
    }
}

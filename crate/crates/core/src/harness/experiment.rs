//! Ensemble runs over a viscosity sweep, statistics reduction, exponent
//! fits and output files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, InitialCondition, Method};
use crate::error::{Error, Result};
use crate::fmt_f64;
use crate::solver::{inviscid_integrate, CellField, InviscidConfig, SampleStride, Simulation};
use crate::spectral::FourierField;
use crate::stats::{
    fit_power_law, flatness_ratio, oleinik_statistic, OleinikStatistic, ScalingFit,
    StatAccumulator,
};

/// Ensemble size below which scaling checks are reported as warnings.
pub const MIN_ENSEMBLE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: ScalingFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    /// Accepted closed interval for `value`.
    pub band: (f64, f64),
    pub detail: String,
}

impl Check {
    fn within(name: impl Into<String>, value: f64, band: (f64, f64), detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: value >= band.0 && value <= band.1,
            value,
            band,
            detail: detail.into(),
        }
    }
}

/// Results at one viscosity.
#[derive(Debug, Clone, Serialize)]
pub struct NuReport {
    pub nu: f64,
    pub max_mode: usize,
    pub trajectories: usize,
    pub failed_trajectories: usize,
    pub steps: u64,
    pub samples: u64,
    pub rejection_failures: u64,
    pub spectrum: Vec<(usize, f64)>,
    /// `(p, l, S_p(l))`.
    pub structure: Vec<(f64, f64, f64)>,
    /// `(n, k, ⟨⟨‖u‖_n^k⟩⟩)`.
    pub moments: Vec<(f64, f64, f64)>,
    /// Maximum over trajectories at each sampling time.
    pub oleinik_trace: Vec<(f64, OleinikStatistic)>,
    pub oleinik: OleinikStatistic,
    pub fits: Vec<NamedFit>,
    #[serde(skip)]
    pub accumulator: StatAccumulator,
}

impl NuReport {
    pub fn fit(&self, name: &str) -> Option<&ScalingFit> {
        self.fits.iter().find(|f| f.name == name).map(|f| &f.fit)
    }

    pub fn moment(&self, n: f64, k: f64) -> Option<f64> {
        self.moments.iter().find(|m| m.0 == n && m.1 == k).map(|m| m.2)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config_hash: String,
    pub points: Vec<NuReport>,
    /// Fits across the sweep, e.g. `⟨⟨‖u‖₁²⟩⟩` against `ν`.
    pub sweep_fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    /// Set when the ensemble is too small for the scaling checks to be
    /// conclusive.
    pub insufficient_statistics: bool,
    pub total_steps: u64,
    /// Kept out of the output files so they stay byte-identical.
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn sweep_fit(&self, name: &str) -> Option<&ScalingFit> {
        self.sweep_fits.iter().find(|f| f.name == name).map(|f| &f.fit)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Trajectory {
    accumulator: StatAccumulator,
    trace: Vec<(usize, OleinikStatistic)>,
    steps: u64,
    rejection_failures: u64,
    final_state: FourierField,
}

fn initial_field(cfg: &ExperimentConfig, modes: usize) -> FourierField {
    match cfg.solver.initial {
        InitialCondition::Zero => FourierField::zeros(modes),
        InitialCondition::Sine => FourierField::from_real_basis(modes, &[(-1, std::f64::consts::FRAC_1_SQRT_2)])
            .expect("mode 1 is always representable"),
    }
}

/// Time-window observer shared by both solvers.
struct Sampler<'a> {
    cfg: &'a ExperimentConfig,
    accumulator: StatAccumulator,
    trace: Vec<(usize, OleinikStatistic)>,
}

impl Sampler<'_> {
    fn observe(&mut self, t: f64, u: &FourierField) -> Result<()> {
        let w = &self.cfg.averaging;
        let slack = 1e-9 * w.end().max(1.0);
        if t < w.burn_in - slack || t > w.end() + slack {
            return Ok(());
        }
        self.accumulator.accumulate(u, t)?;
        let index = ((t - w.burn_in) / w.sample_interval).round() as usize;
        self.trace.push((index, oleinik_statistic(u, t)?));
        Ok(())
    }
}

fn run_trajectory(cfg: &ExperimentConfig, nu: f64, id: u64) -> Result<Trajectory> {
    let w = cfg.averaging;
    let modes = cfg.observed_modes(nu);
    let mut sampler = Sampler {
        cfg,
        accumulator: StatAccumulator::new(cfg.requests(nu), (w.burn_in, w.end()))?,
        trace: Vec::new(),
    };
    let seed = cfg.noise.seed;
    let t_end = cfg.t_end();
    let mut observer = |_step: u64, t: f64, u: &FourierField| sampler.observe(t, u);
    let (steps, rejection_failures, final_state) = match cfg.solver.method {
        Method::Spectral => {
            let solver = cfg.solver_config(nu)?;
            let mut sim = Simulation::new(&solver, seed, id)?;
            let out = sim.integrate(
                &initial_field(cfg, modes),
                t_end,
                SampleStride::Time {
                    start: w.burn_in,
                    every: w.sample_interval,
                },
                &mut [&mut observer],
            )?;
            (out.steps, out.rejection_failures, out.state)
        }
        Method::Godunov => {
            let cells = cfg.solver.cells;
            let u0 = CellField::from_fourier(&initial_field(cfg, modes), cells)?;
            let noise = cfg.noise_config(modes)?;
            let mut inv = InviscidConfig::new(cells);
            inv.seed = seed;
            inv.trajectory = id;
            inv.observed_modes = modes;
            inv.sample_start = w.burn_in;
            inv.sample_every = w.sample_interval;
            let out = inviscid_integrate(&u0, noise.as_ref(), t_end, &inv, &mut [&mut observer])?;
            (out.steps, 0, out.state.to_fourier(modes)?)
        }
    };
    Ok(Trajectory {
        accumulator: sampler.accumulator,
        trace: sampler.trace,
        steps,
        rejection_failures,
        final_state,
    })
}

fn nu_dir(out: &Path, nu: f64) -> PathBuf {
    out.join(format!("nu_{nu}"))
}

fn snapshot_name(id: u64, t: f64) -> String {
    format!("traj{id}_t{t:.4}.csv")
}

fn write_snapshot(dir: &Path, id: u64, t: f64, u: &FourierField) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(snapshot_name(id, t));
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    u.write_csv(std::io::BufWriter::new(file))
}

/// Runs one viscosity of the sweep.
fn run_point(cfg: &ExperimentConfig, nu: f64, warnings: &mut Vec<String>) -> Result<NuReport> {
    let r = cfg.averaging.ensemble_size;
    let dir = nu_dir(&cfg.output.dir, nu);
    let results: Vec<Result<Trajectory>> = (0..r as u64)
        .into_par_iter()
        .map(|id| run_trajectory(cfg, nu, id))
        .collect();

    let mut survivors = Vec::new();
    let mut first_failure = None;
    for (id, res) in results.into_iter().enumerate() {
        match res {
            Ok(t) => survivors.push((id as u64, t)),
            Err(e) if e.is_numerical() => {
                if let Error::BlowUp { time, state, .. } = &e {
                    // Best effort: the dump is diagnostic only.
                    let _ = write_snapshot(&dir, id as u64, *time, state);
                }
                warnings.push(format!("ν = {nu}: trajectory {id} failed: {e}"));
                first_failure.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    if 2 * survivors.len() < r {
        return Err(first_failure.expect("failures recorded"));
    }

    let mut acc = StatAccumulator::new(cfg.requests(nu), (cfg.averaging.burn_in, cfg.averaging.end()))?;
    let mut trace: Vec<Option<OleinikStatistic>> = vec![None; cfg.averaging.samples_per_trajectory()];
    let (mut steps, mut rejection_failures) = (0, 0);
    for (_, t) in &survivors {
        acc = acc.merge(&t.accumulator)?;
        steps += t.steps;
        rejection_failures += t.rejection_failures;
        for &(i, s) in &t.trace {
            if i >= trace.len() {
                trace.resize(i + 1, None);
            }
            trace[i] = Some(match trace[i] {
                Some(m) => OleinikStatistic {
                    u_inf: m.u_inf.max(s.u_inf),
                    du_l1: m.du_l1.max(s.du_l1),
                    du_plus: m.du_plus.max(s.du_plus),
                },
                None => s,
            });
        }
    }
    if cfg.output.snapshots {
        for (id, t) in &survivors {
            write_snapshot(&dir, *id, cfg.t_end(), &t.final_state)?;
        }
    }
    if rejection_failures > 0 {
        warnings.push(format!(
            "ν = {nu}: {rejection_failures} jump draws exhausted the rejection budget"
        ));
    }

    let spectrum_cfg = cfg.spectrum();
    let spectrum = acc.spectrum(&spectrum_cfg)?;
    let requests = acc.requests().clone();
    let mut structure = Vec::new();
    for &l in &requests.l_values {
        for &p in &requests.p_values {
            structure.push((p, l, acc.structure_function(p, l)?));
        }
    }
    let moments = requests
        .sobolev
        .iter()
        .map(|&(n, k)| Ok((n, k, acc.sobolev_moment(n, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let w = cfg.averaging;
    let oleinik_trace = trace
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|s| (w.burn_in + i as f64 * w.sample_interval, s)))
        .collect();

    let mut fits = Vec::new();
    let mut try_fit = |name: String, points: Vec<(f64, f64)>, range: (f64, f64)| {
        match fit_power_law(&points, range) {
            Ok(fit) => fits.push(NamedFit { name, fit }),
            Err(e) => warnings.push(format!("ν = {nu}: fit `{name}` unavailable: {e}")),
        }
    };
    try_fit(
        "spectrum".into(),
        spectrum.iter().map(|&(n, e)| (n as f64, e)).collect(),
        cfg.statistics.spectrum_fit,
    );
    for &p in &requests.p_values {
        let points = structure.iter().filter(|s| s.0 == p).map(|s| (s.1, s.2)).collect();
        try_fit(format!("zeta_{p}"), points, cfg.inertial_range(nu));
    }
    if cfg.solver.method == Method::Spectral && requests.p_values.contains(&2.0) {
        let points = structure.iter().filter(|s| s.0 == 2.0).map(|s| (s.1, s.2)).collect();
        try_fit("dissipation_s2".into(), points, cfg.dissipation_range(nu));
    }
    if requests.p_values.contains(&3.0) && requests.p_values.contains(&1.0) {
        let points = requests
            .l_values
            .iter()
            .filter_map(|&l| flatness_ratio(&acc, 3.0, 1.0, l).ok().map(|r| (l, r)))
            .collect();
        try_fit("flatness_3_1".into(), points, cfg.inertial_range(nu));
    }

    let report = NuReport {
        nu,
        max_mode: requests.max_mode,
        trajectories: r,
        failed_trajectories: r - survivors.len(),
        steps,
        samples: acc.count(),
        rejection_failures,
        spectrum,
        structure,
        moments,
        oleinik_trace,
        oleinik: acc.oleinik(),
        fits,
        accumulator: acc,
    };
    write_point(&dir, &report)?;
    Ok(report)
}

fn json_f64(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".into()
    }
}

fn fits_json(fits: &[NamedFit]) -> String {
    let mut s = String::from("{\n");
    for (i, f) in fits.iter().enumerate() {
        let ScalingFit {
            slope,
            intercept,
            r_squared,
            slope_stderr,
            fit_range,
            points,
        } = f.fit;
        let _ = write!(
            s,
            "  \"{}\": {{\"slope\": {}, \"intercept\": {}, \"r_squared\": {}, \"slope_stderr\": {}, \"range\": [{}, {}], \"points\": {}}}",
            f.name,
            json_f64(slope),
            json_f64(intercept),
            json_f64(r_squared),
            json_f64(slope_stderr),
            json_f64(fit_range.0),
            json_f64(fit_range.1),
            points
        );
        s.push_str(if i + 1 < fits.len() { ",\n" } else { "\n" });
    }
    s.push_str("}\n");
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes())
        .and_then(|_| f.sync_all())
        .map_err(|e| Error::io(path, e))
}

fn write_point(dir: &Path, r: &NuReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut spectrum = String::from("n,E_n\n");
    for (n, e) in &r.spectrum {
        let _ = writeln!(spectrum, "{n},{}", fmt_f64(*e));
    }
    write_file(&dir.join("spectrum.csv"), &spectrum)?;

    let mut structure = String::from("p,l,S_p\n");
    for (p, l, s) in &r.structure {
        let _ = writeln!(structure, "{},{},{}", fmt_f64(*p), fmt_f64(*l), fmt_f64(*s));
    }
    write_file(&dir.join("structure.csv"), &structure)?;

    let mut moments = String::from("n,k,value\n");
    for (n, k, v) in &r.moments {
        let _ = writeln!(moments, "{},{},{}", fmt_f64(*n), fmt_f64(*k), fmt_f64(*v));
    }
    write_file(&dir.join("moments.csv"), &moments)?;

    let mut oleinik = String::from("t,u_inf,du_l1,du_plus\n");
    for (t, s) in &r.oleinik_trace {
        let _ = writeln!(
            oleinik,
            "{},{},{},{}",
            fmt_f64(*t),
            fmt_f64(s.u_inf),
            fmt_f64(s.du_l1),
            fmt_f64(s.du_plus)
        );
    }
    write_file(&dir.join("oleinik.csv"), &oleinik)?;
    write_file(&dir.join("fits.json"), &fits_json(&r.fits))
}

fn point_checks(cfg: &ExperimentConfig, p: &NuReport, checks: &mut Vec<Check>) {
    let tag = |name: &str| {
        if cfg.viscosities().len() > 1 {
            format!("{name}@nu={}", p.nu)
        } else {
            name.to_string()
        }
    };
    if let Some(f) = p.fit("spectrum") {
        checks.push(Check::within(tag("spectrum_slope"), f.slope, (-2.3, -1.7), format!("r² = {:.4}", f.r_squared)));
        checks.push(Check::within(tag("spectrum_r2"), f.r_squared, (0.95, 1.0), ""));
    }
    for (p_val, band) in [(0.5, (0.4, 0.6)), (1.0, (0.85, 1.15)), (2.0, (0.8, 1.2)), (3.0, (0.75, 1.25))] {
        if let Some(f) = p.fit(&format!("zeta_{p_val}")) {
            checks.push(Check::within(tag(&format!("zeta_{p_val}")), f.slope, band, format!("law min(1, p), r² = {:.4}", f.r_squared)));
        }
    }
    if let Some(f) = p.fit("dissipation_s2") {
        checks.push(Check::within(tag("dissipation_s2"), f.slope, (1.7, 2.3), "law l²"));
    }
}

fn sweep_checks(points: &[NuReport], sweep_fits: &mut Vec<NamedFit>, checks: &mut Vec<Check>, warnings: &mut Vec<String>) {
    let nus: Vec<f64> = points.iter().map(|p| p.nu).collect();
    let range = (
        nus.iter().cloned().fold(f64::INFINITY, f64::min),
        nus.iter().cloned().fold(0.0, f64::max),
    );
    for (name, n, band) in [("h1_scaling", 1.0, (-1.25, -0.75)), ("h2_scaling", 2.0, (-3.6, -2.4))] {
        let pts: Option<Vec<(f64, f64)>> = points.iter().map(|p| p.moment(n, 2.0).map(|m| (p.nu, m))).collect();
        match pts.map(|pts| fit_power_law(&pts, range)) {
            Some(Ok(fit)) => {
                checks.push(Check::within(name, fit.slope, band, format!("{} viscosities", fit.points)));
                sweep_fits.push(NamedFit { name: name.into(), fit });
            }
            Some(Err(e)) => warnings.push(format!("sweep fit `{name}` unavailable: {e}")),
            None => warnings.push(format!("sweep fit `{name}` needs the ({n}, 2) Sobolev moment")),
        }
    }
    let energy: Option<Vec<f64>> = points.iter().map(|p| p.moment(0.0, 2.0)).collect();
    if let Some(e) = energy {
        let ratio = e.iter().cloned().fold(0.0, f64::max) / e.iter().cloned().fold(f64::INFINITY, f64::min);
        checks.push(Check::within("energy_order_one", ratio, (1.0, 3.0), "max/min of ⟨⟨‖u‖²⟩⟩ over the sweep"));
    }
    // Oleinik stability between viscosities a factor 2 apart.
    let mut sorted: Vec<&NuReport> = points.iter().collect();
    sorted.sort_by(|a, b| b.nu.total_cmp(&a.nu));
    for w in sorted.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        if ((hi.nu / lo.nu) - 2.0).abs() > 1e-9 {
            continue;
        }
        let (a, b) = (hi.oleinik.du_plus, lo.oleinik.du_plus);
        let ratio = a.max(b) / a.min(b);
        checks.push(Check::within(
            format!("oleinik_du_plus@nu={}->{}", hi.nu, lo.nu),
            ratio,
            (1.0, 2.0),
            "sup t·max(∂ₓu)⁺ changes by less than a factor 2",
        ));
    }
    if let (Some(largest), Some(smallest)) = (sorted.first(), sorted.last()) {
        for (name, a, b) in [
            ("oleinik_u_inf_bounded", largest.oleinik.u_inf, smallest.oleinik.u_inf),
            ("oleinik_du_l1_bounded", largest.oleinik.du_l1, smallest.oleinik.du_l1),
        ] {
            checks.push(Check::within(
                name,
                b / a,
                (0.0, 2.0),
                format!("constant {} at ν = {}", fmt_f64(a.max(b)), smallest.nu),
            ));
        }
    }
}

fn report_json(r: &RunReport) -> String {
    serde_json::to_string_pretty(&serde_json::json!({
        "config_hash": r.config_hash,
        "points": r.points.iter().map(|p| serde_json::json!({
            "nu": p.nu,
            "max_mode": p.max_mode,
            "trajectories": p.trajectories,
            "failed_trajectories": p.failed_trajectories,
            "steps": p.steps,
            "samples": p.samples,
            "rejection_failures": p.rejection_failures,
            "oleinik": p.oleinik,
        })).collect::<Vec<_>>(),
        "checks": r.checks,
        "warnings": r.warnings,
        "insufficient_statistics": r.insufficient_statistics,
        "total_steps": r.total_steps,
    }))
    .expect("report serializes")
        + "\n"
}

/// Runs every viscosity of the sweep, writing each point's outputs as soon
/// as it completes.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let started = Instant::now();
    let out = &cfg.output.dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut warnings = Vec::new();
    let insufficient = cfg.averaging.ensemble_size < MIN_ENSEMBLE;
    if insufficient {
        warnings.push(format!(
            "insufficient statistics: ensemble of {} below {MIN_ENSEMBLE}; scaling checks are indicative only",
            cfg.averaging.ensemble_size
        ));
    }
    let mut points = Vec::new();
    for nu in cfg.viscosities() {
        points.push(run_point(cfg, nu, &mut warnings)?);
    }
    let mut checks = Vec::new();
    for p in &points {
        point_checks(cfg, p, &mut checks);
    }
    let mut sweep_fits = Vec::new();
    if points.len() > 1 {
        sweep_checks(&points, &mut sweep_fits, &mut checks, &mut warnings);
        write_file(&out.join("fits.json"), &fits_json(&sweep_fits))?;
    }
    let report = RunReport {
        config_hash: cfg.hash(),
        total_steps: points.iter().map(|p| p.steps).sum(),
        points,
        sweep_fits,
        checks,
        warnings,
        insufficient_statistics: insufficient,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_file(&out.join("report.json"), &report_json(&report))?;
    Ok(report)
}

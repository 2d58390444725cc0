use std::hint::black_box;

use burgers_bench::{forced_config, rough_field};
use burgers_core::solver::NonlinearOperator;
use burgers_core::stats::{StatAccumulator, StatRequests};
use burgers_core::{CylindricalNoiseConfig, CylindricalSampler, DealiasRule, FourierField, Simulation};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn nonlinear_term(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonlinear_term");
    for n in [256usize, 1024] {
        let u = rough_field(n);
        let mut op = NonlinearOperator::new(4 * n, DealiasRule::TWO_THIRDS);
        let mut out = FourierField::zeros(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| op.eval(black_box(u.coeffs()), out.coeffs_mut()).unwrap())
        });
    }
    group.finish();
}

fn noise_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("noise_increment");
    for n in [256usize, 1024] {
        let cfg = CylindricalNoiseConfig::with_defaults(n);
        let mut sampler = CylindricalSampler::new(&cfg, 7, 0).unwrap();
        let mut out = FourierField::zeros(n);
        let mut step = 0u64;
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                step += 1;
                sampler.sample_into(step, 3e-6, &mut out).unwrap();
            })
        });
    }
    group.finish();
}

fn solver_step(c: &mut Criterion) {
    let cfg = forced_config(2e-3);
    let mut sim = Simulation::new(&cfg, 7, 0).unwrap();
    let u0 = rough_field(cfg.max_mode);
    let dt = cfg.stiff_dt();
    c.bench_function("step_forced_nu2e-3", |b| {
        let mut u = u0.clone();
        let mut step = 0u64;
        b.iter(|| {
            step += 1;
            // Restart periodically so the state stays in the benchmarked regime.
            if step % 1000 == 0 {
                u = u0.clone();
            }
            sim.advance(&mut u, step, dt, None).unwrap()
        })
    });
}

fn accumulate(c: &mut Criterion) {
    let n = 1024;
    let mut requests = StatRequests::new(n);
    requests.p_values = vec![0.5, 1.0, 2.0, 3.0];
    requests.l_values = (0..31).map(|i| 1e-4 * 5000f64.powf(i as f64 / 30.0)).collect();
    requests.sobolev = vec![(0.0, 2.0), (1.0, 2.0), (2.0, 2.0)];
    let mut acc = StatAccumulator::new(requests, (0.0, 1.0)).unwrap();
    let u = rough_field(n);
    c.bench_function("accumulate_1024", |b| b.iter(|| acc.accumulate(black_box(&u), 0.5).unwrap()));
}

criterion_group!(benches, nonlinear_term, noise_sampling, solver_step, accumulate);
criterion_main!(benches);

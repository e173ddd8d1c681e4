use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use wavebreak::batch;
use wavebreak::ode;
use wavebreak::theory::T_star;
use wavebreak::{build_profile, run, PhaseVelocity, SlopePair, SolverConfig};

fn omega_grid(n: usize) -> Vec<SlopePair> {
    (0..n)
        .map(|i| {
            let m1 = -2.1 - 5.9 * (i as f64 + 0.5) / n as f64;
            let f = ((i * 37) % n) as f64 / n as f64;
            SlopePair::new(m1, f * (m1 * m1 + m1))
        })
        .collect()
}

fn trajectory(p: &SlopePair) -> Option<f64> {
    let horizon = T_star(*p).ok()? + 1.0;
    ode::integrate(*p, horizon).ok()?.events.blowup
}

fn sweep_run(p: &SlopePair) -> Option<f64> {
    let ic = build_profile(p.m1, p.m2, 40.0, 2.0, 512).ok()?;
    let cfg = SolverConfig {
        max_time: 0.4,
        ..SolverConfig::default()
    };
    run(&ic, &PhaseVelocity::gaussian(1.0).ok()?, &cfg).ok()?.break_time()
}

fn bench_ode(c: &mut Criterion) {
    let mut group = c.benchmark_group("ode_batch");
    for n in [100, 500] {
        let points = omega_grid(n);
        group.bench_with_input(BenchmarkId::new("sequential", n), &points, |b, pts| {
            b.iter(|| batch::map_sequential(black_box(pts), trajectory))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &points, |b, pts| {
            b.iter(|| batch::map_parallel(black_box(pts), trajectory))
        });
    }
    group.finish();
}

fn bench_pde(c: &mut Criterion) {
    let mut group = c.benchmark_group("pde_sweep");
    group.sample_size(10);
    let points: Vec<SlopePair> = omega_grid(8)
        .into_iter()
        .map(|p| SlopePair::new(p.m1.max(-4.0), p.m2.min(2.0)))
        .collect();
    group.bench_function("sequential", |b| {
        b.iter(|| batch::map_sequential(black_box(&points), sweep_run))
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| {
        b.iter(|| batch::map_parallel(black_box(&points), sweep_run))
    });
    group.finish();
}

criterion_group!(benches, bench_ode, bench_pde);
criterion_main!(benches);

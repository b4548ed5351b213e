//! Criterion benchmarks for the solver hot paths: transforms, one flow
//! step, functional evaluation, and a short full 1D solve.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use rnls_core::Complex64;
use rnls_core::dgf::{adaptive_alpha, dgf_step, run_dgf, DgfConfig, StopRule};
use rnls_core::ops::{functionals, Problem};
use rnls_core::{forward_transform, inverse_transform, Field, Grid, GridSpec, ModelParams, Potential};

const PI: f64 = std::f64::consts::PI;

fn sine_problem(n: usize) -> (Arc<Grid>, Problem, Field) {
    let grid = Grid::build(GridSpec::sine_1d(0.0, 1.0, n)).unwrap();
    let params = ModelParams::new(1, 3.0, 1.0, 0.0, -10.0, Potential::Zero).unwrap();
    let prob = Problem::new(params, grid.clone()).unwrap();
    let u = Field::from_fn(&grid, |x| Complex64::new((PI * x[0]).sin(), 0.0));
    (grid, prob, u)
}

fn desk_problem(n: usize) -> (Arc<Grid>, Problem, Field) {
    let grid = Grid::build(GridSpec::fourier_2d((-8.0, -8.0), (8.0, 8.0), (n, n))).unwrap();
    let params = ModelParams::new(
        2,
        3.0,
        100.0,
        0.5,
        -1.0,
        Potential::Harmonic {
            gammas: vec![1.0, 1.0],
        },
    )
    .unwrap();
    let prob = Problem::new(params, grid.clone()).unwrap();
    let u = Field::from_fn(&grid, |x| {
        let z = Complex64::new(x[0], x[1]);
        z * (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp()
    });
    (grid, prob, u)
}

fn bench_transforms(c: &mut Criterion) {
    let (_, _, u1) = sine_problem(128);
    c.bench_function("forward_sine_128", |b| b.iter(|| forward_transform(&u1)));
    let s1 = forward_transform(&u1);
    c.bench_function("inverse_sine_128", |b| b.iter(|| inverse_transform(&s1)));
    let (_, _, u2) = desk_problem(128);
    c.bench_function("forward_fourier_128x128", |b| b.iter(|| forward_transform(&u2)));
}

fn bench_step(c: &mut Criterion) {
    let (_, prob1, u1) = sine_problem(128);
    let a1 = adaptive_alpha(&u1, &prob1);
    c.bench_function("dgf_step_1d_128", |b| b.iter(|| dgf_step(&u1, 0.1, a1, &prob1).unwrap()));
    let (_, prob2, u2) = desk_problem(128);
    let a2 = adaptive_alpha(&u2, &prob2);
    c.bench_function("dgf_step_2d_128x128", |b| {
        b.iter(|| dgf_step(&u2, 0.01, a2, &prob2).unwrap())
    });
}

fn bench_functionals(c: &mut Criterion) {
    let (_, prob, u) = desk_problem(128);
    c.bench_function("functionals_2d_128x128", |b| b.iter(|| functionals(&u, &prob).unwrap()));
}

fn bench_short_solve(c: &mut Criterion) {
    let (grid, prob, u) = sine_problem(64);
    let mut config = DgfConfig::new(0.5, StopRule::MaxResidual, grid.n_points());
    config.max_iters = 50;
    config.record_stride = 50;
    c.bench_function("solve_1d_64_50_steps", |b| {
        b.iter(|| run_dgf(&u, &config, &prob, None).unwrap())
    });
}

criterion_group!(
    benches,
    bench_transforms,
    bench_step,
    bench_functionals,
    bench_short_solve
);
criterion_main!(benches);

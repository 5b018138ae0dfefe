use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hcm_bench::prepared_cases;
use hcm_core::nalgebra::DVector;
use hcm_core::{newton_step, ostrowski_step, FnSystem, HomotopyProblem};

fn registered_cases(c: &mut Criterion) {
    let mut group = c.benchmark_group("track");
    for p in prepared_cases() {
        group.bench_with_input(BenchmarkId::new(p.corrector.name(), &p.id), &p, |b, p| {
            b.iter(|| p.problem.run(black_box(&p.config)).unwrap())
        });
    }
    group.finish();
}

fn single_steps(c: &mut Criterion) {
    let f = || {
        FnSystem::new(
            3,
            |x: &DVector<f64>| x.map(|v| v * v - 4.0),
            |x: &DVector<f64>| hcm_core::nalgebra::DMatrix::from_diagonal(&x.map(|v| 2.0 * v)),
        )
    };
    let problem = HomotopyProblem::new(f(), f()).unwrap();
    let x = DVector::from_vec(vec![3.0, 2.5, 1.5]);
    let mut group = c.benchmark_group("step");
    group.bench_function("newton", |b| b.iter(|| newton_step(&problem, black_box(&x), 0.5).unwrap()));
    group.bench_function("ostrowski", |b| {
        b.iter(|| ostrowski_step(&problem, black_box(&x), 0.5, 1e-14).unwrap())
    });
    group.finish();
}

criterion_group!(benches, registered_cases, single_steps);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rzkbo::families::Gaussian;
use rzkbo::grid::forward_transform_with;
use rzkbo::propagator::LinearGroup;
use rzkbo::solver::{Integrator, SolverParams};
use rzkbo::{Exec, GridSpec};

fn kernels(c: &mut Criterion) {
    let spec = GridSpec::default();
    let phi = Gaussian::unit().sample(spec).unwrap();
    let s = forward_transform_with(&phi, Exec::Sequential).unwrap();
    let group = LinearGroup::new(spec, 1.0).unwrap();
    let p = SolverParams {
        grid: spec,
        ..SolverParams::default()
    };

    let mut g = c.benchmark_group("512x512");
    g.sample_size(20);
    for (name, exec) in [
        ("sequential", Exec::Sequential),
        ("parallel", Exec::Parallel),
    ] {
        g.bench_with_input(BenchmarkId::new("fft", name), &exec, |b, &e| {
            b.iter(|| forward_transform_with(&phi, e).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("group", name), &exec, |b, &e| {
            b.iter(|| group.apply_spectrum_with(&s, 1.0, e).unwrap())
        });
        let integ = Integrator::with_exec(p, exec).unwrap();
        g.bench_function(BenchmarkId::new("etd_step", name), |b| {
            b.iter(|| integ.step_spectrum(&s, 0.01, 0.0).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);

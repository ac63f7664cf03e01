use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use wavelab_bench::{reference_config, reference_state};
use wavelab_core::functionals::hardy_local;
use wavelab_core::mesh::shell_integral;
use wavelab_core::solver::{rhs, step};

const SIZES: [usize; 3] = [2048, 8192, 32768];

fn bench_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("rhs");
    for n in SIZES {
        let cfg = reference_config(n);
        let s = reference_state(&cfg);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| rhs(black_box(&s), &cfg)));
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("rk4_step");
    for n in SIZES {
        let cfg = reference_config(n);
        let s = reference_state(&cfg);
        let dt = cfg.dt_max();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| step(black_box(&s), dt, &cfg)));
    }
    group.finish();
}

fn bench_shell_integral(c: &mut Criterion) {
    let mut group = c.benchmark_group("shell_integral");
    for n in SIZES {
        let grid = reference_config(n).grid;
        let f = grid.sample(|r| (-r * r).exp());
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| shell_integral(&grid, black_box(&f), 0.5, 20.0))
        });
    }
    group.finish();
}

fn bench_hardy(c: &mut Criterion) {
    let cfg = reference_config(8192);
    let s = reference_state(&cfg);
    c.bench_function("hardy_local/8192", |b| b.iter(|| hardy_local(black_box(&s), &cfg.grid, 2.0, -0.2)));
}

criterion_group!(benches, bench_rhs, bench_step, bench_shell_integral, bench_hardy);
criterion_main!(benches);

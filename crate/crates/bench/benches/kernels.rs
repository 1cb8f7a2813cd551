use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use shiftlike_core::correspondence::{semiconjugacy_residual, weights_from_profile};
use shiftlike_core::criteria::{
    dissipative_supercyclicity_verdict, general_condition_search, shift_product_sequence, CellSet, SearchOptions,
    DEFAULT_LOG_TOL,
};
use shiftlike_core::{Complex64, DensityLineSystem, StepFunction, SystemModel};

fn products(c: &mut Criterion) {
    let profile = DensityLineSystem::two_rate_example().profile_from_density(-10_010..=10_010).unwrap();
    let w = weights_from_profile(&profile, 1.0).unwrap();
    let mut group = c.benchmark_group("shift_product_sequence");
    for horizon in [1_000u32, 10_000] {
        group.bench_with_input(BenchmarkId::from_parameter(horizon), &horizon, |b, &h| {
            b.iter(|| shift_product_sequence(black_box(&w), 3, h).unwrap())
        });
    }
    group.finish();
    c.bench_function("dissipative_verdict_q8_h1000", |b| {
        b.iter(|| dissipative_supercyclicity_verdict(black_box(&profile), 8, 1000, DEFAULT_LOG_TOL).unwrap())
    });
}

fn density(c: &mut Criterion) {
    let sys = DensityLineSystem::two_rate_example();
    c.bench_function("profile_from_density_2001", |b| b.iter(|| sys.profile_from_density(-1000..=1000).unwrap()));
    c.bench_function("quadrature_cell_mass", |b| b.iter(|| sys.quadrature_mass(black_box(-0.5), black_box(0.5))));
}

fn operators(c: &mut Criterion) {
    let sys: SystemModel = DensityLineSystem::two_rate_example().into();
    let cells = (-20..=20).flat_map(|k| (0..16u32).map(move |j| ((k, j), Complex64::new(1.0 / (1 + j) as f64, k as f64))));
    let phi = StepFunction::from_cells(2.0, 4, cells).unwrap();
    c.bench_function("semiconjugacy_residual_r4_656_cells", |b| {
        b.iter(|| semiconjugacy_residual(black_box(&phi), &sys).unwrap())
    });
    let b_set = CellSet::whole_cells(-3..=3, 3).unwrap();
    c.bench_function("general_condition_search_eps_1e-6", |b| {
        b.iter(|| general_condition_search(&sys, black_box(&b_set), 1e-6, 200, 2.0, SearchOptions::default()).unwrap())
    });
}

criterion_group!(benches, products, density, operators);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use tubewave_core::phaseplane;
use tubewave_core::plap;
use tubewave_core::{CrossSection, Params, TubeField, TubeGrid};

fn bench_p_laplacian_apply(c: &mut Criterion) {
    let params = Params::new(4.0).unwrap();
    let cs = CrossSection::new(1.0, 17).unwrap();
    let grid = TubeGrid::symmetric(cs, 8.0, 0.125).unwrap();
    let field = TubeField::from_fn(grid, |z, y| {
        0.1 * (std::f64::consts::PI * z).sin() * (-y * y).exp()
    });
    c.bench_function("p_laplacian_apply 129x17", |b| {
        b.iter(|| plap::p_laplacian_apply(black_box(&field), &params, 1e-8))
    });
}

fn bench_fast_orbit(c: &mut Criterion) {
    let params = Params::new(4.0).unwrap();
    c.bench_function("fast_orbit p=4 c=1", |b| {
        b.iter(|| phaseplane::fast_orbit(black_box(1.0), &params, 1e-10).unwrap())
    });
}

criterion_group!(kernels, bench_p_laplacian_apply, bench_fast_orbit);
criterion_main!(kernels);

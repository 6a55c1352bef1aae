use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use monodromy_core::{
    build_framed, coordinates, default_triangulation, degeneracy, find_good, reconstruct, Complex, CoordinateTuple,
    IntegratorConfig, MarkedBorderedSurface, RationalPotential, Realization, Signing,
};

fn tuple(t: &monodromy_core::IdealTriangulation) -> CoordinateTuple {
    CoordinateTuple::from_values(t.arcs().map(|e| (e, Complex::from_polar(1.0 + 0.1 * e as f64, 0.7 * e as f64 + 0.3))))
}

fn cluster(c: &mut Criterion) {
    let mut g = c.benchmark_group("cluster");
    for (name, s) in [
        ("disc8", MarkedBorderedSurface::disc(8)),
        ("torus", MarkedBorderedSurface::punctured_torus()),
        ("sphere4", MarkedBorderedSurface::sphere(4)),
    ] {
        let t = default_triangulation(&s).unwrap().0;
        let x = tuple(&t);
        let f = reconstruct(&t, &x).unwrap();
        g.bench_function(BenchmarkId::new("reconstruct", name), |b| b.iter(|| reconstruct(black_box(&t), &x).unwrap()));
        g.bench_function(BenchmarkId::new("coordinates", name), |b| b.iter(|| coordinates(black_box(&f), &t).unwrap()));
        g.bench_function(BenchmarkId::new("degeneracy", name), |b| b.iter(|| degeneracy(black_box(&f))));
        g.bench_function(BenchmarkId::new("find_good", name), |b| b.iter(|| find_good(black_box(&f), &t).unwrap()));
    }
    g.finish();
}

fn monodromy(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_framed");
    g.sample_size(20);
    let cfg = IntegratorConfig::default();
    for d in [1usize, 3, 5] {
        let mut coeffs: Vec<Complex> = (0..d).map(|k| Complex::new(0.2 * k as f64, -0.1)).collect();
        coeffs.push(Complex::new(1.0, 0.0));
        let phi = RationalPotential::polynomial(coeffs).unwrap();
        g.bench_function(BenchmarkId::new("degree", d), |b| {
            b.iter(|| build_framed(black_box(&phi), &Signing::default(), &Realization::Auto, &cfg).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, cluster, monodromy);
criterion_main!(benches);

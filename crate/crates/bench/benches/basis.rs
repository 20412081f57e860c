use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ps12::basis::SplineFunction;
use ps12::classify::theorem1_list;
use ps12::join::{propagate_into, EdgeJoin};
use ps12::marsden::{quasi_interpolant_coeffs, stability_estimate};
use ps12::simplex::SimplexSplineDef;
use ps12::{Barycentric, BasisInstance, Vector, NUM_BASIS};
use ps12_bench::{points, triangle};

fn instantiate(c: &mut Criterion) {
    let t = triangle();
    c.bench_function("basis_instance_new", |b| b.iter(|| BasisInstance::new(black_box(&t)).unwrap()));
}

fn evaluation(c: &mut Criterion) {
    let t = triangle();
    let basis = BasisInstance::new(&t).unwrap();
    let pts = points(&t, 1000);
    c.bench_function("eval_all_1000_points", |b| {
        b.iter(|| pts.iter().map(|p| basis.eval_all(p).unwrap()[7]).sum::<f64>())
    });
    c.bench_function("eval_all_derivs_order3_100_points", |b| {
        b.iter(|| pts[..100].iter().map(|p| basis.eval_all_derivs(p, 3).unwrap().get(3, 0)[5]).sum::<f64>())
    });
    let s = SplineFunction::new(&basis, [1.0; NUM_BASIS]);
    let dirs = [Vector::x(), Vector::y()];
    c.bench_function("spline_second_derivative_1000_points", |b| {
        b.iter(|| pts.iter().map(|p| s.directional(&dirs, p).unwrap()).sum::<f64>())
    });
    let def = SimplexSplineDef::unit("220211".parse().unwrap(), t.sites()).unwrap();
    c.bench_function("simplex_recurrence_1000_points", |b| b.iter(|| pts.iter().map(|p| def.eval(p)).sum::<f64>()));
}

fn algorithms(c: &mut Criterion) {
    let t = triangle();
    let basis = BasisInstance::new(&t).unwrap();
    c.bench_function("quasi_interpolant_coeffs", |b| {
        b.iter(|| quasi_interpolant_coeffs(&basis, |p| p.x.sin() * p.y.exp()))
    });
    c.bench_function("stability_estimate", |b| b.iter(|| stability_estimate(&basis).unwrap()));
    let join = EdgeJoin::from_beta(t, Barycentric([0.2, 1.1, -0.3])).unwrap();
    let coeffs: [f64; NUM_BASIS] = std::array::from_fn(|j| (j as f64).sin());
    c.bench_function("propagate_c2", |b| {
        b.iter(|| propagate_into(black_box(&coeffs), &join.beta, 2, &coeffs).unwrap())
    });
}

fn classification(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    g.sample_size(10);
    g.bench_function("theorem1_list", |b| b.iter(|| theorem1_list().unwrap()));
    g.finish();
}

criterion_group!(benches, instantiate, evaluation, algorithms, classification);
criterion_main!(benches);

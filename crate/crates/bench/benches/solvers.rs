use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use fock_complex::dbar::{neumann, solve_partial};
use fock_complex::general_d::{
    estimate_constant, solve_canonical_d, solve_canonical_dstar, DOperator,
};
use fock_complex::weighted::moment_quadrature;
use fock_complex::{HoloPoly, PForm};

use fock_complex_bench::{closed_form, sample_form};

fn bench_neumann(c: &mut Criterion) {
    let u = sample_form(7, 3, 2, 6, 6);
    c.bench_function("neumann_n3_p2_deg6", |b| {
        b.iter(|| neumann(black_box(&u)).unwrap())
    });
}

fn bench_solve_partial(c: &mut Criterion) {
    let alpha = closed_form(9, 3, 1, 5);
    c.bench_function("solve_partial_n3_p2", |b| {
        b.iter(|| solve_partial(black_box(&alpha)).unwrap())
    });
}

fn bench_canonical_d(c: &mut Criterion) {
    let d = DOperator::from_strings(&["d1^2"]).unwrap();
    let mut alpha = PForm::zero(1, 1);
    alpha.add_component(&[0], HoloPoly::variable(1, 0));
    c.bench_function("solve_canonical_d_homogeneous", |b| {
        b.iter(|| solve_canonical_d(black_box(&d), black_box(&alpha), 6).unwrap())
    });
}

fn bench_canonical_dstar(c: &mut Criterion) {
    let d = DOperator::from_strings(&["d1^2", "d2^2"]).unwrap();
    let beta = dstar_fixture();
    c.bench_function("solve_canonical_dstar_window8", |b| {
        b.iter(|| solve_canonical_dstar(black_box(&d), black_box(&beta), 8).unwrap())
    });
}

fn dstar_fixture() -> PForm {
    use fock_complex::multi_index::MultiIndex;
    use fock_complex::CRat;
    let mut beta = PForm::zero(2, 1);
    beta.add_component(
        &[0],
        HoloPoly::monomial(MultiIndex::new(vec![0, 2]), CRat::one()),
    );
    beta.add_component(
        &[1],
        HoloPoly::monomial(MultiIndex::new(vec![2, 0]), CRat::one()).neg(),
    );
    beta
}

fn bench_certificate(c: &mut Criterion) {
    let d = DOperator::from_strings(&["d1*d2", "d1^2 + d2^2"]).unwrap();
    c.bench_function("estimate_constant_ga1b_window4", |b| {
        b.iter(|| estimate_constant(black_box(&d), 1, 4).unwrap())
    });
}

fn bench_quadrature(c: &mut Criterion) {
    c.bench_function("moment_quadrature_s3_k8", |b| {
        b.iter(|| moment_quadrature(black_box(1.0), black_box(3), black_box(8)))
    });
}

criterion_group!(
    solvers,
    bench_neumann,
    bench_solve_partial,
    bench_canonical_d,
    bench_canonical_dstar,
    bench_certificate,
    bench_quadrature
);
criterion_main!(solvers);

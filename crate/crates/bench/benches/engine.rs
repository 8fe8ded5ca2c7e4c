use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tautcalc_core::verify::{self, Group, VerifyOptions};
use tautcalc_core::wk_engine::clear_memo;
use tautcalc_core::{b_curve_pairing, parse, wk, MarkedSpace, PsiMoment};

fn correlators(c: &mut Criterion) {
    c.bench_function("wk g=2 cold <t2 t2 t2 t1 t1 t1>", |b| {
        b.iter(|| {
            clear_memo();
            wk(black_box(&PsiMoment::new(2, vec![2, 2, 2, 1, 1, 1]))).unwrap()
        })
    });
    c.bench_function("wk g=2 warm <t4 t3 t2>", |b| {
        b.iter(|| wk(black_box(&PsiMoment::new(2, vec![4, 3, 2]))).unwrap())
    });
}

fn classes(c: &mut Criterion) {
    let s = MarkedSpace::new(2, ["w1", "w2"]).unwrap();
    c.bench_function("integrate H(2,0,0) psi^3", |b| {
        b.iter(|| parse(&s, black_box("H(2,0,0)*psi[w1]^3")).unwrap().integrate().unwrap())
    });
    c.bench_function("b-curve n=2", |b| b.iter(|| b_curve_pairing(black_box(2)).unwrap()));
}

fn suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for g in [Group::Logan, Group::Omega, Group::Ladder] {
        let options = VerifyOptions { only: vec![g], ..VerifyOptions::default() };
        group.bench_function(g.name(), |b| b.iter(|| verify::run(&options)));
    }
    group.finish();
}

criterion_group!(benches, correlators, classes, suite);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ncfactor_core::arith::rat;
use ncfactor_core::linmat::{factor_3x3, quaternion_linmat, search_zero_divisor, verify_cert, zdiv_to_factorization};
use ncfactor_core::oracle::{complete_factorizations, DEFAULT_BUDGET};
use ncfactor_core::{
    reduce_and_recover, Alphabet, Circuit, DenseOracle, Embedding, Field, LinearMatrix, NcPoly, RatMatrix,
    SubstAutomaton, WordMode,
};

fn poly(field: Field, alphabet: Alphabet, s: &str) -> NcPoly {
    NcPoly::parse_inline(field, alphabet, s).unwrap()
}

fn embedding(c: &mut Criterion) {
    let f = poly(Field::Rational, Alphabet::Indexed(4), "x1.x2.x3 + 2*x4.x1 - x2.x2 + 3");
    for mode in [WordMode::Compact, WordMode::Paper] {
        let e = Embedding::from_mode(4, mode).unwrap();
        c.bench_function(&format!("phi_poly/{mode}"), |b| b.iter(|| e.phi_poly(black_box(&f)).unwrap()));
        let image = e.phi_circuit(&Circuit::from_poly(&f)).unwrap();
        let aut = SubstAutomaton::from_embedding(&e).unwrap();
        c.bench_function(&format!("recover_circuit/{mode}"), |b| {
            b.iter(|| aut.recover_circuit(black_box(&image)).unwrap())
        });
    }
}

fn dense(c: &mut Criterion) {
    let f = poly(Field::Prime(2), Alphabet::Bivariate, "x + xyx");
    c.bench_function("complete_factorizations/x+xyx", |b| {
        b.iter(|| complete_factorizations(black_box(&f), DEFAULT_BUDGET).unwrap())
    });
    let g = poly(Field::Prime(2), Alphabet::Indexed(2), "x1.x2.x1 + x1.x2 + x1 + x1.x1");
    let e = Embedding::from_mode(2, WordMode::Compact).unwrap();
    let circuit = Circuit::from_poly(&g);
    c.bench_function("reduce_and_recover/compact", |b| {
        b.iter(|| reduce_and_recover(black_box(&circuit), &e, &DenseOracle::default()).unwrap())
    });
}

fn linear(c: &mut Criterion) {
    let l = LinearMatrix::new(vec![
        RatMatrix::identity(3),
        RatMatrix::from_i64(&[&[2, 0, 0], &[1, 3, 0], &[0, 1, -1]]),
        RatMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[2, 0, 1]]),
    ])
    .unwrap();
    c.bench_function("factor_3x3", |b| b.iter(|| factor_3x3(black_box(&l)).unwrap()));
    let (alpha, beta) = (rat(9), rat(5));
    let q = quaternion_linmat(&alpha, &beta).unwrap();
    c.bench_function("search_zero_divisor/(9,5)", |b| {
        b.iter(|| search_zero_divisor(black_box(&alpha), &beta, 5).unwrap())
    });
    let z = search_zero_divisor(&alpha, &beta, 5).unwrap().unwrap();
    c.bench_function("zdiv_to_factorization+verify", |b| {
        b.iter(|| {
            let cert = zdiv_to_factorization(black_box(&z)).unwrap();
            assert!(verify_cert(&cert, &q).unwrap());
        })
    });
}

criterion_group!(benches, embedding, dense, linear);
criterion_main!(benches);

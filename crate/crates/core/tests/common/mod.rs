#![allow(dead_code)]

use povmrt_core::{Complex64, HermitianOperator, Povm, RngSeed, Tolerances};
use povmrt_core::randgen::{random_povm, random_projective};
use proptest::prelude::*;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn hermitian(max_dim: usize) -> impl Strategy<Value = HermitianOperator> {
    (1..=max_dim).prop_flat_map(|d| {
        prop::collection::vec(-1.0f64..1.0, 2 * d * d).prop_map(move |raw| {
            let entries = (0..d * d).map(|k| Complex64::new(raw[2 * k], raw[2 * k + 1])).collect();
            HermitianOperator::symmetrized(d, entries)
        })
    })
}

pub fn hermitian_of_dim(d: usize) -> impl Strategy<Value = HermitianOperator> {
    prop::collection::vec(-1.0f64..1.0, 2 * d * d).prop_map(move |raw| {
        let entries = (0..d * d).map(|k| Complex64::new(raw[2 * k], raw[2 * k + 1])).collect();
        HermitianOperator::symmetrized(d, entries)
    })
}

/// Random POVM with `dims` and `outcomes` bounds, drawn through a seed.
pub fn povm(max_dim: usize, max_outcomes: usize) -> impl Strategy<Value = Povm> {
    (1..=max_dim, 1..=max_outcomes, any::<u64>())
        .prop_map(|(d, n, s)| random_povm(d, n, RngSeed(s)).expect("normalizer"))
}

/// Seeded POVM that is projective every third seed.
pub fn seeded_povm(d: usize, n: usize, seed: u64) -> Povm {
    if seed.is_multiple_of(3) {
        random_projective(d, RngSeed(seed))
    } else {
        random_povm(d, n, RngSeed(seed)).expect("normalizer")
    }
}

/// Dense complex matrix product, row-major.
pub fn matmul(a: &[Complex64], b: &[Complex64], d: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            for j in 0..d {
                out[i * d + j] += a[i * d + k] * b[k * d + j];
            }
        }
    }
    out
}

pub fn max_povm_diff(a: &Povm, b: &Povm) -> f64 {
    assert_eq!(a.len(), b.len());
    a.elements()
        .iter()
        .zip(b.elements())
        .map(|(x, y)| x.max_abs_diff(y))
        .fold(0.0, f64::max)
}

mod common;

use common::{hermitian, hermitian_of_dim, povm, tol};
use povmrt_core::order::{class_equal, equivalent, precedes};
use povmrt_core::randgen::haar_unitary;
use povmrt_core::{Complex64, HermitianOperator, Povm, RngSeed};
use proptest::prelude::*;

fn naive_kron(a: &HermitianOperator, b: &HermitianOperator) -> Vec<Complex64> {
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let mut out = vec![Complex64::new(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            out[r * d + c] = a.get(r / db, c / db) * b.get(r % db, c % db);
        }
    }
    out
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Permutation matrix taking `|i>|j>` on `C^a (x) C^b` to `|j>|i>`.
fn swap(a: usize, b: usize) -> Vec<Complex64> {
    let d = a * b;
    let mut u = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..a {
        for j in 0..b {
            u[(j * a + i) * d + (i * b + j)] = Complex64::new(1.0, 0.0);
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eig_reconstructs(a in hermitian(8)) {
        let s = a.eig();
        prop_assert!(s.reconstruct().max_abs_diff(&a) <= 1e-8);
        for w in s.eigenvalues.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        let trace: f64 = s.eigenvalues.iter().sum();
        prop_assert!((trace - a.trace()).abs() <= 1e-10);
        for (i, u) in s.eigenvectors.iter().enumerate() {
            for (j, v) in s.eigenvectors.iter().enumerate() {
                let ip: Complex64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((ip - expect).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn norm_is_a_norm((a, b) in (1usize..=4).prop_flat_map(|d| (hermitian_of_dim(d), hermitian_of_dim(d))), c in -3.0f64..3.0) {
        let sum = &a + &b;
        prop_assert!(sum.operator_norm() <= a.operator_norm() + b.operator_norm() + 1e-10);
        prop_assert!((a.scale(c).operator_norm() - c.abs() * a.operator_norm()).abs() <= 1e-10);
    }

    #[test]
    fn tensor_matches_index_formula(a in hermitian(3), b in hermitian(3)) {
        prop_assert!(max_diff(a.tensor(&b).entries(), &naive_kron(&a, &b)) <= 1e-15);
        prop_assert!((a.tensor(&b).trace() - a.trace() * b.trace()).abs() <= 1e-12);
    }

    #[test]
    fn tensor_is_associative(a in hermitian(2), b in hermitian(2), c in hermitian(2)) {
        let left = a.tensor(&b).tensor(&c);
        let right = a.tensor(&b.tensor(&c));
        prop_assert!(left.max_abs_diff(&right) <= 1e-14);
    }

    #[test]
    fn partial_trace_of_product(x in hermitian(3), y in hermitian(3)) {
        let reduced = x.tensor(&y).partial_trace_b(x.dim(), y.dim()).unwrap();
        prop_assert!(reduced.max_abs_diff(&x.scale(y.trace())) <= 1e-12);
    }

    #[test]
    fn partial_trace_keeps_trace((da, db, m) in (1usize..=3, 1usize..=3).prop_flat_map(|(da, db)| (Just(da), Just(db), hermitian_of_dim(da * db)))) {
        let reduced = m.partial_trace_b(da, db).unwrap();
        prop_assert!((reduced.trace() - m.trace()).abs() <= 1e-12);
    }

    #[test]
    fn unitary_conjugation_keeps_spectrum(a in hermitian(4), seed in any::<u64>()) {
        let u = haar_unitary(&mut RngSeed(seed).rng(), a.dim());
        let b = a.conjugate_by(&u);
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn proportional_recovers_scale(a in hermitian(3), c in 0.01f64..10.0) {
        prop_assume!(a.max_abs() > 1e-3);
        let psd = a.spectral_map(|x| x * x);
        let r = psd.scale(c).proportional(&psd, 1e-8).unwrap();
        prop_assert!((r - c).abs() <= 1e-8 * c.max(1.0));
    }

    #[test]
    fn canonicalize_is_idempotent(e in povm(3, 5)) {
        let t = tol();
        let once = e.canonicalize(&t);
        let twice = once.as_povm().canonicalize(&t);
        prop_assert!(once.approx_eq(&twice, 1e-12));
    }

    #[test]
    fn canonicalize_ignores_order_zeros_and_splits(e in povm(3, 5), seed in any::<u64>(), w in 0.05f64..0.95) {
        let t = tol();
        let mut order: Vec<usize> = (0..e.len()).collect();
        let mut h = seed;
        for i in (1..order.len()).rev() {
            h = h.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (h >> 33) as usize % (i + 1));
        }
        let shuffled = e.permuted(&order).unwrap().with_zero_appended();
        let mut split = shuffled.elements().to_vec();
        let first = split.remove(0);
        split.push(first.scale(w));
        split.push(first.scale(1.0 - w));
        let split = Povm::new(split, &t).unwrap();
        prop_assert!(e.canonicalize(&t).approx_eq(&split.canonicalize(&t), 1e-8));
        prop_assert!(class_equal(&e, &split, &t));
    }

    #[test]
    fn reduced_measurement_is_complete(e in povm(2, 4), f in povm(2, 3)) {
        let t = tol();
        let joint = e.tensor(&f);
        let reduced = joint.reduce_a(e.dim(), f.dim()).unwrap();
        Povm::new(reduced.elements().to_vec(), &t).unwrap();
        // (1/d_B) Tr_B (E_i (x) F_j) = Tr(F_j)/d_B E_i: a post-processing of E and back.
        prop_assert!(equivalent(&reduced, &e, &t).unwrap());
    }

    #[test]
    fn tensor_swap_symmetry(e in povm(2, 3), f in povm(3, 3)) {
        let (a, b) = (e.dim(), f.dim());
        let u = swap(a, b);
        let ef = e.tensor(&f).conjugate_by(&u);
        let fe = f.tensor(&e);
        // Outcome (i, j) of E (x) F corresponds to outcome (j, i) of F (x) E.
        for i in 0..e.len() {
            for j in 0..f.len() {
                let x = &ef.elements()[i * f.len() + j];
                let y = &fe.elements()[j * e.len() + i];
                prop_assert!(x.max_abs_diff(y) <= 1e-12);
            }
        }
        let id = HermitianOperator::identity(a * b);
        prop_assert!(id.conjugate_by(&u).max_abs_diff(&id) <= 1e-15);
    }

    #[test]
    fn refinement_is_extremal_and_finer(e in povm(3, 4)) {
        let t = tol();
        let fine = e.rank1_refinement();
        let fine = Povm::new(fine.into_elements(), &t).unwrap();
        prop_assert!(fine.is_extremal(&t));
        prop_assert!(precedes(&fine, &e, &t).unwrap().feasible);
    }
}

#[test]
fn tensor_with_one_dimensional_identity() {
    let t = tol();
    let e = povmrt_core::randgen::random_povm(3, 4, RngSeed(8)).unwrap();
    let padded = e.tensor(&Povm::trivial(1));
    assert!(class_equal(&padded, &e, &t));
    let doubled = e.tensor(&Povm::trivial(2));
    assert!(class_equal(&doubled.reduce_a(3, 2).unwrap(), &e, &t));
}

#[test]
fn bell_measurement_reduces_to_trivial() {
    let t = tol();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let r = Complex64::new(h, 0.0);
    let bell = [
        vec![r, z, z, r],
        vec![r, z, z, -r],
        vec![z, r, r, z],
        vec![z, r, -r, z],
    ];
    let povm = Povm::new(bell.iter().map(|v| HermitianOperator::projector(v)).collect(), &t).unwrap();
    assert!(povm.is_extremal(&t));
    let reduced = povm.reduce_a(2, 2).unwrap();
    assert!(class_equal(&reduced, &Povm::trivial(2), &t));
}

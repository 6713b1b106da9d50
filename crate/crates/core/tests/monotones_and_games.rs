mod common;

use common::{seeded_povm, tol};
use povmrt_core::discrimination::{canonical_success, posterior_success, witness_search, WitnessSearch};
use povmrt_core::monotones::{banaszek, buscemi, maccone, skrzypczyk};
use povmrt_core::order::precedes;
use povmrt_core::randgen::{random_ensemble, random_projective, random_state, random_stochastic};
use povmrt_core::{Complex64, Ensemble, HermitianOperator, MonotoneReport, Povm, RngSeed, StatePovmPair, StochasticMatrix};
use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

fn seed(label: u64, k: u64) -> RngSeed {
    RngSeed(label).derive(k)
}

fn report(rho: &HermitianOperator, e: &Povm) -> MonotoneReport {
    let pair = StatePovmPair::new(rho.clone(), e.clone(), &tol()).unwrap();
    MonotoneReport::compute(&pair, &tol()).unwrap()
}

#[test]
fn monotones_never_increase_under_mixing() {
    for k in 0..500 {
        let d = 1 + (k % 4) as usize;
        let e = seeded_povm(d, 1 + (k % 6) as usize, seed(1, k).0);
        let p = random_stochastic(1 + (k % 5) as usize, e.len(), seed(2, k));
        let rho = random_state(d, k % 5 == 0, seed(3, k));
        let before = report(&rho, &e);
        let after = report(&rho, &p.apply(&e).unwrap());
        for ((name, b), (_, a)) in before.as_array().iter().zip(after.as_array()) {
            assert!(a <= b + 1e-8, "trial {k}: {name} rose from {b} to {a}");
        }
    }
}

#[test]
fn monotones_are_class_constants() {
    let t = tol();
    for k in 0..200 {
        let d = 1 + (k % 4) as usize;
        let e = seeded_povm(d, 1 + (k % 5) as usize, seed(4, k).0);
        // A zero outcome plus a split of the first outcome stays in the class.
        let mut elements = e.elements().to_vec();
        let first = elements.remove(0);
        elements.push(first.scale(0.35));
        elements.push(first.scale(0.65));
        elements.push(HermitianOperator::zeros(d));
        let noisy = Povm::new(elements, &t).unwrap();
        let canonical = noisy.canonicalize(&t).into_povm();
        let rho = random_state(d, false, seed(5, k));
        for other in [&noisy, &canonical] {
            for ((name, x), (_, y)) in report(&rho, &e).as_array().iter().zip(report(&rho, other).as_array()) {
                assert!((x - y).abs() <= 1e-9, "trial {k}: {name} {x} vs {y}");
            }
        }
    }
}

#[test]
fn operator_norm_measures_bounds_and_identity() {
    for k in 0..300 {
        let d = 1 + (k % 4) as usize;
        let e = seeded_povm(d, 1 + (k % 7) as usize, seed(6, k).0);
        let skr = skrzypczyk(&e);
        assert!(skr >= -1e-12 && skr <= d as f64 - 1.0 + 1e-12);
        let df = d as f64;
        assert!((banaszek(&e) - (df + 1.0 + skr) / (df * (df + 1.0))).abs() <= 1e-10);
    }
    for d in 1..=4 {
        assert!(skrzypczyk(&Povm::trivial(d)).abs() <= 1e-14);
        let proj = random_projective(d, RngSeed(d as u64));
        assert!((skrzypczyk(&proj) - (d as f64 - 1.0)).abs() <= 1e-10);
    }
    let mixed = StatePovmPair::maximally_mixed(Povm::computational_basis(2));
    assert!((maccone(&mixed, &tol()).unwrap() - LN_2).abs() <= 1e-12);
    assert!((buscemi(&mixed, &tol()).unwrap() - LN_2).abs() <= 1e-12);
}

#[test]
fn monotones_respect_the_order() {
    let t = tol();
    let mut compared = 0;
    for k in 0..200 {
        let d = 2;
        let e = seeded_povm(d, 2 + (k % 3) as usize, seed(7, k).0);
        let f = seeded_povm(d, 1 + (k % 3) as usize, seed(8, k).0);
        if !precedes(&e, &f, &t).unwrap().feasible {
            continue;
        }
        compared += 1;
        let rho = random_state(d, false, seed(9, k));
        for ((name, x), (_, y)) in report(&rho, &e).as_array().iter().zip(report(&rho, &f).as_array()) {
            assert!(y <= x + 1e-8, "trial {k}: {name}");
        }
    }
    assert!(compared > 0);
}

fn ket(a: f64, b: f64) -> Vec<Complex64> {
    vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
}

/// Best equal-prior success for `{|0>, |+>}` over real projective measurements
/// `{|t><t|, |t_perp><t_perp|}`: a fine angle grid refined by golden-section search.
fn helstrom_scan() -> (f64, f64) {
    let rho0 = HermitianOperator::projector(&ket(1.0, 0.0));
    let rho1 = HermitianOperator::projector(&ket(FRAC_1_SQRT_2, FRAC_1_SQRT_2));
    let value = |theta: f64| {
        let t = ket(theta.cos(), theta.sin());
        let tp = ket(-theta.sin(), theta.cos());
        0.5 * (rho0.expectation(&t) + rho1.expectation(&tp))
    };
    let steps = 20_000;
    let (mut best, mut arg) = (f64::MIN, 0.0);
    for s in 0..steps {
        let theta = std::f64::consts::PI * s as f64 / steps as f64;
        let v = value(theta);
        if v > best {
            best = v;
            arg = theta;
        }
    }
    let h = std::f64::consts::PI / steps as f64;
    let (mut lo, mut hi) = (arg - h, arg + h);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if value(x1) < value(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let theta = 0.5 * (lo + hi);
    (value(theta), theta)
}

#[test]
fn helstrom_value_for_zero_and_plus() {
    let t = tol();
    let (scan, theta) = helstrom_scan();
    let analytic = 0.5 * (1.0 + FRAC_1_SQRT_2);
    assert!((scan - analytic).abs() <= 1e-6, "{scan} vs {analytic}");
    let optimal = Povm::new(
        vec![
            HermitianOperator::projector(&ket(theta.cos(), theta.sin())),
            HermitianOperator::projector(&ket(-theta.sin(), theta.cos())),
        ],
        &t,
    )
    .unwrap();
    let ens = Ensemble::new(
        vec![0.5, 0.5],
        vec![
            HermitianOperator::projector(&ket(1.0, 0.0)),
            HermitianOperator::projector(&ket(FRAC_1_SQRT_2, FRAC_1_SQRT_2)),
        ],
        &t,
    )
    .unwrap();
    let game = posterior_success(&optimal, &ens, &t).unwrap();
    assert!((game.success - analytic).abs() <= 1e-6);
    // No measurement from a random family beats the bound.
    for k in 0..200 {
        let e = seeded_povm(2, 2 + (k % 3) as usize, seed(10, k).0);
        assert!(posterior_success(&e, &ens, &t).unwrap().success <= analytic + 1e-9);
    }
}

#[test]
fn success_never_increases_under_mixing() {
    let t = tol();
    for k in 0..1000 {
        let d = 1 + (k % 3) as usize;
        let e = seeded_povm(d, 1 + (k % 5) as usize, seed(11, k).0);
        let p = random_stochastic(1 + (k % 4) as usize, e.len(), seed(12, k));
        let ens = random_ensemble(d, 1 + (k % 4) as usize, k % 2 == 0, seed(13, k));
        let before = posterior_success(&e, &ens, &t).unwrap().success;
        let after = posterior_success(&p.apply(&e).unwrap(), &ens, &t).unwrap().success;
        assert!(after <= before + 1e-9, "trial {k}: {after} > {before}");
        assert!(before >= ens.max_prior() - 1e-12);
        if e.len() == ens.len() {
            assert!(canonical_success(&e, &ens).unwrap() <= before + 1e-12);
        }
    }
}

#[test]
fn equivalent_measurements_win_equally() {
    let t = tol();
    for k in 0..200 {
        let d = 1 + (k % 3) as usize;
        let e = seeded_povm(d, 1 + (k % 4) as usize, seed(14, k).0);
        let canonical = e.with_zero_appended().canonicalize(&t).into_povm();
        let ens = random_ensemble(d, 3, false, seed(15, k));
        let a = posterior_success(&e, &ens, &t).unwrap().success;
        let b = posterior_success(&canonical, &ens, &t).unwrap().success;
        assert!((a - b).abs() <= 1e-10);
    }
}

#[test]
fn fixed_labelling_can_gain_from_relabelling() {
    let t = tol();
    let z = Povm::computational_basis(2);
    let swapped = z.permuted(&[1, 0]).unwrap();
    let ens = Ensemble::new(
        vec![0.5, 0.5],
        vec![HermitianOperator::basis_projector(2, 0), HermitianOperator::basis_projector(2, 1)],
        &t,
    )
    .unwrap();
    let relabel = StochasticMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1e-9).unwrap();
    let relabelled = relabel.apply(&swapped).unwrap();
    assert_eq!(canonical_success(&swapped, &ens).unwrap(), 0.0);
    assert_eq!(canonical_success(&relabelled, &ens).unwrap(), 1.0);
    assert_eq!(posterior_success(&swapped, &ens, &t).unwrap().success, 1.0);
}

#[test]
fn witnesses_for_anchor_pairs() {
    let t = tol();
    let pairs = [
        (Povm::trivial(2), Povm::computational_basis(2)),
        (Povm::computational_basis(2), Povm::qubit_x_basis()),
    ];
    for (e, f) in &pairs {
        let w = witness_search(e, f, WitnessSearch::new(f.len()), &t).unwrap().expect("witness");
        assert!(w.gap() >= 0.4);
        assert!(w.rounds <= 200);
        // Recompute both successes from scratch on the returned ensemble.
        let se = posterior_success(e, &w.ensemble, &t).unwrap().success;
        let sf = posterior_success(f, &w.ensemble, &t).unwrap().success;
        assert!((se - w.success_source).abs() <= 1e-12);
        assert!((sf - w.success_target).abs() <= 1e-12);
    }
}

#[test]
fn witnesses_for_random_incomparable_pairs() {
    let t = tol();
    let (mut tried, mut found) = (0, 0);
    let mut k = 0;
    while tried < 50 {
        let e = seeded_povm(2, 2 + (k % 3) as usize, seed(16, k).0);
        let f = seeded_povm(2, 2 + (k % 2) as usize, seed(17, k).0);
        k += 1;
        if precedes(&e, &f, &t).unwrap().feasible {
            continue;
        }
        tried += 1;
        if let Some(w) = witness_search(&e, &f, WitnessSearch::new(f.len()), &t).unwrap() {
            let se = posterior_success(&e, &w.ensemble, &t).unwrap().success;
            let sf = posterior_success(&f, &w.ensemble, &t).unwrap().success;
            assert!(sf - se > 1e-6);
            found += 1;
        }
    }
    assert!(found >= 40, "{found}/50");
}

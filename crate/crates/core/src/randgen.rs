//! Seeded random generation of test objects.
//!
//! Every generator takes an [`RngSeed`] and builds a fresh ChaCha8 stream from it, so a
//! given seed reproduces the same object on a given build. [`RngSeed::derive`] splits a
//! master seed into independent-looking sub-seeds (SplitMix64 finalizer) for sweeps.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::discrimination::Ensemble;
use crate::error::{Error, Result};
use crate::operator::{self, HermitianOperator};
use crate::povm::Povm;
use crate::stochastic::StochasticMatrix;

const NORMALIZER_RETRIES: usize = 10;
const NORMALIZER_MIN_EIGENVALUE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Sub-seed for stream `index`.
    pub fn derive(self, index: u64) -> RngSeed {
        RngSeed(splitmix64(self.0 ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15))))
    }

    /// Sub-seed keyed by a label, stable across builds.
    pub fn derive_label(self, label: &str) -> RngSeed {
        // FNV-1a
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in label.bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        self.derive(h)
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Flat Dirichlet sample of length `n` (normalized exponentials).
pub fn dirichlet<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            return draws.into_iter().map(|x| x / total).collect();
        }
    }
}

/// Haar-random unitary (row-major), via Gram-Schmidt QR of a complex Ginibre matrix.
///
/// Gram-Schmidt produces an `R` with positive real diagonal, which is the phase fix that
/// makes the `Q` factor Haar distributed.
pub fn haar_unitary<R: Rng>(rng: &mut R, d: usize) -> Vec<Complex64> {
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..d)
            .map(|_| (0..d).map(|_| complex_gaussian(rng)).collect())
            .collect();
        let mut ok = true;
        for k in 0..d {
            let (done, rest) = cols.split_at_mut(k);
            let col = &mut rest[0];
            for prev in done.iter() {
                let proj: Complex64 = prev.iter().zip(col.iter()).map(|(p, c)| p.conj() * c).sum();
                for (c, p) in col.iter_mut().zip(prev) {
                    *c -= proj * p;
                }
            }
            let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                ok = false;
                break;
            }
            for z in &mut cols[k] {
                *z /= norm;
            }
        }
        if ok {
            let mut u = vec![Complex64::new(0.0, 0.0); d * d];
            for (j, col) in cols.iter().enumerate() {
                for (i, z) in col.iter().enumerate() {
                    u[i * d + j] = *z;
                }
            }
            return u;
        }
    }
}

fn haar_state<R: Rng>(rng: &mut R, d: usize) -> Vec<Complex64> {
    let u = haar_unitary(rng, d);
    (0..d).map(|i| u[i * d]).collect()
}

fn wishart<R: Rng>(rng: &mut R, d: usize, cols: usize) -> HermitianOperator {
    let a: Vec<Complex64> = (0..d * cols).map(|_| complex_gaussian(rng)).collect();
    let mut g = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            g[i * d + j] = (0..cols).map(|k| a[i * cols + k] * a[j * cols + k].conj()).sum();
        }
    }
    HermitianOperator::symmetrized(d, g)
}

/// Rank-1 projective measurement onto the columns of a Haar-random unitary.
pub fn random_projective(d: usize, seed: RngSeed) -> Povm {
    assert!(d >= 1, "dimension must be positive");
    let mut rng = seed.rng();
    let u = haar_unitary(&mut rng, d);
    let elements = (0..d)
        .map(|j| {
            let col: Vec<Complex64> = (0..d).map(|i| u[i * d + j]).collect();
            HermitianOperator::projector(&col)
        })
        .collect();
    Povm::from_parts_unchecked(d, elements)
}

/// General `n`-outcome POVM: `E_i = S^{-1/2} G_i S^{-1/2}` with Wishart `G_i`, `S = sum G_i`.
pub fn random_povm(d: usize, n: usize, seed: RngSeed) -> Result<Povm> {
    assert!(d >= 1 && n >= 1, "dimension and outcome count must be positive");
    let mut rng = seed.rng();
    for _ in 0..=NORMALIZER_RETRIES {
        let gs: Vec<HermitianOperator> = (0..n).map(|_| wishart(&mut rng, d, d)).collect();
        let total = operator::sum(d, &gs);
        let spectrum = total.eig();
        if spectrum.min() < NORMALIZER_MIN_EIGENVALUE {
            continue;
        }
        let inv_sqrt = total.spectral_map(|x| 1.0 / x.sqrt());
        let m = inv_sqrt.entries().to_vec();
        let elements = gs.iter().map(|g| g.conjugate_by(&m)).collect();
        return Ok(Povm::from_parts_unchecked(d, elements));
    }
    Err(Error::SingularNormalizer {
        retries: NORMALIZER_RETRIES,
    })
}

/// `m x n` stochastic matrix with flat-Dirichlet columns.
pub fn random_stochastic(m: usize, n: usize, seed: RngSeed) -> StochasticMatrix {
    assert!(m >= 1 && n >= 1, "shape must be positive");
    let mut rng = seed.rng();
    let columns: Vec<Vec<f64>> = (0..n).map(|_| dirichlet(&mut rng, m)).collect();
    let mut data = vec![0.0; m * n];
    for (j, col) in columns.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            data[i * n + j] = *x;
        }
    }
    StochasticMatrix::from_raw(m, n, data)
}

/// Random density matrix: Haar pure state or trace-normalized Wishart.
pub fn random_state(d: usize, pure: bool, seed: RngSeed) -> HermitianOperator {
    let mut rng = seed.rng();
    random_state_from(&mut rng, d, pure)
}

fn random_state_from<R: Rng>(rng: &mut R, d: usize, pure: bool) -> HermitianOperator {
    if pure {
        HermitianOperator::projector(&haar_state(rng, d))
    } else {
        let w = wishart(rng, d, d);
        let tr = w.trace();
        w.scale(1.0 / tr)
    }
}

/// `k` states with Dirichlet priors.
pub fn random_ensemble(d: usize, k: usize, pure: bool, seed: RngSeed) -> Ensemble {
    assert!(d >= 1 && k >= 1, "dimension and ensemble size must be positive");
    let mut rng = seed.rng();
    let priors = dirichlet(&mut rng, k);
    let states = (0..k).map(|_| random_state_from(&mut rng, d, pure)).collect();
    Ensemble::from_parts_unchecked(priors, states)
}

//! Information-gain measures that never increase under post-processing.
//!
//! Entropies use the natural logarithm; [`MonotoneReport::in_bits`] converts the two
//! entropic measures. Outcomes whose probability is at most `tol.prob` carry no
//! information and are skipped.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discrimination::validate_state;
use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::povm::Povm;
use crate::tolerance::Tolerances;

/// Eigenvalues below this are an error when taking an entropy; above it they are clamped.
const ENTROPY_NEGATIVE_TOL: f64 = 1e-8;

/// A density operator paired with the measurement applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePovmPair {
    rho: HermitianOperator,
    povm: Povm,
}

impl StatePovmPair {
    pub fn new(rho: HermitianOperator, povm: Povm, tol: &Tolerances) -> Result<Self> {
        if rho.dim() != povm.dim() {
            return Err(Error::DimensionMismatch {
                expected: povm.dim(),
                found: rho.dim(),
            });
        }
        validate_state(&rho, tol)?;
        Ok(StatePovmPair { rho, povm })
    }

    /// Pairs `povm` with the maximally mixed state.
    pub fn maximally_mixed(povm: Povm) -> Self {
        let d = povm.dim();
        StatePovmPair {
            rho: HermitianOperator::identity(d).scale(1.0 / d as f64),
            povm,
        }
    }

    pub fn rho(&self) -> &HermitianOperator {
        &self.rho
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub maccone: f64,
    pub buscemi: f64,
    pub banaszek: f64,
    pub skrzypczyk: f64,
}

impl MonotoneReport {
    pub fn compute(pair: &StatePovmPair, tol: &Tolerances) -> Result<Self> {
        Ok(MonotoneReport {
            maccone: maccone(pair, tol)?,
            buscemi: buscemi(pair, tol)?,
            banaszek: banaszek(&pair.povm),
            skrzypczyk: skrzypczyk(&pair.povm),
        })
    }

    /// Converts the entropic measures from nats to bits.
    pub fn in_bits(self) -> Self {
        MonotoneReport {
            maccone: self.maccone / std::f64::consts::LN_2,
            buscemi: self.buscemi / std::f64::consts::LN_2,
            ..self
        }
    }

    pub fn as_array(&self) -> [(&'static str, f64); 4] {
        [
            ("maccone", self.maccone),
            ("buscemi", self.buscemi),
            ("banaszek", self.banaszek),
            ("skrzypczyk", self.skrzypczyk),
        ]
    }
}

/// Shannon entropy in nats with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// Von Neumann entropy in nats from the spectrum.
pub fn von_neumann_entropy(rho: &HermitianOperator) -> Result<f64> {
    let ev = rho.eigenvalues();
    if let Some(&bad) = ev.iter().find(|&&x| x < -ENTROPY_NEGATIVE_TOL) {
        return Err(Error::NegativeSpectrum(bad));
    }
    let clamped: Vec<f64> = ev.iter().map(|x| x.clamp(0.0, 1.0)).collect();
    Ok(shannon_entropy(&clamped))
}

/// Mutual information between the eigenbasis of `rho` and the measurement outcome.
pub fn maccone(pair: &StatePovmPair, tol: &Tolerances) -> Result<f64> {
    let spectrum = pair.rho.eig();
    let lambda: Vec<f64> = spectrum.eigenvalues.iter().map(|x| x.max(0.0)).collect();
    let mut conditional = 0.0;
    for e in pair.povm.elements() {
        let p = pair.rho.trace_product(e);
        if p <= tol.prob {
            continue;
        }
        let q: Vec<f64> = lambda
            .iter()
            .zip(&spectrum.eigenvectors)
            .map(|(l, v)| (l * e.expectation(v) / p).max(0.0))
            .collect();
        conditional += p * shannon_entropy(&q);
    }
    Ok(shannon_entropy(&lambda) - conditional)
}

/// Quantum mutual information between a purifying reference and the outcome register.
pub fn buscemi(pair: &StatePovmPair, tol: &Tolerances) -> Result<f64> {
    let spectrum = pair.rho.eig();
    let lambda: Vec<f64> = spectrum.eigenvalues.iter().map(|x| x.max(0.0)).collect();
    let sqrt_lambda: Vec<f64> = lambda.iter().map(|x| x.sqrt()).collect();
    let vecs = &spectrum.eigenvectors;
    let d = lambda.len();
    let mut conditional = 0.0;
    for e in pair.povm.elements() {
        let p = pair.rho.trace_product(e);
        if p <= tol.prob {
            continue;
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for k in 0..d {
            for l in 0..d {
                // Tr(F |psi_k><psi_l|) = <psi_l|F|psi_k>
                entries[k * d + l] = e.sandwich(&vecs[l], &vecs[k]) * (sqrt_lambda[k] * sqrt_lambda[l] / p);
            }
        }
        let reference = HermitianOperator::symmetrized(d, entries);
        conditional += p * von_neumann_entropy(&reference)?;
    }
    Ok(shannon_entropy(&lambda) - conditional)
}

/// Average fidelity-based information gain: `(d + sum_i ||E_i||) / (d (d + 1))`.
pub fn banaszek(povm: &Povm) -> f64 {
    let d = povm.dim() as f64;
    (d + norm_sum(povm)) / (d * (d + 1.0))
}

/// Robustness of measurement: `sum_i ||E_i|| - 1`.
pub fn skrzypczyk(povm: &Povm) -> f64 {
    norm_sum(povm) - 1.0
}

fn norm_sum(povm: &Povm) -> f64 {
    povm.elements().iter().map(HermitianOperator::operator_norm).sum()
}

//! POVMs and their structural operations.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::operator::{self, HermitianOperator};
use crate::tolerance::Tolerances;

/// A finite ordered list of PSD operators summing to the identity.
///
/// Zero elements are allowed; appending one is a reversible free operation.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

/// Canonical representative of an equivalence class: no zero elements, no two
/// proportional elements, sorted by the canonical key.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalPovm(Povm);

/// Per-element diagnostics reported by [`validation_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub dim: usize,
    pub min_eigenvalues: Vec<f64>,
    pub completeness_residual: f64,
}

/// Computes the residuals used by validation without rejecting anything.
pub fn validation_report(elements: &[HermitianOperator]) -> Result<ValidationReport> {
    let dim = common_dim(elements)?;
    let min_eigenvalues = elements.iter().map(|e| e.eig().min()).collect();
    let total = operator::sum(dim, elements);
    Ok(ValidationReport {
        dim,
        min_eigenvalues,
        completeness_residual: total.max_abs_diff(&HermitianOperator::identity(dim)),
    })
}

fn common_dim(elements: &[HermitianOperator]) -> Result<usize> {
    let first = elements
        .first()
        .ok_or_else(|| Error::Empty("a POVM needs at least one element".into()))?;
    let dim = first.dim();
    if let Some(bad) = elements.iter().find(|e| e.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    Ok(dim)
}

impl Povm {
    /// Validates positivity and completeness.
    pub fn new(elements: Vec<HermitianOperator>, tol: &Tolerances) -> Result<Self> {
        let dim = common_dim(&elements)?;
        for (index, e) in elements.iter().enumerate() {
            let s = e.eig();
            let scale = s.max().abs().max(s.min().abs());
            if s.min() < -tol.psd * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::NotPsd {
                    index,
                    min_eigenvalue: s.min(),
                });
            }
        }
        let residual = operator::sum(dim, &elements).max_abs_diff(&HermitianOperator::identity(dim));
        if residual > tol.comp {
            return Err(Error::IncompletenessResidual(residual));
        }
        Ok(Povm { dim, elements })
    }

    /// The trivial measurement `(1)` on dimension `dim`.
    pub fn trivial(dim: usize) -> Self {
        Povm {
            dim,
            elements: vec![HermitianOperator::identity(dim)],
        }
    }

    /// Computational-basis projective measurement.
    pub fn computational_basis(dim: usize) -> Self {
        Povm {
            dim,
            elements: (0..dim).map(|i| HermitianOperator::basis_projector(dim, i)).collect(),
        }
    }

    /// Projective qubit measurement in the `|+>, |->` basis.
    pub fn qubit_x_basis() -> Self {
        let plus = HermitianOperator::diagonal(&[0.5, 0.5]);
        let mut off = HermitianOperator::zeros(2).entries().to_vec();
        off[1] = 0.5.into();
        off[2] = 0.5.into();
        let x = HermitianOperator::symmetrized(2, off);
        Povm {
            dim: 2,
            elements: vec![&plus + &x, &plus - &x],
        }
    }

    /// Wraps elements produced by an operation already known to preserve validity.
    pub(crate) fn from_parts_unchecked(dim: usize, elements: Vec<HermitianOperator>) -> Self {
        debug_assert!(elements.iter().all(|e| e.dim() == dim));
        Povm { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<HermitianOperator> {
        self.elements
    }

    /// Appends a zero outcome.
    pub fn with_zero_appended(&self) -> Self {
        let mut elements = self.elements.clone();
        elements.push(HermitianOperator::zeros(self.dim));
        Povm { dim: self.dim, elements }
    }

    /// Reorders outcomes; `order[k]` is the source index of new outcome `k`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "permutation of length {} for {} outcomes",
                order.len(),
                self.len()
            )));
        }
        for &i in order {
            if i >= self.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::ShapeMismatch("not a permutation".into()));
            }
        }
        Ok(Povm {
            dim: self.dim,
            elements: order.iter().map(|&i| self.elements[i].clone()).collect(),
        })
    }

    /// Canonical representative: drop zeros, sum proportional groups, sort.
    pub fn canonicalize(&self, tol: &Tolerances) -> CanonicalPovm {
        let mut groups: Vec<(HermitianOperator, HermitianOperator)> = Vec::new();
        for e in &self.elements {
            if e.max_abs() <= tol.prop {
                continue;
            }
            // Compare against the group's first member; proportionality is transitive on
            // nonzero PSD operators.
            match groups
                .iter_mut()
                .find(|(rep, _)| e.proportional(rep, tol.prop).is_some())
            {
                Some((_, total)) => *total = &*total + e,
                None => groups.push((e.clone(), e.clone())),
            }
        }
        let mut elements: Vec<HermitianOperator> = groups.into_iter().map(|(_, total)| total).collect();
        if elements.is_empty() {
            // Unreachable for a complete POVM; keep the type's invariant anyway.
            elements.push(HermitianOperator::identity(self.dim));
        }
        insertion_sort(&mut elements, |a, b| canonical_cmp(a, b, tol.prop));
        CanonicalPovm(Povm { dim: self.dim, elements })
    }

    /// Product measurement `(E_i (x) F_j)` in row-major pair order.
    pub fn tensor(&self, other: &Povm) -> Povm {
        let elements = self
            .elements
            .iter()
            .flat_map(|e| other.elements.iter().map(move |f| e.tensor(f)))
            .collect();
        Povm {
            dim: self.dim * other.dim,
            elements,
        }
    }

    /// Reduced measurement `(1/d_B) Tr_B E_i` on the first factor.
    pub fn reduce_a(&self, dim_a: usize, dim_b: usize) -> Result<Povm> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != self.dim {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                found: self.dim,
            });
        }
        let inv = 1.0 / dim_b as f64;
        let elements = self
            .elements
            .iter()
            .map(|e| e.partial_trace_b(dim_a, dim_b).map(|r| r.scale(inv)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Povm { dim: dim_a, elements })
    }

    /// True iff every element of the canonical form has rank one.
    pub fn is_extremal(&self, tol: &Tolerances) -> bool {
        self.canonicalize(tol)
            .elements()
            .iter()
            .all(|e| e.rank(tol.rank) == 1)
    }

    /// Splits every element into its weighted eigenprojections, dropping zero weights.
    ///
    /// Weights at round-off level relative to the element's largest eigenvalue count as zero.
    pub fn rank1_refinement(&self) -> Povm {
        let mut elements = Vec::new();
        for e in &self.elements {
            let s = e.eig();
            let floor = 64.0 * f64::EPSILON * s.eigenvalues[0].max(0.0);
            for (lambda, v) in s.eigenvalues.iter().zip(&s.eigenvectors) {
                if *lambda > floor {
                    elements.push(HermitianOperator::projector(v).scale(*lambda));
                }
            }
        }
        Povm { dim: self.dim, elements }
    }

    /// Conjugates every element by a unitary.
    pub fn conjugate_by(&self, u: &[num_complex::Complex64]) -> Povm {
        Povm {
            dim: self.dim,
            elements: self.elements.iter().map(|e| e.conjugate_by(u)).collect(),
        }
    }

    /// Sum of the eigenvalue vectors (each sorted non-increasing) of all elements.
    pub fn eigenvalue_profile(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.dim];
        for e in &self.elements {
            for (slot, x) in acc.iter_mut().zip(e.eigenvalues()) {
                *slot += x;
            }
        }
        acc
    }
}

// The tolerance-coarsened comparison is not a strict total order, which std's sorts may
// reject; a plain insertion sort is stable and never panics.
fn insertion_sort<T, F: Fn(&T, &T) -> Ordering>(items: &mut [T], cmp: F) {
    for i in 1..items.len() {
        let mut j = i;
        while j > 0 && cmp(&items[j - 1], &items[j]) == Ordering::Greater {
            items.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// Canonical ordering: larger trace first, then real parts row-major, then imaginary
/// parts row-major, each compared at granularity `tol`.
pub fn canonical_cmp(a: &HermitianOperator, b: &HermitianOperator, tol: f64) -> Ordering {
    let coarse = |x: f64, y: f64| {
        if (x - y).abs() <= tol {
            Ordering::Equal
        } else {
            x.total_cmp(&y)
        }
    };
    coarse(b.trace(), a.trace())
        .then_with(|| {
            a.entries()
                .iter()
                .zip(b.entries())
                .map(|(x, y)| coarse(x.re, y.re))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| {
            a.entries()
                .iter()
                .zip(b.entries())
                .map(|(x, y)| coarse(x.im, y.im))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

impl CanonicalPovm {
    pub fn as_povm(&self) -> &Povm {
        &self.0
    }

    pub fn into_povm(self) -> Povm {
        self.0
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        self.0.elements()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entrywise equality within `tol` (same length required).
    pub fn approx_eq(&self, other: &CanonicalPovm, tol: f64) -> bool {
        self.0.dim == other.0.dim
            && self.len() == other.len()
            && self
                .elements()
                .iter()
                .zip(other.elements())
                .all(|(a, b)| a.max_abs_diff(b) <= tol)
    }
}

impl AsRef<Povm> for CanonicalPovm {
    fn as_ref(&self) -> &Povm {
        &self.0
    }
}

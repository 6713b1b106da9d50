//! The post-processing preorder `E >= F`, decided by linear programming.
//!
//! `E >= F` holds iff some column-stochastic `X` (m x n) satisfies
//! `sum_j X[i][j] E_j = F_i` for every output `i`. Each operator equation contributes
//! `d^2` real equations. We minimize the L1 norm of their violation over all stochastic
//! `X`; the optimum is zero exactly when the relation holds, and otherwise it measures
//! how far `F` is from the post-processings of `E`.

mod simplex;

use std::fmt;

use crate::error::{Error, Result};
use crate::povm::Povm;
use crate::stochastic::StochasticMatrix;
use crate::tolerance::Tolerances;

use simplex::Tableau;

/// Pivot budget per feasibility problem.
pub const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderVerdict {
    pub feasible: bool,
    /// Present iff `feasible`: a stochastic matrix taking `E` to `F`.
    pub witness: Option<StochasticMatrix>,
    /// Minimal total absolute violation of the operator equations.
    pub residual: f64,
    /// Residual lies within a decade of the feasibility threshold on either side.
    pub marginal: bool,
    pub pivots: usize,
}

impl fmt::Display for OrderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = if self.feasible { "feasible" } else { "infeasible" };
        write!(f, "{word} residual={:e}", self.residual)?;
        if self.marginal {
            write!(f, " (marginal: residual within a decade of the threshold)")?;
        }
        Ok(())
    }
}

/// Sizes of the feasibility program for an `n`-outcome source, `m`-outcome target, dim `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeasibilityLp {
    pub inputs: usize,
    pub outputs: usize,
    pub dim: usize,
}

impl FeasibilityLp {
    pub fn mixing_variables(&self) -> usize {
        self.outputs * self.inputs
    }

    pub fn slack_variables(&self) -> usize {
        2 * self.outputs * self.dim * self.dim
    }

    pub fn constraints(&self) -> usize {
        self.inputs + self.outputs * self.dim * self.dim
    }
}

/// Decides whether `target` is a post-processing of `source`.
pub fn precedes(source: &Povm, target: &Povm, tol: &Tolerances) -> Result<OrderVerdict> {
    if source.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: source.dim(),
            found: target.dim(),
        });
    }
    let lp = FeasibilityLp {
        inputs: source.len(),
        outputs: target.len(),
        dim: source.dim(),
    };
    let (n, m, q) = (lp.inputs, lp.outputs, lp.dim * lp.dim);
    let e: Vec<Vec<f64>> = source.elements().iter().map(|x| x.real_coordinates()).collect();
    let f: Vec<Vec<f64>> = target.elements().iter().map(|x| x.real_coordinates()).collect();

    let rows = lp.constraints();
    let nx = lp.mixing_variables();
    let cols = nx + lp.slack_variables();
    let x_col = |i: usize, j: usize| i * n + j;
    let plus_col = |i: usize, r: usize| nx + i * q + r;
    let minus_col = |i: usize, r: usize| nx + m * q + i * q + r;

    let mut a = vec![0.0; rows * cols];
    let mut b = vec![0.0; rows];
    let mut c = vec![0.0; cols];
    for j in 0..n {
        for i in 0..m {
            a[j * cols + x_col(i, j)] = 1.0;
        }
        b[j] = 1.0;
    }
    for i in 0..m {
        for r in 0..q {
            let row = n + i * q + r;
            for j in 0..n {
                a[row * cols + x_col(i, j)] = e[j][r];
            }
            a[row * cols + plus_col(i, r)] = 1.0;
            a[row * cols + minus_col(i, r)] = -1.0;
            b[row] = f[i][r];
            c[plus_col(i, r)] = 1.0;
            c[minus_col(i, r)] = 1.0;
        }
    }

    let mut t = Tableau::new(rows, cols, &a, &b, &c);
    // Start from "everything goes to output 0" with slacks absorbing the mismatch.
    for j in 0..n {
        t.pivot(j, x_col(0, j));
    }
    for i in 0..m {
        for r in 0..q {
            let row = n + i * q + r;
            if t.rhs(row) < 0.0 {
                t.negate_row(row);
                t.pivot(row, minus_col(i, r));
            } else {
                t.pivot(row, plus_col(i, r));
            }
        }
    }
    t.optimize(MAX_PIVOTS)?;

    let x = t.solution();
    let mut data = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            data[i * n + j] = x[x_col(i, j)].max(0.0);
        }
    }
    for j in 0..n {
        let total: f64 = (0..m).map(|i| data[i * n + j]).sum();
        for i in 0..m {
            data[i * n + j] /= total;
        }
    }
    let mix = StochasticMatrix::from_raw(m, n, data);
    let residual = l1_residual(&mix, &e, &f);
    let feasible = residual <= tol.feas;
    let marginal = residual >= tol.feas / 10.0 && residual <= tol.feas * 10.0;
    Ok(OrderVerdict {
        feasible,
        witness: feasible.then_some(mix),
        residual,
        marginal,
        pivots: t.pivots,
    })
}

fn l1_residual(mix: &StochasticMatrix, e: &[Vec<f64>], f: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (i, fi) in f.iter().enumerate() {
        for (r, target) in fi.iter().enumerate() {
            let produced: f64 = e.iter().enumerate().map(|(j, ej)| mix.get(i, j) * ej[r]).sum();
            total += (produced - target).abs();
        }
    }
    total
}

/// Total absolute violation of `F_i = sum_j mix[i][j] E_j` over the real coordinates, the
/// same quantity the verdict reports as its residual.
pub fn mixing_residual(mix: &StochasticMatrix, source: &Povm, target: &Povm) -> Result<f64> {
    if source.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: source.dim(),
            found: target.dim(),
        });
    }
    if mix.cols() != source.len() || mix.rows() != target.len() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} mix between {} and {} outcomes",
            mix.rows(),
            mix.cols(),
            source.len(),
            target.len()
        )));
    }
    let e: Vec<Vec<f64>> = source.elements().iter().map(|x| x.real_coordinates()).collect();
    let f: Vec<Vec<f64>> = target.elements().iter().map(|x| x.real_coordinates()).collect();
    Ok(l1_residual(mix, &e, &f))
}

/// Mutual post-processability.
pub fn equivalent(a: &Povm, b: &Povm, tol: &Tolerances) -> Result<bool> {
    Ok(precedes(a, b, tol)?.feasible && precedes(b, a, tol)?.feasible)
}

/// Equality of equivalence classes via canonical representatives.
pub fn class_equal(a: &Povm, b: &Povm, tol: &Tolerances) -> bool {
    a.dim() == b.dim() && a.canonicalize(tol).approx_eq(&b.canonicalize(tol), tol.prop)
}

/// `x` majorizes `y`: every partial sum of the non-increasing rearrangement of `x` is at
/// least the matching partial sum of `y`, up to `slack`.
pub fn majorizes(x: &[f64], y: &[f64], slack: f64) -> bool {
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    };
    let (x, y) = (sorted(x), sorted(y));
    let len = x.len().max(y.len());
    let (mut sx, mut sy) = (0.0, 0.0);
    for k in 0..len {
        sx += x.get(k).copied().unwrap_or(0.0);
        sy += y.get(k).copied().unwrap_or(0.0);
        if sx < sy - slack {
            return false;
        }
    }
    true
}

/// Necessary condition for `E >= F`: the summed sorted spectra of `E` majorize those of `F`.
pub fn majorization_condition(source: &Povm, target: &Povm, tol: &Tolerances) -> bool {
    source.dim() == target.dim()
        && majorizes(&source.eigenvalue_profile(), &target.eigenvalue_profile(), tol.maj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{confuse_matrix, ConfuseSpec, SplitSpec, split_matrix};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn lp_dimensions() {
        let lp = FeasibilityLp {
            inputs: 3,
            outputs: 2,
            dim: 2,
        };
        assert_eq!(lp.mixing_variables(), 6);
        assert_eq!(lp.constraints(), 3 + 2 * 4);
    }

    #[test]
    fn anything_reaches_trivial() {
        let v = precedes(&Povm::computational_basis(3), &Povm::trivial(3), &tol()).unwrap();
        assert!(v.feasible);
        assert_eq!(v.witness.unwrap(), StochasticMatrix::all_ones_row(3));
    }

    #[test]
    fn z_and_x_are_incomparable() {
        let z = Povm::computational_basis(2);
        let x = Povm::qubit_x_basis();
        let zx = precedes(&z, &x, &tol()).unwrap();
        let xz = precedes(&x, &z, &tol()).unwrap();
        assert!(!zx.feasible && zx.witness.is_none());
        assert!(!xz.feasible);
        assert!(zx.residual >= 0.1 && xz.residual >= 0.1, "{zx} / {xz}");
        assert!(majorization_condition(&z, &x, &tol()));
        assert!(majorization_condition(&x, &z, &tol()));
    }

    #[test]
    fn split_is_reversible() {
        let z = Povm::computational_basis(2);
        let spec = SplitSpec::new(vec![vec![0.4, 0.6], vec![1.0]], 1e-9).unwrap();
        let split = split_matrix(&spec).apply(&z).unwrap();
        assert!(equivalent(&z, &split, &tol()).unwrap());
        assert!(class_equal(&z, &split, &tol()));
    }

    #[test]
    fn total_confusion_is_irreversible() {
        let z = Povm::computational_basis(2);
        assert!(!equivalent(&z, &Povm::trivial(2), &tol()).unwrap());
        assert!(!class_equal(&z, &Povm::trivial(2), &tol()));
    }

    #[test]
    fn permutation_equivalence() {
        let z = Povm::computational_basis(3);
        let p = z.permuted(&[2, 0, 1]).unwrap();
        assert!(equivalent(&z, &p, &tol()).unwrap());
        let swap = confuse_matrix(&ConfuseSpec::new(vec![1, 0, 2], 3).unwrap(), 3).unwrap();
        assert!(class_equal(&swap.apply(&z).unwrap(), &z, &tol()));
    }

    #[test]
    fn mixing_residual_matches_verdict() {
        let z = Povm::computational_basis(2);
        let half = StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]], 1e-9).unwrap();
        let target = half.apply(&z).unwrap();
        assert_eq!(mixing_residual(&half, &z, &target).unwrap(), 0.0);
        let v = precedes(&z, &Povm::qubit_x_basis(), &tol()).unwrap();
        // Per output the identity mix is off by 1/2 on both diagonal entries and on the
        // real part of the off-diagonal entry.
        let id = StochasticMatrix::identity(2);
        assert!((mixing_residual(&id, &z, &Povm::qubit_x_basis()).unwrap() - 3.0).abs() < 1e-15);
        assert!(v.residual <= 2.0);
        assert!(mixing_residual(&id, &z, &Povm::trivial(2)).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            precedes(&Povm::trivial(2), &Povm::trivial(3), &tol()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn majorizes_basic() {
        assert!(majorizes(&[1.0, 0.0], &[0.5, 0.5], 0.0));
        assert!(!majorizes(&[0.5, 0.5], &[1.0, 0.0], 1e-12));
        assert!(majorizes(&[1.0, 1.0], &[1.0, 1.0], 0.0));
    }

    #[test]
    fn marginal_flag_window() {
        let v = OrderVerdict {
            feasible: true,
            witness: None,
            residual: 5e-8,
            marginal: true,
            pivots: 0,
        };
        assert!(v.to_string().contains("marginal"));
    }
}

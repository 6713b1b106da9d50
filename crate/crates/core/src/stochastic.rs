//! Column-stochastic matrices: the free post-processing of measurement outcomes.
//!
//! Entry `(i, j)` is the probability of reporting output outcome `i` when the input
//! measurement produced outcome `j`. Two generators span every such matrix: splitting an
//! outcome by a probability vector and confusing outcomes by a deterministic map.

use std::fmt;

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::povm::Povm;

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    /// Row-major entries.
    data: Vec<f64>,
}

/// One probability vector per input outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    blocks: Vec<Vec<f64>>,
}

/// Deterministic map from input outcomes to output outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfuseSpec {
    targets: Vec<usize>,
}

fn check_distribution(p: &[f64], tol: f64) -> bool {
    !p.is_empty()
        && p.iter().all(|x| x.is_finite() && *x >= 0.0)
        && (p.iter().sum::<f64>() - 1.0).abs() <= tol
}

impl SplitSpec {
    pub fn new(blocks: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Empty("split spec needs at least one block".into()));
        }
        if let Some(j) = blocks.iter().position(|b| !check_distribution(b, tol)) {
            return Err(Error::InvalidDistribution(j));
        }
        Ok(SplitSpec { blocks })
    }

    /// `n` trivial one-element blocks.
    pub fn trivial(n: usize) -> Self {
        SplitSpec {
            blocks: vec![vec![1.0]; n],
        }
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn inputs(&self) -> usize {
        self.blocks.len()
    }

    pub fn outputs(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

impl ConfuseSpec {
    /// `targets[j]` is the output outcome that input `j` is merged into.
    pub fn new(targets: Vec<usize>, outputs: usize) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::Empty("confuse spec needs at least one input".into()));
        }
        if let Some(&t) = targets.iter().find(|&&t| t >= outputs) {
            return Err(Error::ShapeMismatch(format!(
                "target outcome {t} out of range for {outputs} outputs"
            )));
        }
        Ok(ConfuseSpec { targets })
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
}

impl StochasticMatrix {
    /// Builds from row-major entries, renormalizing columns whose sums deviate by at most
    /// `tol` and rejecting everything else.
    pub fn new(rows: usize, cols: usize, mut data: Vec<f64>, tol: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("stochastic matrix must be at least 1x1".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        for j in 0..cols {
            let column: Vec<f64> = (0..rows).map(|i| data[i * cols + j]).collect();
            if !check_distribution(&column, tol) {
                return Err(Error::InvalidDistribution(j));
            }
            let total: f64 = column.iter().sum();
            for i in 0..rows {
                data[i * cols + j] /= total;
            }
        }
        Ok(StochasticMatrix { rows, cols, data })
    }

    /// Builds from a list of rows.
    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat(), tol)
    }

    /// Builds from a list of columns.
    pub fn from_columns(columns: &[Vec<f64>], tol: f64) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::ShapeMismatch("ragged columns".into()));
        }
        let cols = columns.len();
        let mut data = vec![0.0; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                data[i * cols + j] = *x;
            }
        }
        Self::new(rows, cols, data, tol)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        StochasticMatrix { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        StochasticMatrix { rows: n, cols: n, data }
    }

    /// Single all-ones row: total confusion into the trivial measurement.
    pub fn all_ones_row(n: usize) -> Self {
        StochasticMatrix {
            rows: 1,
            cols: n,
            data: vec![1.0; n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Matrix product `self * rhs`; stochastic matrices are closed under composition.
    pub fn compose(&self, rhs: &StochasticMatrix) -> Result<StochasticMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut data = vec![0.0; self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        Ok(StochasticMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    pub fn max_abs_diff(&self, other: &StochasticMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of any column sum from one.
    pub fn column_sum_error(&self) -> f64 {
        (0..self.cols)
            .map(|j| (self.column(j).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `F_i = sum_j P[i][j] E_j`.
    pub fn apply(&self, povm: &Povm) -> Result<Povm> {
        if self.cols != povm.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix applied to {} outcomes",
                self.rows,
                self.cols,
                povm.len()
            )));
        }
        let dim = povm.dim();
        let elements = (0..self.rows)
            .map(|i| {
                povm.elements()
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| self.get(i, *j) != 0.0)
                    .fold(HermitianOperator::zeros(dim), |acc, (j, e)| {
                        &acc + &e.scale(self.get(i, j))
                    })
            })
            .collect();
        Ok(Povm::from_parts_unchecked(dim, elements))
    }
}

impl fmt::Display for StochasticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| format!("{x}")).collect();
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Block-diagonal split matrix `S = (+)_j p_j`.
pub fn split_matrix(spec: &SplitSpec) -> StochasticMatrix {
    let rows = spec.outputs();
    let cols = spec.inputs();
    let mut data = vec![0.0; rows * cols];
    let mut offset = 0;
    for (j, block) in spec.blocks.iter().enumerate() {
        for (k, p) in block.iter().enumerate() {
            data[(offset + k) * cols + j] = *p;
        }
        offset += block.len();
    }
    StochasticMatrix { rows, cols, data }
}

/// Deterministic 0/1 matrix sending input `j` to output `targets[j]`.
pub fn confuse_matrix(spec: &ConfuseSpec, outputs: usize) -> Result<StochasticMatrix> {
    if let Some(&t) = spec.targets.iter().find(|&&t| t >= outputs) {
        return Err(Error::ShapeMismatch(format!(
            "target outcome {t} out of range for {outputs} outputs"
        )));
    }
    let cols = spec.targets.len();
    let mut data = vec![0.0; outputs * cols];
    for (j, &t) in spec.targets.iter().enumerate() {
        data[t * cols + j] = 1.0;
    }
    Ok(StochasticMatrix {
        rows: outputs,
        cols,
        data,
    })
}

/// Deterministic matrix `R_S` merging every split block back, so `R_S * S = I`.
pub fn reversal_of_split(spec: &SplitSpec) -> StochasticMatrix {
    let rows = spec.inputs();
    let cols = spec.outputs();
    let mut data = vec![0.0; rows * cols];
    let mut offset = 0;
    for (i, block) in spec.blocks.iter().enumerate() {
        for k in 0..block.len() {
            data[i * cols + offset + k] = 1.0;
        }
        offset += block.len();
    }
    StochasticMatrix { rows, cols, data }
}

/// Factorizes `P` (m x n) as `C * S` where `S` (mn x n) splits input `j` by column `j` of
/// `P` and `C = [I_m | ... | I_m]` (m x mn) confuses the copies back together.
pub fn decompose(p: &StochasticMatrix) -> (StochasticMatrix, StochasticMatrix) {
    let (m, n) = (p.rows, p.cols);
    let spec = SplitSpec {
        blocks: (0..n).map(|j| p.column(j)).collect(),
    };
    let s = split_matrix(&spec);
    let targets = (0..m * n).map(|k| k % m).collect();
    let c = confuse_matrix(&ConfuseSpec { targets }, m).expect("targets are in range by construction");
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerance::Tolerances;

    const TOL: f64 = 1e-9;

    fn naive_product(a: &StochasticMatrix, b: &StochasticMatrix) -> Vec<f64> {
        let mut out = vec![0.0; a.rows() * b.cols()];
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                out[i * b.cols() + j] = (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum();
            }
        }
        out
    }

    #[test]
    fn split_matches_making_up_outcomes() {
        let spec = SplitSpec::new(vec![vec![1.0], vec![1.0], vec![0.2, 0.3, 0.5]], TOL).unwrap();
        let s = split_matrix(&spec);
        assert_eq!((s.rows(), s.cols()), (5, 3));
        assert_eq!(s.column(2), vec![0.0, 0.0, 0.2, 0.3, 0.5]);
        let e1 = HermitianOperator::diagonal(&[0.5, 0.0]);
        let e2 = HermitianOperator::diagonal(&[0.5, 0.25]);
        let e3 = HermitianOperator::diagonal(&[0.0, 0.75]);
        let e = Povm::new(vec![e1.clone(), e2.clone(), e3.clone()], &Tolerances::default()).unwrap();
        let f = s.apply(&e).unwrap();
        assert_eq!(f.elements()[0], e1);
        assert_eq!(f.elements()[1], e2);
        assert!(f.elements()[3].max_abs_diff(&e3.scale(0.3)) < 1e-16);
        let back = reversal_of_split(&spec).apply(&f).unwrap();
        for (a, b) in back.elements().iter().zip(e.elements()) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
    }

    #[test]
    fn trivial_split_is_identity() {
        assert_eq!(split_matrix(&SplitSpec::trivial(4)), StochasticMatrix::identity(4));
        assert_eq!(reversal_of_split(&SplitSpec::trivial(4)), StochasticMatrix::identity(4));
    }

    #[test]
    fn split_rejects_bad_block() {
        assert!(matches!(
            SplitSpec::new(vec![vec![1.0], vec![0.5, 0.4]], TOL),
            Err(Error::InvalidDistribution(1))
        ));
        assert!(SplitSpec::new(vec![vec![-0.5, 1.5]], TOL).is_err());
    }

    #[test]
    fn reversal_times_split_is_identity() {
        let spec = SplitSpec::new(
            vec![vec![0.5, 0.5], vec![0.2, 0.3, 0.5], vec![1.0], vec![0.9, 0.1]],
            TOL,
        )
        .unwrap();
        let r = reversal_of_split(&spec);
        let s = split_matrix(&spec);
        let prod = r.compose(&s).unwrap();
        assert!(prod.max_abs_diff(&StochasticMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn confuse_examples() {
        let spec = ConfuseSpec::new(vec![0, 0, 1], 2).unwrap();
        let c = confuse_matrix(&spec, 2).unwrap();
        assert_eq!(c.to_rows(), vec![vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let id = confuse_matrix(&ConfuseSpec::new(vec![0, 1, 2], 3).unwrap(), 3).unwrap();
        assert_eq!(id, StochasticMatrix::identity(3));
        let all = confuse_matrix(&ConfuseSpec::new(vec![0, 0, 0], 1).unwrap(), 1).unwrap();
        assert_eq!(all, StochasticMatrix::all_ones_row(3));
        let f = all.apply(&Povm::computational_basis(3)).unwrap();
        assert!(f.elements()[0].max_abs_diff(&HermitianOperator::identity(3)) < 1e-15);
        assert!(ConfuseSpec::new(vec![0, 3], 2).is_err());
    }

    #[test]
    fn decompose_worked_example() {
        let p = StochasticMatrix::from_rows(&[vec![0.3, 1.0], vec![0.7, 0.0]], TOL).unwrap();
        let (c, s) = decompose(&p);
        assert_eq!(s.column(0), vec![0.3, 0.7, 0.0, 0.0]);
        assert_eq!(s.column(1), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(c.to_rows(), vec![vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]]);
        let prod = naive_product(&c, &s);
        for (a, b) in prod.iter().zip(p.data()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn decompose_identity() {
        let (c, s) = decompose(&StochasticMatrix::identity(3));
        assert_eq!(c.compose(&s).unwrap(), StochasticMatrix::identity(3));
    }

    #[test]
    fn depolarizing_mix_on_z_basis() {
        let p = StochasticMatrix::from_rows(&[vec![0.75, 0.25], vec![0.25, 0.75]], TOL).unwrap();
        let f = p.apply(&Povm::computational_basis(2)).unwrap();
        assert!(f.elements()[0].max_abs_diff(&HermitianOperator::diagonal(&[0.75, 0.25])) < 1e-16);
        assert!(f.elements()[1].max_abs_diff(&HermitianOperator::diagonal(&[0.25, 0.75])) < 1e-16);
    }

    #[test]
    fn construction_renormalizes_only_tiny_deviations() {
        let m = StochasticMatrix::from_rows(&[vec![0.5 + 1e-12], vec![0.5]], TOL).unwrap();
        assert!(m.column_sum_error() < 1e-15);
        assert!(matches!(
            StochasticMatrix::from_rows(&[vec![0.5], vec![0.4]], TOL),
            Err(Error::InvalidDistribution(0))
        ));
        assert!(StochasticMatrix::from_rows(&[vec![1.0, 0.0]], TOL).is_err());
    }

    #[test]
    fn apply_shape_mismatch() {
        let p = StochasticMatrix::identity(3);
        assert!(matches!(
            p.apply(&Povm::computational_basis(2)),
            Err(Error::ShapeMismatch(_))
        ));
    }
}

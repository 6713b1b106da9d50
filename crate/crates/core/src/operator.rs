//! Dense Hermitian operators at small dimension.
//!
//! Entries are stored row-major as [`Complex64`]. Construction checks Hermiticity and
//! then symmetrizes, so every stored operator is exactly Hermitian. The eigensolver is a
//! cyclic complex Jacobi iteration, which is accurate to roughly machine precision
//! relative to the operator norm for the dimensions used here (up to about 16).

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

/// Eigendecomposition with eigenvalues sorted non-increasing.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl Spectrum {
    /// Rebuilds `sum_k lambda_k |v_k><v_k|`.
    pub fn reconstruct(&self) -> HermitianOperator {
        let dim = self.eigenvalues.len();
        let mut out = HermitianOperator::zeros(dim);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            out = &out + &HermitianOperator::projector(v).scale(*lambda);
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

impl HermitianOperator {
    /// Builds an operator from row-major entries, rejecting non-Hermitian or non-finite input.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>, herm_tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("operator dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if let Some(z) = entries.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(format!("{z}")));
        }
        let mut deviation = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let d = (entries[i * dim + j] - entries[j * dim + i].conj()).norm();
                deviation = deviation.max(d);
            }
        }
        if deviation > herm_tol {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(Self::symmetrized(dim, entries))
    }

    /// Builds from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64], herm_tol: f64) -> Result<Self> {
        let entries = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_entries(dim, entries, herm_tol)
    }

    /// Hermitian part `(A + A^dagger)/2` of arbitrary row-major entries.
    pub fn symmetrized(dim: usize, mut entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(entries[i * dim + i].re, 0.0);
            for j in (i + 1)..dim {
                let avg = (entries[i * dim + j] + entries[j * dim + i].conj()) * 0.5;
                entries[i * dim + j] = avg;
                entries[j * dim + i] = avg.conj();
            }
        }
        HermitianOperator { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut out = Self::zeros(dim);
        for (i, &x) in diag.iter().enumerate() {
            out.entries[i * dim + i] = Complex64::new(x, 0.0);
        }
        out
    }

    /// `|v><v|` for an arbitrary (not necessarily normalized) vector.
    pub fn projector(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = v[i] * v[j].conj();
            }
        }
        Self::symmetrized(dim, entries)
    }

    /// Projector onto computational basis state `index`.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        Self::diagonal(&diag)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).sum()
    }

    pub fn scale(&self, a: f64) -> Self {
        HermitianOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * a).collect(),
        }
    }

    /// `Tr(A B)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (self.entries[i * d + j] * other.entries[j * d + i]).re;
            }
        }
        acc
    }

    /// `<v|A|v>`.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        self.sandwich(v, v).re
    }

    /// `<u|A|v>`.
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let d = self.dim;
        let mut acc = ZERO;
        for (ui, row) in u.iter().zip(self.entries.chunks_exact(d)) {
            let av: Complex64 = row.iter().zip(v).map(|(a, x)| a * x).sum();
            acc += ui.conj() * av;
        }
        acc
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The `d^2` independent real coordinates: diagonal reals, then the real and
    /// imaginary parts of each strictly upper-triangular entry.
    pub fn real_coordinates(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            out.push(self.entries[i * d + i].re);
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let z = self.entries[i * d + j];
                out.push(z.re);
                out.push(z.im);
            }
        }
        out
    }

    /// Kronecker product `A (x) B`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut entries = vec![ZERO; d * d];
        for i in 0..da {
            for j in 0..da {
                let a = self.entries[i * da + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        entries[(i * db + k) * d + (j * db + l)] = a * other.entries[k * db + l];
                    }
                }
            }
        }
        HermitianOperator { dim: d, entries }
    }

    /// `Tr_B` over the second tensor factor of a `dim_a * dim_b` operator.
    pub fn partial_trace_b(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != self.dim {
            return Err(Error::DimensionMismatch {
                expected: dim_a * dim_b,
                found: self.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![ZERO; dim_a * dim_a];
        for i in 0..dim_a {
            for j in 0..dim_a {
                let mut acc = ZERO;
                for k in 0..dim_b {
                    acc += self.entries[(i * dim_b + k) * d + (j * dim_b + k)];
                }
                entries[i * dim_a + j] = acc;
            }
        }
        Ok(Self::symmetrized(dim_a, entries))
    }

    /// Conjugation `U A U^dagger` by a unitary (or any square matrix) given row-major.
    pub fn conjugate_by(&self, u: &[Complex64]) -> Self {
        let d = self.dim;
        assert_eq!(u.len(), d * d, "conjugating matrix must be dim x dim");
        let mut ua = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let uik = u[i * d + k];
                if uik == ZERO {
                    continue;
                }
                for j in 0..d {
                    ua[i * d + j] += uik * self.entries[k * d + j];
                }
            }
        }
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += ua[i * d + k] * u[j * d + k].conj();
                }
                out[i * d + j] = acc;
            }
        }
        Self::symmetrized(d, out)
    }

    /// Eigendecomposition, eigenvalues sorted non-increasing.
    pub fn eig(&self) -> Spectrum {
        jacobi_eig(self.dim, self.entries.clone())
    }

    /// Eigenvalues only, sorted non-increasing.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eig().eigenvalues
    }

    /// True iff the smallest eigenvalue is at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.eig().min() >= -tol
    }

    /// Largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        let s = self.eig();
        s.max().abs().max(s.min().abs())
    }

    /// Number of eigenvalues above `rel_tol * ||A||`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let s = self.eig();
        let norm = s.max().abs().max(s.min().abs());
        if norm == 0.0 {
            return 0;
        }
        s.eigenvalues.iter().filter(|&&x| x > rel_tol * norm).count()
    }

    /// Returns `c >= 0` with `||A - c B||_max <= tol`, if one exists.
    ///
    /// A zero `self` is proportional to anything with constant 0; a nonzero `self` is never
    /// proportional to a zero `other`.
    pub fn proportional(&self, other: &Self, tol: f64) -> Option<f64> {
        assert_eq!(self.dim, other.dim, "proportional dimension mismatch");
        if self.max_abs() <= tol {
            return Some(0.0);
        }
        if other.max_abs() <= tol {
            return None;
        }
        let tb = other.trace();
        let c = if tb > 0.0 {
            self.trace() / tb
        } else {
            // Non-PSD arguments: fall back to the Frobenius projection.
            let num: f64 = self.trace_product(other);
            let den: f64 = other.trace_product(other);
            num / den
        };
        if !(c.is_finite() && c >= 0.0) {
            return None;
        }
        (self.max_abs_diff(&other.scale(c)) <= tol).then_some(c)
    }

    /// Applies `f` to the spectrum: `sum_k f(lambda_k) |v_k><v_k|`.
    pub fn spectral_map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        let s = self.eig();
        let mut out = Self::zeros(self.dim);
        for (lambda, v) in s.eigenvalues.iter().zip(&s.eigenvectors) {
            out = &out + &Self::projector(v).scale(f(*lambda));
        }
        out
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        assert_eq!(self.dim, rhs.dim, "operator addition dimension mismatch");
        HermitianOperator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        assert_eq!(self.dim, rhs.dim, "operator subtraction dimension mismatch");
        HermitianOperator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scale(-1.0)
    }
}

impl Mul<&HermitianOperator> for f64 {
    type Output = HermitianOperator;
    fn mul(self, rhs: &HermitianOperator) -> HermitianOperator {
        rhs.scale(self)
    }
}

/// Sum of a nonempty list of operators.
pub fn sum<'a, I>(dim: usize, ops: I) -> HermitianOperator
where
    I: IntoIterator<Item = &'a HermitianOperator>,
{
    ops.into_iter()
        .fold(HermitianOperator::zeros(dim), |acc, op| &acc + op)
}

/// Cyclic Jacobi for a Hermitian matrix stored row-major. Consumes `a`.
fn jacobi_eig(n: usize, mut a: Vec<Complex64>) -> Spectrum {
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = ONE;
    }

    let frob2: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let stop = (f64::EPSILON * f64::EPSILON) * frob2;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum();
        if off <= stop || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // Skip rotations that cannot change the diagonal at working precision.
                if mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // Rotation V acting on (p, q): V = diag(1, conj(phase)) * [[c, s], [-s, c]].
                let v00 = Complex64::new(c, 0.0);
                let v01 = Complex64::new(s, 0.0);
                let v10 = -phase.conj() * s;
                let v11 = phase.conj() * c;

                // A <- A V (columns p, q)
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * v00 + akq * v10;
                    a[k * n + q] = akp * v01 + akq * v11;
                }
                // A <- V^dagger A (rows p, q)
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = v00.conj() * apk + v10.conj() * aqk;
                    a[q * n + k] = v01.conj() * apk + v11.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * v00 + vkq * v10;
                    v[k * n + q] = vkp * v01 + vkq * v11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    Spectrum {
        eigenvalues: order.iter().map(|&i| a[i * n + i].re).collect(),
        eigenvectors: order
            .iter()
            .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
            .collect(),
    }
}

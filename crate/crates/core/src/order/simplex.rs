//! Dense tableau primal simplex for `min c^T x` subject to `A x = b`, `x >= 0`, started
//! from a caller-supplied basis.
//!
//! Entering columns follow Dantzig's rule; after a run of degenerate pivots the solver
//! switches to Bland's rule (which cannot cycle) until the objective moves again.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-11;
const DEGENERATE_STREAK: usize = 30;

#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    rows: usize,
    cols: usize,
    /// `(rows + 1) x (cols + 1)` row-major; last row holds reduced costs, last column
    /// holds the right-hand side (objective row: minus the current objective).
    t: Vec<f64>,
    basis: Vec<usize>,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Dantzig,
    Bland,
}

impl Tableau {
    /// `a` is row-major `rows x cols`.
    pub fn new(rows: usize, cols: usize, a: &[f64], b: &[f64], c: &[f64]) -> Self {
        assert_eq!(a.len(), rows * cols);
        assert_eq!(b.len(), rows);
        assert_eq!(c.len(), cols);
        let w = cols + 1;
        let mut t = vec![0.0; (rows + 1) * w];
        for i in 0..rows {
            t[i * w..i * w + cols].copy_from_slice(&a[i * cols..(i + 1) * cols]);
            t[i * w + cols] = b[i];
        }
        t[rows * w..rows * w + cols].copy_from_slice(c);
        Tableau {
            rows,
            cols,
            t,
            basis: vec![usize::MAX; rows],
            pivots: 0,
        }
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.cols + 1) + c]
    }

    pub fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    /// Multiplies constraint row `r` by -1.
    pub fn negate_row(&mut self, r: usize) {
        let w = self.cols + 1;
        for x in &mut self.t[r * w..(r + 1) * w] {
            *x = -*x;
        }
    }

    /// Gauss-Jordan pivot making column `c` basic in row `r`.
    pub fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.t[r * w + c];
        debug_assert!(p.abs() > 0.0);
        let inv = 1.0 / p;
        for x in &mut self.t[r * w..(r + 1) * w] {
            *x *= inv;
        }
        self.t[r * w + c] = 1.0;
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                *x -= f * pv;
            }
            row[c] = 0.0;
            if i < self.rows && row[self.cols] < 0.0 && row[self.cols] > -1e-13 {
                row[self.cols] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs the simplex from the current basis, which must be primal feasible.
    pub fn optimize(&mut self, max_pivots: usize) -> Result<()> {
        let mut rule = Rule::Dantzig;
        let mut streak = 0usize;
        let start = self.pivots;
        loop {
            let Some(enter) = self.entering(rule) else {
                return Ok(());
            };
            let Some(leave) = self.leaving(enter, rule) else {
                // Unbounded below; cannot happen for a nonnegative objective.
                return Ok(());
            };
            if self.pivots - start >= max_pivots {
                return Err(Error::SolverStall {
                    iterations: self.pivots - start,
                });
            }
            let degenerate = self.rhs(leave).abs() <= 1e-12;
            self.pivot(leave, enter);
            if degenerate {
                streak += 1;
                if streak >= DEGENERATE_STREAK {
                    rule = Rule::Bland;
                }
            } else {
                streak = 0;
                rule = Rule::Dantzig;
            }
        }
    }

    fn entering(&self, rule: Rule) -> Option<usize> {
        let obj = self.rows;
        match rule {
            Rule::Dantzig => {
                let mut best = None;
                let mut best_val = -COST_TOL;
                for c in 0..self.cols {
                    let v = self.at(obj, c);
                    if v < best_val {
                        best_val = v;
                        best = Some(c);
                    }
                }
                best
            }
            Rule::Bland => (0..self.cols).find(|&c| self.at(obj, c) < -COST_TOL),
        }
    }

    fn leaving(&self, enter: usize, rule: Rule) -> Option<usize> {
        let mut best: Option<(usize, f64, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, enter);
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(r).max(0.0) / a;
            best = match best {
                None => Some((r, ratio, a)),
                Some((br, bratio, ba)) => {
                    if ratio < bratio - 1e-12 {
                        Some((r, ratio, a))
                    } else if ratio <= bratio + 1e-12 {
                        let better = match rule {
                            Rule::Dantzig => a > ba,
                            Rule::Bland => self.basis[r] < self.basis[br],
                        };
                        if better {
                            Some((r, ratio, a))
                        } else {
                            Some((br, bratio, ba))
                        }
                    } else {
                        Some((br, bratio, ba))
                    }
                }
            };
        }
        best.map(|(r, _, _)| r)
    }

    /// Current primal solution (nonbasic variables are zero).
    pub fn solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.cols];
        for (r, &c) in self.basis.iter().enumerate() {
            if c < self.cols {
                x[c] = self.rhs(r);
            }
        }
        x
    }

    #[cfg(test)]
    pub fn objective(&self) -> f64 {
        -self.at(self.rows, self.cols)
    }
}

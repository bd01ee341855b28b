//! LU factorization with partial pivoting for banded complex matrices.
//!
//! Row `i` stores columns `i - kl ..= i + kl + ku`; the extra `kl` columns
//! hold fill produced by row interchanges.

use num_complex::Complex64;

use super::sparse::SparseMatrix;

#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
    multipliers: Vec<Complex64>,
    pivots: Vec<usize>,
    pivot_magnitudes: Vec<f64>,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

impl BandedLu {
    /// Factorizes a square sparse matrix; rows listed in `replace` are overwritten first.
    pub fn factor(matrix: &SparseMatrix, replace: &[(usize, Vec<(usize, Complex64)>)]) -> Self {
        let n = matrix.rows();
        assert_eq!(n, matrix.cols(), "banded LU needs a square matrix");

        let replaced = |r: usize| replace.iter().find(|(row, _)| *row == r).map(|(_, e)| e);
        let mut entries: Vec<(usize, usize, Complex64)> = Vec::with_capacity(matrix.nnz());
        for r in 0..n {
            match replaced(r) {
                Some(row) => entries.extend(row.iter().map(|&(c, v)| (r, c, v))),
                None => entries.extend(matrix.row(r).map(|(c, v)| (r, c, v))),
            }
        }
        let (mut kl, mut ku) = (0usize, 0usize);
        for &(r, c, _) in &entries {
            if r > c {
                kl = kl.max(r - c);
            } else {
                ku = ku.max(c - r);
            }
        }

        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            ku,
            width,
            data: vec![ZERO; n * width],
            multipliers: vec![ZERO; n * kl.max(1)],
            pivots: vec![0; n],
            pivot_magnitudes: vec![0.0; n],
        };
        for (r, c, v) in entries {
            let slot = lu.slot(r, c);
            lu.data[slot] += v;
        }
        lu.eliminate();
        lu
    }

    fn slot(&self, row: usize, col: usize) -> usize {
        debug_assert!(col + self.kl >= row && col <= row + self.kl + self.ku);
        row * self.width + (col + self.kl - row)
    }

    fn eliminate(&mut self) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);

            let mut pivot = k;
            let mut best = self.data[self.slot(k, k)].norm();
            for r in k + 1..=last_row {
                let v = self.data[self.slot(r, k)].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            self.pivots[k] = pivot;
            self.pivot_magnitudes[k] = best;
            if best == 0.0 {
                continue;
            }
            if pivot != k {
                for col in k..=last_col {
                    let (a, b) = (self.slot(k, col), self.slot(pivot, col));
                    self.data.swap(a, b);
                }
            }

            let span = last_col - k;
            let head = self.data[self.slot(k, k)];
            for r in k + 1..=last_row {
                let lead = self.slot(r, k);
                let factor = self.data[lead] / head;
                self.multipliers[k * kl + (r - k - 1)] = factor;
                self.data[lead] = ZERO;
                if factor == ZERO {
                    continue;
                }
                // row k precedes row r in storage
                let pivot_start = self.slot(k, k + 1);
                let target_start = self.slot(r, k + 1);
                let (upper, lower) = self.data.split_at_mut(target_start);
                let pivot_row = &upper[pivot_start..pivot_start + span];
                for (t, p) in lower[..span].iter_mut().zip(pivot_row) {
                    *t -= factor * p;
                }
            }
        }
    }

    /// `|U_kk|` for every elimination step.
    pub fn pivot_magnitudes(&self) -> &[f64] {
        &self.pivot_magnitudes
    }

    /// Smallest over largest pivot magnitude.
    pub fn pivot_ratio(&self) -> f64 {
        let max = self.pivot_magnitudes.iter().copied().fold(0.0, f64::max);
        let min = self
            .pivot_magnitudes
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    /// Solves `A x = b` in place. Returns `false` on a zero pivot.
    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, b: &mut [Complex64]) -> bool {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk == ZERO {
                continue;
            }
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] -= self.multipliers[k * kl + (r - k - 1)] * bk;
            }
        }
        for i in (0..n).rev() {
            let diag = self.data[self.slot(i, i)];
            if diag == ZERO {
                return false;
            }
            let mut acc = b[i];
            for j in i + 1..=(i + kl + ku).min(n - 1) {
                acc -= self.data[self.slot(i, j)] * b[j];
            }
            b[i] = acc / diag;
        }
        true
    }
}

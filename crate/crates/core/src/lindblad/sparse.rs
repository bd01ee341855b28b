use num_complex::Complex64;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(
                r < rows && c < cols,
                "triplet ({r}, {c}) outside {rows}x{cols}"
            );
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_of.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in row_of.into_iter().zip(col_idx).zip(values) {
            if v != Complex64::new(0.0, 0.0) {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx: keep_cols,
            values: keep_vals,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (r, out) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            *out = self.col_idx[span.clone()]
                .iter()
                .zip(&self.values[span])
                .fold(Complex64::new(0.0, 0.0), |acc, (&c, v)| acc + v * x[c]);
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y += factor · A x`.
    pub fn mul_vec_add(&self, factor: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            let dot = self.col_idx[span.clone()]
                .iter()
                .zip(&self.values[span])
                .fold(Complex64::new(0.0, 0.0), |acc, (&c, v)| acc + v * x[c]);
            *out += factor * dot;
        }
    }

    /// Largest row sum of `|A_ij|`, a bound on the spectral radius.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Lower and upper bandwidths `(max(i - j), max(j - i))` over stored entries.
    pub fn bandwidths(&self) -> (usize, usize) {
        self.iter().fold((0, 0), |(kl, ku), (r, c, _)| {
            if r > c {
                (kl.max(r - c), ku)
            } else {
                (kl, ku.max(c - r))
            }
        })
    }
}

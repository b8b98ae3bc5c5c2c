//! Compressed sparse row storage for real symmetric operators.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Row count above which [`CsrMatrix::matvec`] splits rows across threads.
const PAR_MATVEC_MIN_ROWS: usize = 4096;

/// Real matrix in compressed sparse row form.
///
/// Column indices within a row are strictly ascending and duplicate
/// entries are summed at construction, so two matrices built from the
/// same triplets compare equal entry for entry.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed; explicit zeros produced by the sum are kept.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Self {
        triplets.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
            last = Some((r, c));
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries of row `r` as `(col, value)` pairs, ascending in col.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> Self {
        let triplets = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, triplets)
    }

    /// True when every stored entry has a bitwise identical mirror.
    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols
            && self
                .triplets()
                .all(|(r, c, v)| self.get(c, r).to_bits() == v.to_bits())
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        let row_dot = |r: usize| -> f64 { self.row(r).map(|(c, v)| v * x[c]).sum() };
        if self.nrows >= PAR_MATVEC_MIN_ROWS {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(r, out)| *out = row_dot(r));
        } else {
            for (r, out) in y.iter_mut().enumerate() {
                *out = row_dot(r);
            }
        }
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.nrows);
        self.matvec_into(x.as_slice(), y.as_mut_slice());
        y
    }

    /// Sparse-sparse product `A B`.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut triplets = Vec::new();
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    triplets.push((r, c, a * b));
                }
            }
        }
        CsrMatrix::from_triplets(self.nrows, other.ncols, triplets)
    }

    /// Elementwise `A + B`.
    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let triplets = self.triplets().chain(other.triplets()).collect();
        CsrMatrix::from_triplets(self.nrows, self.ncols, triplets)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    /// `⟨x| A |y⟩`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        (0..self.nrows)
            .map(|r| x[r] * self.row(r).map(|(c, v)| v * y[c]).sum::<f64>())
            .sum()
    }
}

use nalgebra::{DMatrix, DVector};

use crate::qspace::{C64, ZERO};

/// Square complex matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    /// Assembles from (row, col, value) triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if rows.last() == Some(&r) && col_idx.last() == Some(&c) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
            }
        }
        let mut keep_cols = Vec::with_capacity(col_idx.len());
        let mut keep_vals = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(col_idx).zip(values) {
            if v != ZERO {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx: keep_cols,
            values: keep_vals,
        }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        let mut t = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] != ZERO {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates the stored entries of row `i` as (column, value).
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.row(i).find(|&(c, _)| c == j).map_or(ZERO, |(_, v)| v)
    }

    /// `out = self · x`.
    pub fn mul_vec_into(&self, x: &[C64], out: &mut [C64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(out.len(), self.n);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn mul_vec(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.n);
        self.mul_vec_into(x.as_slice(), out.as_mut_slice());
        out
    }

    /// `y† · self` for a dense row vector y, returned as a column.
    pub fn left_mul(&self, y: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.n);
        for i in 0..self.n {
            let yi = y[i].conj();
            if yi == ZERO {
                continue;
            }
            for (c, v) in self.row(i) {
                out[c] += yi * v;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                m[(i, c)] = v;
            }
        }
        m
    }

    /// Sum of moduli along the largest row.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut s = self.clone();
        s.values.iter_mut().for_each(|v| *v *= c);
        s
    }

    /// `self + c·I`.
    pub fn shift(&self, c: C64) -> Self {
        let mut t: Vec<_> = (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, v)| (i, j, v)))
            .collect();
        t.extend((0..self.n).map(|i| (i, i, c)));
        Self::from_triplets(self.n, t)
    }
}

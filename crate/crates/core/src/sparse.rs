//! Minimal compressed-sparse-row matrices.
//!
//! Two uses: integer incidence operators (entries in {-1, +1}) where exact
//! arithmetic matters, and the assembled f64 saddle-point blocks. Only the
//! operations the solver and the structural audits need are provided.

use std::ops::{AddAssign, Mul};

#[derive(Clone, Debug)]
pub struct Csr<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Copy + PartialEq + Default + AddAssign> Csr<T> {
    /// Build from triplets, summing duplicates and dropping exact zeros.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, _, _) in triplets {
            debug_assert!(r < nrows);
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_unstable_by_key(|&i| (triplets[i].0, triplets[i].1));

        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let zero = T::default();
        let mut prev: Option<(usize, usize)> = None;
        for &i in &order {
            let (r, c, v) = triplets[i];
            debug_assert!(c < ncols);
            if prev == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                // finalize previous entry: drop it if it summed to zero
                if let Some(last) = values.last() {
                    if *last == zero {
                        values.pop();
                        col_idx.pop();
                        let (pr, _) = prev.unwrap();
                        row_ptr[pr + 1] -= 1;
                    }
                }
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                prev = Some((r, c));
            }
        }
        if let Some(last) = values.last() {
            if *last == zero {
                values.pop();
                col_idx.pop();
                let (pr, _) = prev.unwrap();
                row_ptr[pr + 1] -= 1;
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[T]) {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }
}

impl<T> Csr<T>
where
    T: Copy + PartialEq + Default + AddAssign + Mul<Output = T>,
{
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![T::default(); self.nrows];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            let mut acc = T::default();
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
        y
    }

    /// Sparse-sparse product, exact for integer types.
    pub fn mul_csr(&self, other: &Csr<T>) -> Csr<T> {
        assert_eq!(self.ncols, other.nrows);
        let mut triplets = Vec::new();
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&k, &v) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(k);
                for (&c, &ov) in ocols.iter().zip(ovals) {
                    triplets.push((r, c, v * ov));
                }
            }
        }
        Csr::from_triplets(self.nrows, other.ncols, &triplets)
    }

    pub fn transpose(&self) -> Csr<T> {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                triplets.push((c, r, v));
            }
        }
        Csr::from_triplets(self.ncols, self.nrows, &triplets)
    }
}

impl Csr<f64> {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_and_cancel() {
        let t = vec![(0, 0, 1i64), (0, 0, 2), (1, 1, 5), (0, 1, 3), (0, 1, -3)];
        let m = Csr::from_triplets(2, 2, &t);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.mul_vec(&[1, 1]), vec![3, 5]);
    }

    #[test]
    fn product_and_transpose() {
        // [[1, 2], [0, 1]] * [[1], [1]] = [[3], [1]]
        let a = Csr::from_triplets(2, 2, &[(0, 0, 1i64), (0, 1, 2), (1, 1, 1)]);
        let b = Csr::from_triplets(2, 1, &[(0, 0, 1i64), (1, 0, 1)]);
        let c = a.mul_csr(&b);
        assert_eq!(c.mul_vec(&[1]), vec![3, 1]);
        let at = a.transpose();
        assert_eq!(at.mul_vec(&[1, 1]), vec![1, 3]);
    }
}

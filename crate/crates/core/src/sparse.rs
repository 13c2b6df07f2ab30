//! Sparse complex matrices in compressed row form.
//!
//! Every operator in the joint qubit-oscillator space is block tridiagonal
//! in the occupation number, so a row never holds more than a handful of
//! entries. Operators are immutable once built and safe to share between
//! threads.

use ndarray::prelude::*;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Sparse matrix in CSR layout with an optional Hermitian marker.
///
/// The Hermitian flag is verified at construction: for every stored entry
/// (i, j, v) the transposed entry (j, i, conj v) must be stored exactly.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
    hermitian: bool,
}

impl SparseOperator {
    /// Build from (row, col, value) triplets. Duplicate positions are summed,
    /// exact zeros dropped. Fails if an index is out of range or the
    /// Hermitian flag is claimed but violated.
    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
        hermitian: bool,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, Complex64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.max(c) + 1,
                });
            }
            entries.push((r, c, v));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        // merge duplicates
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != Complex64::ZERO);

        let mut row_ptr = vec![0usize; dim + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx: Vec<usize> = merged.iter().map(|&(_, c, _)| c).collect();
        let values: Vec<Complex64> = merged.iter().map(|&(_, _, v)| v).collect();

        let op = Self {
            dim,
            row_ptr,
            col_idx,
            values,
            hermitian,
        };
        if hermitian && op.hermiticity_defect() != 0.0 {
            return Err(Error::InvalidParameter {
                name: "hermitian",
                reason: format!(
                    "operator flagged hermitian but max |M - M^\u{2020}| = {:.3e}",
                    op.hermiticity_defect()
                ),
            });
        }
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, Complex64::ONE)), true)
            .expect("identity is always valid")
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Iterate stored entries as (row, col, value).
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// Entries of one row as parallel (column, value) slices.
    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[Complex64]) {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => Complex64::ZERO,
        }
    }

    /// max |M - M^dagger| over all positions; 0.0 means exactly Hermitian.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for (r, c, v) in self.iter() {
            let d = (v - self.get(c, r).conj()).norm();
            if d > defect {
                defect = d;
            }
        }
        defect
    }

    /// y = M x
    pub fn apply(&self, x: &Array1<Complex64>) -> Array1<Complex64> {
        assert_eq!(x.len(), self.dim, "operand length mismatch");
        let xs = x.as_slice().expect("contiguous state vector");
        let mut y = Array1::<Complex64>::zeros(self.dim);
        let ys = y.as_slice_mut().unwrap();
        if self.dim >= 4096 {
            ys.par_iter_mut().enumerate().for_each(|(r, out)| {
                *out = self.row_dot(r, xs);
            });
        } else {
            for (r, out) in ys.iter_mut().enumerate() {
                *out = self.row_dot(r, xs);
            }
        }
        y
    }

    #[inline]
    fn row_dot(&self, r: usize, xs: &[Complex64]) -> Complex64 {
        let (cols, vals) = self.row(r);
        let mut acc = Complex64::ZERO;
        for (&c, &v) in cols.iter().zip(vals) {
            acc += v * xs[c];
        }
        acc
    }

    /// <x| M |x>. Real part only makes sense for Hermitian M; the full
    /// complex value is returned.
    pub fn expectation(&self, x: &Array1<Complex64>) -> Complex64 {
        let mx = self.apply(x);
        x.iter().zip(mx.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut m = Array2::zeros((self.dim, self.dim));
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.dim, triplets, self.hermitian).expect("valid by construction")
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let herm = self.hermitian && factor.im == 0.0;
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| (r, c, factor * v)).collect();
        Self::from_triplets(self.dim, triplets, herm).expect("valid by construction")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let triplets: Vec<_> = self.iter().chain(other.iter()).collect();
        Self::from_triplets(self.dim, triplets, self.hermitian && other.hermitian)
    }

    /// Sparse-sparse product. Meant for construction and tests, not hot loops.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut triplets = Vec::new();
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            for (&k, &v) in cols.iter().zip(vals) {
                let (kcols, kvals) = other.row(k);
                for (&c, &w) in kcols.iter().zip(kvals) {
                    triplets.push((r, c, v * w));
                }
            }
        }
        Self::from_triplets(self.dim, triplets, false)
    }

    /// [A, B] = AB - BA
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.add(&ba.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Kronecker product, row index = i_a * dim(b) + i_b.
    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for (ra, ca, va) in self.iter() {
            for (rb, cb, vb) in other.iter() {
                triplets.push((ra * other.dim + rb, ca * other.dim + cb, va * vb));
            }
        }
        Self::from_triplets(dim, triplets, self.hermitian && other.hermitian)
            .expect("kron of valid operators is valid")
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Upper bound on the spectral radius from Gershgorin disks.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                let (cols, vals) = self.row(r);
                let mut center = 0.0;
                let mut radius = 0.0;
                for (&c, &v) in cols.iter().zip(vals) {
                    if c == r {
                        center = v.norm();
                    } else {
                        radius += v.norm();
                    }
                }
                center + radius
            })
            .fold(0.0, f64::max)
    }
}

/// Left product Y = M X for a dense, row-major X (used by the dissipative
/// propagator; parallel over output rows).
pub fn sparse_dense_mul(m: &SparseOperator, x: &Array2<Complex64>, y: &mut Array2<Complex64>) {
    let n = m.dim();
    assert_eq!(x.dim(), (n, n));
    assert_eq!(y.dim(), (n, n));
    let xs = x.as_slice().expect("row-major dense operand");
    let ys = y.as_slice_mut().expect("row-major dense output");
    ys.par_chunks_mut(n).enumerate().for_each(|(r, out)| {
        out.fill(Complex64::ZERO);
        let (cols, vals) = m.row(r);
        for (&k, &v) in cols.iter().zip(vals) {
            let src = &xs[k * n..(k + 1) * n];
            for (o, s) in out.iter_mut().zip(src) {
                *o += v * s;
            }
        }
    });
}

/// Right product Y = X M for a dense, row-major X.
pub fn dense_sparse_mul(x: &Array2<Complex64>, m: &SparseOperator, y: &mut Array2<Complex64>) {
    let n = m.dim();
    assert_eq!(x.dim(), (n, n));
    assert_eq!(y.dim(), (n, n));
    let xs = x.as_slice().expect("row-major dense operand");
    let ys = y.as_slice_mut().expect("row-major dense output");
    ys.par_chunks_mut(n).enumerate().for_each(|(r, out)| {
        out.fill(Complex64::ZERO);
        let src = &xs[r * n..(r + 1) * n];
        for (k, &xv) in src.iter().enumerate() {
            if xv == Complex64::ZERO {
                continue;
            }
            let (cols, vals) = m.row(k);
            for (&c, &v) in cols.iter().zip(vals) {
                out[c] += xv * v;
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triplets_merge_and_sort() {
        let m = SparseOperator::from_triplets(
            3,
            vec![(2, 1, c(1.0, 0.0)), (0, 0, c(2.0, 0.0)), (2, 1, c(0.5, 0.0))],
            false,
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(2, 1), c(1.5, 0.0));
        assert_eq!(m.get(0, 0), c(2.0, 0.0));
        assert_eq!(m.get(1, 1), Complex64::ZERO);
    }

    #[test]
    fn hermitian_flag_is_checked() {
        let bad = SparseOperator::from_triplets(2, vec![(0, 1, c(1.0, 1.0))], true);
        assert!(bad.is_err());
        let good = SparseOperator::from_triplets(
            2,
            vec![(0, 1, c(1.0, 1.0)), (1, 0, c(1.0, -1.0))],
            true,
        )
        .unwrap();
        assert_eq!(good.hermiticity_defect(), 0.0);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(SparseOperator::from_triplets(2, vec![(2, 0, c(1.0, 0.0))], false).is_err());
    }

    #[test]
    fn apply_matches_dense() {
        let m = SparseOperator::from_triplets(
            3,
            vec![
                (0, 1, c(1.0, 2.0)),
                (1, 0, c(1.0, -2.0)),
                (1, 2, c(0.0, -1.0)),
                (2, 1, c(0.0, 1.0)),
                (2, 2, c(3.0, 0.0)),
            ],
            true,
        )
        .unwrap();
        let x = ndarray::array![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5)];
        let y = m.apply(&x);
        let yd = m.to_dense().dot(&x);
        for (a, b) in y.iter().zip(yd.iter()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-14);
        }
    }

    #[test]
    fn kron_dimension_and_values() {
        let a = SparseOperator::from_triplets(2, vec![(0, 1, c(2.0, 0.0)), (1, 0, c(2.0, 0.0))], true)
            .unwrap();
        let b = SparseOperator::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert_eq!(k.nnz(), a.nnz() * b.nnz());
        assert_eq!(k.get(0 * 3 + 2, 1 * 3 + 2), c(2.0, 0.0));
    }

    #[test]
    fn dense_sparse_products_agree_with_dense_math() {
        let m = SparseOperator::from_triplets(
            4,
            vec![
                (0, 0, c(1.0, 0.0)),
                (0, 1, c(0.0, 1.0)),
                (1, 0, c(0.0, -1.0)),
                (2, 3, c(2.0, 0.5)),
                (3, 2, c(2.0, -0.5)),
            ],
            true,
        )
        .unwrap();
        let x = Array2::from_shape_fn((4, 4), |(i, j)| c((i + 1) as f64, j as f64 - 1.5));
        let mut left = Array2::zeros((4, 4));
        let mut right = Array2::zeros((4, 4));
        sparse_dense_mul(&m, &x, &mut left);
        dense_sparse_mul(&x, &m, &mut right);
        let ld = m.to_dense().dot(&x);
        let rd = x.dot(&m.to_dense());
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(left[(i, j)].re, ld[(i, j)].re, epsilon = 1e-13);
                assert_abs_diff_eq!(left[(i, j)].im, ld[(i, j)].im, epsilon = 1e-13);
                assert_abs_diff_eq!(right[(i, j)].re, rd[(i, j)].re, epsilon = 1e-13);
                assert_abs_diff_eq!(right[(i, j)].im, rd[(i, j)].im, epsilon = 1e-13);
            }
        }
    }
}

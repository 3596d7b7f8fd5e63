//! Dense row-major matrices, LU factorization and small vector kernels.
//!
//! Everything here is desk scale: the largest operator in the shipped
//! problems is 254x254, so dense storage and O(n^3) factorizations are fine.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    /// Build from row-major entries, rejecting NaN/Inf.
    pub fn new(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::ShapeMismatch {
                context: "SquareMatrix::new",
                expected: dim * dim,
                got: data.len(),
            });
        }
        let m = SquareMatrix { dim, data };
        if !m.is_finite() {
            return Err(Error::NonFiniteInput {
                context: "SquareMatrix::new",
            });
        }
        Ok(m)
    }

    pub fn zeros(dim: usize) -> Self {
        SquareMatrix {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = T::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        SquareMatrix { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: T) -> Self {
        SquareMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        SquareMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        SquareMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// Matrix product, ikj loop. Rows of `self` that multiply a zero factor
    /// are skipped, which pays off on block-structured operators.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row_out = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a_ik = self.data[i * n + k];
                if a_ik == T::zero() {
                    continue;
                }
                let row_b = &other.data[k * n..(k + 1) * n];
                for (o, &b) in row_out.iter_mut().zip(row_b) {
                    *o = *o + a_ik * b;
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, x: &[T]) -> Vec<T> {
        debug_assert_eq!(self.dim, x.len());
        let mut out = vec![T::zero(); self.dim];
        self.mat_vec_into(x, &mut out);
        out
    }

    pub fn mat_vec_into(&self, x: &[T], out: &mut [T]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> T {
        let mut best = T::zero();
        for i in 0..self.dim {
            let s = self.row(i).iter().map(|v| v.abs()).fold(T::zero(), |a, b| a + b);
            if s > best {
                best = s;
            }
        }
        best
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    /// (A + A^T)/2.
    pub fn symmetric_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.dim, |i, j| (self.get(i, j) + self.get(j, i)) * half)
    }

    /// Zero out entries negligibly small relative to the matrix norm.
    ///
    /// Matrix exponentials of banded wave operators carry far-field tails
    /// reaching into the subnormal range; arithmetic on those entries is two
    /// orders of magnitude slower on common hardware while contributing less
    /// than 1e-250 relative. Cached operators are cleaned with this before
    /// entering hot loops.
    pub fn flush_negligible(&mut self) {
        let threshold = self.inf_norm() * T::lit(1e-250);
        if threshold == T::zero() {
            return;
        }
        for v in &mut self.data {
            if v.abs() < threshold {
                *v = T::zero();
            }
        }
    }
}

/// Unrolled dot product; four fused accumulators keep the FP pipeline busy.
#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 4];
    let a4 = a.chunks_exact(4);
    let b4 = b.chunks_exact(4);
    let mut rest = T::zero();
    for (&x, &y) in a4.remainder().iter().zip(b4.remainder()) {
        rest = x.mul_add(y, rest);
    }
    for (ca, cb) in a4.zip(b4) {
        acc[0] = ca[0].mul_add(cb[0], acc[0]);
        acc[1] = ca[1].mul_add(cb[1], acc[1]);
        acc[2] = ca[2].mul_add(cb[2], acc[2]);
        acc[3] = ca[3].mul_add(cb[3], acc[3]);
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + rest
}

/// y += alpha * x
#[inline]
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = alpha.mul_add(xi, *yi);
    }
}

pub fn vec_inf_norm<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|v| v.abs()).fold(T::zero(), T::max)
}

pub fn vec_norm2<T: Scalar>(x: &[T]) -> T {
    dot(x, x).sqrt()
}

pub fn vec_sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn vec_is_finite<T: Scalar>(x: &[T]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// LU factorization with partial pivoting.
pub struct LuFactors<T> {
    dim: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
    pivot_ratio: T,
}

impl<T: Scalar> LuFactors<T> {
    pub fn factor(m: &SquareMatrix<T>) -> Result<Self> {
        let n = m.dim();
        let mut lu = m.data().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.inf_norm();
        let tiny = T::epsilon() * scale * T::from_usize_exact(n.max(1));
        let mut max_piv = T::zero();
        let mut min_piv = T::infinity();
        let mut pivot_row = vec![T::zero(); n];

        for k in 0..n {
            let mut best = lu[k * n + k].abs();
            let mut best_row = k;
            for i in k + 1..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    best_row = i;
                }
            }
            if best <= tiny || !best.is_finite() {
                let ratio = if min_piv > T::zero() && min_piv.is_finite() {
                    max_piv / best.max(T::min_positive_value())
                } else {
                    T::infinity()
                };
                return Err(Error::SingularMatrix {
                    pivot_ratio: ratio.to_f64_lossy(),
                });
            }
            if best_row != k {
                perm.swap(k, best_row);
                let (lo, hi) = lu.split_at_mut(best_row * n);
                lo[k * n..k * n + n].swap_with_slice(&mut hi[..n]);
            }
            let pivot = lu[k * n + k];
            max_piv = max_piv.max(pivot.abs());
            min_piv = min_piv.min(pivot.abs());
            let inv_p = T::one() / pivot;
            pivot_row[k + 1..n].copy_from_slice(&lu[k * n + k + 1..k * n + n]);
            let piv_tail = &pivot_row[k + 1..n];
            // two rows per pass: shares the pivot-row loads
            let mut i = k + 1;
            while i + 1 < n {
                let m0 = lu[i * n + k] * inv_p;
                let m1 = lu[(i + 1) * n + k] * inv_p;
                lu[i * n + k] = m0;
                lu[(i + 1) * n + k] = m1;
                let (r0, r1) = {
                    let (a, b) = lu.split_at_mut((i + 1) * n);
                    (
                        &mut a[i * n + k + 1..i * n + n],
                        &mut b[k + 1..n],
                    )
                };
                let (n0, n1) = (-m0, -m1);
                for ((w0, w1), &p) in r0.iter_mut().zip(r1.iter_mut()).zip(piv_tail) {
                    *w0 = n0.mul_add(p, *w0);
                    *w1 = n1.mul_add(p, *w1);
                }
                i += 2;
            }
            if i < n {
                let mult = lu[i * n + k] * inv_p;
                lu[i * n + k] = mult;
                let work_row = &mut lu[i * n + k + 1..i * n + n];
                let neg = -mult;
                for (w, &p) in work_row.iter_mut().zip(piv_tail) {
                    *w = neg.mul_add(p, *w);
                }
            }
        }
        Ok(LuFactors {
            dim: n,
            lu,
            perm,
            pivot_ratio: max_piv / min_piv,
        })
    }

    /// Crude conditioning indicator: largest over smallest pivot magnitude.
    pub fn pivot_ratio(&self) -> T {
        self.pivot_ratio
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.dim;
        debug_assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        // forward
        for i in 1..n {
            let row = &self.lu[i * n..i * n + i];
            let s = dot(row, &x[..i]);
            x[i] = x[i] - s;
        }
        // backward
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s = dot(&row[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solve A X = B column by column.
    pub fn solve_matrix(&self, b: &SquareMatrix<T>) -> SquareMatrix<T> {
        let n = self.dim;
        debug_assert_eq!(b.dim(), n);
        let mut out = SquareMatrix::zeros(n);
        let mut col = vec![T::zero(); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = b.get(i, j);
            }
            let x = self.solve(&col);
            for i in 0..n {
                out.set(i, j, x[i]);
            }
        }
        out
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns the eigenvalues unsorted. Only definiteness signs are consumed
/// downstream, so no eigenvectors are accumulated.
pub fn symmetric_eigenvalues<T: Scalar>(m: &SquareMatrix<T>) -> Vec<T> {
    let n = m.dim();
    let mut a = m.data().to_vec();
    let off = |a: &[T]| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s = s + a[i * n + j] * a[i * n + j];
                }
            }
        }
        s
    };
    let norm = m.inf_norm() + T::one();
    let tol = T::epsilon() * T::epsilon() * norm * norm;
    for _sweep in 0..60 {
        if off(&a) <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= T::epsilon() * norm {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = {
                    let s = if theta >= T::zero() { T::one() } else { -T::one() };
                    s / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let a = SquareMatrix::new(2, vec![4.0f64, 1.0, 2.0, 3.0]).unwrap();
        let lu = LuFactors::factor(&a).unwrap();
        let x = lu.solve(&[9.0, 13.0]);
        assert!((x[0] - 1.4).abs() < 1e-14);
        assert!((x[1] - 3.4).abs() < 1e-14);
    }

    #[test]
    fn lu_rejects_singular() {
        let a = SquareMatrix::new(2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            LuFactors::factor(&a),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn constructor_rejects_nan() {
        assert!(matches!(
            SquareMatrix::new(2, vec![1.0, f64::NAN, 0.0, 1.0]),
            Err(Error::NonFiniteInput { .. })
        ));
    }

    #[test]
    fn jacobi_eigenvalues_of_diagonal() {
        let a =
            SquareMatrix::new(3, vec![2.0f64, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 5.0]).unwrap();
        let mut ev = symmetric_eigenvalues(&a);
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-12);
        assert!((ev[1] - 2.0).abs() < 1e-12);
        assert!((ev[2] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_eigenvalues_symmetric_2x2() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let a = SquareMatrix::new(2, vec![2.0f64, 1.0, 1.0, 2.0]).unwrap();
        let mut ev = symmetric_eigenvalues(&a);
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn matmul_matches_manual() {
        let a = SquareMatrix::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = SquareMatrix::new(2, vec![5.0, 6.0, 7.0, 8.0]).unwrap();
        let c = a.mul(&b);
        assert_eq!(c.data(), &[19.0, 22.0, 43.0, 50.0]);
    }
}

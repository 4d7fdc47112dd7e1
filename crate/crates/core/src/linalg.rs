//! Dense matrices over either scalar backend, with exact and numeric rank.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::{ExactField, GaussianRational, Scalar, C64};

/// Default relative tolerance for numeric rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// How [`matrix_rank`] decides rank.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RankMode {
    Exact,
    /// Count singular values above `tol · σ_max`.
    Numeric { tol: f64 },
}

impl Default for RankMode {
    fn default() -> Self {
        RankMode::Numeric { tol: DEFAULT_RANK_TOL }
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    /// Row-major construction. Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_c64(&self) -> Matrix<C64> {
        self.map(|x| x.to_c64())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
            }
            acc
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    /// Classical Kronecker product: the block matrix `[a_ij · B]`.
    pub fn kronecker(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols).clone()
                * other.get(i % other.rows, j % other.cols).clone()
        })
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols).clone()
            } else {
                S::zero()
            }
        })
    }
}

impl<F: ExactField> Matrix<F> {
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

impl Matrix<GaussianRational> {
    pub fn from_ints(rows: usize, cols: usize, vals: &[i64]) -> Self {
        Self::from_vec(rows, cols, vals.iter().map(|&v| GaussianRational::from_i64(v)).collect())
    }

    /// Exact rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut work = self.integral_rows().0;
        bareiss(&mut work, self.cols).0
    }

    /// Exact determinant. Panics on non-square input.
    pub fn determinant(&self) -> GaussianRational {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        if self.rows == 0 {
            return GaussianRational::one();
        }
        let (mut work, scales) = self.integral_rows();
        let (rank, swaps) = bareiss(&mut work, self.cols);
        if rank < self.rows {
            return GaussianRational::zero();
        }
        let n = self.rows;
        let last = &work[n - 1][n - 1];
        let mut det = GaussianRational::new(
            BigRational::from_integer(last.re.clone()),
            BigRational::from_integer(last.im.clone()),
        );
        if swaps % 2 == 1 {
            det = -det;
        }
        let mut denom = BigInt::one();
        for s in scales {
            denom *= s;
        }
        let denom = GaussianRational::real(BigRational::from_integer(denom));
        &det / &denom
    }

    /// Exact inverse, or `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a: Vec<Vec<GaussianRational>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| {
                    if i == j {
                        GaussianRational::one()
                    } else {
                        GaussianRational::zero()
                    }
                }));
                r
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(c, p);
            let inv = a[c][c].inv();
            for x in a[c].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    for k in 0..2 * n {
                        let t = &f * &a[c][k];
                        a[r][k] = &a[r][k] - &t;
                    }
                }
            }
        }
        Some(Self::from_fn(n, n, |i, j| a[i][n + j].clone()))
    }

    /// Rows scaled to Gaussian integers, plus the scale used per row.
    fn integral_rows(&self) -> (Vec<Vec<GaussInt>>, Vec<BigInt>) {
        let mut rows = Vec::with_capacity(self.rows);
        let mut scales = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            let mut l = BigInt::one();
            for x in row {
                l = num_integer::Integer::lcm(&l, &x.denominator_lcm());
            }
            let lq = BigRational::from_integer(l.clone());
            rows.push(
                row.iter()
                    .map(|x| GaussInt {
                        re: (&x.re * &lq).to_integer(),
                        im: (&x.im * &lq).to_integer(),
                    })
                    .collect(),
            );
            scales.push(l);
        }
        (rows, scales)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn one() -> Self {
        Self { re: BigInt::one(), im: BigInt::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn mul(&self, o: &Self) -> Self {
        Self { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
    fn sub(&self, o: &Self) -> Self {
        Self { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    /// Division known to be exact.
    fn div_exact(&self, o: &Self) -> Self {
        let n = &o.re * &o.re + &o.im * &o.im;
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        debug_assert!((&re % &n).is_zero() && (&im % &n).is_zero(), "inexact Bareiss step");
        Self { re: re / &n, im: im / n }
    }
}

/// Bareiss elimination in place; returns (rank, row swaps).
fn bareiss(m: &mut [Vec<GaussInt>], cols: usize) -> (usize, usize) {
    let rows = m.len();
    let mut prev = GaussInt::one();
    let mut r = 0;
    let mut swaps = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        if p != r {
            m.swap(p, r);
            swaps += 1;
        }
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let v = piv.mul(&row[j]).sub(&lead.mul(&pivot_row[j]));
                row[j] = v.div_exact(&prev);
            }
            row[c] = GaussInt { re: BigInt::zero(), im: BigInt::zero() };
        }
        prev = piv;
        r += 1;
    }
    (r, swaps)
}

impl Matrix<C64> {
    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let mut s: Vec<f64> = self.to_nalgebra().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }

    /// Number of singular values above `tol · σ_max`.
    pub fn numeric_rank(&self, tol: f64) -> usize {
        let s = self.singular_values();
        match s.first() {
            Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > tol * smax).count(),
            _ => 0,
        }
    }

    /// Thin SVD `A = U diag(s) Vᴴ`, singular values descending.
    pub fn svd(&self) -> (Matrix<C64>, Vec<f64>, Matrix<C64>) {
        let svd = self.to_nalgebra().svd(true, true);
        let u = svd.u.expect("U requested");
        let vt = svd.v_t.expect("Vᴴ requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
        let k = order.len();
        let um = Matrix::from_fn(self.rows, k, |i, j| u[(i, order[j])]);
        let vm = Matrix::from_fn(k, self.cols, |i, j| vt[(order[i], j)]);
        let s = order.iter().map(|&i| svd.singular_values[i]).collect();
        (um, s, vm)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Rank of an exact matrix, either exactly or through its floating-point image.
pub fn matrix_rank(m: &Matrix<GaussianRational>, mode: RankMode) -> usize {
    match mode {
        RankMode::Exact => m.rank(),
        RankMode::Numeric { tol } => m.to_c64().numeric_rank(tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_identity_ranks() {
        assert_eq!(Matrix::<GaussianRational>::zeros(3, 4).rank(), 0);
        assert_eq!(Matrix::<GaussianRational>::identity(5).rank(), 5);
        assert_eq!(Matrix::<GaussianRational>::zeros(0, 0).rank(), 0);
        assert_eq!(Matrix::<C64>::zeros(2, 2).numeric_rank(1e-9), 0);
    }

    #[test]
    fn determinant_with_fractions_and_imaginary_parts() {
        let half = GaussianRational::ratio(1, 2);
        let i = GaussianRational::i();
        let m = Matrix::from_vec(
            2,
            2,
            vec![half.clone(), i.clone(), GaussianRational::from_i64(2), GaussianRational::from_i64(3)],
        );
        // 1/2·3 − 2i
        assert_eq!(m.determinant(), GaussianRational::new(
            BigRational::new(3.into(), 2.into()),
            BigRational::from_integer((-2).into()),
        ));
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(2));
    }

    #[test]
    fn rank_deficient_with_column_skips() {
        let m = Matrix::from_ints(3, 4, &[0, 1, 2, 3, 0, 2, 4, 6, 0, 0, 1, 1]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.transpose().rank(), 2);
    }

    #[test]
    fn classical_kronecker_blocks() {
        let a = Matrix::from_ints(2, 2, &[1, 2, 3, 4]);
        let b = Matrix::from_ints(2, 2, &[0, 1, 1, 0]);
        let k = a.kronecker(&b);
        assert_eq!(*k.get(0, 1), GaussianRational::from_i64(1));
        assert_eq!(*k.get(3, 2), GaussianRational::from_i64(4));
        assert_eq!(k.rank(), 4);
        assert_eq!(a.direct_sum(&b).rank(), 4);
    }

    #[test]
    fn svd_reconstructs() {
        let m = Matrix::from_fn(3, 2, |i, j| C64::new((i + 2 * j) as f64, (i as f64) - 0.5));
        let (u, s, vh) = m.svd();
        let sm = Matrix::from_fn(s.len(), s.len(), |i, j| if i == j { C64::new(s[i], 0.0) } else { C64::new(0.0, 0.0) });
        let r = u.matmul(&sm).matmul(&vh);
        for (a, b) in r.data().iter().zip(m.data()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(s[0] >= s[1]);
    }
}

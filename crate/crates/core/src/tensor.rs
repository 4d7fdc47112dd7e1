//! Dense d-mode tensors, rank-one terms and decompositions.
//!
//! Entries are stored row-major with mode 1 varying slowest, so flattening
//! onto a leading block of modes is a reshape. Mode indices in this API are
//! 0-based; [`DenseTensor::from_kets`] accepts the 1-based ket labels used in
//! the physics literature (`|112⟩` is the entry at 0-based `[0, 0, 1]`).

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{ExactField, GaussianRational, Scalar, C64};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("a shape needs at least one mode".into()));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("zero-sized mode in {dims:?}")));
        }
        dims.iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidShape(format!("entry count of {dims:?} overflows")))?;
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of modes `d`.
    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// `N(n) = ∏ n_j`.
    pub fn n_entries(&self) -> usize {
        self.dims.iter().product()
    }

    /// `M(n) = 1 − d + Σ n_j`, the dimension of the rank-one cone.
    pub fn segre_dim(&self) -> usize {
        1 + self.dims.iter().sum::<usize>() - self.order()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.order()];
        for j in (0..self.order().saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.dims[j + 1];
        }
        s
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order());
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &n)| {
            debug_assert!(i < n);
            acc * n + i
        })
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order()];
        for j in (0..self.order()).rev() {
            idx[j] = flat % self.dims[j];
            flat /= self.dims[j];
        }
        idx
    }

    /// Drops modes of size 1, keeping a single mode if nothing else remains.
    pub fn without_singletons(&self) -> Shape {
        let dims: Vec<usize> = self.dims.iter().copied().filter(|&n| n > 1).collect();
        if dims.is_empty() {
            Shape { dims: vec![1] }
        } else {
            Shape { dims }
        }
    }

    pub fn sorted(&self) -> Shape {
        let mut dims = self.dims.clone();
        dims.sort_unstable();
        Shape { dims }
    }
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Odometer over all multi-indices of a shape, in row-major order.
pub struct IndexIter {
    dims: Vec<usize>,
    cur: Option<Vec<usize>>,
}

impl IndexIter {
    pub fn new(dims: &[usize]) -> Self {
        let cur = if dims.iter().all(|&n| n > 0) { Some(vec![0; dims.len()]) } else { None };
        Self { dims: dims.to_vec(), cur }
    }
}

impl Iterator for IndexIter {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let mut next = out.clone();
        let mut j = next.len();
        loop {
            if j == 0 {
                self.cur = None;
                break;
            }
            j -= 1;
            next[j] += 1;
            if next[j] < self.dims[j] {
                self.cur = Some(next);
                break;
            }
            next[j] = 0;
        }
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<S> {
    shape: Shape,
    entries: Vec<S>,
}

pub type ExactTensor = DenseTensor<GaussianRational>;
pub type Tensor = DenseTensor<C64>;

impl<S: Scalar> DenseTensor<S> {
    pub fn zeros(shape: Shape) -> Self {
        let n = shape.n_entries();
        Self { shape, entries: vec![S::zero(); n] }
    }

    pub fn from_entries(shape: Shape, entries: Vec<S>) -> Result<Self> {
        if entries.len() != shape.n_entries() {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for shape {shape} (expected {})",
                entries.len(),
                shape.n_entries()
            )));
        }
        Ok(Self { shape, entries })
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> S) -> Self {
        let entries = IndexIter::new(shape.dims()).map(|idx| f(&idx)).collect();
        Self { shape, entries }
    }

    /// Sum of `coeff·|l₁…l_d⟩` with 1-based labels.
    pub fn from_kets(dims: &[usize], kets: &[(&[usize], S)]) -> Result<Self> {
        let shape = Shape::new(dims.to_vec())?;
        let mut t = Self::zeros(shape);
        for (labels, c) in kets {
            if labels.len() != dims.len()
                || labels.iter().zip(dims).any(|(&l, &n)| l == 0 || l > n)
            {
                return Err(Error::InvalidArgument(format!("ket label {labels:?} outside {dims:?}")));
            }
            let idx: Vec<usize> = labels.iter().map(|l| l - 1).collect();
            let k = t.shape.linear_index(&idx);
            t.entries[k] = t.entries[k].clone() + c.clone();
        }
        Ok(t)
    }

    /// `I(k,d) = Σ_i |i⟩^{⊗d}` in `(ℂ^k)^{⊗d}`.
    pub fn identity_tensor(k: usize, d: usize) -> Result<Self> {
        let shape = Shape::new(vec![k; d])?;
        Ok(Self::from_fn(shape, |idx| {
            if idx.iter().all(|&i| i == idx[0]) {
                S::one()
            } else {
                S::zero()
            }
        }))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<S> {
        self.entries
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.entries[self.shape.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let k = self.shape.linear_index(idx);
        self.entries[k] = v;
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DenseTensor<T> {
        DenseTensor { shape: self.shape.clone(), entries: self.entries.iter().map(f).collect() }
    }

    pub fn to_c64(&self) -> Tensor {
        self.map(|x| x.to_c64())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.require_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect();
        Ok(Self { shape: self.shape.clone(), entries })
    }

    fn require_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!("{} vs {}", self.shape, other.shape)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    /// `⟨T,U⟩ = Σ T·conj(U)`.
    pub fn inner_product(&self, other: &Self) -> Result<S> {
        self.require_same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.conj()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x.modulus().powi(2)).sum::<f64>().sqrt()
    }

    /// Matrix with rows indexed by `left_modes` (0-based, any order; the
    /// layout always follows ascending mode order) and columns by the rest.
    pub fn flatten(&self, left_modes: &[usize]) -> Result<Matrix<S>> {
        let d = self.order();
        let mut left: Vec<usize> = left_modes.to_vec();
        left.sort_unstable();
        left.dedup();
        if left.is_empty() || left.len() >= d || left.iter().any(|&m| m >= d) {
            return Err(Error::InvalidArgument(format!(
                "flattening needs a nonempty proper subset of the {d} modes, got {left_modes:?}"
            )));
        }
        let right: Vec<usize> = (0..d).filter(|m| !left.contains(m)).collect();
        let dims = self.dims();
        let rows: usize = left.iter().map(|&m| dims[m]).product();
        let cols: usize = right.iter().map(|&m| dims[m]).product();
        let mut data = vec![S::zero(); rows * cols];
        for (k, idx) in IndexIter::new(dims).enumerate() {
            let r = left.iter().fold(0, |acc, &m| acc * dims[m] + idx[m]);
            let c = right.iter().fold(0, |acc, &m| acc * dims[m] + idx[m]);
            data[r * cols + c] = self.entries[k].clone();
        }
        Ok(Matrix::from_vec(rows, cols, data))
    }

    /// Reorders modes: mode `j` of the result is mode `perm[j]` of `self`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        let d = self.order();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of {d} modes")));
        }
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims()[p]).collect();
        let shape = Shape::new(dims)?;
        let mut src = vec![0; d];
        Ok(Self::from_fn(shape, |idx| {
            for (j, &p) in perm.iter().enumerate() {
                src[p] = idx[j];
            }
            self.get(&src).clone()
        }))
    }

    /// Kronecker product: mode `j` of the result has size `n_j·p_j` and
    /// index `(i_T, i_U)` with the `T` index slower. The operand with fewer
    /// modes is padded with trailing singleton modes.
    pub fn kronecker(&self, other: &Self) -> Self {
        let d = self.order().max(other.order());
        let pad = |dims: &[usize]| {
            let mut v = dims.to_vec();
            v.resize(d, 1);
            v
        };
        let (a, b) = (pad(self.dims()), pad(other.dims()));
        let dims: Vec<usize> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let shape = Shape::new(dims).expect("product of valid shapes");
        let sa = Shape { dims: a };
        let sb = Shape { dims: b.clone() };
        let mut ia = vec![0; d];
        let mut ib = vec![0; d];
        Self::from_fn(shape, |idx| {
            for j in 0..d {
                ia[j] = idx[j] / b[j];
                ib[j] = idx[j] % b[j];
            }
            self.entries[sa.linear_index(&ia)].clone() * other.entries[sb.linear_index(&ib)].clone()
        })
    }

    /// Outer product `T ⊗ U`, concatenating mode lists.
    pub fn tensor_product(&self, other: &Self) -> Self {
        let mut dims = self.dims().to_vec();
        dims.extend_from_slice(other.dims());
        let shape = Shape::new(dims).expect("concatenation of valid shapes");
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a.clone() * b.clone());
            }
        }
        Self { shape, entries }
    }

    /// Block-diagonal direct sum of two tensors with the same number of modes.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::ShapeMismatch(format!(
                "direct sum of {}-mode and {}-mode tensors",
                self.order(),
                other.order()
            )));
        }
        let dims: Vec<usize> = self.dims().iter().zip(other.dims()).map(|(a, b)| a + b).collect();
        let shape = Shape::new(dims)?;
        let n = self.dims().to_vec();
        let mut shifted = vec![0; n.len()];
        Ok(Self::from_fn(shape, |idx| {
            if idx.iter().zip(&n).all(|(i, m)| i < m) {
                self.get(idx).clone()
            } else if idx.iter().zip(&n).all(|(i, m)| i >= m) {
                for (j, (&i, &m)) in idx.iter().zip(&n).enumerate() {
                    shifted[j] = i - m;
                }
                other.get(&shifted).clone()
            } else {
                S::zero()
            }
        }))
    }

    /// Contracts mode `mode` against `y` (bilinear pairing, no conjugation).
    pub fn contract(&self, mode: usize, y: &[S]) -> Result<Self> {
        let d = self.order();
        if mode >= d {
            return Err(Error::InvalidArgument(format!("mode {mode} out of range for {d} modes")));
        }
        if y.len() != self.dims()[mode] {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} against mode of size {}",
                y.len(),
                self.dims()[mode]
            )));
        }
        let mut dims = self.dims().to_vec();
        dims.remove(mode);
        if dims.is_empty() {
            dims.push(1);
        }
        let shape = Shape::new(dims)?;
        let mut out = Self::zeros(shape);
        let stride: usize = self.dims()[mode + 1..].iter().product();
        let n = self.dims()[mode];
        for (k, v) in self.entries.iter().enumerate() {
            let i = (k / stride) % n;
            let outer = k / (stride * n);
            let inner = k % stride;
            let t = outer * stride + inner;
            out.entries[t] = out.entries[t].clone() + v.clone() * y[i].clone();
        }
        Ok(out)
    }

    /// Applies the matrix `a` (of size `p × n_mode`) along `mode`.
    pub fn mode_product(&self, mode: usize, a: &Matrix<S>) -> Result<Self> {
        let d = self.order();
        if mode >= d || a.cols() != self.dims()[mode] {
            return Err(Error::ShapeMismatch(format!(
                "{}×{} matrix on mode {mode} of {}",
                a.rows(),
                a.cols(),
                self.shape
            )));
        }
        let mut dims = self.dims().to_vec();
        dims[mode] = a.rows();
        let shape = Shape::new(dims)?;
        let mut src = vec![0; d];
        Ok(Self::from_fn(shape, |idx| {
            src.copy_from_slice(idx);
            let mut acc = S::zero();
            for i in 0..a.cols() {
                src[mode] = i;
                acc = acc + a.get(idx[mode], i).clone() * self.get(&src).clone();
            }
            acc
        }))
    }

    /// Slice with `mode` fixed at `index`, as a tensor with that mode removed.
    pub fn slice(&self, mode: usize, index: usize) -> Result<Self> {
        let n = self.dims()[mode];
        let mut e = vec![S::zero(); n];
        e[index] = S::one();
        self.contract(mode, &e)
    }
}

impl<F: ExactField> DenseTensor<F> {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    /// Exact check of invariance under every permutation of modes.
    pub fn is_symmetric(&self) -> bool {
        let n = self.dims()[0];
        if self.dims().iter().any(|&m| m != n) {
            return false;
        }
        IndexIter::new(self.dims()).all(|idx| {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            self.get(&idx) == self.get(&sorted)
        })
    }
}

impl ExactTensor {
    pub fn from_ints(dims: &[usize], values: &[i64]) -> Result<Self> {
        let shape = Shape::new(dims.to_vec())?;
        Self::from_entries(shape, values.iter().map(|&v| GaussianRational::from_i64(v)).collect())
    }

    /// `‖T‖₂²` as an exact rational.
    pub fn frobenius_norm_sqr(&self) -> BigRational {
        self.entries.iter().fold(BigRational::zero(), |acc, x| acc + x.norm_sqr())
    }
}

impl Tensor {
    pub fn normalized(&self) -> Result<Tensor> {
        let n = self.frobenius_norm();
        if n == 0.0 {
            return Err(Error::ZeroTensor);
        }
        Ok(self.scale(&C64::new(1.0 / n, 0.0)))
    }

    /// Entrywise rationalization with a bounded denominator.
    pub fn rationalize(&self, max_den: u64) -> ExactTensor {
        self.map(|z| GaussianRational::rationalize(*z, max_den))
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64> {
        self.require_same_shape(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Numeric symmetry check with relative tolerance.
    pub fn is_symmetric_tol(&self, rel_tol: f64) -> bool {
        let n = self.dims()[0];
        if self.dims().iter().any(|&m| m != n) {
            return false;
        }
        let scale = self.frobenius_norm().max(f64::MIN_POSITIVE);
        IndexIter::new(self.dims()).all(|idx| {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            (self.get(&idx) - self.get(&sorted)).norm() <= rel_tol * scale
        })
    }
}

/// `weight · factor₁ ⊗ … ⊗ factor_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneTerm<S> {
    pub weight: S,
    pub factors: Vec<Vec<S>>,
}

impl<S: Scalar> RankOneTerm<S> {
    pub fn new(weight: S, factors: Vec<Vec<S>>) -> Self {
        Self { weight, factors }
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.len()).collect()
    }

    pub fn to_tensor(&self) -> Result<DenseTensor<S>> {
        let shape = Shape::new(self.lengths())?;
        let mut t = DenseTensor::from_fn(shape, |idx| {
            idx.iter()
                .zip(&self.factors)
                .fold(S::one(), |acc, (&i, f)| acc * f[i].clone())
        });
        t = t.scale(&self.weight);
        Ok(t)
    }

    /// Zero within `tol`: vanishing weight or any vanishing factor.
    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.weight.modulus() <= tol
            || self.factors.iter().any(|f| f.iter().map(|x| x.modulus().powi(2)).sum::<f64>().sqrt() <= tol)
    }
}

impl<F: ExactField> RankOneTerm<F> {
    pub fn is_zero(&self) -> bool {
        self.weight.is_zero() || self.factors.iter().any(|f| f.iter().all(|x| x.is_zero()))
    }
}

impl RankOneTerm<C64> {
    /// Same tensor with unit-norm factors and the norms absorbed in the weight.
    pub fn normalized(&self) -> Self {
        let mut weight = self.weight;
        let factors = self
            .factors
            .iter()
            .map(|f| {
                let n = f.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                weight *= n;
                if n > 0.0 {
                    f.iter().map(|x| x / n).collect()
                } else {
                    f.clone()
                }
            })
            .collect();
        Self { weight, factors }
    }
}

/// An ordered list of rank-one terms with a declared shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<S> {
    shape: Shape,
    terms: Vec<RankOneTerm<S>>,
}

impl<S: Scalar> Decomposition<S> {
    pub fn new(shape: Shape, terms: Vec<RankOneTerm<S>>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate() {
            if t.lengths() != shape.dims() {
                return Err(Error::ShapeMismatch(format!(
                    "term {i} has factor lengths {:?}, shape is {shape}",
                    t.lengths()
                )));
            }
        }
        Ok(Self { shape, terms })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn terms(&self) -> &[RankOneTerm<S>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_i weight_i · ⊗_j factor_{i,j}`.
    pub fn evaluate(&self) -> DenseTensor<S> {
        let mut out: DenseTensor<S> = DenseTensor::zeros(self.shape.clone());
        let dims = self.shape.dims().to_vec();
        for t in &self.terms {
            for (k, idx) in IndexIter::new(&dims).enumerate() {
                let v = idx
                    .iter()
                    .zip(&t.factors)
                    .fold(t.weight.clone(), |acc, (&i, f)| acc * f[i].clone());
                out.entries[k] = out.entries[k].clone() + v;
            }
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Decomposition<T> {
        Decomposition {
            shape: self.shape.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| RankOneTerm {
                    weight: f(&t.weight),
                    factors: t.factors.iter().map(|v| v.iter().map(&f).collect()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_c64(&self) -> Decomposition<C64> {
        self.map(|x| x.to_c64())
    }
}

/// Free-function form of [`Decomposition::evaluate`].
pub fn evaluate<S: Scalar>(dec: &Decomposition<S>) -> DenseTensor<S> {
    dec.evaluate()
}

/// Standard basis vector `e_i` (0-based) of length `n`.
pub fn basis_vector<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    (0..n).map(|k| if k == i { S::one() } else { S::zero() }).collect()
}

//! Symmetric tensors as homogeneous polynomials, named states, generic and
//! maximal symmetric ranks, and explicit Waring and border-rank constructions.
//!
//! A symmetric tensor `S ∈ (ℂⁿ)^{⊗d}` corresponds to
//! `f(x) = Σ_j c(j) f_j x^j` with `f_j = S_{i₁…i_d}` for any index tuple with
//! exponent vector `j` and `c(j) = d!/∏ j_l!`. Polynomials here store `f_j`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generic::field::{EchelonBasis, PrimeField};
use crate::generic::terracini::probe_seed;
use crate::scalar::{GaussianRational, Scalar, C64};
use crate::tensor::{Decomposition, DenseTensor, ExactTensor, IndexIter, RankOneTerm, Shape, Tensor};

/// Exponent vector `j = (j₁,…,j_n)` with `Σ j_l = d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentIndex(pub Vec<u32>);

impl ExponentIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn n_vars(&self) -> usize {
        self.0.len()
    }

    /// Exponent vector of an index tuple (0-based labels).
    pub fn of_indices(idx: &[usize], n: usize) -> Self {
        let mut j = vec![0u32; n];
        for &i in idx {
            j[i] += 1;
        }
        Self(j)
    }

    /// Nondecreasing index tuple with this exponent vector.
    pub fn sorted_indices(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(l, &k)| std::iter::repeat(l).take(k as usize)).collect()
    }

    /// Multinomial `c(j) = d!/∏ j_l!`.
    pub fn multinomial(&self) -> BigUint {
        let mut acc = BigUint::one();
        let mut total = 0u32;
        for &k in &self.0 {
            for i in 1..=k {
                total += 1;
                acc = acc * BigUint::from(total) / BigUint::from(i);
            }
        }
        acc
    }
}

impl fmt::Display for ExponentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// All of `J(d,n)`, ordered by their sorted index tuples.
pub fn exponents(d: u32, n: usize) -> Vec<ExponentIndex> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; d as usize];
    loop {
        out.push(ExponentIndex::of_indices(&idx, n));
        // next nondecreasing tuple
        let Some(pos) = (0..idx.len()).rev().find(|&p| idx[p] + 1 < n) else {
            return out;
        };
        let v = idx[pos] + 1;
        for x in idx.iter_mut().skip(pos) {
            *x = v;
        }
    }
}

/// `C(n+d−1, d)`, the dimension of degree-`d` forms in `n` variables.
pub fn symmetric_dim(d: u32, n: usize) -> u128 {
    binomial((n as u128) + d as u128 - 1, d as u128)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Sparse homogeneous polynomial storing the symmetric-tensor entries `f_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPolynomial<S> {
    d: u32,
    n: usize,
    coeffs: BTreeMap<ExponentIndex, S>,
}

impl<S: Scalar> HomogeneousPolynomial<S> {
    pub fn new(d: u32, n: usize) -> Result<Self> {
        if d == 0 || n == 0 {
            return Err(Error::InvalidArgument("degree and variable count must be positive".into()));
        }
        Ok(Self { d, n, coeffs: BTreeMap::new() })
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    /// Set the tensor entry `f_j`.
    pub fn set(&mut self, j: ExponentIndex, v: S) -> Result<()> {
        if j.n_vars() != self.n || j.degree() != self.d {
            return Err(Error::InvalidArgument(format!("exponent ({j}) is not in J({}, {})", self.d, self.n)));
        }
        self.coeffs.insert(j, v);
        Ok(())
    }

    pub fn get(&self, j: &ExponentIndex) -> S {
        self.coeffs.get(j).cloned().unwrap_or_else(S::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<ExponentIndex, S> {
        &self.coeffs
    }
}

impl HomogeneousPolynomial<GaussianRational> {
    /// Build from ordinary monomial coefficients `a_j = c(j)·f_j`.
    pub fn from_monomials(d: u32, n: usize, terms: &[(&[u32], GaussianRational)]) -> Result<Self> {
        let mut p = Self::new(d, n)?;
        for (e, a) in terms {
            let j = ExponentIndex(e.to_vec());
            let c = GaussianRational::real(num_rational::BigRational::from_integer(j.multinomial().into()));
            let prev = p.get(&j);
            p.set(j, prev + a.clone() / c)?;
        }
        Ok(p)
    }
}

pub fn poly_to_tensor<S: Scalar>(f: &HomogeneousPolynomial<S>) -> DenseTensor<S> {
    let shape = Shape::new(vec![f.n; f.d as usize]).expect("positive dims");
    DenseTensor::from_fn(shape, |idx| f.get(&ExponentIndex::of_indices(idx, f.n)))
}

/// Symmetry test used before converting a tensor to a polynomial.
pub trait SymmetryCheck: Scalar + PartialEq {
    fn tensor_is_symmetric(t: &DenseTensor<Self>) -> bool;
}

/// Relative tolerance of the floating-point symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-10;

impl SymmetryCheck for GaussianRational {
    fn tensor_is_symmetric(t: &DenseTensor<Self>) -> bool {
        t.is_symmetric()
    }
}

impl SymmetryCheck for C64 {
    fn tensor_is_symmetric(t: &DenseTensor<Self>) -> bool {
        t.is_symmetric_tol(SYMMETRY_TOL)
    }
}

pub fn tensor_to_poly<S: SymmetryCheck>(t: &DenseTensor<S>) -> Result<HomogeneousPolynomial<S>> {
    if !S::tensor_is_symmetric(t) {
        return Err(Error::NotSymmetric);
    }
    let n = t.dims()[0];
    let mut p = HomogeneousPolynomial::new(t.order() as u32, n)?;
    for j in exponents(t.order() as u32, n) {
        let v = t.get(&j.sorted_indices()).clone();
        if v != S::zero() {
            p.coeffs.insert(j, v);
        }
    }
    Ok(p)
}

/// `|W_d⟩ = Σ_k e₁^{⊗k} ⊗ e₂ ⊗ e₁^{⊗(d−k−1)}`, unnormalized.
pub fn w_state<S: Scalar>(d: usize) -> Result<DenseTensor<S>> {
    if d < 2 {
        return Err(Error::InvalidArgument("W state needs d ≥ 2".into()));
    }
    let shape = Shape::new(vec![2; d])?;
    Ok(DenseTensor::from_fn(shape, |idx| if idx.iter().sum::<usize>() == 1 { S::one() } else { S::zero() }))
}

pub fn w_state_normalized(d: usize) -> Result<Tensor> {
    w_state::<C64>(d)?.normalized()
}

/// `Σ_{i=1}^n |i⟩^{⊗d}`, unnormalized.
pub fn ghz_state<S: Scalar>(n: usize, d: usize) -> Result<DenseTensor<S>> {
    if n < 2 || d < 2 {
        return Err(Error::InvalidArgument("GHZ state needs n ≥ 2 and d ≥ 2".into()));
    }
    DenseTensor::identity_tensor(n, d)
}

pub fn ghz_state_normalized(n: usize, d: usize) -> Result<Tensor> {
    ghz_state::<C64>(n, d)?.normalized()
}

/// `W₃ ⊗_K W₃`, a 4×4×4 symmetric tensor.
pub fn wkron2<S: Scalar>() -> DenseTensor<S> {
    let w = w_state::<S>(3).expect("d = 3");
    w.kronecker(&w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetricGenericRank {
    pub value: usize,
    /// `d = 2`: the value is the generic rank of quadratic forms.
    pub quadratic_form: bool,
    /// One of the exceptional cases where the counting bound is not attained.
    pub exceptional: bool,
}

/// Cases `(d, n)` with `d ≥ 3` where the generic symmetric rank is one more
/// than `⌈C(n+d−1,d)/n⌉`.
pub const AH_EXCEPTIONS: [(u32, usize); 4] = [(4, 3), (4, 4), (3, 5), (4, 5)];

/// Generic symmetric rank of degree-`d` forms in `n` variables.
pub fn ah_generic_symmetric_rank(d: u32, n: usize) -> Result<SymmetricGenericRank> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument("degree and variable count must be positive".into()));
    }
    if d == 2 {
        return Ok(SymmetricGenericRank { value: n, quadratic_form: true, exceptional: false });
    }
    let dim = symmetric_dim(d, n);
    let base = dim.div_ceil(n as u128) as usize;
    let exceptional = AH_EXCEPTIONS.contains(&(d, n));
    Ok(SymmetricGenericRank { value: base + exceptional as usize, quadratic_form: false, exceptional })
}

/// Largest `C(n+d−1,d)` accepted by the symmetric Jacobian.
pub const SYMMETRIC_DIM_BUDGET: u128 = 100_000;

/// Jacobian ranks of the map `(x_i) ↦ Σ_i x_i^{⊗d}` after each of `r` random
/// points, over GF(p). Column `(i,l)` is the coefficient vector of
/// `∂/∂x_l (x_i·y)^d`, i.e. `j ↦ j_l · x_i^{j−e_l}`.
pub fn symmetric_terracini_prefix(d: u32, n: usize, r: usize, seed: u64) -> Result<Vec<usize>> {
    let dim = symmetric_dim(d, n);
    if dim > SYMMETRIC_DIM_BUDGET {
        return Err(Error::BudgetExceeded(format!("C(n+d-1,d) = {dim} exceeds {SYMMETRIC_DIM_BUDGET}")));
    }
    let field = PrimeField::default();
    let basis_exps = exponents(d, n);
    let rows = basis_exps.len();
    let points = crate::generic::terracini::random_points(&field, &[n], r, seed);
    let mut basis = EchelonBasis::new(field, rows);
    let mut out = Vec::with_capacity(r);
    for p in &points {
        let x = &p[0];
        // powers[l][k] = x_l^k
        let powers: Vec<Vec<u64>> = x
            .iter()
            .map(|&v| {
                let mut pw = vec![1u64; d as usize + 1];
                for k in 1..=d as usize {
                    pw[k] = field.mul(pw[k - 1], v);
                }
                pw
            })
            .collect();
        if !basis.is_full() {
            for l in 0..n {
                let col: Vec<u64> = basis_exps
                    .iter()
                    .map(|j| {
                        let jl = j.0[l];
                        if jl == 0 {
                            return 0;
                        }
                        let mut v = jl as u64;
                        for (m, &e) in j.0.iter().enumerate() {
                            let e = if m == l { e - 1 } else { e };
                            v = field.mul(v, powers[m][e as usize]);
                        }
                        v
                    })
                    .collect();
                basis.insert(col);
            }
        }
        out.push(basis.rank());
    }
    Ok(out)
}

/// Rank of the symmetric Jacobian with `r` random points.
pub fn symmetric_terracini_rank(d: u32, n: usize, r: usize, seed: u64) -> Result<usize> {
    Ok(symmetric_terracini_prefix(d, n, r, seed)?.last().copied().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetricGenericRankResult {
    pub d: u32,
    pub n: usize,
    pub dim: usize,
    pub r_gen: usize,
    pub d_sequence: Vec<usize>,
}

/// Generic symmetric rank by the smallest `r` whose Jacobian is surjective.
pub fn symmetric_generic_rank(d: u32, n: usize, trials: usize, seed: u64) -> Result<SymmetricGenericRankResult> {
    let dim = symmetric_dim(d, n) as usize;
    let start = dim.div_ceil(n);
    for r in start..=dim {
        for trial in 0..trials.max(1) {
            let seq = symmetric_terracini_prefix(d, n, r, probe_seed(seed, r, trial))?;
            if seq.last() == Some(&dim) {
                return Ok(SymmetricGenericRankResult { d, n, dim, r_gen: r, d_sequence: seq });
            }
        }
    }
    Err(Error::VerificationFailed(format!("no surjective Jacobian found for d={d}, n={n}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MaxSymmetricRank {
    pub value: usize,
    /// `false` when `value` is only the `2·r_gen − 1` upper bound.
    pub exact: bool,
    /// Known lower bound when the value is not exact.
    pub lower: Option<usize>,
}

/// Known maximal symmetric ranks, or the `2·r_gen − 1` bound.
pub fn known_max_symmetric_rank(d: u32, n: usize) -> Result<MaxSymmetricRank> {
    let exact = |v| Ok(MaxSymmetricRank { value: v, exact: true, lower: None });
    match (d, n) {
        (_, 1) => exact(1),
        (2, _) => exact(n),
        (_, 2) => exact(d as usize),
        (3, 3) => exact(5),
        (4, 3) => exact(7),
        (5, 3) => exact(10),
        _ => {
            let g = ah_generic_symmetric_rank(d, n)?.value;
            let lower = if (d, n) == (3, 4) { Some(7) } else { None };
            Ok(MaxSymmetricRank { value: 2 * g - 1, exact: false, lower })
        }
    }
}

fn q(num: i64, den: i64) -> GaussianRational {
    GaussianRational::ratio(num, den)
}

fn sym_term(weight: GaussianRational, v: &[i64], d: usize) -> RankOneTerm<GaussianRational> {
    let f: Vec<GaussianRational> = v.iter().map(|&x| GaussianRational::from_i64(x)).collect();
    RankOneTerm::new(weight, vec![f; d])
}

/// Seven symmetric rank-one terms summing to `W₃ ⊗_K W₃`, from
/// `6x₁²x₄ = (x₁+x₄)³ − (x₁−x₄)³ − 2x₄³` and
/// `24x₁x₂x₃ = (x₁+x₂+x₃)³ − (−x₁+x₂+x₃)³ − (x₁−x₂+x₃)³ − (x₁+x₂−x₃)³`.
pub fn waring_w3kron_decomposition() -> Decomposition<GaussianRational> {
    let terms = vec![
        sym_term(q(1, 2), &[1, 0, 0, 1], 3),
        sym_term(q(-1, 2), &[1, 0, 0, -1], 3),
        sym_term(q(-1, 1), &[0, 0, 0, 1], 3),
        sym_term(q(1, 4), &[1, 1, 1, 0], 3),
        sym_term(q(-1, 4), &[-1, 1, 1, 0], 3),
        sym_term(q(-1, 4), &[1, -1, 1, 0], 3),
        sym_term(q(-1, 4), &[1, 1, -1, 0], 3),
    ];
    Decomposition::new(Shape::new(vec![4; 3]).expect("valid"), terms).expect("consistent lengths")
}

/// `(1/t)((e₁+te₂)^{⊗d} − e₁^{⊗d})`, two terms converging to `W_d` as `t → 0`.
pub fn border_rank_demo_wd(d: usize, t: f64) -> Result<Decomposition<C64>> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument("t must be finite and nonzero".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("W state needs d ≥ 2".into()));
    }
    let a = vec![C64::new(1.0, 0.0), C64::new(t, 0.0)];
    let b = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let terms = vec![
        RankOneTerm::new(C64::new(1.0 / t, 0.0), vec![a; d]),
        RankOneTerm::new(C64::new(-1.0 / t, 0.0), vec![b; d]),
    ];
    Decomposition::new(Shape::new(vec![2; d])?, terms)
}

/// `‖border_rank_demo_wd(d, t) − W_d‖₂`.
pub fn border_rank_residual(d: usize, t: f64) -> Result<f64> {
    let approx = border_rank_demo_wd(d, t)?.evaluate();
    Ok(approx.sub(&w_state::<C64>(d)?)?.frobenius_norm())
}

/// Number of distinct entries a symmetric tensor of this shape can have.
pub fn count_entry_orbits(n: usize, d: usize) -> usize {
    IndexIter::new(&vec![n; d]).map(|idx| ExponentIndex::of_indices(&idx, n)).collect::<HashSet<_>>().len()
}

/// Convenience: the exact symmetric tensor of a polynomial given by monomial coefficients.
pub fn form_tensor(d: u32, n: usize, terms: &[(&[u32], i64)]) -> Result<ExactTensor> {
    let t: Vec<(&[u32], GaussianRational)> = terms.iter().map(|(e, a)| (*e, GaussianRational::from_i64(*a))).collect();
    Ok(poly_to_tensor(&HomogeneousPolynomial::from_monomials(d, n, &t)?))
}

//! Exact rank of `m×n×2` tensors from the Kronecker structure of the pencil
//! formed by the two frontal slices.
//!
//! Minimal indices are read off from the ranks of block-Toeplitz expansions
//! of the pencil; the invariant polynomials of the regular part come from the
//! Smith form of `tX − Y`, where `X` is a pencil member of maximal rank. The
//! rank is then
//!
//! ```text
//! Σ_{ε>0} (ε+1) + Σ_{η>0} (η+1) + m_reg + k
//! ```
//!
//! with `k` the number of invariant polynomials that have a repeated root.

pub mod poly;
pub mod smith;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{ExactField, GaussianRational, Scalar};
use crate::tensor::{ExactTensor, Shape};

pub use poly::{count_multiple_root_factors, Poly};

type Q = GaussianRational;

/// Pair of equally sized matrices `(A, B)`, read as the pencil `aA + bB`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    a: Matrix<Q>,
    b: Matrix<Q>,
}

impl Pencil {
    pub fn new(a: Matrix<Q>, b: Matrix<Q>) -> Result<Self> {
        if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
            return Err(Error::ShapeMismatch(format!(
                "pencil slices {}×{} and {}×{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Matrix<Q> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<Q> {
        &self.b
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    /// `αA + βB`.
    pub fn combination(&self, alpha: &Q, beta: &Q) -> Matrix<Q> {
        self.a.scale(alpha).add(&self.b.scale(beta))
    }

    pub fn transpose(&self) -> Pencil {
        Pencil { a: self.a.transpose(), b: self.b.transpose() }
    }

    /// True when `A` and `B` are linearly dependent (including a zero slice).
    pub fn slices_dependent(&self) -> bool {
        let m = Matrix::from_fn(2, self.rows() * self.cols(), |i, j| {
            if i == 0 {
                self.a.data()[j].clone()
            } else {
                self.b.data()[j].clone()
            }
        });
        m.rank() < 2
    }

    /// The `m×n×2` tensor with frontal slices `A`, `B`.
    pub fn to_tensor(&self) -> ExactTensor {
        let shape = Shape::new(vec![self.rows(), self.cols(), 2]).expect("pencil dims are positive");
        ExactTensor::from_fn(shape, |i| {
            if i[2] == 0 {
                self.a.get(i[0], i[1]).clone()
            } else {
                self.b.get(i[0], i[1]).clone()
            }
        })
    }

    /// Rank over the rational function field, attained at one of the nodes
    /// `A + jB`, `j = 0..=min(m,n)`.
    pub fn normal_rank(&self) -> (usize, i64) {
        let bound = self.rows().min(self.cols()) as i64;
        let mut best = (0, 0);
        for j in 0..=bound {
            let r = self.combination(&Q::one(), &Q::from_i64(j)).rank();
            if r > best.0 {
                best = (r, j);
            }
        }
        best
    }

    /// Block-Toeplitz matrix with `A` on the diagonal and `B` below it:
    /// `(k+2)m × (k+1)n`; its kernel holds the degree-`k` polynomial kernel
    /// vectors of `A + tB`.
    fn expansion(&self, k: usize) -> Matrix<Q> {
        let (m, n) = (self.rows(), self.cols());
        Matrix::from_fn((k + 2) * m, (k + 1) * n, |i, j| {
            let (bi, bj) = (i / m, j / n);
            if bi == bj {
                self.a.get(i % m, j % n).clone()
            } else if bi == bj + 1 {
                self.b.get(i % m, j % n).clone()
            } else {
                Q::zero()
            }
        })
    }

    /// Column minimal indices, ascending.
    fn column_minimal_indices(&self, normal_rank: usize) -> Vec<usize> {
        let total = self.cols() - normal_rank;
        let mut out = Vec::with_capacity(total);
        // z_k = dim ker M_k; #{ε ≤ k} = z_k − z_{k−1}
        let (mut z_prev, mut le_prev) = (0usize, 0usize);
        let mut k = 0;
        while out.len() < total {
            let mk = self.expansion(k);
            let z = mk.cols() - mk.rank();
            let le = z - z_prev;
            for _ in le_prev..le {
                out.push(k);
            }
            z_prev = z;
            le_prev = le;
            k += 1;
            assert!(k <= self.rows() + 1, "minimal index search did not terminate");
        }
        out
    }
}

/// Slices of `t` along its size-2 mode. Mode 3 is used when it has size 2,
/// otherwise the first size-2 mode is moved there.
pub fn pencil_of(t: &ExactTensor) -> Result<Pencil> {
    if t.order() != 3 {
        return Err(Error::NoPencilMode);
    }
    let dims = t.dims();
    let t = if dims[2] == 2 {
        t.clone()
    } else if dims[1] == 2 {
        t.permute_modes(&[0, 2, 1])?
    } else if dims[0] == 2 {
        t.permute_modes(&[1, 2, 0])?
    } else {
        return Err(Error::NoPencilMode);
    };
    let a = t.slice(2, 0)?;
    let b = t.slice(2, 1)?;
    let (m, n) = (t.dims()[0], t.dims()[1]);
    Pencil::new(
        Matrix::from_vec(m, n, a.into_entries()),
        Matrix::from_vec(m, n, b.into_entries()),
    )
}

/// First node `(1, j)`, `j = 0..=m`, with `det(A + jB) ≠ 0`.
pub fn find_regular_witness(p: &Pencil) -> Result<Option<(i64, i64)>> {
    if p.rows() != p.cols() {
        return Err(Error::NotSquare(p.rows(), p.cols()));
    }
    for j in 0..=p.rows() as i64 {
        if !p.combination(&Q::one(), &Q::from_i64(j)).determinant().is_zero() {
            return Ok(Some((1, j)));
        }
    }
    Ok(None)
}

/// Nonconstant invariant polynomials of `t·X − Y` for `X = aA + bB`
/// (invertible) and `Y` completing a basis of the pencil, ordered so that
/// each divides its predecessor.
pub fn invariant_polynomials(p: &Pencil, witness: (i64, i64)) -> Result<Vec<Poly<Q>>> {
    let (a, b) = witness;
    let x = p.combination(&Q::from_i64(a), &Q::from_i64(b));
    if p.rows() != p.cols() {
        return Err(Error::NotSquare(p.rows(), p.cols()));
    }
    if x.determinant().is_zero() {
        return Err(Error::InvalidWitness(format!("{a},{b}")));
    }
    let y = if a != 0 { p.b().clone() } else { p.a().clone() };
    Ok(pencil_invariants(&x, &y))
}

fn pencil_invariants(x: &Matrix<Q>, y: &Matrix<Q>) -> Vec<Poly<Q>> {
    let m: Vec<Vec<Poly<Q>>> = (0..x.rows())
        .map(|i| {
            (0..x.cols()).map(|j| Poly::linear(-y.get(i, j).clone(), x.get(i, j).clone())).collect()
        })
        .collect();
    let mut f: Vec<Poly<Q>> = smith::invariant_factors(m).into_iter().filter(|p| !p.is_constant()).collect();
    f.reverse();
    f
}

#[derive(Clone, Debug, PartialEq)]
pub struct KroneckerStructure {
    /// Sizes `ε` of the `ε×(ε+1)` singular blocks, ascending.
    pub column_minimal_indices: Vec<usize>,
    /// Sizes `η` of the `(η+1)×η` singular blocks, ascending.
    pub row_minimal_indices: Vec<usize>,
    pub regular_core_dim: usize,
    /// Nonconstant invariant polynomials of the regular part, `p_{i+1} | p_i`.
    pub invariant_polynomials: Vec<Poly<Q>>,
    pub normal_rank: usize,
}

impl KroneckerStructure {
    /// Number of invariant polynomials with a repeated root.
    pub fn multiple_root_count(&self) -> usize {
        count_multiple_root_factors(&self.invariant_polynomials)
    }

    /// `(rows, cols)` reassembled from the blocks.
    pub fn reconstructed_dims(&self) -> (usize, usize) {
        let eps: usize = self.column_minimal_indices.iter().sum();
        let eta: usize = self.row_minimal_indices.iter().sum();
        let rows = eps + eta + self.row_minimal_indices.len() + self.regular_core_dim;
        let cols = eps + self.column_minimal_indices.len() + eta + self.regular_core_dim;
        (rows, cols)
    }

    /// Tensor rank of any tensor with this pencil structure.
    pub fn tensor_rank(&self) -> usize {
        let singular: usize = self
            .column_minimal_indices
            .iter()
            .chain(&self.row_minimal_indices)
            .filter(|&&e| e > 0)
            .map(|e| e + 1)
            .sum();
        singular + self.regular_core_dim + self.multiple_root_count()
    }

    pub fn divisibility_chain_holds(&self) -> bool {
        self.invariant_polynomials.windows(2).all(|w| w[1].divides(&w[0]))
    }
}

pub fn kronecker_structure(p: &Pencil) -> KroneckerStructure {
    let (rank, node) = p.normal_rank();
    let cols = p.column_minimal_indices(rank);
    let rows = p.transpose().column_minimal_indices(rank);
    let m = p.rows();
    let regular_core_dim = m - cols.iter().sum::<usize>() - rows.iter().map(|e| e + 1).sum::<usize>();
    let x = p.combination(&Q::one(), &Q::from_i64(node));
    let invariant_polynomials = pencil_invariants(&x, p.b());
    let s = KroneckerStructure {
        column_minimal_indices: cols,
        row_minimal_indices: rows,
        regular_core_dim,
        invariant_polynomials,
        normal_rank: rank,
    };
    debug_assert_eq!(s.reconstructed_dims(), (p.rows(), p.cols()));
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PencilCertificate {
    /// Square pencil containing an invertible member.
    Regular,
    /// Linearly independent slices, no invertible member.
    Singular,
    /// Linearly dependent slices; rank is a matrix rank.
    Degenerate,
}

impl PencilCertificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Regular => "regular",
            Self::Singular => "singular",
            Self::Degenerate => "degenerate",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PencilRank {
    pub rank: usize,
    pub structure: KroneckerStructure,
    pub certificate: PencilCertificate,
    pub pencil: Pencil,
}

/// Exact rank of a tensor with a mode of size 2.
pub fn rank_mxnx2(t: &ExactTensor) -> Result<PencilRank> {
    let p = pencil_of(t)?;
    Ok(rank_of_pencil(&p))
}

pub fn rank_of_pencil(p: &Pencil) -> PencilRank {
    let structure = kronecker_structure(p);
    let (rank, certificate) = if p.slices_dependent() {
        (p.a().rank().max(p.b().rank()), PencilCertificate::Degenerate)
    } else if p.rows() == p.cols() && structure.normal_rank == p.rows() {
        (structure.tensor_rank(), PencilCertificate::Regular)
    } else {
        (structure.tensor_rank(), PencilCertificate::Singular)
    };
    debug_assert_eq!(rank, structure.tensor_rank());
    PencilRank { rank, structure, certificate, pencil: p.clone() }
}

/// SLOCC class of a `2×2×2` tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orbit222 {
    Zero,
    Product,
    /// Dependent slices spanning a rank-2 matrix.
    Case2a,
    /// Independent slices whose span contains no invertible matrix.
    Case2b,
    /// Regular pencil with diagonalizable `X⁻¹Y` (the GHZ class).
    Case2c,
    /// Regular pencil with non-diagonalizable `X⁻¹Y`.
    WClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rank222Class {
    pub rank: usize,
    pub orbit: Orbit222,
}

pub fn classify_222(t: &ExactTensor) -> Result<Rank222Class> {
    if t.dims() != [2, 2, 2] {
        return Err(Error::ShapeMismatch(format!("expected (2,2,2), got {}", t.shape())));
    }
    let p = pencil_of(t)?;
    let r = rank_of_pencil(&p);
    let orbit = match r.certificate {
        PencilCertificate::Degenerate => match r.rank {
            0 => Orbit222::Zero,
            1 => Orbit222::Product,
            _ => Orbit222::Case2a,
        },
        PencilCertificate::Singular => Orbit222::Case2b,
        PencilCertificate::Regular if r.rank == 3 => Orbit222::WClass,
        PencilCertificate::Regular => Orbit222::Case2c,
    };
    Ok(Rank222Class { rank: r.rank, orbit })
}

/// Maximal rank of `m×n×2` tensors.
pub fn max_rank_mn2(m: usize, n: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("pencil dimensions must be positive".into()));
    }
    let (m, n) = (m.min(n), m.max(n));
    Ok(if n <= 2 * m { m + n / 2 } else { 2 * m })
}

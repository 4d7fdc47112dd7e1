//! Randomized generic-rank computation from the rank of the Jacobian of
//! the parametrization `(x_{j,i}) ↦ Σ_i ⊗_j x_{j,i}` at a random point.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bounds::r0_lower_bound;
use super::field::{EchelonBasis, PrimeField};
use crate::error::{Error, Result};
use crate::tensor::Shape;

/// Largest Jacobian (rows × cols) the generic-rank search will build.
pub const JACOBIAN_BUDGET: u128 = 100_000_000;

/// Relative singular-value cutoff of the floating-point cross-check.
pub const NUMERIC_JACOBIAN_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct GenericRankOptions {
    pub trials: usize,
    pub seed: u64,
    pub field: PrimeField,
}

impl Default for GenericRankOptions {
    fn default() -> Self {
        Self { trials: 3, seed: 0, field: PrimeField::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericRankResult {
    /// Shape with singleton modes removed.
    pub shape: Vec<usize>,
    pub r0: usize,
    pub r_gen: usize,
    /// Jacobian dimensions at `r_gen`.
    pub jacobian_dims: (usize, usize),
    /// `d_sequence[r-1]` is the Jacobian rank with `r` terms, for `r = 1..=r_gen`.
    pub d_sequence: Vec<usize>,
    /// Candidate ranks declared deficient after exhausting every trial.
    pub deficient: Vec<usize>,
    pub prime: u64,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one probe; depends only on `(seed, r, trial)`.
pub fn probe_seed(seed: u64, r: usize, trial: usize) -> u64 {
    mix(mix(mix(seed) ^ r as u64) ^ trial as u64)
}

fn effective_dims(shape: &Shape) -> Vec<usize> {
    let d: Vec<usize> = shape.dims().iter().copied().filter(|&n| n > 1).collect();
    if d.is_empty() {
        vec![1]
    } else {
        d
    }
}

/// Random factor vectors for `r` terms: `points[i][j]` has length `dims[j]`.
pub fn random_points(field: &PrimeField, dims: &[usize], r: usize, seed: u64) -> Vec<Vec<Vec<u64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..r).map(|_| dims.iter().map(|&n| (0..n).map(|_| field.sample(&mut rng)).collect()).collect()).collect()
}

/// The `Σ n_j` Jacobian columns contributed by one term, in `(mode, basis index)` order.
fn term_columns(field: &PrimeField, dims: &[usize], factors: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n: usize = dims.iter().product();
    let d = dims.len();
    let mut cols = Vec::with_capacity(dims.iter().sum());
    for k in 0..d {
        let offset = cols.len();
        cols.extend((0..dims[k]).map(|_| vec![0u64; n]));
        let mut idx = vec![0usize; d];
        for lin in 0..n {
            let mut v = 1u64;
            for j in 0..d {
                if j != k {
                    v = field.mul(v, factors[j][idx[j]]);
                }
            }
            cols[offset + idx[k]][lin] = v;
            for j in (0..d).rev() {
                idx[j] += 1;
                if idx[j] < dims[j] {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
    cols
}

/// Jacobian columns at the given point; column `(i,k,l)` is term `i` with
/// factor `k` replaced by the basis vector `e_l`.
pub fn terracini_jacobian(field: &PrimeField, shape: &Shape, points: &[Vec<Vec<u64>>]) -> Result<Vec<Vec<u64>>> {
    let dims = shape.dims();
    let rows = shape.n_entries() as u128;
    let cols = (points.len() * dims.iter().sum::<usize>()) as u128;
    if rows * cols > JACOBIAN_BUDGET {
        return Err(Error::BudgetExceeded(format!("Jacobian of size {rows}x{cols} exceeds {JACOBIAN_BUDGET} entries")));
    }
    let mut out = Vec::new();
    for p in points {
        if p.len() != dims.len() || p.iter().zip(dims).any(|(x, &n)| x.len() != n) {
            return Err(Error::ShapeMismatch(format!("sample point does not match shape {shape}")));
        }
        out.extend(term_columns(field, dims, p));
    }
    Ok(out)
}

/// Jacobian rank after each of the `r` terms, at one random point.
fn prefix_ranks(field: &PrimeField, dims: &[usize], r: usize, seed: u64) -> Vec<usize> {
    let n: usize = dims.iter().product();
    let points = random_points(field, dims, r, seed);
    let mut basis = EchelonBasis::new(*field, n);
    let mut out = Vec::with_capacity(r);
    for p in &points {
        if !basis.is_full() {
            for c in term_columns(field, dims, p) {
                basis.insert(c);
            }
        }
        out.push(basis.rank());
    }
    out
}

/// Generic rank by increasing `r` from the counting lower bound until the
/// Jacobian at a random point has full row rank.
///
/// A full-rank probe certifies `r_gen ≤ r`. A candidate is marked deficient
/// after `trials` failed probes; a false verdict requires every probe to hit
/// a nonzero polynomial's zero set, which has probability at most `deg/p` each.
pub fn generic_rank(shape: &Shape, opts: &GenericRankOptions) -> Result<GenericRankResult> {
    if opts.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let dims = effective_dims(shape);
    let eff = Shape::new(dims.clone())?;
    let n = eff.n_entries();
    let r0 = r0_lower_bound(&eff);
    let r_cap = n / dims.iter().max().copied().unwrap_or(1);
    let sum: usize = dims.iter().sum();
    let mut deficient = Vec::new();
    for r in r0..=r_cap.max(r0) {
        let cols = r * sum;
        if n as u128 * cols as u128 > JACOBIAN_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "Jacobian of size {n}x{cols} for r = {r} exceeds {JACOBIAN_BUDGET} entries"
            )));
        }
        for trial in 0..opts.trials {
            let seq = prefix_ranks(&opts.field, &dims, r, probe_seed(opts.seed, r, trial));
            if seq.last() == Some(&n) {
                return Ok(GenericRankResult {
                    shape: dims,
                    r0,
                    r_gen: r,
                    jacobian_dims: (n, cols),
                    d_sequence: seq,
                    deficient,
                    prime: opts.field.modulus(),
                });
            }
        }
        deficient.push(r);
    }
    Err(Error::VerificationFailed(format!(
        "no full-rank Jacobian found up to r = {r_cap} for shape {eff}; probes were unlucky"
    )))
}

/// Jacobian rank for `r` terms using random real factors and a
/// floating-point SVD at relative tolerance `tol`.
pub fn numeric_jacobian_rank(shape: &Shape, r: usize, seed: u64, tol: f64) -> Result<usize> {
    let dims = effective_dims(shape);
    let n: usize = dims.iter().product();
    let sum: usize = dims.iter().sum();
    let cols = r * sum;
    if n as u128 * cols as u128 > JACOBIAN_BUDGET {
        return Err(Error::BudgetExceeded(format!("Jacobian of size {n}x{cols} exceeds {JACOBIAN_BUDGET} entries")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jac = DMatrix::<f64>::zeros(n, cols);
    let d = dims.len();
    for i in 0..r {
        let factors: Vec<Vec<f64>> = dims.iter().map(|&m| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut idx = vec![0usize; d];
        for lin in 0..n {
            let mut col_base = i * sum;
            for k in 0..d {
                let v: f64 = (0..d).filter(|&j| j != k).map(|j| factors[j][idx[j]]).product();
                jac[(lin, col_base + idx[k])] = v;
                col_base += dims[k];
            }
            for j in (0..d).rev() {
                idx[j] += 1;
                if idx[j] < dims[j] {
                    break;
                }
                idx[j] = 0;
            }
        }
    }
    let sv = jac.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * smax).count())
}

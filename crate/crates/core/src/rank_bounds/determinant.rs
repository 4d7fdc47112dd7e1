//! Lower bound `n + p − 1` for a three-mode tensor with `p` square `n×n`
//! slices, one of which keeps a constant nonzero determinant under addition
//! of any combination of the others while those others are independent.
//!
//! If the tensor had rank `r`, a combination of the special slice with the
//! other `p − 1` could cancel `p − 1` of the rank-one terms, leaving a
//! matrix of rank at most `r − p + 1` that is still invertible. Constancy of
//! the determinant polynomial is checked at random points (degree ≤ n).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::certificate::{CertificateKind, Payload, RankCertificate};
use super::{group_modes, squeeze};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{ExactField, GaussianRational, Scalar};
use crate::symmetric::wkron2;
use crate::tensor::ExactTensor;

/// Random points at which the determinant is compared with its value at the origin.
pub const DETERMINANT_PROBES: usize = 5;

/// Largest order for which all groupings into three blocks are searched.
const MAX_GROUPED_ORDER: usize = 6;

/// Coordinates of probe points are drawn from `[−2²⁰, 2²⁰]`.
const PROBE_RANGE: i64 = 1 << 20;

const VERIFY_SEED: u64 = 0x5eed_de7e;

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminantWitness {
    /// Mode blocks of the tensor (singleton modes removed) forming a three-mode tensor.
    pub blocks: Vec<Vec<usize>>,
    /// Block whose index enumerates the slices.
    pub slice_block: usize,
    /// Slice whose determinant stays constant.
    pub pivot: usize,
    pub determinant: GaussianRational,
    /// Coefficients of the other slices at which the determinant was checked.
    pub probes: Vec<Vec<GaussianRational>>,
}

fn slices(t: &ExactTensor, blocks: &[Vec<usize>], slice_block: usize) -> Result<Vec<Matrix<GaussianRational>>> {
    let g = group_modes(t, blocks)?;
    (0..g.dims()[slice_block])
        .map(|i| {
            let s = g.slice(slice_block, i)?;
            s.flatten(&[0])
        })
        .collect()
}

fn combination(
    slices: &[Matrix<GaussianRational>],
    pivot: usize,
    coeffs: &[GaussianRational],
) -> Matrix<GaussianRational> {
    let mut m = slices[pivot].clone();
    for (s, a) in slices.iter().enumerate().filter(|&(i, _)| i != pivot).map(|(_, s)| s).zip(coeffs) {
        m = m.add(&s.scale(a));
    }
    m
}

fn random_probe(rng: &mut ChaCha8Rng, len: usize) -> Vec<GaussianRational> {
    (0..len).map(|_| GaussianRational::from_i64(rng.gen_range(-PROBE_RANGE..=PROBE_RANGE))).collect()
}

/// Checks the slice conditions and returns the constant determinant.
fn check(
    slices: &[Matrix<GaussianRational>],
    pivot: usize,
    probes: &[Vec<GaussianRational>],
) -> std::result::Result<GaussianRational, String> {
    let p = slices.len();
    let n = slices[0].rows();
    if slices[0].cols() != n {
        return Err(format!("slices are {}×{}, not square", n, slices[0].cols()));
    }
    let others: Vec<&Matrix<GaussianRational>> =
        slices.iter().enumerate().filter(|&(i, _)| i != pivot).map(|(_, s)| s).collect();
    let stacked = Matrix::from_fn(others.len(), n * n, |i, j| others[i].data()[j].clone());
    if p > 1 && stacked.rank() != p - 1 {
        return Err("the non-pivot slices are linearly dependent".into());
    }
    let det0 = slices[pivot].determinant();
    if det0.is_zero() {
        return Err("the pivot slice is singular".into());
    }
    for a in probes {
        if a.len() != p - 1 {
            return Err(format!("probe has {} coefficients, expected {}", a.len(), p - 1));
        }
        if combination(slices, pivot, a).determinant() != det0 {
            return Err(format!("determinant changes at {a:?}"));
        }
    }
    Ok(det0)
}

impl DeterminantWitness {
    /// Re-checks the witness at its stored points and at fresh random points;
    /// returns the certified bound.
    pub fn verify(&self, t: &ExactTensor) -> Result<usize> {
        let t = squeeze(t);
        let fail = |msg: String| Error::VerificationFailed(format!("determinant-lower: {msg}"));
        if self.blocks.len() != 3 || self.slice_block >= 3 {
            return Err(fail("need three blocks".into()));
        }
        let mut all: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        if self.blocks.iter().any(Vec::is_empty) || all != (0..t.order()).collect::<Vec<_>>() {
            return Err(fail(format!("{:?} does not split the modes", self.blocks)));
        }
        let s = slices(&t, &self.blocks, self.slice_block)?;
        if self.pivot >= s.len() {
            return Err(fail("pivot out of range".into()));
        }
        if self.probes.len() < DETERMINANT_PROBES {
            return Err(fail(format!("{} probes, at least {DETERMINANT_PROBES} required", self.probes.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED);
        let mut probes = self.probes.clone();
        probes.extend((0..DETERMINANT_PROBES).map(|_| random_probe(&mut rng, s.len() - 1)));
        let det = check(&s, self.pivot, &probes).map_err(fail)?;
        if det != self.determinant {
            return Err(fail(format!("determinant is {det}, witness says {}", self.determinant)));
        }
        Ok(s[0].rows() + s.len() - 1)
    }
}

/// All ways to split modes `0..d` into three nonempty unordered blocks.
fn three_block_splits(d: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    // restricted growth strings with exactly three labels
    let mut label = vec![0usize; d];
    fn rec(k: usize, used: usize, label: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        let d = label.len();
        if k == d {
            if used == 3 {
                let mut blocks = vec![Vec::new(); 3];
                for (m, &l) in label.iter().enumerate() {
                    blocks[l].push(m);
                }
                out.push(blocks);
            }
            return;
        }
        for l in 0..(used + 1).min(3) {
            label[k] = l;
            rec(k + 1, used.max(l + 1), label, out);
        }
    }
    if d >= 3 {
        rec(0, 0, &mut label, &mut out);
    }
    out
}

/// Best determinant lower bound over all groupings of the modes into three
/// blocks (orders 3 to 6), slice directions and pivot slices.
pub fn determinant_lower_certificate(t: &ExactTensor, seed: u64) -> Result<Option<RankCertificate>> {
    let t = squeeze(t);
    let d = t.order();
    if !(3..=MAX_GROUPED_ORDER).contains(&d) || t.is_zero() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, DeterminantWitness)> = None;
    for blocks in three_block_splits(d) {
        let sizes: Vec<usize> = blocks.iter().map(|b| b.iter().map(|&m| t.dims()[m]).product()).collect();
        for slice_block in 0..3 {
            let others: Vec<usize> = (0..3).filter(|&b| b != slice_block).map(|b| sizes[b]).collect();
            let (n, p) = (others[0], sizes[slice_block]);
            if others[0] != others[1] || p - 1 > n * n || best.as_ref().is_some_and(|(v, _)| n + p - 1 <= *v) {
                continue;
            }
            let s = slices(&t, &blocks, slice_block)?;
            for pivot in 0..p {
                let probes: Vec<_> = (0..DETERMINANT_PROBES).map(|_| random_probe(&mut rng, p - 1)).collect();
                if let Ok(det) = check(&s, pivot, &probes) {
                    let w = DeterminantWitness { blocks: blocks.clone(), slice_block, pivot, determinant: det, probes };
                    best = Some((n + p - 1, w));
                    break;
                }
            }
        }
    }
    Ok(best.map(|(value, w)| RankCertificate {
        kind: CertificateKind::DeterminantLower,
        value,
        payload: Payload::Determinant(w),
    }))
}

/// Slices `A₁..A₄` of `W₃ ⊗_K W₃` along its last mode, ordered so that `A₄`
/// is the antidiagonal slice with `det(A₄ + a₁A₁ + a₂A₂ + a₃A₃) = 1`.
pub fn w3kron2_slices() -> [Matrix<GaussianRational>; 4] {
    let x = wkron2::<GaussianRational>();
    let s = |k: usize| x.slice(2, k).and_then(|m| m.flatten(&[0])).expect("4×4×4 tensor");
    [s(3), s(2), s(1), s(0)]
}

/// Lower bound 7 for `W₃ ⊗_K W₃`; errors if the determinant identity fails.
pub fn w3kron2_determinant_certificate() -> Result<RankCertificate> {
    let x = wkron2::<GaussianRational>();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let probes: Vec<_> = (0..DETERMINANT_PROBES).map(|_| random_probe(&mut rng, 3)).collect();
    let w = DeterminantWitness {
        blocks: vec![vec![0], vec![1], vec![2]],
        slice_block: 2,
        pivot: 0,
        determinant: GaussianRational::one(),
        probes,
    };
    let value = w.verify(&x)?;
    Ok(RankCertificate { kind: CertificateKind::DeterminantLower, value, payload: Payload::Determinant(w) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::w_state;
    use crate::tensor::Shape;

    #[test]
    fn wkron2_bound_is_seven() {
        let c = w3kron2_determinant_certificate().unwrap();
        assert_eq!(c.value, 7);
        c.verify(&wkron2()).unwrap();
        let [a1, a2, a3, a4] = w3kron2_slices();
        assert_eq!(a4.determinant(), GaussianRational::one());
        let a = [GaussianRational::ratio(3, 7), GaussianRational::from_ints(-2, 5), GaussianRational::from_i64(11)];
        let m = a4.add(&a1.scale(&a[0])).add(&a2.scale(&a[1])).add(&a3.scale(&a[2]));
        assert_eq!(m.determinant(), GaussianRational::one());
        let found = determinant_lower_certificate(&wkron2(), 1).unwrap().unwrap();
        assert_eq!(found.value, 7);
        found.verify(&wkron2()).unwrap();
    }

    #[test]
    fn broken_antidiagonal_is_refused() {
        let mut x = wkron2::<GaussianRational>();
        x.set(&[1, 2, 0], GaussianRational::zero());
        assert!(w3kron2_determinant_certificate().unwrap().verify(&x).is_err());
        x.set(&[1, 2, 0], GaussianRational::from_i64(3));
        let genuine = w3kron2_determinant_certificate().unwrap();
        assert!(genuine.verify(&x).is_err());
    }

    #[test]
    fn corrupted_witness_fails() {
        let mut c = w3kron2_determinant_certificate().unwrap();
        if let Payload::Determinant(w) = &mut c.payload {
            w.pivot = 1;
        }
        assert!(c.verify(&wkron2()).is_err());
        let mut c = w3kron2_determinant_certificate().unwrap();
        c.value = 8;
        assert!(c.verify(&wkron2()).is_err());
    }

    #[test]
    fn w3_and_grouped_tensor_square() {
        let w = w_state::<GaussianRational>(3).unwrap();
        assert_eq!(determinant_lower_certificate(&w, 0).unwrap().unwrap().value, 3);
        let ww = w.tensor_product(&w);
        let c = determinant_lower_certificate(&ww, 0).unwrap().unwrap();
        assert_eq!(c.value, 7);
        c.verify(&ww).unwrap();
    }

    #[test]
    fn split_enumeration() {
        assert_eq!(three_block_splits(3).len(), 1);
        assert_eq!(three_block_splits(4).len(), 6);
        assert_eq!(three_block_splits(6).len(), 90);
        let id = ExactTensor::identity_tensor(3, 3).unwrap();
        assert_eq!(id.shape(), &Shape::new(vec![3; 3]).unwrap());
        // slices of the identity are independent rank-one matrices: no pivot qualifies
        assert!(determinant_lower_certificate(&id, 0).unwrap().is_none());
    }
}

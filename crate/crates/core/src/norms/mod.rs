//! Spectral and nuclear norms of complex tensors, with entanglement measures.
//!
//! Both norms are NP-hard to compute in general. Every routine here returns
//! a certified bound together with enough data to check it: the spectral
//! value is always attained by the returned unit product, and the nuclear
//! result carries an explicit decomposition (upper bound) and a dual
//! witness (lower bound).

mod nuclear;
mod spectral;

pub use nuclear::{
    nuclear_lower_bound_flatten, nuclear_norm, nuclear_norm_with, nuclear_rank_estimate, verify_w3_nuclear_decomposition,
    w3_nuclear_decomposition, w3_nuclear_decomposition_with, NuclearOptions, NuclearRankEstimate, NuclearResult,
};
pub use spectral::{
    spectral_norm, spectral_norm_2slice, symmetric_spectral_norm, SpectralOptions, SpectralResult,
    DEFAULT_GRID_RESOLUTION,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::C64;
use crate::tensor::Tensor;

/// Allowed deviation of `‖T‖₂` from 1 for inputs that must be normalized.
pub const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementMeasures {
    /// `−log₂ ‖T‖∞²`.
    pub eta: f64,
    /// `log₂(N / max n_j)`.
    pub eta_upper: f64,
    /// `log₂ r` for a supplied rank `r`.
    pub schmidt_measure: Option<f64>,
    pub spectral: f64,
}

/// Geometric measure `η`, its shape bound, and the Schmidt measure when the
/// rank is known.
pub fn entanglement_measures(t: &Tensor, rank_hint: Option<usize>) -> Result<EntanglementMeasures> {
    let norm = t.frobenius_norm();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Unnormalized(norm));
    }
    let s = spectral_norm(t, &SpectralOptions::default())?;
    let dims = t.dims();
    let n: usize = dims.iter().product();
    let m = *dims.iter().max().expect("nonempty shape");
    let eta_upper = (n as f64 / m as f64).log2();
    let eta = (-(s.value * s.value).log2()).clamp(0.0, eta_upper);
    if rank_hint == Some(0) {
        return Err(Error::InvalidArgument("rank of a nonzero tensor is at least 1".into()));
    }
    Ok(EntanglementMeasures {
        eta,
        eta_upper,
        schmidt_measure: rank_hint.map(|r| (r as f64).log2()),
        spectral: s.value,
    })
}

/// `⟨T, ⊗x_j⟩ = Σ T_i ∏ conj(x_j[i_j])`.
pub(crate) fn overlap(entries: &[C64], dims: &[usize], factors: &[Vec<C64>]) -> C64 {
    let mut idx = vec![0usize; dims.len()];
    let mut acc = C64::new(0.0, 0.0);
    for &t in entries {
        if t != C64::new(0.0, 0.0) {
            let p = idx.iter().zip(factors).fold(C64::new(1.0, 0.0), |p, (&i, f)| p * f[i].conj());
            acc += t * p;
        }
        advance(&mut idx, dims);
    }
    acc
}

/// Contraction of `T` against `conj(x_j)` in every mode except `k`.
pub(crate) fn contract_except(entries: &[C64], dims: &[usize], factors: &[Vec<C64>], k: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dims[k]];
    let mut idx = vec![0usize; dims.len()];
    for &t in entries {
        if t != C64::new(0.0, 0.0) {
            let mut p = t;
            for (j, (&i, f)) in idx.iter().zip(factors).enumerate() {
                if j != k {
                    p *= f[i].conj();
                }
            }
            out[idx[k]] += p;
        }
        advance(&mut idx, dims);
    }
    out
}

/// Entries of `⊗x_j` in row-major order.
pub(crate) fn outer(dims: &[usize], factors: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for (f, &n) in factors.iter().zip(dims) {
        let mut next = Vec::with_capacity(out.len() * n);
        for &a in &out {
            next.extend(f.iter().map(|&b| a * b));
        }
        out = next;
    }
    out
}

pub(crate) fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn advance(idx: &mut [usize], dims: &[usize]) {
    for k in (0..dims.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return;
        }
        idx[k] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::{ghz_state_normalized, w_state_normalized};
    use crate::tensor::{DenseTensor, Shape};

    #[test]
    fn overlap_matches_inner_product() {
        let t = w_state_normalized(3).unwrap();
        let f = vec![vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]; 3];
        let p = DenseTensor::from_entries(Shape::new(vec![2, 2, 2]).unwrap(), outer(&[2, 2, 2], &f)).unwrap();
        let direct = t.inner_product(&p).unwrap();
        assert!((overlap(t.entries(), t.dims(), &f) - direct).norm() < 1e-14);
        let v = contract_except(t.entries(), t.dims(), &f, 1);
        assert!((inner(&v, &f[1]) - direct).norm() < 1e-14);
    }

    #[test]
    fn measures_of_named_states() {
        let g = entanglement_measures(&ghz_state_normalized(2, 3).unwrap(), Some(2)).unwrap();
        assert!((g.eta - 1.0).abs() < 1e-6);
        assert_eq!(g.schmidt_measure, Some(1.0));
        assert!((g.eta_upper - 2.0).abs() < 1e-12);
        let w = entanglement_measures(&w_state_normalized(3).unwrap(), None).unwrap();
        assert!((w.eta - (9.0f64 / 4.0).log2()).abs() < 1e-6);
        let unnormalized = crate::symmetric::ghz_state::<C64>(2, 3).unwrap();
        assert!(matches!(entanglement_measures(&unnormalized, None), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn product_state_has_zero_eta() {
        let f = vec![vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)], vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]];
        let t = DenseTensor::from_entries(Shape::new(vec![2, 2]).unwrap(), outer(&[2, 2], &f)).unwrap();
        let m = entanglement_measures(&t, Some(1)).unwrap();
        assert!(m.eta.abs() < 1e-12);
        assert_eq!(m.schmidt_measure, Some(0.0));
    }
}

//! Rank evidence for a single tensor, merged into a report of certified
//! lower and upper bounds.
//!
//! Every certificate refers to the tensor with its singleton modes removed
//! and can be re-checked from the raw entries with [`RankCertificate::verify`].

pub mod als;
mod certificate;
mod determinant;
mod flattening;
pub mod known;
mod kruskal;
mod report;
mod strassen;

pub use als::{als_fit, AlsOptions, AlsRun, AlsStatus, ALS_GUARD_FACTOR};
pub use certificate::{Bound, CertificateKind, DirectSumPart, Payload, RankCertificate};
pub use determinant::{
    determinant_lower_certificate, w3kron2_determinant_certificate, w3kron2_slices, DeterminantWitness,
    DETERMINANT_PROBES,
};
pub use flattening::{flattening_lower_bound, flattening_ranks};
pub use kruskal::{
    kruskal_certificate, kruskal_grouping, kruskal_rank, kruskal_rank_numeric, kruskal_ranks_numeric, KRUSKAL_MAX_VECTORS,
};
pub use report::{als_rank_upper, rank_report, rank_report_with, KnownRank, RankReport, RankReportOptions};
pub use strassen::{strassen_condition, strassen_condition_with, SummandEvidence};

use crate::error::Result;
use crate::scalar::GaussianRational;
use crate::tensor::{ExactTensor, IndexIter, Shape};

/// The tensor with every size-1 mode dropped; a nonzero scalar keeps one mode.
pub fn squeeze(t: &ExactTensor) -> ExactTensor {
    let dims: Vec<usize> = t.dims().iter().copied().filter(|&n| n > 1).collect();
    let dims = if dims.is_empty() { vec![1] } else { dims };
    ExactTensor::from_entries(Shape::new(dims).expect("positive dims"), t.entries().to_vec()).expect("same size")
}

/// Three-mode tensor whose modes are the given blocks of modes of `t`.
pub(crate) fn group_modes(t: &ExactTensor, blocks: &[Vec<usize>]) -> Result<ExactTensor> {
    let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
    let p = t.permute_modes(&perm)?;
    let dims: Vec<usize> = blocks.iter().map(|b| b.iter().map(|&m| t.dims()[m]).product()).collect();
    ExactTensor::from_entries(Shape::new(dims)?, p.into_entries())
}

/// Subtensor on the given index sets (one sorted list per mode).
pub(crate) fn extract(t: &ExactTensor, indices: &[Vec<usize>]) -> Result<ExactTensor> {
    let shape = Shape::new(indices.iter().map(Vec::len).collect())?;
    let mut src = vec![0; t.order()];
    Ok(ExactTensor::from_fn(shape, |idx| {
        for (k, (&i, set)) in idx.iter().zip(indices).enumerate() {
            src[k] = set[i];
        }
        t.get(&src).clone()
    }))
}

/// Index sets of the connected components of the support, where two nonzero
/// entries are linked when they share an index in some mode. Indices outside
/// the support are dropped.
pub(crate) fn support_components(t: &ExactTensor) -> Vec<Vec<Vec<usize>>> {
    use crate::scalar::ExactField;
    let dims = t.dims();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &n| {
        let o = *acc;
        *acc += n;
        Some(o)
    })
    .collect();
    let total: usize = dims.iter().sum();
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut used = vec![false; total];
    for (idx, v) in IndexIter::new(dims).zip(t.entries()) {
        if v.is_zero() {
            continue;
        }
        let first = offsets[0] + idx[0];
        used[first] = true;
        for (k, &i) in idx.iter().enumerate().skip(1) {
            let node = offsets[k] + i;
            used[node] = true;
            let (a, b) = (find(&mut parent, first), find(&mut parent, node));
            parent[a] = b;
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut comps: Vec<Vec<Vec<usize>>> = Vec::new();
    for node in 0..total {
        if !used[node] {
            continue;
        }
        let r = find(&mut parent, node);
        let c = match roots.iter().position(|&x| x == r) {
            Some(c) => c,
            None => {
                roots.push(r);
                comps.push(vec![Vec::new(); dims.len()]);
                roots.len() - 1
            }
        };
        let mode = offsets.iter().rposition(|&o| o <= node).expect("offset 0 exists");
        comps[c][mode].push(node - offsets[mode]);
    }
    comps
}

/// Exact rank factorization `M = Σ_k c_k r_kᵀ` from the reduced row echelon form.
pub(crate) fn matrix_rank_factors(
    m: &crate::linalg::Matrix<GaussianRational>,
) -> Vec<(Vec<GaussianRational>, Vec<GaussianRational>)> {
    use crate::scalar::{ExactField, Scalar};
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<GaussianRational>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = &GaussianRational::one() / &a[r][c];
        a[r] = a[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
        .iter()
        .enumerate()
        .map(|(k, &c)| ((0..rows).map(|i| m.get(i, c).clone()).collect(), a[k].clone()))
        .collect()
}

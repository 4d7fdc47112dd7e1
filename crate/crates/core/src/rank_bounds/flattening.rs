use super::certificate::{CertificateKind, Payload, RankCertificate};
use super::squeeze;
use crate::tensor::ExactTensor;

/// Largest order for which every bipartition of the modes is tried.
const ALL_BIPARTITIONS_MAX_ORDER: usize = 4;

/// Exact ranks of the flattenings used for the lower bound: single modes,
/// plus every bipartition when the order is at most four. Each split is
/// listed once, by the side containing mode 0.
pub fn flattening_ranks(t: &ExactTensor) -> Vec<(Vec<usize>, usize)> {
    let d = t.order();
    if d < 2 {
        return Vec::new();
    }
    let mut splits: Vec<Vec<usize>> = (0..d).map(|k| vec![k]).collect();
    if d <= ALL_BIPARTITIONS_MAX_ORDER {
        for mask in 1u32..(1 << d) - 1 {
            let left: Vec<usize> = (0..d).filter(|&k| mask >> k & 1 == 1).collect();
            if left.contains(&0) && left.len() > 1 && left.len() < d - 1 {
                splits.push(left);
            }
        }
    }
    if d == 2 {
        splits.truncate(1);
    }
    splits
        .into_iter()
        .map(|left| {
            let r = t.flatten(&left).expect("proper subset").rank();
            (left, r)
        })
        .collect()
}

/// Exact rank of each single-mode flattening.
pub(crate) fn mode_ranks(t: &ExactTensor) -> Vec<usize> {
    if t.order() < 2 {
        return vec![usize::from(!t.is_zero()); t.order()];
    }
    (0..t.order()).map(|k| t.flatten(&[k]).expect("proper subset").rank()).collect()
}

/// Best flattening lower bound on the rank of `t`.
pub fn flattening_lower_bound(t: &ExactTensor) -> RankCertificate {
    let t = squeeze(t);
    let best = flattening_ranks(&t).into_iter().rev().max_by_key(|(_, r)| *r);
    let (left_modes, value) = best.unwrap_or_else(|| (Vec::new(), usize::from(!t.is_zero())));
    RankCertificate { kind: CertificateKind::FlatteningLower, value, payload: Payload::Flattening { left_modes } }
}

//! Sufficient conditions for `r(T ⊕ U) = r(T) + r(U)` with three-mode summands.

use crate::tensor::Shape;

/// Rank evidence about one summand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SummandEvidence {
    /// Certified upper bound on the rank.
    pub upper: Option<usize>,
    /// Largest single-mode flattening rank.
    pub max_flattening: Option<usize>,
}

fn shape_condition(n: &[usize]) -> bool {
    // a mode of size 1 can be padded to 2 without changing the sum's rank
    n.iter().any(|&x| x <= 2)
        || (0..3).any(|k| {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            n[i] * n[j] == n[k] + 2
        })
}

fn single_summand_condition(n: &[usize], e: &SummandEvidence) -> bool {
    let mut sorted = n.to_vec();
    sorted.sort_unstable();
    let two_threes = sorted.iter().filter(|&&x| x == 3).count() >= 2;
    two_threes
        || e.upper.is_some_and(|u| u <= 6)
        || matches!((e.upper, e.max_flattening), (Some(u), Some(f)) if f + 2 >= u)
}

/// Shape-only additivity test: a mode of size at most 2, a mode with
/// `n_i n_j − n_k = 2`, or a summand of shape `(p, 3, 3)` up to order.
pub fn strassen_condition(n: &Shape, p: &Shape) -> bool {
    strassen_condition_with(n, p, &SummandEvidence::default(), &SummandEvidence::default())
}

/// As [`strassen_condition`], also accepting a summand with rank at most 6
/// or with rank at most its largest flattening rank plus 2.
pub fn strassen_condition_with(n: &Shape, p: &Shape, en: &SummandEvidence, ep: &SummandEvidence) -> bool {
    let (n, p) = (n.dims(), p.dims());
    if n.len() != 3 || p.len() != 3 {
        return false;
    }
    shape_condition(n) || shape_condition(p) || single_summand_condition(n, en) || single_summand_condition(p, ep)
}

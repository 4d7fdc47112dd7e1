//! Closed-form lower bounds, threshold formulas and maximal-rank upper bounds.

use serde::Serialize;

use super::tables;
use crate::pencil::max_rank_mn2;
use crate::tensor::Shape;

fn nontrivial_sorted(dims: &[usize]) -> Vec<usize> {
    let mut d: Vec<usize> = dims.iter().copied().filter(|&n| n > 1).collect();
    d.sort_unstable();
    d
}

/// `⌈N/M⌉` with `M = 1 − d + Σ n_j`, after dropping singleton modes.
pub fn r0_lower_bound(shape: &Shape) -> usize {
    let d = nontrivial_sorted(shape.dims());
    if d.is_empty() {
        return 1;
    }
    let n: usize = d.iter().product();
    let m = 1 + d.iter().sum::<usize>() - d.len();
    n.div_ceil(m)
}

/// Generic rank of unbalanced shapes, where the largest mode dominates.
///
/// With `n_d` the largest size and `P`, `s` the product and sum of the
/// others: `P` if `n_d ≥ P`, `n_d` if `P + d − 1 − s ≤ n_d`, none otherwise.
pub fn threshold_generic_rank(shape: &Shape) -> Option<usize> {
    let d = nontrivial_sorted(shape.dims());
    let Some((&last, rest)) = d.split_last() else {
        return Some(1);
    };
    let p: usize = rest.iter().product();
    let s: usize = rest.iter().sum();
    if last >= p {
        Some(p)
    } else if last + s >= p + d.len() - 1 {
        Some(last)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QunitValue {
    Exact(u128),
    UpperBound(u128),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QunitFormulas {
    pub n: u32,
    pub d: u32,
    /// `θ = n^d / (d(n−1)+1)` as (numerator, denominator), unreduced.
    pub theta: (u128, u128),
    pub theta_floor: u128,
    pub theta_ceil: u128,
    pub delta: u128,
    pub value: QunitValue,
}

/// Counting bound `θ` for `n^{×d}` and the exact value or upper bound it implies.
///
/// Returns `None` when `n^d` overflows `u128`.
pub fn qunit_formulas(n: u32, d: u32) -> Option<QunitFormulas> {
    if n < 2 || d < 2 {
        return None;
    }
    let num = (n as u128).checked_pow(d)?;
    let den = d as u128 * (n as u128 - 1) + 1;
    let floor = num / den;
    let ceil = num.div_ceil(den);
    let delta = floor % n as u128;
    let value = if d == 2 {
        QunitValue::Exact(n as u128)
    } else if n == 2 || num % den == 0 || delta == n as u128 - 1 {
        QunitValue::Exact(ceil)
    } else {
        QunitValue::UpperBound(ceil + n as u128 - 1 - delta)
    };
    Some(QunitFormulas { n, d, theta: (num, den), theta_floor: floor, theta_ceil: ceil, delta, value })
}

/// Generic rank from a closed form or a stored table, with its source.
pub fn known_generic_rank(shape: &Shape) -> Option<(usize, &'static str)> {
    let d = nontrivial_sorted(shape.dims());
    if let Some(v) = threshold_generic_rank(shape) {
        return Some((v, "threshold"));
    }
    if d.len() == 3 && d[0] == 3 && d[1] == 3 {
        if let Some(v) = tables::generic_rank_33p(d[2]) {
            return Some((v, "table-33p"));
        }
    }
    if d.iter().all(|&x| x == d[0]) {
        let (n, k) = (d[0] as u32, d.len() as u32);
        if let Some(QunitValue::Exact(v)) = qunit_formulas(n, k).map(|f| f.value) {
            return usize::try_from(v).ok().map(|v| (v, "qunit-formula"));
        }
        if let Some(e) = tables::qunit_generic_rank(n, k) {
            return usize::try_from(e.r_gen).ok().map(|v| (v, "qunit-table"));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelledBound {
    pub label: &'static str,
    pub value: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxRankBounds {
    pub bounds: Vec<LabelledBound>,
    pub best: usize,
}

fn atkinson_bounds(d: &[usize], out: &mut Vec<LabelledBound>) {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut best = [usize::MAX; 3];
    for perm in PERMS {
        let (m, n, p) = (d[perm[0]], d[perm[1]], d[perm[2]]);
        if m >= 3 && n >= 3 && n == p {
            best[0] = best[0].min((m + 1) * n / 2);
        }
        if 3 <= m && m <= n && p >= 3 {
            best[1] = best[1].min(m + (p / 2) * n);
        }
        if 3 <= m && m <= n && p <= m * n {
            let u = m * n - p;
            if u <= 4.min(m).min(n) {
                best[2] = best[2].min(m * n - u.div_ceil(2));
            }
        }
    }
    for (label, v) in ["atkinson-square", "atkinson-slab", "atkinson-near-full"].into_iter().zip(best) {
        if v != usize::MAX {
            out.push(LabelledBound { label, value: v });
        }
    }
}

/// Every applicable closed-form upper bound on the maximal rank, and their minimum.
pub fn max_rank_upper_bounds(shape: &Shape) -> MaxRankBounds {
    let d = nontrivial_sorted(shape.dims());
    let mut bounds = Vec::new();
    if d.is_empty() {
        return MaxRankBounds { bounds: vec![LabelledBound { label: "scalar", value: 1 }], best: 1 };
    }
    let n: usize = d.iter().product();
    bounds.push(LabelledBound { label: "slice-count", value: n / d[d.len() - 1] });
    if d.len() == 2 {
        bounds.push(LabelledBound { label: "matrix", value: d[0] });
    }
    if d.len() == 3 {
        if d[0] == 2 {
            if let Ok(v) = max_rank_mn2(d[1], d[2]) {
                bounds.push(LabelledBound { label: "pencil", value: v });
            }
        }
        if d[0] == 3 && d[1] == 3 {
            if let Some((_, hi)) = tables::max_rank_33p(d[2]) {
                bounds.push(LabelledBound { label: "table-33p", value: hi });
            }
        }
        atkinson_bounds(&d, &mut bounds);
    }
    if d.iter().all(|&x| x == d[0]) {
        if let Some(c) = tables::qunit_comparison(d[0] as u32, d.len() as u32) {
            bounds.push(LabelledBound { label: "table-qunit", value: c.r_max.value });
        }
    }
    if let Some((g, _)) = known_generic_rank(shape) {
        bounds.push(LabelledBound { label: "twice-generic", value: 2 * g - 1 });
    }
    let best = bounds.iter().map(|b| b.value).min().expect("slice-count bound is always present");
    MaxRankBounds { bounds, best }
}

//! Dominating and 3-separated sets in the Hamming graph on `[n₁]×…×[n_d]`.
//!
//! Points use 1-based coordinates. Two points are adjacent when they differ
//! in exactly one coordinate, so every closed neighbourhood has `M(n)` points.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::generic::field::is_prime;
use crate::tensor::Shape;

/// Largest vertex count for exhaustive checks and greedy constructions.
pub const MAX_VERTICES: usize = 1_000_000;

/// Largest vertex count for the exact domination number.
pub const MAX_EXACT_VERTICES: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HammingPoint(pub Vec<usize>);

impl HammingPoint {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn distance(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for HammingPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for HammingPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Sorted, duplicate-free set of in-range points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    shape: Shape,
    points: Vec<HammingPoint>,
}

impl VertexSet {
    pub fn new(shape: Shape, points: Vec<HammingPoint>) -> Result<Self> {
        for p in &points {
            if p.0.len() != shape.order() || p.0.iter().zip(shape.dims()).any(|(&c, &n)| c == 0 || c > n) {
                return Err(Error::InvalidArgument(format!("point {p} is outside {shape}")));
            }
        }
        let set: BTreeSet<HammingPoint> = points.into_iter().collect();
        Ok(Self { shape, points: set.into_iter().collect() })
    }

    pub fn from_coords(shape: Shape, points: &[&[usize]]) -> Result<Self> {
        Self::new(shape, points.iter().map(|p| HammingPoint(p.to_vec())).collect())
    }

    fn from_linear(shape: Shape, mut idx: Vec<usize>) -> Self {
        idx.sort_unstable();
        idx.dedup();
        let points = idx.iter().map(|&i| point_of(&shape, i)).collect();
        Self { shape, points }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn points(&self) -> &[HammingPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn without_last(&self) -> Self {
        let mut points = self.points.clone();
        points.pop();
        Self { shape: self.shape.clone(), points }
    }

    pub fn with_point(&self, p: HammingPoint) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(p);
        Self::new(self.shape.clone(), points)
    }

    fn linear(&self) -> Vec<usize> {
        self.points.iter().map(|p| linear_of(&self.shape, p)).collect()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

fn point_of(shape: &Shape, i: usize) -> HammingPoint {
    HammingPoint(shape.multi_index(i).into_iter().map(|c| c + 1).collect())
}

fn linear_of(shape: &Shape, p: &HammingPoint) -> usize {
    let zero: Vec<usize> = p.0.iter().map(|c| c - 1).collect();
    shape.linear_index(&zero)
}

fn check_size(shape: &Shape, limit: usize) -> Result<usize> {
    let n = shape.n_entries();
    if n > limit {
        return Err(Error::BudgetExceeded(format!("{n} vertices exceeds the limit of {limit}")));
    }
    Ok(n)
}

/// Calls `f` on every vertex at distance exactly one from `v`.
fn for_each_neighbour(dims: &[usize], strides: &[usize], v: usize, mut f: impl FnMut(usize)) {
    for (&n, &st) in dims.iter().zip(strides) {
        let c = (v / st) % n;
        let base = v - c * st;
        for x in 0..n {
            if x != c {
                f(base + x * st);
            }
        }
    }
}

/// Whether every vertex is within distance one of the set.
pub fn verify_dominating(set: &VertexSet) -> Result<bool> {
    let n = check_size(&set.shape, MAX_VERTICES)?;
    let (dims, strides) = (set.shape.dims(), set.shape.strides());
    let mut covered = vec![false; n];
    for v in set.linear() {
        covered[v] = true;
        for_each_neighbour(dims, &strides, v, |w| covered[w] = true);
    }
    Ok(covered.iter().all(|&c| c))
}

/// Whether all pairwise distances are at least three.
pub fn verify_3separated(set: &VertexSet) -> bool {
    let p = &set.points;
    (0..p.len()).all(|i| (i + 1..p.len()).all(|j| p[i].distance(&p[j]) >= 3))
}

/// Greedy dominating set: repeatedly take the vertex covering the most
/// uncovered vertices, preferring the lexicographically smallest.
pub fn greedy_dominating(shape: &Shape) -> Result<VertexSet> {
    let n = check_size(shape, MAX_VERTICES)?;
    let (dims, strides) = (shape.dims(), shape.strides());
    let m = 1 + dims.iter().map(|d| d - 1).sum::<usize>();
    let mut gain = vec![m; n];
    let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m + 1];
    buckets[m] = (0..n).collect();
    let mut covered = vec![false; n];
    let mut remaining = n;
    let mut chosen = Vec::new();
    while remaining > 0 {
        let g = (1..=m).rev().find(|&g| !buckets[g].is_empty()).expect("uncovered vertices have positive gain");
        let v = *buckets[g].iter().next().expect("nonempty bucket");
        chosen.push(v);
        let mut newly = Vec::new();
        if !covered[v] {
            newly.push(v);
        }
        for_each_neighbour(dims, &strides, v, |w| {
            if !covered[w] {
                newly.push(w);
            }
        });
        for &u in &newly {
            covered[u] = true;
            remaining -= 1;
            let mut dec = |w: usize| {
                buckets[gain[w]].remove(&w);
                gain[w] -= 1;
                if gain[w] > 0 {
                    buckets[gain[w]].insert(w);
                }
            };
            dec(u);
            for_each_neighbour(dims, &strides, u, &mut dec);
        }
    }
    Ok(VertexSet::from_linear(shape.clone(), chosen))
}

/// Greedy packing in lexicographic order.
pub fn greedy_3separated(shape: &Shape) -> Result<VertexSet> {
    let n = check_size(shape, MAX_VERTICES)?;
    let (dims, strides) = (shape.dims(), shape.strides());
    let mut blocked = vec![false; n];
    let mut chosen = Vec::new();
    for v in 0..n {
        if blocked[v] {
            continue;
        }
        chosen.push(v);
        blocked[v] = true;
        for_each_neighbour(dims, &strides, v, |w| {
            blocked[w] = true;
            for_each_neighbour(dims, &strides, w, |u| blocked[u] = true);
        });
    }
    Ok(VertexSet::from_linear(shape.clone(), chosen))
}

/// `Some((q, l))` when `n = q^l` for a prime `q`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let q = (2..=n).find(|q| n % q == 0)?;
    let (mut m, mut l) = (n, 0);
    while m % q == 0 {
        m /= q;
        l += 1;
    }
    (m == 1 && is_prime(q)).then_some((q, l))
}

/// Generic rank `n^{d−a−1}` of `n^{×d}` when a 1-perfect code is known to exist:
/// `n` a prime power and `d = (n^{a+1}−1)/(n−1)` for some `a ≥ 2`.
pub fn perfect_code_rank(n: u64, d: u64) -> Option<u128> {
    prime_power(n)?;
    let n = n as u128;
    let mut a = 2u32;
    loop {
        let len = (n.checked_pow(a + 1)? - 1) / (n - 1);
        if len == d as u128 {
            return n.checked_pow(d as u32 - a - 1);
        }
        if len > d as u128 {
            return None;
        }
        a += 1;
    }
}

/// The `q`-ary Hamming code of redundancy `a+1`, as a point set in `q^{×d}`
/// with `d = (q^{a+1}−1)/(q−1)`. Requires `q` prime.
pub fn hamming_code(q: usize, a: usize) -> Result<VertexSet> {
    if !is_prime(q as u64) || a == 0 {
        return Err(Error::InvalidArgument(format!("need a prime q and a ≥ 1, got q={q}, a={a}")));
    }
    let rows = a + 1;
    // parity-check columns: projective points with leading entry 1; the unit
    // vectors are split off as the parity positions
    let mut cols: Vec<Vec<usize>> = Vec::new();
    for v in 0..q.pow(rows as u32) {
        let x: Vec<usize> = (0..rows).map(|i| (v / q.pow(i as u32)) % q).collect();
        if x.iter().find(|&&c| c != 0) == Some(&1) && x.iter().filter(|&&c| c != 0).count() > 1 {
            cols.push(x);
        }
    }
    let info = cols.len();
    let d = info + rows;
    let words = q
        .checked_pow(info as u32)
        .filter(|&w| w <= MAX_VERTICES)
        .ok_or_else(|| Error::BudgetExceeded(format!("Hamming code with {info} information symbols")))?;
    let shape = Shape::new(vec![q; d])?;
    let mut points = Vec::with_capacity(words);
    for w in 0..words {
        let x: Vec<usize> = (0..info).map(|i| (w / q.pow((info - 1 - i) as u32)) % q).collect();
        let mut word: Vec<usize> = x.iter().map(|c| c + 1).collect();
        for r in 0..rows {
            let s: usize = cols.iter().zip(&x).map(|(c, xi)| c[r] * xi).sum::<usize>() % q;
            word.push((q - s) % q + 1);
        }
        points.push(HammingPoint(word));
    }
    VertexSet::new(shape, points)
}

/// `N(n)/M(n)`: lower bound for dominating sets, upper bound for 3-separated sets.
pub fn fractional_bound(shape: &Shape) -> Ratio<u128> {
    let n = shape.n_entries() as u128;
    let m = 1 + shape.dims().iter().map(|&d| d as u128 - 1).sum::<u128>();
    Ratio::new(n, m)
}

/// Minimum dominating set size by branch and bound, for at most 32 vertices.
pub fn exact_domination_number(shape: &Shape) -> Result<usize> {
    let n = check_size(shape, MAX_EXACT_VERTICES)?;
    let (dims, strides) = (shape.dims(), shape.strides());
    let ball: Vec<u64> = (0..n)
        .map(|v| {
            let mut b = 1u64 << v;
            for_each_neighbour(dims, &strides, v, |w| b |= 1 << w);
            b
        })
        .collect();
    let m = ball[0].count_ones() as usize;
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = greedy_dominating(shape)?.len();

    fn search(covered: u64, used: usize, full: u64, m: usize, ball: &[u64], best: &mut usize) {
        if covered == full {
            *best = (*best).min(used);
            return;
        }
        let left = (full & !covered).count_ones() as usize;
        if used + left.div_ceil(m) >= *best {
            return;
        }
        let v = (full & !covered).trailing_zeros() as usize;
        let mut cands = ball[v];
        while cands != 0 {
            let w = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            search(covered | ball[w], used + 1, full, m, ball, best);
        }
    }
    search(0, 0, full, m, &ball, &mut best);
    Ok(best)
}

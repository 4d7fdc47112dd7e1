//! Embedded reference values for generic and maximal ranks.

use serde::Serialize;

/// Where a stored value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Established in the literature.
    Reference,
    /// Obtained by a numerical Terracini computation.
    Computed,
    /// Elementary (matrix rank).
    Elementary,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Reference => "reference",
            Provenance::Computed => "computed",
            Provenance::Elementary => "elementary",
        }
    }
}

/// Generic rank of `d` modes of size `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QunitEntry {
    pub d: u32,
    pub n: u32,
    pub r_gen: u128,
    pub provenance: Provenance,
}

const fn q(d: u32, n: u32, r_gen: u128, provenance: Provenance) -> QunitEntry {
    QunitEntry { d, n, r_gen, provenance }
}

use Provenance::{Computed as C, Elementary as E, Reference as R};

/// Generic ranks of `n^{×d}`.
pub const QUNIT_GENERIC_RANKS: &[QunitEntry] = &[
    q(2, 2, 2, R),
    q(2, 3, 3, E),
    q(2, 4, 4, E),
    q(2, 5, 5, E),
    q(2, 6, 6, E),
    q(2, 7, 7, E),
    q(2, 8, 8, E),
    q(2, 9, 9, E),
    q(2, 10, 10, E),
    q(3, 2, 2, R),
    q(3, 3, 5, R),
    q(3, 4, 7, R),
    q(3, 5, 10, R),
    q(3, 6, 14, R),
    q(3, 7, 19, R),
    q(3, 8, 24, R),
    q(3, 9, 30, R),
    q(3, 10, 36, R),
    q(4, 2, 4, R),
    q(4, 3, 9, R),
    q(4, 4, 20, R),
    q(4, 5, 37, R),
    q(4, 6, 62, R),
    q(4, 7, 97, R),
    q(4, 8, 142, C),
    q(4, 9, 199, C),
    q(4, 10, 271, C),
    q(5, 2, 6, R),
    q(5, 3, 23, C),
    q(5, 4, 64, R),
    q(5, 5, 149, C),
    q(5, 6, 300, R),
    q(5, 7, 543, C),
    q(6, 2, 10, R),
    q(6, 3, 57, R),
    q(6, 4, 216, R),
    q(6, 5, 625, R),
    q(6, 6, 1506, R),
    q(7, 2, 16, R),
    q(7, 3, 146, C),
    q(7, 4, 745, C),
    q(7, 6, 7776, R),
    q(7, 8, 41944, R),
    q(7, 10, 156250, R),
    q(8, 2, 29, R),
    q(8, 3, 386, C),
    q(8, 7, 117649, R),
    q(9, 2, 52, R),
    q(9, 3, 1036, C),
    q(9, 8, 2097152, R),
    q(10, 2, 94, R),
    q(10, 6, 1185612, R),
    q(10, 9, 43046721, R),
    q(10, 10, 109890110, R),
    q(11, 2, 171, R),
    q(11, 5, 1085070, R),
    q(11, 10, 1_000_000_000, R),
    q(12, 2, 316, R),
    q(12, 3, 21258, R),
    q(13, 2, 586, R),
    q(13, 3, 59049, R),
    q(13, 5, 23032135, R),
    q(14, 2, 1093, R),
    q(14, 6, 1103720622, R),
    q(15, 2, 2048, R),
    q(16, 2, 3856, R),
    q(16, 5, 2347506010, R),
    q(16, 6, 34828517376, R),
    q(16, 8, 2490928997440, R),
    q(16, 10, 68965517241380, R),
];

pub fn qunit_generic_rank(n: u32, d: u32) -> Option<QunitEntry> {
    QUNIT_GENERIC_RANKS.iter().copied().find(|e| e.n == n && e.d == d)
}

/// Maximal rank of `3×3×p`, as an interval `(lo, hi)`.
pub const MAX_RANK_33P: [(usize, usize); 9] = [(3, 3), (4, 4), (5, 5), (6, 6), (6, 7), (7, 7), (8, 8), (8, 8), (9, 9)];

/// Generic rank of `3×3×p`.
pub const GENERIC_RANK_33P: [usize; 9] = [3, 3, 5, 5, 5, 6, 7, 8, 9];

pub fn max_rank_33p(p: usize) -> Option<(usize, usize)> {
    (1..=9).contains(&p).then(|| MAX_RANK_33P[p - 1])
}

pub fn generic_rank_33p(p: usize) -> Option<usize> {
    (1..=9).contains(&p).then(|| GENERIC_RANK_33P[p - 1])
}

/// Upper bounds on the maximal rank of `n×n×n` cubes with the matching generic rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CubeEntry {
    pub n: usize,
    pub r_max_upper: usize,
    pub r_gen: usize,
}

pub const CUBES: [CubeEntry; 4] = [
    CubeEntry { n: 4, r_max_upper: 10, r_gen: 7 },
    CubeEntry { n: 5, r_max_upper: 15, r_gen: 10 },
    CubeEntry { n: 6, r_max_upper: 21, r_gen: 14 },
    CubeEntry { n: 7, r_max_upper: 28, r_gen: 19 },
];

/// A value together with whether it is exact or only an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TableValue {
    pub value: usize,
    pub exact: bool,
}

/// Generic rank, maximal rank and orthogonal-basis term count of `n^{×d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QunitComparison {
    pub d: u32,
    pub n: u32,
    pub r_gen: TableValue,
    pub r_max: TableValue,
    pub r_u: TableValue,
}

const fn x(value: usize) -> TableValue {
    TableValue { value, exact: true }
}

const fn ub(value: usize) -> TableValue {
    TableValue { value, exact: false }
}

const fn cmp(d: u32, n: u32, r_gen: TableValue, r_max: TableValue, r_u: TableValue) -> QunitComparison {
    QunitComparison { d, n, r_gen, r_max, r_u }
}

pub const QUNIT_COMPARISON: &[QunitComparison] = &[
    cmp(2, 2, x(2), x(2), x(2)),
    cmp(2, 3, x(3), x(3), x(3)),
    cmp(2, 4, x(4), x(4), x(4)),
    cmp(2, 5, x(5), x(5), x(5)),
    cmp(3, 2, x(2), x(3), x(5)),
    cmp(3, 3, x(5), x(5), x(18)),
    cmp(3, 4, x(7), ub(13), x(46)),
    cmp(3, 5, x(10), ub(20), x(95)),
    cmp(4, 2, x(4), x(4), x(12)),
    cmp(4, 3, x(9), ub(18), x(69)),
    cmp(4, 4, x(20), ub(40), x(232)),
    cmp(4, 5, x(37), ub(74), x(585)),
];

pub fn qunit_comparison(n: u32, d: u32) -> Option<QunitComparison> {
    QUNIT_COMPARISON.iter().copied().find(|e| e.n == n && e.d == d)
}

/// Terms needed in an orthogonal product basis: `n^d − d·n(n−1)/2`.
pub fn r_u(n: u32, d: u32) -> Option<u128> {
    let nd = (n as u128).checked_pow(d)?;
    nd.checked_sub(d as u128 * n as u128 * (n as u128 - 1) / 2)
}

/// Shapes `(3, 2k+1, 2k+1)` whose generic rank exceeds the counting bound by one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnomalyFlag {
    pub k: usize,
    pub shape: [usize; 3],
    /// Excess over the counting bound.
    pub excess: usize,
    /// Recomputed by the test suite.
    pub verified: bool,
}

pub fn anomaly_flags() -> Vec<AnomalyFlag> {
    (1..=9).map(|k| AnomalyFlag { k, shape: [3, 2 * k + 1, 2 * k + 1], excess: 1, verified: k <= 2 }).collect()
}

/// Everything above, for serialization.
#[derive(Clone, Debug, Serialize)]
pub struct KnownTables {
    pub qunit_generic_ranks: Vec<QunitEntry>,
    pub max_rank_33p: Vec<(usize, usize)>,
    pub generic_rank_33p: Vec<usize>,
    pub cubes: Vec<CubeEntry>,
    pub qunit_comparison: Vec<QunitComparison>,
    pub anomalies: Vec<AnomalyFlag>,
}

pub fn known_tables() -> KnownTables {
    KnownTables {
        qunit_generic_ranks: QUNIT_GENERIC_RANKS.to_vec(),
        max_rank_33p: MAX_RANK_33P.to_vec(),
        generic_rank_33p: GENERIC_RANK_33P.to_vec(),
        cubes: CUBES.to_vec(),
        qunit_comparison: QUNIT_COMPARISON.to_vec(),
        anomalies: anomaly_flags(),
    }
}

/// Rows of the generic-rank table as tab-separated text with a header.
pub fn qunit_table_tsv() -> String {
    let mut s = String::from("d\tn\tr_gen\tprovenance\n");
    for e in QUNIT_GENERIC_RANKS {
        s.push_str(&format!("{}\t{}\t{}\t{}\n", e.d, e.n, e.r_gen, e.provenance.as_str()));
    }
    s
}

/// Comparison rows as tab-separated text; bounds carry a `<=` prefix.
pub fn comparison_table_tsv() -> String {
    let show = |v: TableValue| if v.exact { v.value.to_string() } else { format!("<={}", v.value) };
    let mut s = String::from("d\tn\tr_gen\tr_max\tr_u\n");
    for e in QUNIT_COMPARISON {
        s.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", e.d, e.n, show(e.r_gen), show(e.r_max), show(e.r_u)));
    }
    s
}

/// The `3×3×p` rows as tab-separated text.
pub fn table_33p_tsv() -> String {
    let mut s = String::from("p\tr_gen\tr_max\n");
    for p in 1..=9 {
        let (lo, hi) = MAX_RANK_33P[p - 1];
        let rmax = if lo == hi { lo.to_string() } else { format!("{{{lo},{hi}}}") };
        s.push_str(&format!("{p}\t{}\t{rmax}\n", GENERIC_RANK_33P[p - 1]));
    }
    s
}

use super::certificate::{CertificateKind, Payload, RankCertificate};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{ExactField, GaussianRational, Scalar, C64};
use crate::tensor::Decomposition;

/// Largest number of vectors for the exhaustive subset search.
pub const KRUSKAL_MAX_VECTORS: usize = 20;

fn check_vectors<S>(vectors: &[Vec<S>], is_zero: impl Fn(&[S]) -> bool) -> Result<()> {
    if vectors.len() > KRUSKAL_MAX_VECTORS {
        return Err(Error::BudgetExceeded(format!(
            "Kruskal rank of {} vectors (limit {KRUSKAL_MAX_VECTORS})",
            vectors.len()
        )));
    }
    if let Some(i) = vectors.iter().position(|v| is_zero(v)) {
        return Err(Error::InvalidArgument(format!("vector {i} is zero")));
    }
    if vectors.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(Error::ShapeMismatch("vectors of different lengths".into()));
    }
    Ok(())
}

/// Largest `k` such that every `k` of the vectors are independent, given a
/// rank oracle on subsets.
fn kruskal_search(l: usize, m: usize, independent: impl Fn(&[usize]) -> bool) -> usize {
    let mut k = 1;
    while k < l.min(m) {
        let size = k + 1;
        let mut subset: Vec<usize> = (0..size).collect();
        loop {
            if !independent(&subset) {
                return k;
            }
            // next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&i| subset[i] < l - size + i) else { break };
            subset[pos] += 1;
            for i in pos + 1..size {
                subset[i] = subset[i - 1] + 1;
            }
        }
        k = size;
    }
    k.min(l)
}

/// Exact Kruskal rank.
pub fn kruskal_rank(vectors: &[Vec<GaussianRational>]) -> Result<usize> {
    check_vectors(vectors, |v| v.iter().all(|x| x.is_zero()))?;
    if vectors.is_empty() {
        return Ok(0);
    }
    let m = vectors[0].len();
    Ok(kruskal_search(vectors.len(), m, |s| {
        Matrix::from_fn(s.len(), m, |i, j| vectors[s[i]][j].clone()).rank() == s.len()
    }))
}

/// Kruskal rank with subset ranks decided by singular values above `tol · σ_max`.
pub fn kruskal_rank_numeric(vectors: &[Vec<C64>], tol: f64) -> Result<usize> {
    check_vectors(vectors, |v| v.iter().all(|x| x.norm() == 0.0))?;
    if vectors.is_empty() {
        return Ok(0);
    }
    let m = vectors[0].len();
    Ok(kruskal_search(vectors.len(), m, |s| {
        Matrix::from_fn(s.len(), m, |i, j| vectors[s[i]][j]).numeric_rank(tol) == s.len()
    }))
}

/// Three mode blocks: `{0}`, then the split of the remaining modes whose
/// sizes `N₂ ≤ N₃` are as close as possible (lowest mode mask on ties).
pub fn kruskal_grouping(dims: &[usize]) -> Result<Vec<Vec<usize>>> {
    let d = dims.len();
    if d < 3 {
        return Err(Error::InvalidShape(format!("Kruskal certificates need at least 3 modes, got {d}")));
    }
    let rest: Vec<usize> = (1..d).collect();
    let mut best: Option<(usize, Vec<usize>, Vec<usize>)> = None;
    for mask in 1u32..(1 << rest.len()) - 1 {
        let (a, b): (Vec<usize>, Vec<usize>) = rest.iter().partition(|&&m| mask >> (m - 1) & 1 == 1);
        let (na, nb): (usize, usize) = (a.iter().map(|&m| dims[m]).product(), b.iter().map(|&m| dims[m]).product());
        if na > nb {
            continue;
        }
        if best.as_ref().map_or(true, |(gap, _, _)| nb - na < *gap) {
            best = Some((nb - na, a, b));
        }
    }
    let (_, a, b) = best.expect("at least one split with N₂ ≤ N₃");
    Ok(vec![vec![0], a, b])
}

fn kron<S: Scalar>(vs: &[&Vec<S>]) -> Vec<S> {
    vs.iter().fold(vec![S::one()], |acc, v| acc.iter().flat_map(|a| v.iter().map(move |b| a.clone() * b.clone())).collect())
}

fn grouped_factors<S: Scalar>(dec: &Decomposition<S>, blocks: &[Vec<usize>]) -> [Vec<Vec<S>>; 3] {
    let mut out: [Vec<Vec<S>>; 3] = Default::default();
    for term in dec.terms() {
        for (b, block) in blocks.iter().enumerate() {
            let mut v = kron(&block.iter().map(|&m| &term.factors[m]).collect::<Vec<_>>());
            if b == 0 {
                v = v.into_iter().map(|x| x * term.weight.clone()).collect();
            }
            out[b].push(v);
        }
    }
    out
}

fn check_blocks(d: usize, blocks: &[Vec<usize>]) -> Result<()> {
    let mut all: Vec<usize> = blocks.iter().flatten().copied().collect();
    all.sort_unstable();
    if blocks.len() != 3 || blocks.iter().any(Vec::is_empty) || all != (0..d).collect::<Vec<_>>() {
        return Err(Error::InvalidArgument(format!("{blocks:?} is not a split of {d} modes into 3 blocks")));
    }
    Ok(())
}

pub(crate) fn grouped_kruskal_ranks(dec: &Decomposition<GaussianRational>, blocks: &[Vec<usize>]) -> Result<[usize; 3]> {
    check_blocks(dec.shape().order(), blocks)?;
    if dec.terms().iter().any(|t| t.is_zero()) {
        return Err(Error::InvalidArgument("decomposition has a zero term".into()));
    }
    let g = grouped_factors(dec, blocks);
    Ok([kruskal_rank(&g[0])?, kruskal_rank(&g[1])?, kruskal_rank(&g[2])?])
}

/// Kruskal ranks of the grouped factors of a numeric decomposition.
pub fn kruskal_ranks_numeric(dec: &Decomposition<C64>, tol: f64) -> Result<[usize; 3]> {
    let blocks = kruskal_grouping(dec.shape().dims())?;
    if dec.terms().iter().any(|t| t.is_zero_tol(0.0)) {
        return Err(Error::InvalidArgument("decomposition has a zero term".into()));
    }
    let g = grouped_factors(dec, &blocks);
    Ok([kruskal_rank_numeric(&g[0], tol)?, kruskal_rank_numeric(&g[1], tol)?, kruskal_rank_numeric(&g[2], tol)?])
}

/// Exactness and uniqueness certificate for an exact decomposition whose
/// grouped Kruskal ranks sum to at least `2r + 2`. `None` when they do not.
pub fn kruskal_certificate(dec: &Decomposition<GaussianRational>) -> Result<Option<RankCertificate>> {
    let blocks = kruskal_grouping(dec.shape().dims())?;
    let ranks = grouped_kruskal_ranks(dec, &blocks)?;
    let r = dec.len();
    Ok((ranks.iter().sum::<usize>() >= 2 * r + 2).then(|| RankCertificate {
        kind: CertificateKind::KruskalExact,
        value: r,
        payload: Payload::Kruskal { decomposition: dec.clone(), blocks, kruskal_ranks: ranks },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{basis_vector, RankOneTerm, Shape};

    fn q(v: &[i64]) -> Vec<GaussianRational> {
        v.iter().map(|&x| GaussianRational::from_i64(x)).collect()
    }

    #[test]
    fn small_kruskal_ranks() {
        assert_eq!(kruskal_rank(&[q(&[1, 0]), q(&[1, 0]), q(&[0, 1])]).unwrap(), 1);
        assert_eq!(kruskal_rank(&[q(&[3, 4])]).unwrap(), 1);
        assert_eq!(kruskal_rank(&[q(&[1, 0, 0]), q(&[0, 1, 0]), q(&[1, 1, 0]), q(&[0, 0, 1])]).unwrap(), 2);
        assert!(matches!(kruskal_rank(&[q(&[0, 0])]), Err(Error::InvalidArgument(_))));
        let many = vec![q(&[1]); 21];
        assert!(matches!(kruskal_rank(&many), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn random_vectors_reach_min_of_count_and_dimension() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (l, m) in [(3, 5), (6, 4), (5, 5), (8, 3)] {
            let vs: Vec<Vec<GaussianRational>> =
                (0..l).map(|_| (0..m).map(|_| GaussianRational::from_i64(rng.gen_range(-50..=50))).collect()).collect();
            assert_eq!(kruskal_rank(&vs).unwrap(), l.min(m));
            let vn: Vec<Vec<C64>> = vs.iter().map(|v| v.iter().map(|x| x.to_c64()).collect()).collect();
            assert_eq!(kruskal_rank_numeric(&vn, 1e-9).unwrap(), l.min(m));
        }
    }

    #[test]
    fn grouping_balances_remaining_modes() {
        assert_eq!(kruskal_grouping(&[2, 2, 2]).unwrap(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(kruskal_grouping(&[2, 2, 2, 2]).unwrap(), vec![vec![0], vec![1], vec![2, 3]]);
        assert_eq!(kruskal_grouping(&[2, 3, 2, 2, 3]).unwrap(), vec![vec![0], vec![1, 2], vec![3, 4]]);
        assert!(kruskal_grouping(&[2, 2]).is_err());
    }

    fn dec(dims: &[usize], terms: Vec<RankOneTerm<GaussianRational>>) -> Decomposition<GaussianRational> {
        Decomposition::new(Shape::new(dims.to_vec()).unwrap(), terms).unwrap()
    }

    #[test]
    fn ghz_decomposition_is_certified() {
        let e = |i| basis_vector::<GaussianRational>(2, i);
        let d = dec(
            &[2, 2, 2],
            vec![
                RankOneTerm::new(GaussianRational::from_i64(1), vec![e(0), e(0), e(0)]),
                RankOneTerm::new(GaussianRational::from_i64(1), vec![e(1), e(1), e(1)]),
            ],
        );
        let c = kruskal_certificate(&d).unwrap().unwrap();
        assert_eq!(c.value, 2);
        c.verify(&d.evaluate()).unwrap();
    }

    #[test]
    fn w3_decomposition_is_not_certified() {
        let e = |i| basis_vector::<GaussianRational>(2, i);
        let one = GaussianRational::from_i64(1);
        let d = dec(
            &[2, 2, 2],
            vec![
                RankOneTerm::new(one.clone(), vec![e(0), e(0), e(1)]),
                RankOneTerm::new(one.clone(), vec![e(0), e(1), e(0)]),
                RankOneTerm::new(one, vec![e(1), e(0), e(0)]),
            ],
        );
        assert_eq!(grouped_kruskal_ranks(&d, &[vec![0], vec![1], vec![2]]).unwrap(), [1, 1, 1]);
        assert!(kruskal_certificate(&d).unwrap().is_none());
    }

    #[test]
    fn generic_three_terms_in_333() {
        let terms = (0..3)
            .map(|c| {
                RankOneTerm::new(
                    GaussianRational::from_i64(c as i64 + 1),
                    vec![q(&[1, c, c * c]), q(&[c * c + 1, 1, -c]), q(&[1, 3 - c, c * c + 2])],
                )
            })
            .collect();
        let d = dec(&[3, 3, 3], terms);
        let c = kruskal_certificate(&d).unwrap().unwrap();
        assert_eq!(c.value, 3);
        let t = d.evaluate();
        c.verify(&t).unwrap();
        let mut bad = c.clone();
        if let Payload::Kruskal { kruskal_ranks, .. } = &mut bad.payload {
            kruskal_ranks[0] = 2;
        }
        assert!(bad.verify(&t).is_err());
    }
}

mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensorank::pencil::rank_mxnx2;
use tensorank::rank_bounds::{
    als_fit, rank_report, AlsOptions, AlsStatus, CertificateKind, Payload, RankCertificate, RankReport,
};
use tensorank::{Decomposition, ExactTensor, GaussianRational, RankOneTerm, Shape, Tensor};

fn report(t: &ExactTensor) -> RankReport {
    let r = rank_report(t).unwrap();
    r.verify(t).unwrap();
    r
}

/// Sum of `r` rank-one terms with integer factors in `−k..=k`.
fn random_decomposition(rng: &mut impl Rng, dims: &[usize], r: usize, k: i64) -> Decomposition<GaussianRational> {
    let terms = (0..r)
        .map(|_| {
            let f = dims.iter().map(|&n| (0..n).map(|_| common::q(rng.gen_range(-k..=k))).collect()).collect();
            RankOneTerm::new(common::q(1), f)
        })
        .collect();
    Decomposition::new(Shape::new(dims.to_vec()).unwrap(), terms).unwrap()
}

fn corrupt_decomposition(dec: &Decomposition<GaussianRational>) -> Decomposition<GaussianRational> {
    let mut terms = dec.terms().to_vec();
    let x = &mut terms[0].factors[0][0];
    *x = x.clone() + common::q(1);
    Decomposition::new(dec.shape().clone(), terms).unwrap()
}

#[test]
fn certificates_reverify_and_corruptions_are_caught() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut kinds = std::collections::BTreeSet::new();
    let mut tensors: Vec<ExactTensor> = [[2, 2, 2], [2, 2, 3], [2, 3, 3], [3, 3, 3], [2, 2, 2], [2, 3, 4]]
        .iter()
        .map(|d| common::random_exact(&mut rng, d, 2))
        .collect();
    tensors.push(random_decomposition(&mut rng, &[3, 3, 3], 3, 3).evaluate());
    tensors.push(tensorank::symmetric::wkron2());
    for t in &tensors {
        let r = report(t);
        assert!(r.lower <= r.upper);
        for c in &r.certificates {
            kinds.insert(c.kind.as_str());
            c.verify(t).unwrap();
            let bumped = RankCertificate { value: c.value + 1, ..c.clone() };
            assert!(bumped.verify(t).is_err(), "{} accepted a wrong value", c.kind.as_str());
            let payload = match &c.payload {
                Payload::ExactDecomposition(d) => Some(Payload::ExactDecomposition(corrupt_decomposition(d))),
                Payload::Kruskal { decomposition, blocks, kruskal_ranks } => Some(Payload::Kruskal {
                    decomposition: corrupt_decomposition(decomposition),
                    blocks: blocks.clone(),
                    kruskal_ranks: *kruskal_ranks,
                }),
                Payload::Flattening { left_modes } if left_modes.len() == 1 => {
                    let other = vec![(left_modes[0] + 1) % t.order()];
                    // another mode with the same flattening rank is a valid certificate
                    (t.flatten(&other).unwrap().rank() != c.value).then_some(Payload::Flattening { left_modes: other })
                }
                _ => None,
            };
            if let Some(p) = payload {
                let broken = RankCertificate { payload: p, ..c.clone() };
                assert!(broken.verify(t).is_err(), "{} accepted a corrupted payload", c.kind.as_str());
            }
        }
    }
    assert!(kinds.contains("flattening-lower") && kinds.contains("kruskal-exact") && kinds.contains("determinant-lower"), "{kinds:?}");
}

#[test]
fn upper_bounds_are_subadditive_and_submultiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let shapes = [[2, 2, 2], [2, 1, 2], [1, 2, 2], [2, 2, 1]];
    for a in &shapes {
        for b in &shapes {
            let t = common::random_exact(&mut rng, a, 2);
            let u = common::random_exact(&mut rng, b, 2);
            if t.is_zero() || u.is_zero() {
                continue;
            }
            let (rt, ru) = (report(&t), report(&u));
            let sum = report(&t.direct_sum(&u).unwrap());
            assert!(sum.upper <= rt.upper + ru.upper, "{a:?} ⊕ {b:?}");
            let prod = report(&t.kronecker(&u));
            assert!(prod.upper <= rt.upper * ru.upper, "{a:?} ⊗ {b:?}: {} > {}·{}", prod.upper, rt.upper, ru.upper);
        }
    }
}

#[test]
fn pencil_direct_sums_have_additive_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut checked = 0;
    while checked < 12 {
        let d1 = [rng.gen_range(1..=3), rng.gen_range(1..=3), 2];
        let d2 = [rng.gen_range(1..=3), rng.gen_range(1..=3), 2];
        let t = common::random_exact(&mut rng, &d1, 3);
        let u = common::random_exact(&mut rng, &d2, 3);
        if t.is_zero() || u.is_zero() {
            continue;
        }
        let expected = rank_mxnx2(&t).unwrap().rank + rank_mxnx2(&u).unwrap().rank;
        let r = report(&t.direct_sum(&u).unwrap());
        assert_eq!(r.exact, Some(expected), "{d1:?} ⊕ {d2:?}: {}..{}", r.lower, r.upper);
        checked += 1;
    }
}

#[test]
fn kruskal_unique_decompositions_are_recovered_by_als() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let dec = random_decomposition(&mut rng, &[3, 3, 3], 3, 3);
    let t = dec.evaluate();
    let r = report(&t);
    assert_eq!(r.exact, Some(3));
    assert!(r.certificates.iter().any(|c| c.kind == CertificateKind::KruskalExact));
    let truth: Vec<Tensor> = dec.terms().iter().map(|term| term.to_tensor().unwrap().to_c64()).collect();
    let scale = t.to_c64().frobenius_norm();
    for seed in 0..16 {
        let run = als_fit(&t.to_c64(), 3, &AlsOptions { seed, ..Default::default() }).unwrap();
        assert_eq!(run.status, AlsStatus::Fit);
        for term in run.decomposition.terms() {
            let x = term.to_tensor().unwrap();
            let best = truth.iter().map(|y| x.max_abs_diff(y).unwrap()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-6 * scale, "seed {seed}: term off by {best:.2e}");
        }
    }
}

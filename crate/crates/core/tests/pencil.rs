mod common;

use common::{random_exact, random_gl_action};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensorank::pencil::{classify_222, max_rank_mn2, rank_mxnx2, Orbit222, PencilCertificate};
use tensorank::rank_bounds::{als_rank_upper, flattening_lower_bound, AlsOptions};
use tensorank::symmetric::{ghz_state, w_state};
use tensorank::{ExactTensor, GaussianRational};

fn w3() -> ExactTensor {
    w_state::<GaussianRational>(3).unwrap()
}

#[test]
fn flattening_at_most_pencil_equals_guarded_als_on_random_pencils() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let opts = AlsOptions::default();
    for case in 0..200 {
        let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        // small entries make non-generic pencils reasonably frequent
        let t = random_exact(&mut rng, &[m, n, 2], if case % 2 == 0 { 1 } else { 9 });
        let pencil = rank_mxnx2(&t).unwrap().rank;
        let flat = flattening_lower_bound(&t).value;
        assert!(flat <= pencil, "case {case}: flattening {flat} > pencil {pencil}");
        let cap = max_rank_mn2(m, n).unwrap();
        assert!(pencil <= cap);
        if pencil == 0 {
            continue;
        }
        let als = als_rank_upper(&t.to_c64(), cap, &AlsOptions { seed: case, ..opts.clone() }).unwrap();
        assert_eq!(als.map(|c| c.value), Some(pencil), "case {case}: {t:?}");
    }
}

#[test]
fn generic_square_pencils_have_rank_m() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // a 1×1 pencil always has dependent slices
    for m in 2..=6 {
        let t = random_exact(&mut rng, &[m, m, 2], 1000);
        let r = rank_mxnx2(&t).unwrap();
        assert_eq!((r.rank, r.certificate), (m, PencilCertificate::Regular));
    }
}

#[test]
fn w_orbit_is_always_w_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let t = random_gl_action(&mut rng, &w3());
        let c = classify_222(&t).unwrap();
        assert_eq!((c.rank, c.orbit), (3, Orbit222::WClass));
    }
    let g = classify_222(&ghz_state(2, 3).unwrap()).unwrap();
    assert_eq!((g.rank, g.orbit), (2, Orbit222::Case2c));
}

#[test]
fn max_rank_spot_values() {
    assert_eq!(max_rank_mn2(2, 2).unwrap(), 3);
    assert_eq!(max_rank_mn2(3, 3).unwrap(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_is_invariant_under_invertible_maps(
        m in 1usize..=4, n in 1usize..=4, seed in any::<u64>(), k in 1i64..=3, third in 0usize..3
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dims = vec![m, n];
        dims.insert(third, 2);
        let t = random_exact(&mut rng, &dims, k);
        let moved = random_gl_action(&mut rng, &t);
        prop_assert_eq!(rank_mxnx2(&moved).unwrap().rank, rank_mxnx2(&t).unwrap().rank);
    }

    #[test]
    fn structure_bookkeeping_holds(m in 1usize..=5, n in 1usize..=5, seed in any::<u64>(), k in 1i64..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_exact(&mut rng, &[m, n, 2], k);
        let s = rank_mxnx2(&t).unwrap().structure;
        prop_assert_eq!(s.reconstructed_dims(), (m, n));
        prop_assert!(s.divisibility_chain_holds());
        let degrees: usize = s.invariant_polynomials.iter().map(|p| p.degree().unwrap_or(0)).sum();
        prop_assert_eq!(degrees, s.regular_core_dim);
    }

    #[test]
    fn only_rank_three_is_w_class(seed in any::<u64>(), k in 1i64..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_exact(&mut rng, &[2, 2, 2], k);
        let c = classify_222(&t).unwrap();
        prop_assert_eq!(c.rank == 3, c.orbit == Orbit222::WClass);
    }
}

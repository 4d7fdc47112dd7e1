mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use tensorank::pencil::rank_mxnx2;
use tensorank::rank_bounds::flattening_ranks;
use tensorank::symmetric::{
    count_entry_orbits, exponents, known_max_symmetric_rank, poly_to_tensor, symmetric_dim, tensor_to_poly,
    waring_w3kron_decomposition, w_state, wkron2, HomogeneousPolynomial,
};
use tensorank::{ExactTensor, GaussianRational};

/// Sparse polynomial: degree, variable count, and a coefficient per chosen monomial.
fn sparse_poly() -> impl Strategy<Value = HomogeneousPolynomial<GaussianRational>> {
    (1u32..=5, 1usize..=4).prop_flat_map(|(d, n)| {
        let monomials = exponents(d, n);
        let m = monomials.len();
        prop::collection::vec((0..m, -9i64..=9, -9i64..=9), 0..=6).prop_map(move |picks| {
            let mut f = HomogeneousPolynomial::new(d, n).unwrap();
            for (k, re, im) in picks {
                f.set(monomials[k].clone(), GaussianRational::from_ints(re, im)).unwrap();
            }
            f
        })
    })
}

fn same_poly(a: &HomogeneousPolynomial<GaussianRational>, b: &HomogeneousPolynomial<GaussianRational>) -> bool {
    exponents(a.degree(), a.n_vars()).iter().all(|j| a.get(j) == b.get(j))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn polynomial_tensor_round_trip(f in sparse_poly()) {
        let t = poly_to_tensor(&f);
        prop_assert!(t.is_symmetric());
        prop_assert!(same_poly(&tensor_to_poly(&t).unwrap(), &f));
    }

    #[test]
    fn symmetric_tensors_are_invariant_under_mode_permutations(f in sparse_poly(), seed in any::<u64>()) {
        let t = poly_to_tensor(&f);
        let d = f.degree() as usize;
        let mut perm: Vec<usize> = (0..d).collect();
        // a seeded rotation composed with a swap covers generators of the symmetric group
        perm.rotate_left((seed as usize) % d.max(1));
        if d >= 2 && seed % 2 == 0 {
            perm.swap(0, 1);
        }
        prop_assert_eq!(t.permute_modes(&perm).unwrap(), t);
    }
}

#[test]
fn entry_orbits_count_monomials() {
    for n in 1..=5 {
        for d in 1..=6u32 {
            assert_eq!(count_entry_orbits(n, d as usize) as u128, symmetric_dim(d, n));
            assert_eq!(exponents(d, n).len() as u128, symmetric_dim(d, n));
        }
    }
}

#[test]
fn w3_attains_the_maximal_symmetric_rank_of_binary_cubics() {
    let w: ExactTensor = w_state(3).unwrap();
    assert_eq!(rank_mxnx2(&w).unwrap().rank, known_max_symmetric_rank(3, 2).unwrap().value);
}

#[test]
fn waring_decomposition_of_wkron2_is_exact() {
    let t: ExactTensor = wkron2();
    let dec = waring_w3kron_decomposition();
    assert_eq!(dec.len(), 7);
    assert_eq!(dec.evaluate(), t);
    assert!(t.is_symmetric());
    for (_, r) in flattening_ranks(&t) {
        assert_eq!(r, 4);
    }
}

#[test]
fn non_symmetric_tensors_have_no_polynomial() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut t = common::random_exact(&mut rng, &[3, 3, 3], 2);
    t.set(&[0, 0, 1], common::q(5));
    t.set(&[1, 0, 0], common::q(-5));
    assert!(tensor_to_poly(&t).is_err());
    assert!(tensor_to_poly(&common::random_exact(&mut rng, &[2, 3], 2)).is_err());
}

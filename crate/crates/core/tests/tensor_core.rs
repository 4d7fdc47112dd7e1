mod common;

use common::{exact_tensor, exact_tensor_of_order, q, random_matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensorank::{matrix_rank, Decomposition, ExactTensor, GaussianRational, RankMode, RankOneTerm, Shape};

/// Nonempty proper subsets of `0..d`, as sorted lists.
fn proper_subsets(d: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << d) - 1).map(|m| (0..d).filter(|&k| m >> k & 1 == 1).collect()).collect()
}

/// Row of `flatten(t, left)` holding entry `idx`.
fn row_col(dims: &[usize], left: &[usize], idx: &[usize]) -> (usize, usize) {
    let (mut r, mut c) = (0, 0);
    for (k, &n) in dims.iter().enumerate() {
        if left.contains(&k) {
            r = r * n + idx[k];
        } else {
            c = c * n + idx[k];
        }
    }
    (r, c)
}

fn pair() -> impl Strategy<Value = (ExactTensor, ExactTensor)> {
    (2usize..=3).prop_flat_map(|d| (exact_tensor_of_order(d, 3, 3), exact_tensor_of_order(d, 3, 3)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flattening_of_kronecker_is_a_shuffled_kronecker_of_flattenings((t, u) in pair()) {
        let k = t.kronecker(&u);
        for left in proper_subsets(t.order()) {
            let big = k.flatten(&left).unwrap();
            let (ft, fu) = (t.flatten(&left).unwrap(), u.flatten(&left).unwrap());
            let small = ft.kronecker(&fu);
            prop_assert_eq!(big.rank(), ft.rank() * fu.rank());
            // the mode-j index of the product is the pair (t index, u index)
            for it in tensorank::tensor::IndexIter::new(t.dims()) {
                for iu in tensorank::tensor::IndexIter::new(u.dims()) {
                    let ik: Vec<usize> = (0..t.order()).map(|j| it[j] * u.dims()[j] + iu[j]).collect();
                    let (rk, ck) = row_col(k.dims(), &left, &ik);
                    let (rt, ct) = row_col(t.dims(), &left, &it);
                    let (ru, cu) = row_col(u.dims(), &left, &iu);
                    let (rows_u, cols_u) = (fu.rows(), fu.cols());
                    prop_assert_eq!(big.get(rk, ck), small.get(rt * rows_u + ru, ct * cols_u + cu));
                }
            }
        }
    }

    #[test]
    fn flattening_rank_is_at_most_the_number_of_terms(
        (dims, terms) in common::dims(2..=4, 3).prop_flat_map(|d| {
            let n: usize = d.iter().sum();
            (Just(d), prop::collection::vec((-3i64..=3, prop::collection::vec(-2i64..=2, n)), 0..5))
        })
    ) {
        let shape = Shape::new(dims.clone()).unwrap();
        let terms: Vec<RankOneTerm<GaussianRational>> = terms
            .into_iter()
            .map(|(w, flat)| {
                let mut at = 0;
                let factors = dims.iter().map(|&n| { at += n; flat[at - n..at].iter().map(|&x| q(x)).collect() }).collect();
                RankOneTerm::new(q(w), factors)
            })
            .collect();
        let nonzero = terms.iter().filter(|t| !t.is_zero()).count();
        let t = Decomposition::new(shape, terms).unwrap().evaluate();
        for left in proper_subsets(dims.len()) {
            prop_assert!(t.flatten(&left).unwrap().rank() <= nonzero);
        }
    }

    #[test]
    fn direct_sum_adds_single_mode_flattening_ranks((t, u) in pair()) {
        let s = t.direct_sum(&u).unwrap();
        for k in 0..t.order() {
            let r = |x: &ExactTensor| x.flatten(&[k]).unwrap().rank();
            prop_assert_eq!(r(&s), r(&t) + r(&u));
        }
    }

    #[test]
    fn contraction_is_linear(t in exact_tensor(1..=4, 3, 4), a in -5i64..=5, b in -5i64..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for mode in 0..t.order() {
            let n = t.dims()[mode];
            let y: Vec<GaussianRational> = (0..n).map(|_| q(rng.gen_range(-4..=4))).collect();
            let z: Vec<GaussianRational> = (0..n).map(|_| GaussianRational::from_ints(rng.gen_range(-4..=4), rng.gen_range(-4..=4))).collect();
            let comb: Vec<GaussianRational> = y.iter().zip(&z).map(|(y, z)| &(&q(a) * y) + &(&q(b) * z)).collect();
            let lhs = t.contract(mode, &comb).unwrap();
            let rhs = t.contract(mode, &y).unwrap().scale(&q(a)).add(&t.contract(mode, &z).unwrap().scale(&q(b))).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn inner_product_with_itself_is_the_squared_norm(t in exact_tensor(1..=3, 3, 5)) {
        let c = t.to_c64();
        let ip = c.inner_product(&c).unwrap();
        prop_assert!((ip.re - c.frobenius_norm().powi(2)).abs() < 1e-9 && ip.im.abs() < 1e-12);
    }
}

#[test]
fn exact_and_numeric_ranks_agree_on_random_integer_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        // products of thin factors give rank-deficient matrices as well
        let k = rng.gen_range(1..=6);
        let m = random_matrix(&mut rng, rows, k, 9).matmul(&random_matrix(&mut rng, k, cols, 9));
        let m = if rng.gen_bool(0.5) { random_matrix(&mut rng, rows, cols, 9) } else { m };
        let exact = matrix_rank(&m, RankMode::Exact);
        assert_eq!(exact, matrix_rank(&m, RankMode::Numeric { tol: 1e-9 }), "{m:?}");
        assert!(exact <= rows.min(cols));
    }
}

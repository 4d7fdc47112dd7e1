use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensorank::norms::{
    nuclear_lower_bound_flatten, nuclear_norm, nuclear_norm_with, spectral_norm, symmetric_spectral_norm, NuclearOptions,
    SpectralOptions,
};
use tensorank::{Matrix, Shape, Tensor, C64};

fn random_tensor(rng: &mut impl Rng, dims: &[usize]) -> Tensor {
    Tensor::from_fn(Shape::new(dims.to_vec()).unwrap(), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_unitary(rng: &mut impl Rng, n: usize) -> Matrix<C64> {
    let a = DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    Matrix::from_nalgebra(&a.qr().q())
}

fn spectral(t: &Tensor) -> f64 {
    spectral_norm(t, &SpectralOptions::default()).unwrap().value
}

fn symmetrize(t: &Tensor) -> Tensor {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut s = Tensor::zeros(t.shape().clone());
    for p in perms {
        s = s.add(&t.permute_modes(&p).unwrap()).unwrap();
    }
    s.scale(&C64::new(1.0 / 6.0, 0.0))
}

#[test]
fn primal_and_dual_bracket_the_nuclear_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for dims in [[2, 2, 2], [2, 2, 3], [2, 3, 3], [3, 3, 3], [2, 2, 2], [2, 2, 3]] {
        let t = random_tensor(&mut rng, &dims);
        let n = nuclear_norm_with(&t, &NuclearOptions::default()).unwrap();
        let s = spectral(&t);
        let fro = t.frobenius_norm();
        let eps = 1e-9 * fro;
        assert!(nuclear_lower_bound_flatten(&t) <= n.dual_value + 1e-6 * fro, "{dims:?}");
        assert!(n.dual_value <= n.primal_value + eps, "{dims:?}");
        assert!(s <= fro + eps);
        assert!(fro * fro <= s * n.primal_value + eps, "{dims:?}");
        assert!(n.fit_error < 1e-8 * fro, "{dims:?}");
    }
}

#[test]
fn norms_are_unitarily_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for dims in [[2, 2, 2], [2, 2, 3], [2, 3, 3]] {
        let t = random_tensor(&mut rng, &dims);
        let mut u = t.clone();
        for (mode, &n) in dims.iter().enumerate() {
            u = u.mode_product(mode, &random_unitary(&mut rng, n)).unwrap();
        }
        assert!((t.frobenius_norm() - u.frobenius_norm()).abs() < 1e-12);
        assert!((spectral(&t) - spectral(&u)).abs() < 1e-8, "{dims:?}");
        let (a, b) = (nuclear_norm(&t, 16, 1e-6).unwrap(), nuclear_norm(&u, 16, 1e-6).unwrap());
        assert!((a.primal_value - b.primal_value).abs() < 1e-4 * a.primal_value, "{dims:?}");
    }
}

#[test]
fn matrices_reduce_to_singular_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let t = random_tensor(&mut rng, &[m, n]);
        let sv = t.flatten(&[0]).unwrap().singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        let sum: f64 = sv.iter().sum();
        assert!((spectral(&t) - top).abs() <= 1e-9 * top);
        let nuc = nuclear_norm(&t, 8, 1e-9).unwrap();
        assert!((nuc.primal_value - sum).abs() <= 1e-9 * sum);
        assert!(nuc.verified);
    }
}

#[test]
fn norms_scale_linearly() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = random_tensor(&mut rng, &[2, 2, 3]);
    let (s1, n1) = (spectral(&t), nuclear_norm(&t, 16, 1e-6).unwrap().primal_value);
    for c in [1e-3, 1.0, 1e3] {
        let u = t.scale(&C64::new(c, 0.0));
        assert!((spectral(&u) - c * s1).abs() <= 1e-8 * c * s1, "{c}");
        let n = nuclear_norm(&u, 16, 1e-6).unwrap().primal_value;
        assert!((n - c * n1).abs() <= 1e-6 * c * n1, "{c}");
    }
}

#[test]
fn spectral_norm_respects_shape_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for dims in [vec![2, 2, 2], vec![2, 3, 4], vec![3, 3, 3], vec![2, 2, 2, 2], vec![4, 2, 3]] {
        let t = random_tensor(&mut rng, &dims);
        let n: usize = dims.iter().product();
        let m = *dims.iter().max().unwrap();
        let (s, fro) = (spectral(&t), t.frobenius_norm());
        assert!(fro / ((n / m) as f64).sqrt() <= s + 1e-12, "{dims:?}");
        assert!(s <= fro + 1e-12, "{dims:?}");
    }
}

#[test]
fn symmetric_maximizer_attains_the_spectral_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [2, 3, 2, 3] {
        let s = symmetrize(&random_tensor(&mut rng, &[n, n, n]));
        let a = symmetric_spectral_norm(&s, &SpectralOptions::default()).unwrap().value;
        let b = spectral(&s);
        assert!((a - b).abs() <= 1e-8 * b, "n={n}: {a} vs {b}");
    }
}

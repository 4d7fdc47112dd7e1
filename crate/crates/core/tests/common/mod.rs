#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use tensorank::{ExactTensor, GaussianRational, Matrix, Shape};

pub fn q(v: i64) -> GaussianRational {
    GaussianRational::from_ints(v, 0)
}

/// Integer tensor of the given shape with entries in `−k..=k`.
pub fn random_exact(rng: &mut impl Rng, dims: &[usize], k: i64) -> ExactTensor {
    ExactTensor::from_fn(Shape::new(dims.to_vec()).unwrap(), |_| q(rng.gen_range(-k..=k)))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, k: i64) -> Matrix<GaussianRational> {
    Matrix::from_fn(rows, cols, |_, _| q(rng.gen_range(-k..=k)))
}

/// Integer matrix with nonzero determinant.
pub fn random_invertible(rng: &mut impl Rng, n: usize) -> Matrix<GaussianRational> {
    loop {
        let m = random_matrix(rng, n, n, 3);
        if m.rank() == n {
            return m;
        }
    }
}

/// Applies an invertible matrix along every mode.
pub fn random_gl_action(rng: &mut impl Rng, t: &ExactTensor) -> ExactTensor {
    let mut out = t.clone();
    for (mode, &n) in t.dims().iter().enumerate() {
        out = out.mode_product(mode, &random_invertible(rng, n)).unwrap();
    }
    out
}

/// Shapes with `order` modes of sizes in `1..=max`.
pub fn dims(order: std::ops::RangeInclusive<usize>, max: usize) -> impl Strategy<Value = Vec<usize>> {
    order.prop_flat_map(move |d| prop::collection::vec(1..=max, d))
}

/// Integer tensors with entries in `−k..=k` over shapes from [`dims`].
pub fn exact_tensor(order: std::ops::RangeInclusive<usize>, max: usize, k: i64) -> impl Strategy<Value = ExactTensor> {
    dims(order, max).prop_flat_map(move |d| {
        let n: usize = d.iter().product();
        prop::collection::vec(-k..=k, n).prop_map(move |v| ExactTensor::from_ints(&d, &v).unwrap())
    })
}

/// Tensor with the same number of modes as `order` but independent sizes.
pub fn exact_tensor_of_order(order: usize, max: usize, k: i64) -> impl Strategy<Value = ExactTensor> {
    exact_tensor(order..=order, max, k)
}

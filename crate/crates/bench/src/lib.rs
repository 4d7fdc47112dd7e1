//! Inputs shared by the benchmarks.

use tensorank::{ExactTensor, GaussianRational, Shape};

/// Deterministic integer tensor with entries in `−9..=9`.
pub fn pseudo_random_tensor(dims: &[usize], seed: u64) -> ExactTensor {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    ExactTensor::from_fn(Shape::new(dims.to_vec()).expect("positive dims"), |_| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        GaussianRational::from_ints((state >> 33) as i64 % 19 - 9, 0)
    })
}

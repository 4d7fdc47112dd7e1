//! Generic rank: randomized Terracini computation over a prime field,
//! closed-form bounds and stored reference values.

pub mod bounds;
pub mod field;
pub mod tables;
pub mod terracini;

pub use bounds::{
    known_generic_rank, max_rank_upper_bounds, qunit_formulas, r0_lower_bound, threshold_generic_rank,
    LabelledBound, MaxRankBounds, QunitFormulas, QunitValue,
};
pub use field::{is_prime, EchelonBasis, PrimeField, MERSENNE_61};
pub use tables::known_tables;
pub use terracini::{
    generic_rank, numeric_jacobian_rank, probe_seed, terracini_jacobian, GenericRankOptions, GenericRankResult,
    NUMERIC_JACOBIAN_TOL,
};

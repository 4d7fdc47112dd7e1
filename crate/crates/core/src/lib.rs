//! Rank, generic rank, symmetric rank and tensor norms for small dense
//! complex tensors.

pub mod combinatorics;
pub mod generic;
pub mod io;
pub mod linalg;
pub mod norms;
pub mod pencil;
pub mod rank_bounds;
pub mod scalar;
pub mod symmetric;
pub mod tensor;

mod error;

pub use error::{Error, Result};
pub use linalg::{matrix_rank, Matrix, RankMode};
pub use scalar::{ExactField, GaussianRational, Scalar, C64};
pub use tensor::{DenseTensor, Decomposition, ExactTensor, RankOneTerm, Shape, Tensor};

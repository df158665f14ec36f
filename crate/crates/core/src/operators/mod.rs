//! Operator toolkit on atom functions.

pub mod analysis;
pub mod linear;
pub mod norms;

pub use analysis::*;
pub use linear::{FloatVec, LinearOperator, Operand, SparseMatrix};
pub use norms::{cotlar_bound, norm_estimate, operator_norm2, CotlarReport, NormEstimate};

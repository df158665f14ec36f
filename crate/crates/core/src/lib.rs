//! Exact finite model of the two-parameter martingale structure on the
//! boundary of a triangle building, realized on a truncated p-adic
//! Heisenberg group.

pub mod coweights;
pub mod error;
pub mod exact;
pub mod filtration;
pub mod heisenberg;
pub mod operators;
pub mod pgplane;
pub mod verify;

pub use coweights::{Coweight, Root};
pub use error::{Error, Result};
pub use exact::ExactVec;
pub use filtration::{Filtration, Partition, PartitionSpec};
pub use heisenberg::{AtomSpace, GroupElement, ModelConfig};
pub use pgplane::{build_plane, ProjectivePlane};
pub use verify::{run_suite, CheckResult, SuiteReport};

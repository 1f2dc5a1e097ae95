//! Dense complex linear algebra over finite tensor-product spaces.

mod operator;
mod ops;
mod record;
mod signature;
mod tolerances;

pub use operator::{hermitian_eigenvalues, Operator, OperatorKind};
pub use ops::{embed, max_entry, operator_distance, partial_trace, tensor_product, trace_norm, Distance};
pub use record::OperatorRecord;
pub use signature::DimensionSignature;
pub use tolerances::Tolerances;


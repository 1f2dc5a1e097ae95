//! Finite-dimensional simulation of quantum preparation.
//!
//! A preparator is described by four entities: the composite object ⊗
//! preparator state at the end of the preparation interaction, a triggering
//! event (projector) on the preparator, the conditional state of the object
//! that the trigger's occurrence leaves behind, and the factorized evolution
//! `U_I ⊗ U_II` that follows. The crate provides:
//!
//! - [`tensor`]: dense complex operators over tensor-product spaces (Kronecker
//!   products, embeddings, partial traces, distances);
//! - [`collapse`]: event probabilities, the selective Lüders update and
//!   general conditional states;
//! - [`raio`]: numerical checks of the localization lemma, the retroactive
//!   apparent ideal occurrence (RAIO) theorem and the factorized evolution of
//!   prepared states;
//! - [`preparators`]: the four-entity framework with discretized
//!   Stern-Gerlach and hole-in-the-screen models;
//! - [`random`]: seeded random instances for property sweeps.
//!
//! All numerics are generic over the real scalar ([`Real`]: `f32` or `f64`);
//! the `*64` / `*32` aliases below fix it.
//!
//! Composite bases are ordered row-major: factor 0 varies slowest.

pub mod collapse;
pub mod error;
pub mod preparators;
pub mod raio;
pub mod random;
pub mod scalar;
pub mod tensor;

pub use collapse::{
    conditional_state, event_probability, luders_collapse, verify_coincidence_factorization,
    ConditionalStateResult, Probability,
};
pub use error::{Error, Result};
pub use preparators::{
    build_hole, build_sg, make_half_space_projector, run_preparation, GridGeometry, HoleVariant,
    Occurrence, PreparationResult, PreparatorKind, PreparatorSpec, SgVariant, Side, Trigger,
};
pub use raio::{
    build_decoupled_instance, build_leaky_instance, build_twin_instance, check_localization_lemma,
    check_raio_conditions, check_raio_equality, evolve_prepared_two_routes, raio_equality_residual,
    RaioConditions, RaioInstance, RaioReport, RaioVerdict, TwoRoutes,
};
pub use scalar::{Real, C};
pub use tensor::{
    embed, operator_distance, partial_trace, tensor_product, DimensionSignature, Distance, Operator,
    OperatorKind, OperatorRecord, Tolerances,
};

pub type Complex64 = C<f64>;
pub type Complex32 = C<f32>;

pub type Operator64 = Operator<f64>;
pub type Operator32 = Operator<f32>;
pub type Tolerances64 = Tolerances<f64>;
pub type Tolerances32 = Tolerances<f32>;
pub type PreparatorSpec64 = PreparatorSpec<f64>;
pub type PreparationResult64 = PreparationResult<f64>;
pub type RaioInstance64 = RaioInstance<f64>;
pub type RaioReport64 = RaioReport<f64>;
pub type GridGeometry64 = GridGeometry<f64>;

//! Invariant subspaces, reflexive closures and reflexivity of positive parts.

mod closure;
mod theorems;

pub use closure::{
    cyclic_subspace, reflexive_closure, OperatorAlgebraCarrier, ReflexivityReport, Sampling,
    Verdict,
};
pub use theorems::{
    block_upper_triangular, combine_reflexive_corners, commutant_duality_check, corner_fixture,
    isometry_commutation_check, kernel_chain, nest_example, theorem5_verify, CornerVerdict,
    PositivePartRun,
};

//! Numerics for the left regular representation `π` of the extended
//! bicyclic semigroup, truncated to a finite grid of basis vectors.

pub mod basis;
pub mod norm;
pub mod verify;

pub use basis::{act, rep_matrix, BasisIndexer, SparseMatrix, SparseOperator};
pub use norm::{dense_norm, op_norm, op_norm_power, op_norm_seeded, NormEstimate, DEFAULT_TOL};
pub use verify::{
    assemble, phi0, random_combo, verify_contraction, verify_partial_isometry, ContractionFailure,
    ContractionReport, IsometryReport, OperatorCombo, Term, CONTRACTION_SLACK,
};

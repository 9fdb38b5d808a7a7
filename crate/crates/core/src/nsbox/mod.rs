//! 2-2-2 no-signaling behaviors: representation, validation, measures,
//! simplex decomposition, relabelings and the catalog of named boxes.

mod behavior;
pub mod catalog;
mod decompose;
mod hardy;
pub mod json;
mod relabel;
mod vertex;

use thiserror::Error;

pub use behavior::{
    chsh, correlator, mix, validate, Behavior, Party, Table, ValidationReport, Violation,
    STRUCTURAL_TOL, WEIGHT_SUM_TOL,
};
pub use catalog::{named_box, quantum_hardy_max};
pub use decompose::{
    basis_boxes, decompose_simplex, SimplexDecomposition, DECOMPOSITION_RESIDUAL_TOL,
    NEGATIVE_WEIGHT_TOL,
};
pub use hardy::{hardy_test, HardyCertificate, DEFAULT_HARDY_TOL};
pub use relabel::{apply_relabeling, canonicalize, Canonical, Relabeling};
pub use vertex::{p_l, p_nl, vertex, VertexId, SIMPLEX_BASIS};

#[derive(Debug, Error)]
pub enum NsError {
    #[error("invalid behavior: {0}")]
    Invalid(ValidationReport),
    #[error("invalid weights: {0}")]
    Weight(String),
    #[error("not in simplex: residual {residual:e}, most negative weight {min_weight:e}")]
    NotInSimplex { residual: f64, min_weight: f64 },
    #[error("unknown box name {0:?}")]
    UnknownName(String),
    #[error("behavior file: {0}")]
    Schema(String),
}

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::behavior::{mix, Behavior};
use super::vertex::{vertex, SIMPLEX_BASIS};
use super::NsError;

/// Reconstruction residual accepted by [`decompose_simplex`].
pub const DECOMPOSITION_RESIDUAL_TOL: f64 = 1e-9;
/// Most negative weight still treated as zero.
pub const NEGATIVE_WEIGHT_TOL: f64 = 1e-10;

/// Convex weights `c₀…c₈` over `(P_NL, P_L1, …, P_L8)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexDecomposition {
    pub weights: [f64; 9],
    /// Max absolute entrywise reconstruction error.
    pub residual: f64,
}

impl SimplexDecomposition {
    /// Weights given exactly (e.g. from a closed form); residual is zero.
    pub fn from_weights(weights: [f64; 9]) -> Self {
        Self {
            weights,
            residual: 0.0,
        }
    }

    pub fn c(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Rebuilds the behavior as the convex mixture of the simplex vertices.
    pub fn reconstruct(&self) -> Result<Behavior, NsError> {
        mix(&self.weights, &basis_boxes())
    }
}

pub fn basis_boxes() -> [Behavior; 9] {
    SIMPLEX_BASIS.map(vertex)
}

/// 16×9 design matrix of the basis tables, with its pseudo-inverse.
struct Design {
    matrix: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

fn design() -> &'static Design {
    static DESIGN: OnceLock<Design> = OnceLock::new();
    DESIGN.get_or_init(|| {
        let boxes = basis_boxes();
        let matrix = DMatrix::from_fn(16, 9, |cell, k| boxes[k].table()[cell / 4][cell % 4]);
        let pinv = matrix
            .clone()
            .pseudo_inverse(1e-12)
            .expect("basis design matrix has a pseudo-inverse");
        Design { matrix, pinv }
    })
}

/// Least-squares coordinates of `b` in the nine-vertex basis, accepted only when
/// the reconstruction is exact to [`DECOMPOSITION_RESIDUAL_TOL`] and no weight is
/// below `-NEGATIVE_WEIGHT_TOL`. Slightly negative weights are reported as zero.
pub fn decompose_simplex(b: &Behavior) -> Result<SimplexDecomposition, NsError> {
    let d = design();
    let target = DVector::from_iterator(16, b.table().iter().flatten().copied());
    let coords = &d.pinv * &target;
    let residual = (&d.matrix * &coords - &target).amax();
    let min_weight = coords.min();
    if residual > DECOMPOSITION_RESIDUAL_TOL || min_weight < -NEGATIVE_WEIGHT_TOL {
        return Err(NsError::NotInSimplex {
            residual,
            min_weight,
        });
    }
    let mut weights = [0.0; 9];
    for (w, c) in weights.iter_mut().zip(coords.iter()) {
        *w = c.max(0.0);
    }
    Ok(SimplexDecomposition { weights, residual })
}

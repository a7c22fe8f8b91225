//! Piecewise-affine finite elements and direct energy minimization for the
//! pure Dirichlet problem.

mod io;
mod mesh;
mod solver;

pub use io::{read_mesh_text, write_mesh_text};
pub use mesh::{build_rect_mesh, ElementGeometry, InitStatus, MeshState, Point};
pub use solver::{energy_gradient, minimize, total_energy, SolveOptions, SolveResult, SolveStatus};

use crate::tensor2::Mat2;

/// Dirichlet data `φ₀` on the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryData {
    /// `φ₀(x) = F₀ x`.
    Affine(Mat2),
    /// Simple shear `φ₀(x, y) = (x + γ y, y)`.
    Shear(f64),
}

impl BoundaryData {
    pub fn gradient(&self) -> Mat2 {
        match *self {
            BoundaryData::Affine(f) => f,
            BoundaryData::Shear(g) => Mat2::new(1.0, g, 0.0, 1.0),
        }
    }

    pub fn map(&self, x: Point) -> Point {
        self.gradient().mul_vec(x)
    }
}

//! Finite differences for `u_t = det(D^2 u) - bilaplacian(u)` on a rectangle.
//!
//! Boundary data come from an exact family: both ghost layers (the first one
//! sits on the physical boundary) are refilled from the closed form at every
//! stage time, so the interior nodes are the only unknowns.

mod banded;
mod grid;
mod run;
mod stencil;
mod step;

pub use banded::BandedCholesky;
pub use grid::{Grid, GridField};
pub use run::{run, RunResult, RunStatus, Scheme, SolverConfig};
pub use stencil::{
    biharmonic_matrix, discrete_biharmonic, discrete_hessian_det, discrete_laplacian, fill_ghosts, rhs, Operators,
};
pub use step::{step_imex, step_rk4, ImexStepper};

use thiserror::Error;

use crate::families::FamilyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Domain(#[from] FamilyError),
    #[error("non-finite value produced at t = {t}")]
    NonFinite { t: f64 },
}

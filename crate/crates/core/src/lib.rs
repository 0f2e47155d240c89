//! Exact verification, finite-difference simulation and blow-up diagnostics
//! for the fourth-order equation `u_t = det(D^2 u) - bilaplacian(u)`.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod families;
pub mod polyalg;
pub mod regions;
pub mod solver;

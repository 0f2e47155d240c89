use ndarray::Array2;

use super::{Grid, GridField, SolverError};
use crate::families::NumericFamily;

/// Overwrites both ghost layers on all four sides with exact family values.
pub fn fill_ghosts(field: &mut GridField, family: &NumericFamily, t: f64) -> Result<(), SolverError> {
    family.check_time(t)?;
    let g = field.grid;
    let (na, nb) = g.shape();
    let ghost_a = [0, 1, na - 2, na - 1];
    let ghost_b = [0, 1, nb - 2, nb - 1];
    for a in 0..na {
        let x = g.x(a);
        if ghost_a.contains(&a) {
            for b in 0..nb {
                field.values[[a, b]] = family.evaluate_unchecked(x, g.y(b), t);
            }
        } else {
            for &b in &ghost_b {
                field.values[[a, b]] = family.evaluate_unchecked(x, g.y(b), t);
            }
        }
    }
    field.time = t;
    Ok(())
}

/// Five-point Laplacian on the boundary-inclusive nodes, shape `(nx+2, ny+2)`.
pub fn discrete_laplacian(field: &GridField) -> Array2<f64> {
    let g = &field.grid;
    let u = &field.values;
    let (ix2, iy2) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy));
    Array2::from_shape_fn((g.nx + 2, g.ny + 2), |(i, j)| {
        let (a, b) = (i + 1, j + 1);
        let c = u[[a, b]];
        (u[[a + 1, b]] - 2.0 * c + u[[a - 1, b]]) * ix2 + (u[[a, b + 1]] - 2.0 * c + u[[a, b - 1]]) * iy2
    })
}

/// 13-point biharmonic on interior nodes: the five-point Laplacian applied twice.
pub fn discrete_biharmonic(field: &GridField) -> Array2<f64> {
    Operators::default().biharmonic(field)
}

/// `u_xx u_yy - u_xy^2` with centered second differences and the four-point
/// cross difference, on interior nodes.
pub fn discrete_hessian_det(field: &GridField) -> Array2<f64> {
    let g = &field.grid;
    let u = &field.values;
    let (ix2, iy2, ixy) = (1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy), 0.25 / (g.hx * g.hy));
    Array2::from_shape_fn((g.nx, g.ny), |(i, j)| {
        let (a, b) = (i + 2, j + 2);
        let c = u[[a, b]];
        let uxx = (u[[a + 1, b]] - 2.0 * c + u[[a - 1, b]]) * ix2;
        let uyy = (u[[a, b + 1]] - 2.0 * c + u[[a, b - 1]]) * iy2;
        let uxy = (u[[a + 1, b + 1]] - u[[a + 1, b - 1]] - u[[a - 1, b + 1]] + u[[a - 1, b - 1]]) * ixy;
        uxx * uyy - uxy * uxy
    })
}

/// Right-hand side `det(D^2 u) - bilaplacian(u)` after refilling the ghosts at `t`.
pub fn rhs(field: &mut GridField, family: &NumericFamily, t: f64) -> Result<Array2<f64>, SolverError> {
    Operators::default().rhs(field, family, t)
}

/// Interior block of the 13-point biharmonic as a symmetric band
/// (see [`super::BandedCholesky`] for the layout), bandwidth `2 ny`.
pub fn biharmonic_matrix(grid: &Grid) -> (usize, Vec<f64>) {
    Operators::default().matrix(grid)
}

/// The discrete operators, optionally with a deliberately inconsistent
/// biharmonic (scaled by `1 + hx`) used as a negative control.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Operators {
    pub broken_stencil: bool,
}

impl Operators {
    fn bih_scale(&self, grid: &Grid) -> f64 {
        if self.broken_stencil {
            1.0 + grid.hx
        } else {
            1.0
        }
    }

    pub fn biharmonic(&self, field: &GridField) -> Array2<f64> {
        let g = &field.grid;
        let lap = discrete_laplacian(field);
        let scale = self.bih_scale(g);
        let (ix2, iy2) = (scale / (g.hx * g.hx), scale / (g.hy * g.hy));
        Array2::from_shape_fn((g.nx, g.ny), |(i, j)| {
            let (a, b) = (i + 1, j + 1);
            let c = lap[[a, b]];
            (lap[[a + 1, b]] - 2.0 * c + lap[[a - 1, b]]) * ix2 + (lap[[a, b + 1]] - 2.0 * c + lap[[a, b - 1]]) * iy2
        })
    }

    pub fn rhs(&self, field: &mut GridField, family: &NumericFamily, t: f64) -> Result<Array2<f64>, SolverError> {
        fill_ghosts(field, family, t)?;
        Ok(discrete_hessian_det(field) - self.biharmonic(field))
    }

    /// Lower band of `M` with `bih(u) = M u_interior + (ghost terms)`.
    pub fn matrix(&self, grid: &Grid) -> (usize, Vec<f64>) {
        let (nx, ny) = (grid.nx as isize, grid.ny as isize);
        let p = 2 * grid.ny;
        let w = p + 1;
        let scale = self.bih_scale(grid);
        let (cx, cy) = (1.0 / (grid.hx * grid.hx), 1.0 / (grid.hy * grid.hy));
        let stencil = [
            (0, 0, -2.0 * (cx + cy)),
            (1, 0, cx),
            (-1, 0, cx),
            (0, 1, cy),
            (0, -1, cy),
        ];
        let interior = |i: isize, j: isize| (0..nx).contains(&i) && (0..ny).contains(&j);
        let mut band = vec![0.0; grid.interior_len() * w];
        for i in 0..nx {
            for j in 0..ny {
                let k = (i * ny + j) as usize;
                // m runs over interior and boundary nodes; l over interior only
                for &(di, dj, wk) in &stencil {
                    let (mi, mj) = (i + di, j + dj);
                    for &(ei, ej, wm) in &stencil {
                        let (li, lj) = (mi + ei, mj + ej);
                        if !interior(li, lj) {
                            continue;
                        }
                        let l = (li * ny + lj) as usize;
                        if l <= k {
                            band[k * w + (l + p - k)] += scale * wk * wm;
                        }
                    }
                }
            }
        }
        (p, band)
    }
}

use std::fmt::Write as _;

use ndarray::{s, Array2, ArrayView2, ArrayViewMut2};

use super::SolverError;
use crate::families::NumericFamily;

/// Uniform grid with `nx * ny` interior nodes.
///
/// Array index `a` maps to `x = x0 + (a - 1) hx`: indices `1` and `nx + 2`
/// are the boundary nodes, `0` and `nx + 3` the outer ghost layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub origin: (f64, f64),
    pub extent: (f64, f64),
}

impl Grid {
    pub fn new(nx: usize, ny: usize, origin: (f64, f64), extent: (f64, f64)) -> Result<Self, SolverError> {
        if nx < 5 || ny < 5 {
            return Err(SolverError::Grid(format!(
                "need at least 5 interior nodes per direction, got {nx} x {ny}"
            )));
        }
        if !(extent.0 > 0.0 && extent.1 > 0.0) || !extent.0.is_finite() || !extent.1.is_finite() {
            return Err(SolverError::Grid(format!("extent must be positive, got {extent:?}")));
        }
        if !origin.0.is_finite() || !origin.1.is_finite() {
            return Err(SolverError::Grid(format!("origin must be finite, got {origin:?}")));
        }
        Ok(Self {
            nx,
            ny,
            hx: extent.0 / (nx + 1) as f64,
            hy: extent.1 / (ny + 1) as f64,
            origin,
            extent,
        })
    }

    pub fn unit_square(n: usize) -> Result<Self, SolverError> {
        Self::new(n, n, (0.0, 0.0), (1.0, 1.0))
    }

    /// Shape of the stored array including both ghost layers.
    pub fn shape(&self) -> (usize, usize) {
        (self.nx + 4, self.ny + 4)
    }

    pub fn x(&self, a: usize) -> f64 {
        self.origin.0 + self.extent.0 * (a as f64 - 1.0) / (self.nx + 1) as f64
    }

    pub fn y(&self, b: usize) -> f64 {
        self.origin.1 + self.extent.1 * (b as f64 - 1.0) / (self.ny + 1) as f64
    }

    pub fn interior_len(&self) -> usize {
        self.nx * self.ny
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub values: Array2<f64>,
    pub grid: Grid,
    pub time: f64,
}

impl GridField {
    pub fn zeros(grid: Grid, time: f64) -> Self {
        Self {
            values: Array2::zeros(grid.shape()),
            grid,
            time,
        }
    }

    /// Samples `f(x, y)` at every node, ghosts included.
    pub fn from_fn(grid: Grid, time: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn(grid.shape(), |(a, b)| f(grid.x(a), grid.y(b)));
        Self { values, grid, time }
    }

    /// Exact family values at every node.
    pub fn from_family(grid: Grid, family: &NumericFamily, time: f64) -> Result<Self, SolverError> {
        family.check_time(time)?;
        Ok(Self::from_fn(grid, time, |x, y| family.evaluate_unchecked(x, y, time)))
    }

    pub fn interior(&self) -> ArrayView2<'_, f64> {
        self.values.slice(s![2..self.grid.nx + 2, 2..self.grid.ny + 2])
    }

    pub fn interior_mut(&mut self) -> ArrayViewMut2<'_, f64> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        self.values.slice_mut(s![2..nx + 2, 2..ny + 2])
    }

    /// Boundary-inclusive nodes `[x0, x0 + Lx] x [y0, y0 + Ly]`.
    pub fn closure(&self) -> ArrayView2<'_, f64> {
        self.values.slice(s![1..self.grid.nx + 3, 1..self.grid.ny + 3])
    }

    pub fn max_abs_interior(&self) -> f64 {
        self.interior()
            .iter()
            .fold(0.0, |m, v| if v.abs() > m || v.is_nan() { v.abs() } else { m })
    }

    pub fn is_finite(&self) -> bool {
        self.interior().iter().all(|v| v.is_finite())
    }

    /// CSV with header `x,y,u` over the boundary-inclusive nodes, row-major
    /// in `x`, 17 significant digits.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(c) = comment {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str("x,y,u\n");
        let g = &self.grid;
        for a in 1..g.nx + 3 {
            for b in 1..g.ny + 3 {
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", g.x(a), g.y(b), self.values[[a, b]]);
            }
        }
        out
    }
}

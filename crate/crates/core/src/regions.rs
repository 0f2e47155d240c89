//! Sign sets of the blow-up quartic on grids, and pointwise fates for the
//! `a1 = 0` reduction.

use std::fmt::Write as _;

use ndarray::Array2;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::families::{
    classify, quartic_coefficients, reduced_quartic, reduced_set_fate, BlowUpKind, FamilyError, PointFate,
    QuarticCoefficients, QuarticPlane, SolutionFamily,
};
use crate::polyalg::{int, Rational};
use crate::solver::Grid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionsError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionSign {
    Negative,
    Zero,
    Positive,
}

impl RegionSign {
    pub fn of_rational(v: &Rational) -> Self {
        if v.is_zero() {
            Self::Zero
        } else if v.is_positive() {
            Self::Positive
        } else {
            Self::Negative
        }
    }

    /// Sign of `v` with `|v| <= tol` counted as zero.
    pub fn of_f64(v: f64, tol: f64) -> Self {
        if v.abs() <= tol {
            Self::Zero
        } else if v > 0.0 {
            Self::Positive
        } else {
            Self::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Self::Negative => -1,
            Self::Zero => 0,
            Self::Positive => 1,
        }
    }
}

/// Signs of a quartic at the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub grid: Grid,
    /// Indexed by interior node `(i, j)`, i.e. grid node `(i + 2, j + 2)`.
    pub signs: Array2<RegionSign>,
    /// `(n_neg, n_zero, n_pos)`.
    pub counts: (usize, usize, usize),
}

impl RegionMap {
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(c) = comment {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str("x,y,sign\n");
        for ((i, j), s) in self.signs.indexed_iter() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{}",
                self.grid.x(i + 2),
                self.grid.y(j + 2),
                s.as_i8()
            );
        }
        out
    }
}

/// Exact sign of the quartic `Q(x, y)` of the plane family.
pub fn classify_point(q: &QuarticPlane, x: &Rational, y: &Rational) -> RegionSign {
    RegionSign::of_rational(&quartic_coefficients(q).eval(x, y))
}

fn eval_f64(c: &[f64; 5], x: f64, y: f64) -> f64 {
    let (x2, y2) = (x * x, y * y);
    c[0] * x2 * x2 + c[1] * x2 * x * y + c[2] * x2 * y2 + c[3] * x * y2 * y + c[4] * y2 * y2
}

/// Node values of a quartic and the zero tolerance `1e-12 * max |value|`.
fn node_values(coeffs: &QuarticCoefficients, grid: &Grid) -> (Array2<f64>, f64) {
    let c = coeffs.to_f64();
    let values = Array2::from_shape_fn((grid.nx, grid.ny), |(i, j)| eval_f64(&c, grid.x(i + 2), grid.y(j + 2)));
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (values, 1e-12 * scale)
}

/// Float sign map of `Q` over the interior nodes.
pub fn region_map(q: &QuarticPlane, grid: &Grid) -> RegionMap {
    let (values, tol) = node_values(&quartic_coefficients(q), grid);
    let signs = values.mapv(|v| RegionSign::of_f64(v, tol));
    let mut counts = (0, 0, 0);
    for s in &signs {
        match s {
            RegionSign::Negative => counts.0 += 1,
            RegionSign::Zero => counts.1 += 1,
            RegionSign::Positive => counts.2 += 1,
        }
    }
    RegionMap {
        grid: *grid,
        signs,
        counts,
    }
}

/// Pointwise limits at the interior nodes for a family with `a1 = 0`.
///
/// In finite time the fate follows the zero, negative and positive sets of
/// the reduced quartic (see [`reduced_set_fate`]); in infinite time every node
/// tends to `+inf`.
pub fn fate_map(q: &QuarticPlane, grid: &Grid) -> Result<Array2<PointFate>, RegionsError> {
    let reduced = reduced_quartic(q)
        .ok_or_else(|| RegionsError::UnsupportedCase("pointwise fates of the quartic family with a1 != 0".into()))?;
    let class = classify(&SolutionFamily::QuarticPlane(q.clone()))?;
    match class.kind {
        BlowUpKind::Global => Err(FamilyError::NoBlowUp(class.notes).into()),
        BlowUpKind::InfiniteTime => Ok(Array2::from_elem((grid.nx, grid.ny), PointFate::PlusInfinity)),
        BlowUpKind::FiniteTime => {
            let (values, tol) = node_values(&reduced, grid);
            Ok(values.mapv(|v| reduced_set_fate(&int(RegionSign::of_f64(v, tol).as_i8().into()), &q.a0)))
        }
    }
}

pub fn fate_csv(fates: &Array2<PointFate>, grid: &Grid, comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str("x,y,fate\n");
    for ((i, j), f) in fates.indexed_iter() {
        let _ = writeln!(out, "{:.16e},{:.16e},{}", grid.x(i + 2), grid.y(j + 2), f.as_str());
    }
    out
}

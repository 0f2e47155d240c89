//! Blow-up classification and pointwise limits at the blow-up time.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::quartic::{algebraic_condition, quartic_q, reduced_quartic};
use super::{FamilyError, SolutionFamily};
use crate::polyalg::{format_rational, int, rational_from_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlowUpKind {
    Global,
    FiniteTime,
    InfiniteTime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowUpClass {
    pub kind: BlowUpKind,
    /// Present iff `kind` is `FiniteTime`; always positive.
    pub t_star: Option<Rational>,
    pub notes: String,
}

impl BlowUpClass {
    fn global(notes: &str) -> Self {
        Self {
            kind: BlowUpKind::Global,
            t_star: None,
            notes: notes.to_string(),
        }
    }

    fn infinite(notes: &str) -> Self {
        Self {
            kind: BlowUpKind::InfiniteTime,
            t_star: None,
            notes: notes.to_string(),
        }
    }

    fn finite(t_star: Rational, notes: &str) -> Self {
        debug_assert!(t_star.is_positive());
        Self {
            kind: BlowUpKind::FiniteTime,
            t_star: Some(t_star),
            notes: notes.to_string(),
        }
    }

    pub fn t_star_text(&self) -> Option<String> {
        self.t_star.as_ref().map(format_rational)
    }

    pub fn t_star_f64(&self) -> Option<f64> {
        self.t_star.as_ref().map(crate::polyalg::to_f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointFate {
    PlusInfinity,
    MinusInfinity,
    Finite,
}

impl PointFate {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PlusInfinity => "+inf",
            Self::MinusInfinity => "-inf",
            Self::Finite => "finite",
        }
    }

    fn toward(sign_positive: bool) -> Self {
        if sign_positive {
            Self::PlusInfinity
        } else {
            Self::MinusInfinity
        }
    }
}

/// Applies the case split of the family to its parameters.
pub fn classify(family: &SolutionFamily) -> Result<BlowUpClass, FamilyError> {
    family.validate()?;
    let class = match family {
        SolutionFamily::Square { a0 } => {
            if a0.is_zero() {
                BlowUpClass::global("a0 = 0: u vanishes identically")
            } else if a0.is_positive() {
                BlowUpClass::infinite("a0 > 0: u -> -inf everywhere as t -> inf")
            } else {
                BlowUpClass::finite(-(Rational::one() / (a0 * int(12))), "a0 < 0: T* = -1/(12 a0)")
            }
        }
        SolutionFamily::Disc { a0 } => {
            if a0.is_zero() {
                BlowUpClass::global("a0 = 0: u vanishes identically")
            } else if a0.is_negative() {
                BlowUpClass::infinite("a0 < 0: u -> +inf everywhere as t -> inf")
            } else {
                BlowUpClass::finite(Rational::one() / (a0 * int(48)), "a0 > 0: T* = 1/(48 a0)")
            }
        }
        SolutionFamily::QuarticPlane(q) => {
            let a0a3 = &q.a0 * &q.a3;
            if q.a0.is_zero() {
                BlowUpClass::global("a0 = 0: u reduces to a4 x + a5 y + a6")
            } else if a0a3.is_negative() {
                BlowUpClass::finite(-(Rational::one() / (a0a3 * int(12))), "a0 a3 < 0: T* = -1/(12 a0 a3)")
            } else if !algebraic_condition(q).is_zero() {
                BlowUpClass::infinite("a0 a3 > 0 and the algebraic condition holds")
            } else {
                return Err(FamilyError::UnresolvedCase(
                    "quartic family with a0 a3 > 0 and a vanishing algebraic condition".into(),
                ));
            }
        }
        SolutionFamily::RadialPlane { a0, a1, .. } => {
            let a0a1 = a0 * a1;
            if a0.is_zero() {
                BlowUpClass::global("a0 = 0: u = a2")
            } else if a0a1.is_negative() {
                BlowUpClass::infinite("a0 a1 < 0: u -> +inf everywhere as t -> inf")
            } else {
                BlowUpClass::finite(Rational::one() / (a0a1 * int(48)), "a0 a1 > 0: T* = 1/(48 a0 a1)")
            }
        }
        SolutionFamily::ExpPlane(e) => {
            let a1a2 = &e.a1 * &e.a2;
            let exp_grows = &e.a2 * int(2) > &e.a3 * &e.a3 && !e.a3.is_zero() && !e.a0.is_zero();
            if !a1a2.is_zero() || exp_grows {
                BlowUpClass::infinite(if exp_grows {
                    "2 a2 > a3^2, a3 != 0, a0 != 0: exponential growth"
                } else {
                    "a1 a2 != 0: linear growth in t"
                })
            } else {
                BlowUpClass::global("a1 a2 = 0 and (2 a2 <= a3^2 or a3 = 0 or a0 = 0)")
            }
        }
    };
    Ok(class)
}

/// Pointwise limit of `u(x, y, t)` as `t` approaches the blow-up time.
pub fn limit_fate(family: &SolutionFamily, x: f64, y: f64) -> Result<PointFate, FamilyError> {
    let class = classify(family)?;
    if class.kind == BlowUpKind::Global {
        return Err(FamilyError::NoBlowUp(class.notes));
    }
    let finite_time = class.kind == BlowUpKind::FiniteTime;
    let fate = match family {
        SolutionFamily::Square { .. } => {
            if !finite_time {
                PointFate::MinusInfinity
            } else {
                PointFate::toward(x == 0.0 || y == 0.0)
            }
        }
        SolutionFamily::Disc { .. } | SolutionFamily::RadialPlane { .. } => {
            if !finite_time {
                PointFate::PlusInfinity
            } else {
                PointFate::toward(x != 0.0 || y != 0.0)
            }
        }
        SolutionFamily::QuarticPlane(q) => {
            if !finite_time {
                PointFate::PlusInfinity
            } else {
                let (xr, yr) = exact_point(x, y)?;
                match reduced_quartic(q) {
                    Some(reduced) => reduced_set_fate(&reduced.eval(&xr, &yr), &q.a0),
                    None => {
                        if algebraic_condition(q).is_zero() && quartic_q(q, &xr, &yr).is_zero() {
                            PointFate::Finite
                        } else {
                            return Err(FamilyError::UnresolvedCase(
                                "per-sign limits of the quartic family with a1 != 0".into(),
                            ));
                        }
                    }
                }
            }
        }
        SolutionFamily::ExpPlane(e) => {
            let exp_grows = &e.a2 * int(2) > &e.a3 * &e.a3 && !e.a3.is_zero() && !e.a0.is_zero();
            if exp_grows {
                PointFate::toward(e.a0.is_positive())
            } else {
                PointFate::toward((&e.a1 * &e.a2).is_positive())
            }
        }
    };
    Ok(fate)
}

/// Limit on the zero, negative and positive sets of the reduced quartic
/// (value `q5` at the point) for amplitude `a0`.
pub fn reduced_set_fate(q5: &Rational, a0: &Rational) -> PointFate {
    if q5.is_zero() {
        PointFate::PlusInfinity
    } else {
        // a0 > 0: negative set -> +inf; a0 < 0: positive set -> +inf
        PointFate::toward(q5.is_negative() == a0.is_positive())
    }
}

fn exact_point(x: f64, y: f64) -> Result<(Rational, Rational), FamilyError> {
    match (rational_from_f64(x), rational_from_f64(y)) {
        (Some(xr), Some(yr)) => Ok((xr, yr)),
        _ => Err(FamilyError::Domain(format!("non-finite point ({x}, {y})"))),
    }
}

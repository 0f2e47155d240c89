//! The explicit solution families of `u_t = det(D^2 u) - bilaplacian(u)`.
//!
//! Five families are catalogued: a square solution, a disc solution, and three
//! whole-plane families (a non-radial quartic, a radial quartic, and a mixed
//! polynomial/exponential one). Parameters are exact rationals so every
//! verification path stays exact; [`NumericFamily`] gives a fast `f64` view
//! for the solver.

mod classify;
mod document;
mod quartic;
mod verify;

pub use classify::{classify, limit_fate, reduced_set_fate, BlowUpClass, BlowUpKind, PointFate};
pub use document::{FamilyDocument, FamilyKind};
pub use quartic::{algebraic_condition, quartic_coefficients, quartic_q, reduced_quartic, QuarticCoefficients};
pub use verify::{
    boundary_checks, pde_checks, verify_boundary, verify_pde, IdentityCheck, PdeCertificate, StructureDecomposition,
    VerificationFailure,
};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::polyalg::{int, rat, to_f64, Rational, RationalPoly2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("parameter constraint violated: {constraint}")]
    Parameter { constraint: String },
    #[error("outside the existence interval: {0}")]
    Domain(String),
    #[error("case not resolved: {0}")]
    UnresolvedCase(String),
    #[error("family does not blow up: {0}")]
    NoBlowUp(String),
    #[error("{0}")]
    Verification(VerificationFailure),
    #[error("family document: {0}")]
    Document(String),
}

/// Parameters of the non-radial quartic plane family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticPlane {
    pub a0: Rational,
    pub a1: Rational,
    pub a2: Rational,
    pub a3: Rational,
    pub a4: Rational,
    pub a5: Rational,
    pub a6: Rational,
}

/// Parameters of the polynomial-plus-exponential plane family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpPlane {
    pub a0: Rational,
    pub a1: Rational,
    pub a2: Rational,
    pub a3: Rational,
    pub a4: Rational,
    pub a5: Rational,
    pub a6: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionFamily {
    /// `a0/(1+12 a0 t) x^2 y^2 - (2/3) ln(1+12 a0 t)` on the unit square.
    Square {
        a0: Rational,
    },
    /// `a0/(1-48 a0 t) r^4 + (4/3) ln(1-48 a0 t)` on the unit disc.
    Disc {
        a0: Rational,
    },
    QuarticPlane(QuarticPlane),
    /// `a0/(1-48 a0 a1 t) r^4/(48 a1) + ln(1-48 a0 a1 t)/(36 a1^2) + a2`.
    RadialPlane {
        a0: Rational,
        a1: Rational,
        a2: Rational,
    },
    ExpPlane(ExpPlane),
}

/// `u = amplitude/(1 + rate t) * spatial + log_coeff * ln(1 + rate t) + affine`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparableForm {
    pub spatial: RationalPoly2,
    pub amplitude: Rational,
    pub rate: Rational,
    pub log_coeff: Rational,
    pub affine: RationalPoly2,
}

fn zero() -> Rational {
    Rational::zero()
}

fn r_squared() -> RationalPoly2 {
    &RationalPoly2::monomial(int(1), 2, 0) + &RationalPoly2::monomial(int(1), 0, 2)
}

fn affine(a: &Rational, b: &Rational, c: &Rational) -> RationalPoly2 {
    RationalPoly2::from_terms([((1, 0), a.clone()), ((0, 1), b.clone()), ((0, 0), c.clone())])
}

impl QuarticPlane {
    pub fn new(params: [Rational; 7]) -> Self {
        let [a0, a1, a2, a3, a4, a5, a6] = params;
        Self {
            a0,
            a1,
            a2,
            a3,
            a4,
            a5,
            a6,
        }
    }
}

impl ExpPlane {
    pub fn new(params: [Rational; 7]) -> Self {
        let [a0, a1, a2, a3, a4, a5, a6] = params;
        Self {
            a0,
            a1,
            a2,
            a3,
            a4,
            a5,
            a6,
        }
    }
}

impl SolutionFamily {
    pub fn square(a0: Rational) -> Self {
        Self::Square { a0 }
    }

    pub fn disc(a0: Rational) -> Self {
        Self::Disc { a0 }
    }

    pub fn radial_plane(a0: Rational, a1: Rational, a2: Rational) -> Self {
        Self::RadialPlane { a0, a1, a2 }
    }

    pub fn quartic_plane(params: [Rational; 7]) -> Self {
        Self::QuarticPlane(QuarticPlane::new(params))
    }

    pub fn exp_plane(params: [Rational; 7]) -> Self {
        Self::ExpPlane(ExpPlane::new(params))
    }

    /// The affine plane solution `a4 x + a5 y + a6` (quartic family with `a0 = 0`).
    pub fn affine_plane(a4: Rational, a5: Rational, a6: Rational) -> Self {
        Self::quartic_plane([zero(), zero(), int(1), int(1), a4, a5, a6])
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            Self::Square { .. } => FamilyKind::Square,
            Self::Disc { .. } => FamilyKind::Disc,
            Self::QuarticPlane(_) => FamilyKind::QuarticPlane,
            Self::RadialPlane { .. } => FamilyKind::RadialPlane,
            Self::ExpPlane(_) => FamilyKind::ExpPlane,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    /// Named parameters in declaration order.
    pub fn params(&self) -> Vec<(&'static str, Rational)> {
        match self {
            Self::Square { a0 } | Self::Disc { a0 } => vec![("a0", a0.clone())],
            Self::RadialPlane { a0, a1, a2 } => vec![("a0", a0.clone()), ("a1", a1.clone()), ("a2", a2.clone())],
            Self::QuarticPlane(q) => vec![
                ("a0", q.a0.clone()),
                ("a1", q.a1.clone()),
                ("a2", q.a2.clone()),
                ("a3", q.a3.clone()),
                ("a4", q.a4.clone()),
                ("a5", q.a5.clone()),
                ("a6", q.a6.clone()),
            ],
            Self::ExpPlane(e) => vec![
                ("a0", e.a0.clone()),
                ("a1", e.a1.clone()),
                ("a2", e.a2.clone()),
                ("a3", e.a3.clone()),
                ("a4", e.a4.clone()),
                ("a5", e.a5.clone()),
                ("a6", e.a6.clone()),
            ],
        }
    }

    /// Checks the admissibility constraints of the family.
    pub fn validate(&self) -> Result<(), FamilyError> {
        let violated = |c: &str| {
            Err(FamilyError::Parameter {
                constraint: c.to_string(),
            })
        };
        match self {
            Self::QuarticPlane(q) => {
                if q.a2.is_zero() {
                    return violated("a2 != 0");
                }
                if q.a3.is_zero() {
                    return violated("a3 != 0");
                }
                if &q.a1 * &q.a3 == rat(1, 24) {
                    return violated("a1*a3 != 1/24");
                }
                Ok(())
            }
            Self::RadialPlane { a1, .. } if a1.is_zero() => violated("a1 != 0"),
            _ => Ok(()),
        }
    }

    /// Separable decomposition for the four polynomial-ansatz families.
    pub fn separable_form(&self) -> Option<SeparableForm> {
        match self {
            Self::Square { a0 } => Some(SeparableForm {
                spatial: RationalPoly2::monomial(int(1), 2, 2),
                amplitude: a0.clone(),
                rate: a0 * int(12),
                log_coeff: rat(-2, 3),
                affine: RationalPoly2::zero(),
            }),
            Self::Disc { a0 } => Some(SeparableForm {
                spatial: r_squared().pow(2),
                amplitude: a0.clone(),
                rate: a0 * int(-48),
                log_coeff: rat(4, 3),
                affine: RationalPoly2::zero(),
            }),
            Self::QuarticPlane(q) => {
                let k = algebraic_condition(q);
                Some(SeparableForm {
                    spatial: quartic_coefficients(q).polynomial(),
                    amplitude: q.a0.clone(),
                    rate: &q.a0 * &q.a3 * int(12),
                    log_coeff: -(k / (&q.a3 * int(12))),
                    affine: affine(&q.a4, &q.a5, &q.a6),
                })
            }
            Self::RadialPlane { a0, a1, a2 } => Some(SeparableForm {
                spatial: r_squared().pow(2).scale(&(Rational::one() / (a1 * int(48)))),
                amplitude: a0.clone(),
                rate: a0 * a1 * int(-48),
                log_coeff: Rational::one() / (a1 * a1 * int(36)),
                affine: RationalPoly2::constant(a2.clone()),
            }),
            Self::ExpPlane(_) => None,
        }
    }

    /// Time at which `1 + rate t` vanishes, if it does so for `t > 0`.
    pub fn singular_time(&self) -> Option<Rational> {
        let form = self.separable_form()?;
        if form.rate.is_negative() {
            Some(-(Rational::one() / form.rate))
        } else {
            None
        }
    }

    pub fn numeric(&self) -> NumericFamily {
        match self.separable_form() {
            Some(form) => NumericFamily::Separable {
                spatial: form
                    .spatial
                    .terms()
                    .map(|(m, c)| (m.i as i32, m.j as i32, to_f64(c)))
                    .collect(),
                amplitude: to_f64(&form.amplitude),
                rate: to_f64(&form.rate),
                log_coeff: to_f64(&form.log_coeff),
                affine: [
                    to_f64(&form.affine.coeff(1, 0)),
                    to_f64(&form.affine.coeff(0, 1)),
                    to_f64(&form.affine.constant_term()),
                ],
            },
            None => {
                let Self::ExpPlane(e) = self else { unreachable!() };
                NumericFamily::Exp {
                    a: [&e.a0, &e.a1, &e.a2, &e.a3, &e.a4, &e.a5, &e.a6].map(to_f64),
                }
            }
        }
    }

    /// Closed-form value `u(x, y, t)`.
    pub fn evaluate(&self, x: f64, y: f64, t: f64) -> Result<f64, FamilyError> {
        self.numeric().evaluate(x, y, t)
    }
}

/// `f64` form of a family used on hot paths (ghost filling, sampling).
#[derive(Debug, Clone, PartialEq)]
pub enum NumericFamily {
    Separable {
        spatial: Vec<(i32, i32, f64)>,
        amplitude: f64,
        rate: f64,
        log_coeff: f64,
        affine: [f64; 3],
    },
    Exp {
        a: [f64; 7],
    },
}

impl NumericFamily {
    /// Checks that `1 + rate t > 0`.
    pub fn check_time(&self, t: f64) -> Result<(), FamilyError> {
        if let Self::Separable { rate, .. } = self {
            let arg = 1.0 + rate * t;
            if !(arg > 0.0) {
                return Err(FamilyError::Domain(format!(
                    "t = {t} leaves the existence interval (1 + {rate} t = {arg})"
                )));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: f64, y: f64, t: f64) -> Result<f64, FamilyError> {
        self.check_time(t)?;
        Ok(self.evaluate_unchecked(x, y, t))
    }

    /// Evaluation without the existence-interval check; callers check `t` once
    /// per sweep with [`Self::check_time`].
    pub fn evaluate_unchecked(&self, x: f64, y: f64, t: f64) -> f64 {
        match self {
            Self::Separable {
                spatial,
                amplitude,
                rate,
                log_coeff,
                affine,
            } => {
                let arg = 1.0 + rate * t;
                let p: f64 = spatial.iter().map(|&(i, j, c)| c * x.powi(i) * y.powi(j)).sum();
                let log = if *log_coeff == 0.0 { 0.0 } else { log_coeff * arg.ln() };
                amplitude / arg * p + log + affine[0] * x + affine[1] * y + affine[2]
            }
            Self::Exp { a } => {
                let [a0, a1, a2, a3, a4, a5, a6] = *a;
                let growth = 2.0 * a2 * a3 * a3 - a3.powi(4);
                a1 * x * x + a2 * y * y + 4.0 * a1 * a2 * t + a0 * (a3 * x + growth * t).exp() + a4 * x + a5 * y + a6
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(params: [i64; 7]) -> SolutionFamily {
        SolutionFamily::quartic_plane(params.map(int))
    }

    #[test]
    fn validate_reports_the_violated_constraint() {
        let err = q([1, 1, 0, 1, 0, 0, 0]).validate().unwrap_err();
        assert_eq!(
            err,
            FamilyError::Parameter {
                constraint: "a2 != 0".into()
            }
        );
        let err = q([1, 1, 1, 0, 0, 0, 0]).validate().unwrap_err();
        assert_eq!(
            err,
            FamilyError::Parameter {
                constraint: "a3 != 0".into()
            }
        );
        let f = SolutionFamily::quartic_plane([int(1), int(1), int(1), rat(1, 24), int(0), int(0), int(0)]);
        assert_eq!(
            f.validate().unwrap_err(),
            FamilyError::Parameter {
                constraint: "a1*a3 != 1/24".into()
            }
        );
        assert!(q([1, 0, 1, 1, 0, 0, 0]).validate().is_ok());
        let radial = SolutionFamily::radial_plane(int(1), int(0), int(0));
        assert_eq!(
            radial.validate().unwrap_err(),
            FamilyError::Parameter {
                constraint: "a1 != 0".into()
            }
        );
        assert!(SolutionFamily::exp_plane([0; 7].map(int)).validate().is_ok());
    }

    #[test]
    fn square_values() {
        let f = SolutionFamily::square(int(1));
        assert_eq!(f.evaluate(1.0, 1.0, 0.0).unwrap(), 1.0);
        let t = 0.3;
        let expected = -(2.0 / 3.0) * (1.0f64 + 12.0 * t).ln();
        assert!((f.evaluate(0.0, 0.0, t).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn square_is_symmetric_in_x_and_y() {
        let f = SolutionFamily::square(rat(-3, 7));
        for &(x, y, t) in &[(0.1, 0.7, 0.01), (0.9, 0.2, 0.05), (0.33, 0.5, 0.0)] {
            assert_eq!(f.evaluate(x, y, t).unwrap(), f.evaluate(y, x, t).unwrap());
        }
    }

    #[test]
    fn disc_at_unit_radius() {
        let f = SolutionFamily::disc(int(1));
        assert!((f.evaluate(1.0, 0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((f.evaluate(0.6, 0.8, 0.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn evaluate_rejects_times_past_blow_up() {
        let f = SolutionFamily::square(int(-1));
        assert!(matches!(f.evaluate(0.5, 0.5, 1.0 / 12.0), Err(FamilyError::Domain(_))));
        assert!(matches!(f.evaluate(0.5, 0.5, 0.2), Err(FamilyError::Domain(_))));
        assert!(f.evaluate(0.5, 0.5, 0.08).is_ok());
        let d = SolutionFamily::disc(int(1));
        assert!(matches!(d.evaluate(0.1, 0.1, 1.0 / 48.0), Err(FamilyError::Domain(_))));
    }

    #[test]
    fn singular_times() {
        assert_eq!(SolutionFamily::square(int(-1)).singular_time(), Some(rat(1, 12)));
        assert_eq!(SolutionFamily::square(int(1)).singular_time(), None);
        assert_eq!(SolutionFamily::disc(int(1)).singular_time(), Some(rat(1, 48)));
        assert_eq!(SolutionFamily::exp_plane([1; 7].map(int)).singular_time(), None);
    }

    #[test]
    fn exp_plane_value() {
        let f = SolutionFamily::exp_plane([1, 1, 1, 1, 0, 0, 0].map(int));
        // x^2 + y^2 + 4t + exp(x + t)
        let (x, y, t) = (0.3f64, -0.2, 0.1);
        let expected = x * x + y * y + 4.0 * t + (x + t).exp();
        assert!((f.evaluate(x, y, t).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn affine_plane_is_time_independent() {
        let f = SolutionFamily::affine_plane(rat(1, 3), int(-2), rat(5, 4));
        assert!(f.validate().is_ok());
        let v0 = f.evaluate(0.25, 0.75, 0.0).unwrap();
        let v1 = f.evaluate(0.25, 0.75, 10.0).unwrap();
        assert_eq!(v0, v1);
    }
}

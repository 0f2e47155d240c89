//! The homogeneous quartic form of the non-radial plane family and its
//! companion scalar condition.

use num_traits::Zero;

use super::QuarticPlane;
use crate::polyalg::{int, Rational, RationalPoly2};

/// Coefficients of `c40 x^4 + c31 x^3 y + c22 x^2 y^2 + c13 x y^3 + c04 y^4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticCoefficients {
    pub c40: Rational,
    pub c31: Rational,
    pub c22: Rational,
    pub c13: Rational,
    pub c04: Rational,
}

impl QuarticCoefficients {
    pub fn polynomial(&self) -> RationalPoly2 {
        RationalPoly2::from_terms([
            ((4, 0), self.c40.clone()),
            ((3, 1), self.c31.clone()),
            ((2, 2), self.c22.clone()),
            ((1, 3), self.c13.clone()),
            ((0, 4), self.c04.clone()),
        ])
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let x2 = x * x;
        let y2 = y * y;
        &self.c40 * &x2 * &x2
            + &self.c31 * &x2 * x * y
            + &self.c22 * &x2 * &y2
            + &self.c13 * x * &y2 * y
            + &self.c04 * &y2 * &y2
    }

    pub fn to_f64(&self) -> [f64; 5] {
        [&self.c40, &self.c31, &self.c22, &self.c13, &self.c04].map(crate::polyalg::to_f64)
    }
}

/// `3456 a1^3 a3^3 + 432 a1^2 a3^2 - 1`, shared by the `x^4` coefficient and
/// the algebraic condition.
fn quartic_numerator(q: &QuarticPlane) -> Rational {
    let a1a3 = &q.a1 * &q.a3;
    let a1a3_2 = &a1a3 * &a1a3;
    &a1a3_2 * &a1a3 * int(3456) + a1a3_2 * int(432) - int(1)
}

fn a3_cubed(q: &QuarticPlane) -> Rational {
    &q.a3 * &q.a3 * &q.a3
}

/// `24 a1 a3 - 1`, nonzero for admissible parameters.
fn pole(q: &QuarticPlane) -> Rational {
    &q.a1 * &q.a3 * int(24) - int(1)
}

/// Coefficients of the spatial quartic, exactly as printed for the family.
pub fn quartic_coefficients(q: &QuarticPlane) -> QuarticCoefficients {
    let a2sq = &q.a2 * &q.a2;
    let a1_3 = &q.a1 * &q.a1 * &q.a1;
    let a3sq = &q.a3 * &q.a3;
    let c40 = quartic_numerator(q) / (&a2sq * a3_cubed(q) * int(46656));
    let c31 = (&a1_3 * &a3sq * int(288) + &q.a1 * &q.a3 * int(12) - int(1)) / (&q.a2 * &a3sq * int(648));
    let c04 = &a2sq * &a2sq * &q.a3 * int(9) / pole(q);
    QuarticCoefficients {
        c40,
        c31,
        c22: q.a1.clone(),
        c13: q.a2.clone(),
        c04,
    }
}

/// Exact value of the blow-up quartic `Q(x, y)`.
pub fn quartic_q(q: &QuarticPlane, x: &Rational, y: &Rational) -> Rational {
    quartic_coefficients(q).eval(x, y)
}

/// Left-hand side `4 a1 + (...)/(1944 a2^2 a3^3) + 216 a2^2 a3/(24 a1 a3 - 1)`;
/// the condition holds iff this is nonzero.
pub fn algebraic_condition(q: &QuarticPlane) -> Rational {
    let a2sq = &q.a2 * &q.a2;
    &q.a1 * int(4) + quartic_numerator(q) / (&a2sq * a3_cubed(q) * int(1944)) + a2sq * &q.a3 * int(216) / pole(q)
}

/// The bracketed quartic of the `a1 = 0` reduction, whose zero, negative and
/// positive sets carry the pointwise limits:
/// `x^4/(46656 a2^2 a3^3) - a2 x y^3 + x^3 y/(648 a2 a3^2) + 9 a2^4 a3 y^4`.
///
/// Returns `None` unless `a1 = 0`.
pub fn reduced_quartic(q: &QuarticPlane) -> Option<QuarticCoefficients> {
    if !q.a1.is_zero() {
        return None;
    }
    let a2sq = &q.a2 * &q.a2;
    let a3sq = &q.a3 * &q.a3;
    Some(QuarticCoefficients {
        c40: int(1) / (&a2sq * &a3sq * &q.a3 * int(46656)),
        c31: int(1) / (&q.a2 * &a3sq * int(648)),
        c22: Rational::zero(),
        c13: -q.a2.clone(),
        c04: &a2sq * &a2sq * &q.a3 * int(9),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rat;
    use proptest::prelude::*;

    fn params(a1: Rational, a2: Rational, a3: Rational) -> QuarticPlane {
        QuarticPlane::new([int(1), a1, a2, a3, int(0), int(0), int(0)])
    }

    #[test]
    fn q_on_the_axes_for_a1_zero() {
        let q = params(int(0), int(1), int(1));
        // x^4 coefficient (0 + 0 - 1)/46656
        assert_eq!(quartic_q(&q, &int(1), &int(0)), rat(-1, 46656));
        assert_eq!(quartic_q(&q, &int(2), &int(0)), rat(-16, 46656));
        // y^4 coefficient 9/(0 - 1)
        assert_eq!(quartic_q(&q, &int(0), &int(1)), int(-9));
        assert_eq!(quartic_q(&q, &int(0), &int(0)), int(0));
    }

    #[test]
    fn condition_at_a1_zero() {
        let q = params(int(0), int(1), int(1));
        assert_eq!(algebraic_condition(&q), rat(-1, 1944) - int(216));
    }

    #[test]
    fn coefficient_formulas_match_a_direct_substitution() {
        // a1 = 1/2, a2 = 2, a3 = -1/3, evaluated by hand:
        // a1 a3 = -1/6; 3456(-1/216) + 432(1/36) - 1 = -16 + 12 - 1 = -5
        // c40 = -5 / (46656 * 4 * (-1/27)) = 5/6912
        // c31 = (288 (1/8)(1/9) + 12(-1/6) - 1) / (648 * 2 * 1/9) = (4 - 2 - 1)/144 = 1/144
        // c04 = 9 * 16 * (-1/3) / (24(-1/6) - 1) = -48 / -5 = 48/5
        let q = params(rat(1, 2), int(2), rat(-1, 3));
        let c = quartic_coefficients(&q);
        assert_eq!(c.c40, rat(5, 6912));
        assert_eq!(c.c31, rat(1, 144));
        assert_eq!(c.c04, rat(48, 5));
        // K = 2 + (-5)/(1944 * 4 * (-1/27)) + 216 * 4 * (-1/3)/(-5) = 2 + 5/288 + 288/5
        assert_eq!(algebraic_condition(&q), int(2) + rat(5, 288) + rat(288, 5));
    }

    #[test]
    fn reduced_form_is_the_negated_quartic() {
        let q = params(int(0), rat(-3, 2), rat(2, 5));
        let full = quartic_coefficients(&q).polynomial();
        let reduced = reduced_quartic(&q).unwrap().polynomial();
        assert_eq!(full, -&reduced);
        assert!(reduced_quartic(&params(int(1), int(1), int(1))).is_none());
    }

    #[test]
    fn reduced_quartic_is_a_scaled_square_when_a2_is_unit() {
        // |a2| = 1: 46656 a2^2 a3^3 Q5 = (x^2 + 36 a2 a3 x y - 648 a2^2 a3^2 y^2)^2
        let (a2, a3) = (int(-1), rat(2, 5));
        let q5 = reduced_quartic(&params(int(0), a2.clone(), a3.clone()))
            .unwrap()
            .polynomial();
        let w = &a2 * &a3;
        let base = RationalPoly2::from_terms([
            ((2, 0), int(1)),
            ((1, 1), &w * int(36)),
            ((0, 2), -(&w * &w * int(648))),
        ]);
        let scale = &a2 * &a2 * &a3 * &a3 * &a3 * int(46656);
        assert_eq!(q5.scale(&scale), base.pow(2));
    }

    fn nonzero_rational() -> impl Strategy<Value = Rational> {
        (1i64..=12, 1i64..=7, any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
    }

    fn any_rational() -> impl Strategy<Value = Rational> {
        (-12i64..=12, 1i64..=7).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn q_is_homogeneous_of_degree_four(
            a1 in any_rational(), a2 in nonzero_rational(), a3 in nonzero_rational(),
            x in any_rational(), y in any_rational(), l in any_rational()
        ) {
            let q = params(a1, a2, a3);
            prop_assume!(&q.a1 * &q.a3 != rat(1, 24));
            let lhs = quartic_q(&q, &(&l * &x), &(&l * &y));
            let l4 = &l * &l * &l * &l;
            prop_assert_eq!(lhs, l4 * quartic_q(&q, &x, &y));
            prop_assert!(quartic_q(&q, &int(0), &int(0)).is_zero());
        }

        #[test]
        fn condition_always_holds_when_a1_is_zero(a2 in nonzero_rational(), a3 in nonzero_rational()) {
            let q = params(int(0), a2.clone(), a3.clone());
            let value = algebraic_condition(&q);
            // independent oracle: at a1 = 0 the left-hand side is -1/(1944 a2^2 a3^3) - 216 a2^2 a3
            let oracle = -(int(1) / (int(1944) * &a2 * &a2 * &a3 * &a3 * &a3)) - int(216) * &a2 * &a2 * &a3;
            prop_assert_eq!(&value, &oracle);
            prop_assert!(!value.is_zero());
            // flipping a3 flips the sign when a1 = 0
            let flipped = algebraic_condition(&params(int(0), a2, -a3));
            prop_assert_eq!(flipped, -value);
        }
    }
}

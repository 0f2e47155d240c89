//! Exact bivariate polynomials over the rationals.
//!
//! Coefficients are arbitrary-precision [`BigRational`]s, terms are kept in a
//! sparse map keyed by exponent pairs and ordered graded-lexicographically, so
//! printing and serialization are canonical.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid rational literal `{0}`")]
    Rational(String),
    #[error("line {line}: expected `i j num/den`, got `{text}`")]
    Term { line: usize, text: String },
    #[error("line {line}: duplicate monomial ({i}, {j})")]
    Duplicate { line: usize, i: u32, j: u32 },
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `n`, `n/d` or a plain decimal like `-1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    let err = || ParseError::Rational(s.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let (sign, whole) = match whole.strip_prefix('-') {
            Some(w) => (-1, w),
            None => (1, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if frac.is_empty() && whole.is_empty() {
            return Err(err());
        }
        if !frac.chars().all(|c| c.is_ascii_digit()) || !whole.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{whole}{frac}");
        let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| err())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n * sign, d));
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| err())
}

/// `num/den` with the denominator always printed.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Exact conversion of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Very large numerator/denominator pairs overflow the direct route.
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exponent pair `x^i y^j`, ordered by total degree, then by the power of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub i: u32,
    pub j: u32,
}

impl Monomial {
    pub fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }

    pub fn degree(self) -> u32 {
        self.i + self.j
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then(self.i.cmp(&other.i))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Sub,
    Mul,
}

/// Sparse polynomial in `x`, `y` with rational coefficients. No zero
/// coefficient is ever stored; the empty map is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct RationalPoly2 {
    terms: BTreeMap<Monomial, Rational>,
}

impl RationalPoly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Rational, i: u32, j: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::new(i, j), c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Rational)>,
    {
        let mut p = Self::zero();
        for ((i, j), c) in terms {
            p.add_term(Monomial::new(i, j), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms
            .get(&Monomial::new(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(0, 0)
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Rational)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    /// Largest monomial in graded-lexicographic order.
    pub fn leading_term(&self) -> Option<(Monomial, &Rational)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    pub fn combine(&self, other: &Self, op: CombineOp, scale: &Rational) -> Self {
        let raw = match op {
            CombineOp::Add => self + other,
            CombineOp::Sub => self - other,
            CombineOp::Mul => self * other,
        };
        raw.scale(scale)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(Rational::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative of the given order along `axis`.
    pub fn derive(&self, axis: Axis, order: u32) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = match axis {
                Axis::X => m.i,
                Axis::Y => m.j,
            };
            if e < order {
                continue;
            }
            // falling factorial e (e-1) ... (e-order+1)
            let factor: BigInt = (0..order).map(|k| BigInt::from(e - k)).product();
            let nm = match axis {
                Axis::X => Monomial::new(m.i - order, m.j),
                Axis::Y => Monomial::new(m.i, m.j - order),
            };
            out.add_term(nm, c * Rational::from_integer(factor));
        }
        out
    }

    /// `p_xx p_yy - p_xy^2`.
    pub fn hessian_det(&self) -> Self {
        let pxx = self.derive(Axis::X, 2);
        let pyy = self.derive(Axis::Y, 2);
        let pxy = self.derive(Axis::X, 1).derive(Axis::Y, 1);
        &(&pxx * &pyy) - &(&pxy * &pxy)
    }

    pub fn laplacian(&self) -> Self {
        &self.derive(Axis::X, 2) + &self.derive(Axis::Y, 2)
    }

    /// `p_xxxx + 2 p_xxyy + p_yyyy`.
    pub fn bilaplacian(&self) -> Self {
        let xxxx = self.derive(Axis::X, 4);
        let xxyy = self.derive(Axis::X, 2).derive(Axis::Y, 2);
        let yyyy = self.derive(Axis::Y, 4);
        &(&xxxx + &xxyy.scale(&int(2))) + &yyyy
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            acc += c * num_traits::pow(x.clone(), m.i as usize) * num_traits::pow(y.clone(), m.j as usize);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| to_f64(c) * x.powi(m.i as i32) * y.powi(m.j as i32))
            .sum()
    }

    /// Fixes one variable, leaving a polynomial in the other.
    pub fn substitute(&self, axis: Axis, value: &Rational) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (e, nm) = match axis {
                Axis::X => (m.i, Monomial::new(0, m.j)),
                Axis::Y => (m.j, Monomial::new(m.i, 0)),
            };
            out.add_term(nm, c * num_traits::pow(value.clone(), e as usize));
        }
        out
    }

    /// One `i j num/den` line per term, ascending order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            s.push_str(&format!("{} {} {}\n", m.i, m.j, format_rational(c)));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        let mut p = Self::zero();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || ParseError::Term {
                line: n + 1,
                text: line.to_string(),
            };
            let mut parts = line.split_whitespace();
            let i: u32 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            let j: u32 = parts.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            let c = parse_rational(parts.next().ok_or_else(bad)?).map_err(|_| bad())?;
            if parts.next().is_some() {
                return Err(bad());
            }
            let m = Monomial::new(i, j);
            if p.terms.contains_key(&m) {
                return Err(ParseError::Duplicate { line: n + 1, i, j });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }
}

impl fmt::Display for RationalPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let unit = a.is_one() && m.degree() > 0;
            if !unit {
                if a.is_integer() {
                    write!(f, "{}", a.numer())?;
                } else {
                    write!(f, "({})", a)?;
                }
            }
            for (var, e) in [("x", m.i), ("y", m.j)] {
                match e {
                    0 => {}
                    1 => write!(f, "{var}")?,
                    _ => write!(f, "{var}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl FromStr for RationalPoly2 {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_text(s)
    }
}

impl Add for &RationalPoly2 {
    type Output = RationalPoly2;

    fn add(self, rhs: &RationalPoly2) -> RationalPoly2 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &RationalPoly2 {
    type Output = RationalPoly2;

    fn sub(self, rhs: &RationalPoly2) -> RationalPoly2 {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &RationalPoly2 {
    type Output = RationalPoly2;

    fn mul(self, rhs: &RationalPoly2) -> RationalPoly2 {
        let mut out = RationalPoly2::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term(Monomial::new(a.i + b.i, a.j + b.j), ca * cb);
            }
        }
        out
    }
}

impl Neg for &RationalPoly2 {
    type Output = RationalPoly2;

    fn neg(self) -> RationalPoly2 {
        self.scale(&-Rational::one())
    }
}

impl Add for RationalPoly2 {
    type Output = RationalPoly2;

    fn add(self, rhs: RationalPoly2) -> RationalPoly2 {
        &self + &rhs
    }
}

impl Sub for RationalPoly2 {
    type Output = RationalPoly2;

    fn sub(self, rhs: RationalPoly2) -> RationalPoly2 {
        &self - &rhs
    }
}

impl Mul for RationalPoly2 {
    type Output = RationalPoly2;

    fn mul(self, rhs: RationalPoly2) -> RationalPoly2 {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x2() -> RationalPoly2 {
        RationalPoly2::monomial(int(1), 2, 0)
    }

    fn y2() -> RationalPoly2 {
        RationalPoly2::monomial(int(1), 0, 2)
    }

    fn x2y2() -> RationalPoly2 {
        RationalPoly2::monomial(int(1), 2, 2)
    }

    fn r4() -> RationalPoly2 {
        (&x2() + &y2()).pow(2)
    }

    #[test]
    fn combine_examples() {
        let one = int(1);
        let sum = x2().combine(&y2(), CombineOp::Add, &one);
        assert_eq!(sum, RationalPoly2::from_terms([((2, 0), int(1)), ((0, 2), int(1))]));
        assert_eq!(x2().combine(&y2(), CombineOp::Mul, &one), x2y2());
        let p = RationalPoly2::from_terms([((3, 1), rat(5, 7)), ((0, 0), int(-2))]);
        assert!(p.combine(&p, CombineOp::Sub, &one).is_zero());
    }

    #[test]
    fn derive_examples() {
        let x3y = RationalPoly2::monomial(int(1), 3, 1);
        assert_eq!(x3y.derive(Axis::X, 1), RationalPoly2::monomial(int(3), 2, 1));
        assert_eq!(x2y2().derive(Axis::X, 2), RationalPoly2::monomial(int(2), 0, 2));
        assert!(RationalPoly2::constant(rat(3, 4)).derive(Axis::X, 1).is_zero());
        assert!(x2y2().derive(Axis::Y, 3).is_zero());
    }

    #[test]
    fn hessian_det_examples() {
        // (2y^2)(2x^2) - (4xy)^2
        assert_eq!(x2y2().hessian_det(), RationalPoly2::monomial(int(-12), 2, 2));
        assert!(RationalPoly2::monomial(int(1), 4, 0).hessian_det().is_zero());
        // (12x^2+4y^2)(4x^2+12y^2) - 64x^2y^2 = 48 (x^2+y^2)^2
        assert_eq!(r4().hessian_det(), r4().scale(&int(48)));
    }

    #[test]
    fn bilaplacian_examples() {
        assert_eq!(x2y2().bilaplacian(), RationalPoly2::constant(int(8)));
        assert_eq!(r4().bilaplacian(), RationalPoly2::constant(int(64)));
        let affine = RationalPoly2::from_terms([((1, 0), rat(2, 3)), ((0, 1), int(-5)), ((0, 0), int(7))]);
        assert!(affine.bilaplacian().is_zero());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(x2y2().eval(&int(1), &int(1)), int(1));
        assert_eq!(x2y2().eval(&int(0), &rat(-17, 3)), int(0));
        let p = RationalPoly2::monomial(int(-12), 2, 2);
        assert_eq!(p.eval(&rat(1, 2), &rat(1, 2)), rat(-3, 4));
    }

    #[test]
    fn substitute_fixes_one_variable() {
        let p = &x2y2() + &RationalPoly2::monomial(int(3), 1, 0);
        // at x = 2: 4y^2 + 6
        let q = p.substitute(Axis::X, &int(2));
        assert_eq!(q, RationalPoly2::from_terms([((0, 2), int(4)), ((0, 0), int(6))]));
    }

    #[test]
    fn text_format_is_sorted_and_parses_back() {
        let p = RationalPoly2::from_terms([((2, 2), int(-12)), ((0, 0), rat(1, 3)), ((1, 0), rat(-2, 4))]);
        assert_eq!(p.to_text(), "0 0 1/3\n1 0 -1/2\n2 2 -12/1\n");
        assert_eq!(RationalPoly2::from_text(&p.to_text()).unwrap(), p);
        assert!(RationalPoly2::from_text("1 0 1/2\n1 0 3/1\n").is_err());
        assert!(RationalPoly2::from_text("1 x 1/2").is_err());
    }

    #[test]
    fn display_is_readable() {
        let p = RationalPoly2::from_terms([((2, 2), int(-12)), ((0, 0), rat(1, 3)), ((1, 0), int(1))]);
        assert_eq!(p.to_string(), "-12x^2y^2 + x + (1/3)");
        assert_eq!(RationalPoly2::zero().to_string(), "0");
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3/-6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&int(3)), "3/1");
    }

    #[test]
    fn big_coefficients_stay_exact() {
        // 3456 a1^3 a3^3 style growth would overflow i64 quickly.
        let big = Rational::new(num_traits::pow(BigInt::from(46656), 6), BigInt::from(7));
        let p = RationalPoly2::monomial(big.clone(), 4, 0);
        let sq = &p * &p;
        assert_eq!(sq.coeff(8, 0), &big * &big);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=9).prop_map(|(n, d)| rat(n, d))
    }

    fn small_poly() -> impl Strategy<Value = RationalPoly2> {
        proptest::collection::vec(((0u32..=5, 0u32..=5), small_rational()), 0..8).prop_map(RationalPoly2::from_terms)
    }

    fn affine() -> impl Strategy<Value = RationalPoly2> {
        (small_rational(), small_rational(), small_rational())
            .prop_map(|(a, b, c)| RationalPoly2::from_terms([((1, 0), a), ((0, 1), b), ((0, 0), c)]))
    }

    proptest! {
        #[test]
        fn mixed_derivatives_commute(p in small_poly()) {
            let xy = p.derive(Axis::X, 1).derive(Axis::Y, 1);
            let yx = p.derive(Axis::Y, 1).derive(Axis::X, 1);
            prop_assert_eq!(xy, yx);
        }

        #[test]
        fn hessian_det_ignores_affine_parts(p in small_poly(), l in affine()) {
            prop_assert_eq!((&p + &l).hessian_det(), p.hessian_det());
        }

        #[test]
        fn bilaplacian_is_linear(p in small_poly(), q in small_poly(), a in small_rational(), b in small_rational()) {
            let lhs = (&p.scale(&a) + &q.scale(&b)).bilaplacian();
            let rhs = &p.bilaplacian().scale(&a) + &q.bilaplacian().scale(&b);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn hessian_det_is_quadratic_in_scale(p in small_poly(), l in small_rational()) {
            prop_assert_eq!(p.scale(&l).hessian_det(), p.hessian_det().scale(&(&l * &l)));
        }

        #[test]
        fn eval_is_multiplicative(p in small_poly(), q in small_poly(), x in small_rational(), y in small_rational()) {
            prop_assert_eq!((&p * &q).eval(&x, &y), p.eval(&x, &y) * q.eval(&x, &y));
        }

        #[test]
        fn text_round_trip(p in small_poly()) {
            prop_assert_eq!(RationalPoly2::from_text(&p.to_text()).unwrap(), p);
        }
    }
}

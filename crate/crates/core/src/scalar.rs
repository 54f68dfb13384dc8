//! Two-mode numeric tower: arbitrary-precision rationals for exact
//! polynomial-identity checks, and `f64` with an explicit tolerance
//! context for recurrences that take square roots.
//!
//! Every identity this crate certifies is polynomial, so rational inputs
//! stay rational through all checks. Square roots only appear when running
//! a recurrence forward, which is where float mode comes in.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Errors produced by scalar arithmetic and comparisons.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("square root of negative value")]
    NegativeRadicand,
    #[error("exact square root requested of a non-square rational {0}")]
    InexactSquareRoot(String),
    #[error("cannot compare exact and float scalars without explicit coercion")]
    ModeMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("malformed rational literal {0:?}")]
    BadLiteral(String),
}

/// Tolerance context for float-mode comparisons.
///
/// Two floats are considered equal when
/// `|a - b| <= abs_tol + rel_tol * max(|a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceContext {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for ToleranceContext {
    fn default() -> Self {
        ToleranceContext {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
        }
    }
}

impl ToleranceContext {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        assert!(rel_tol > 0.0 && abs_tol > 0.0, "tolerances must be positive");
        ToleranceContext { rel_tol, abs_tol }
    }

    pub fn eq_f64(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }
}

/// An exact rational or a binary float, tagged by mode.
///
/// Arithmetic between two exact values is exact; anything touching a float
/// coerces to float. Mixed-mode *comparisons* are an error (see
/// [`Scalar::approx_eq`]), which keeps exact verification pipelines honest.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact rational `p/q`. Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_f64(x: f64) -> Self {
        Scalar::Float(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    /// Coerce to float mode (identity on floats).
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn square(&self) -> Scalar {
        self * self
    }

    /// Principal (nonnegative) square root.
    ///
    /// In exact mode the input must be a perfect square of a rational,
    /// otherwise `InexactSquareRoot`. Negative inputs are rejected in both
    /// modes.
    pub fn sqrt_principal(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Float(x) => {
                if *x < 0.0 {
                    Err(ScalarError::NegativeRadicand)
                } else {
                    Ok(Scalar::Float(x.sqrt()))
                }
            }
            Scalar::Exact(r) => {
                if r.is_negative() {
                    return Err(ScalarError::NegativeRadicand);
                }
                let num = r.numer();
                let den = r.denom();
                let sn = num.sqrt();
                let sd = den.sqrt();
                if &(&sn * &sn) == num && &(&sd * &sd) == den {
                    Ok(Scalar::Exact(BigRational::new(sn, sd)))
                } else {
                    Err(ScalarError::InexactSquareRoot(r.to_string()))
                }
            }
        }
    }

    /// Mode-aware equality. Exact operands compare literally and ignore the
    /// context; float operands use the mixed tolerance formula. Mixing modes
    /// is an error.
    pub fn approx_eq(&self, other: &Scalar, ctx: &ToleranceContext) -> Result<bool, ScalarError> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(a == b),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(ctx.eq_f64(*a, *b)),
            _ => Err(ScalarError::ModeMismatch),
        }
    }

    /// Equality after coercing both operands to the weaker mode.
    pub fn approx_eq_coerced(&self, other: &Scalar, ctx: &ToleranceContext) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => ctx.eq_f64(self.to_f64(), other.to_f64()),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self / rhs)
    }

    /// Exact-mode literal as `"p/q"` (reduced, positive denominator) or `"p"`
    /// when integral.
    pub fn to_literal(&self) -> String {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => format!("{x}"),
        }
    }

    pub fn parse_literal(s: &str) -> Result<Scalar, ScalarError> {
        let bad = || ScalarError::BadLiteral(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
                let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Scalar::Exact(BigRational::new(p, q)))
            }
            None => {
                let p = BigInt::from_str(s.trim()).map_err(|_| bad())?;
                Ok(Scalar::Exact(BigRational::from_integer(p)))
            }
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for &Scalar {
    type Output = Scalar;
    /// Panics on a zero divisor; callers guard via preconditions or
    /// [`Scalar::checked_div`].
    fn div(self, rhs: &Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "scalar division by zero");
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_f64() / rhs.to_f64()),
        }
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Div<&Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        &self / rhs
    }
}

impl Div<Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// JSON encoding: exact rationals as strings `"p/q"`, floats as numbers.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.to_literal()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Scalar;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or a JSON number")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Scalar, E> {
                Scalar::parse_literal(s).map_err(de::Error::custom)
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<Scalar, E> {
                Ok(Scalar::Float(x))
            }
            fn visit_i64<E: de::Error>(self, n: i64) -> Result<Scalar, E> {
                Ok(Scalar::from_int(n))
            }
            fn visit_u64<E: de::Error>(self, n: u64) -> Result<Scalar, E> {
                Ok(Scalar::Exact(BigRational::from_integer(BigInt::from(n))))
            }
        }
        deserializer.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_zero_and_perfect_square() {
        assert_eq!(Scalar::zero().sqrt_principal().unwrap(), Scalar::zero());
        assert_eq!(
            Scalar::from_ratio(9, 4).sqrt_principal().unwrap(),
            Scalar::from_ratio(3, 2)
        );
    }

    #[test]
    fn sqrt_eight_squares_back() {
        let r = Scalar::from_f64(8.0).sqrt_principal().unwrap();
        let ctx = ToleranceContext::default();
        assert!((r.to_f64() - 2.828_427_124_746_190_3).abs() < 1e-12);
        assert!(r.square().approx_eq(&Scalar::from_f64(8.0), &ctx).unwrap());
    }

    #[test]
    fn sqrt_errors() {
        assert_eq!(
            Scalar::from_int(-1).sqrt_principal(),
            Err(ScalarError::NegativeRadicand)
        );
        assert!(matches!(
            Scalar::from_int(8).sqrt_principal(),
            Err(ScalarError::InexactSquareRoot(_))
        ));
    }

    #[test]
    fn approx_eq_modes() {
        let ctx = ToleranceContext::default();
        let third = Scalar::from_ratio(1, 3);
        assert!(third.approx_eq(&Scalar::from_ratio(1, 3), &ctx).unwrap());
        assert!(Scalar::from_f64(1.0)
            .approx_eq(&Scalar::from_f64(1.0 + 1e-13), &ctx)
            .unwrap());
        assert!(!Scalar::from_f64(1.0)
            .approx_eq(&Scalar::from_f64(1.001), &ctx)
            .unwrap());
        assert_eq!(
            third.approx_eq(&Scalar::from_f64(0.333), &ctx),
            Err(ScalarError::ModeMismatch)
        );
    }

    #[test]
    fn literal_round_trip() {
        let s = Scalar::from_ratio(-6, 4);
        assert_eq!(s.to_literal(), "-3/2");
        assert_eq!(Scalar::parse_literal("-3/2").unwrap(), s);
        assert_eq!(Scalar::parse_literal("7").unwrap(), Scalar::from_int(7));
        assert!(Scalar::parse_literal("1/0").is_err());
    }

    #[test]
    fn json_encoding() {
        let s = serde_json::to_string(&Scalar::from_ratio(1, 3)).unwrap();
        assert_eq!(s, "\"1/3\"");
        let f = serde_json::to_string(&Scalar::from_f64(1.5)).unwrap();
        assert_eq!(f, "1.5");
        let back: Scalar = serde_json::from_str("\"1/3\"").unwrap();
        assert_eq!(back, Scalar::from_ratio(1, 3));
        let backf: Scalar = serde_json::from_str("1.5").unwrap();
        assert_eq!(backf, Scalar::from_f64(1.5));
    }
}

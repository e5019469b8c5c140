//! Coefficient fields.
//!
//! Every polynomial and matrix in the crate is generic over a [`Field`]. Exact
//! work happens over [`Rational`](crate::Rational) and over the radical
//! extensions of [`Surd`](crate::surd::Surd); `f64`/`f32` instantiations exist
//! for numeric probes and cross-checks.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A commutative field of characteristic zero.
pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Embeds a rational number.
    fn from_rational(q: &BigRational) -> Self;

    /// Embeds a machine integer.
    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Numeric (complex) value used for diagnostics and numeric probes.
    fn to_complex(&self) -> Complex64;

    /// Whether arithmetic in this field is exact.
    fn is_exact() -> bool;

    /// Returns the value as a rational number when it lies in ℚ.
    fn as_rational(&self) -> Option<BigRational>;

    /// Renders the value in the expression grammar (atoms are parenthesised
    /// when they are not a plain rational literal).
    fn to_expr(&self) -> String;

    /// Whether the value is negative when rendered as a leading sign.
    fn is_negative_literal(&self) -> bool {
        false
    }
}

impl Field for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
    fn is_exact() -> bool {
        true
    }
    fn as_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
    fn to_expr(&self) -> String {
        format_rational(self)
    }
    fn is_negative_literal(&self) -> bool {
        self.is_negative()
    }
}

impl Field for f64 {
    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn is_exact() -> bool {
        false
    }
    fn as_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
    fn to_expr(&self) -> String {
        format!("{self}")
    }
    fn is_negative_literal(&self) -> bool {
        *self < 0.0
    }
}

impl Field for f32 {
    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q) as f32
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self as f64, 0.0)
    }
    fn is_exact() -> bool {
        false
    }
    fn as_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
    fn to_expr(&self) -> String {
        format!("{self}")
    }
    fn is_negative_literal(&self) -> bool {
        *self < 0.0
    }
}

impl Field for Complex64 {
    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
    fn as_rational(&self) -> Option<BigRational> {
        if self.im == 0.0 {
            BigRational::from_float(self.re)
        } else {
            None
        }
    }
    fn to_expr(&self) -> String {
        if self.im == 0.0 {
            format!("{}", self.re)
        } else {
            format!("({} + {}*i)", self.re, self.im)
        }
    }
}

/// Converts a rational to the nearest `f64`, robust to huge numerators and
/// denominators.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Renders a rational as `a` or `a/b`.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Shorthand constructor for rationals from machine integers.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand constructor for integral rationals.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `1` in any field.
pub fn one<F: Field>() -> F {
    F::one()
}

/// Tests whether a rational is an exact `p`-th power and returns the real
/// root when it is (negative roots only for odd `p`).
pub fn rational_root(q: &BigRational, p: u32) -> Option<BigRational> {
    if p == 0 {
        return None;
    }
    if q.is_zero() {
        return Some(BigRational::zero());
    }
    let neg = q.is_negative();
    if neg && p % 2 == 0 {
        return None;
    }
    let n = q.numer().abs();
    let d = q.denom().clone();
    let rn = n.nth_root(p);
    let rd = d.nth_root(p);
    if num_traits::pow(rn.clone(), p as usize) == n && num_traits::pow(rd.clone(), p as usize) == d
    {
        let r = BigRational::new(rn, rd);
        Some(if neg { -r } else { r })
    } else {
        None
    }
}

/// Signed `|x| ≤ tol` helper for complex values.
pub fn near_zero(z: Complex64, tol: f64) -> bool {
    z.norm() <= tol
}

/// `One` for rationals, provided for symmetry with [`int`].
pub fn rone() -> BigRational {
    BigRational::one()
}

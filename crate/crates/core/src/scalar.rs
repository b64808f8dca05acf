//! Exact scalars and the combinatorial primitives built on them.
//!
//! Rationals are `num_rational::BigRational`; this module adds an exact
//! complex type over them, the Pochhammer symbol, the generalized binomial
//! coefficient, and the [`Scalar`] trait that lets matrices and series run
//! over rationals, complex rationals and floats with one code path.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Shorthand for the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Renders a rational as `"p/q"`; integers keep the explicit `/1`.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let whole_abs = if whole_abs.is_empty() { "0" } else { whole_abs };
        let digits = BigInt::from_str(&format!("{whole_abs}{frac}")).map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(digits, scale);
        return Ok(if negative { -q } else { q });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// The exact square root of `q` when it is the square of a rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Rising factorial `x (x+1) ... (x+d-1)`; the empty product is 1.
pub fn pochhammer(x: &Rational, d: usize) -> Rational {
    let mut acc = Rational::one();
    let mut factor = x.clone();
    for _ in 0..d {
        acc *= &factor;
        factor += Rational::one();
    }
    acc
}

/// `x (x-1) ... (x-k+1) / k!` for `k >= 0`, and 0 for negative `k`.
pub fn binomial_general(x: &Rational, k: i64) -> Rational {
    if k < 0 {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    let mut top = x.clone();
    for i in 1..=k {
        acc = acc * &top / int(i);
        top -= Rational::one();
    }
    acc
}

pub fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, i| acc * int(i))
}

/// Ordinary binomial coefficient of non-negative integers, 0 outside `0..=n`.
pub fn binomial(n: usize, k: i64) -> Rational {
    if k < 0 || k as usize > n {
        return Rational::zero();
    }
    binomial_general(&int(n as i64), k)
}

/// `q^e` for an integer exponent; panics on `0^negative`.
pub fn rational_powi(q: &Rational, e: i64) -> Rational {
    let base = if e < 0 { q.recip() } else { q.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

/// Exact complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::real(Rational::zero())
    }

    pub fn one() -> Self {
        Self::real(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2`, exact.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "reciprocal of complex zero");
        Self::new(&self.re / &n, -(&self.im / &n))
    }

    pub fn powi(&self, e: i64) -> Self {
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc * base.clone();
        }
        acc
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(&self.re * q, &self.im * q)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    /// The unit-circle point `((1 - s^2) + 2 i s) / (1 + s^2)`.
    pub fn unit_from_slope(s: &Rational) -> Self {
        let s2 = s * s;
        let den = Rational::one() + &s2;
        Self::new((Rational::one() - &s2) / &den, (int(2) * s) / den)
    }
}

impl Zero for ComplexRational {
    fn zero() -> Self {
        ComplexRational::zero()
    }
    fn is_zero(&self) -> bool {
        ComplexRational::is_zero(self)
    }
}

impl One for ComplexRational {
    fn one() -> Self {
        ComplexRational::one()
    }
}

impl fmt::Debug for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl Add for ComplexRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for ComplexRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for ComplexRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Div for ComplexRational {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for ComplexRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

/// Field operations shared by every coefficient type in the crate.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// Size used for pivot selection and residuals.
    fn magnitude(&self) -> f64;
    fn conj(&self) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Square root of a non-negative rational when it exists in this field.
    fn sqrt_of(q: &Rational) -> Option<Self>;
    fn to_json(&self) -> Value;
    /// Whether arithmetic in this field is exact.
    const EXACT: bool;
}

impl Scalar for Rational {
    fn magnitude(&self) -> f64 {
        rational_to_f64(self).abs()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn sqrt_of(q: &Rational) -> Option<Self> {
        rational_sqrt(q)
    }
    fn to_json(&self) -> Value {
        Value::String(rational_to_string(self))
    }
    const EXACT: bool = true;
}

impl Scalar for ComplexRational {
    fn magnitude(&self) -> f64 {
        rational_to_f64(&self.norm_sqr()).sqrt()
    }
    fn conj(&self) -> Self {
        ComplexRational::conj(self)
    }
    fn from_rational(q: &Rational) -> Self {
        ComplexRational::real(q.clone())
    }
    fn sqrt_of(q: &Rational) -> Option<Self> {
        rational_sqrt(q).map(ComplexRational::real)
    }
    fn to_json(&self) -> Value {
        serde_json::json!({
            "re": rational_to_string(&self.re),
            "im": rational_to_string(&self.im),
        })
    }
    const EXACT: bool = true;
}

impl Scalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn conj(&self) -> Self {
        *self
    }
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }
    fn sqrt_of(q: &Rational) -> Option<Self> {
        (!q.is_negative()).then(|| rational_to_f64(q).sqrt())
    }
    fn to_json(&self) -> Value {
        serde_json::json!(self)
    }
    const EXACT: bool = false;
}

impl Scalar for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }
    fn sqrt_of(q: &Rational) -> Option<Self> {
        (!q.is_negative()).then(|| Complex64::new(rational_to_f64(q).sqrt(), 0.0))
    }
    fn to_json(&self) -> Value {
        serde_json::json!({ "re": self.re, "im": self.im })
    }
    const EXACT: bool = false;
}

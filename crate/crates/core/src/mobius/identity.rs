use num_traits::{One, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, int, pochhammer, rational_to_string, Rational};

/// Dense univariate polynomial over the rationals, lowest degree first, no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `x + c`.
    pub fn linear(c: Rational) -> Self {
        Self::new(vec![c, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Rational], k: usize| v.get(k).cloned().unwrap_or_else(Rational::zero);
        Self::new((0..len).map(|k| get(&self.coeffs, k) + get(&other.coeffs, k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::default();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * q).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    /// Rising factorial `(x + c)_d` as a polynomial in `x`.
    pub fn rising(c: &Rational, d: usize) -> Self {
        (0..d).fold(Self::constant(Rational::one()), |acc, k| acc.mul(&Self::linear(c + int(k as i64))))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| Value::String(rational_to_string(c))).collect())
    }
}

fn sign(l: usize) -> Rational {
    if l.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

/// Both sides of the binomial identity as polynomials in `a`:
/// `sum_l (-1)^l (l+k)! C(i,l+k) C(j,l+k) C(l+k,l) (a+j)_{i-l-k}` and
/// `k! C(i,k) C(j,k) (a+k)_{i-k}`.
pub fn binomial_identity_sides(i: usize, j: usize, k: usize) -> Result<(UniPoly, UniPoly)> {
    if !(k <= i && i <= j) {
        return Err(Error::Constraint(format!("need 0 <= k <= i <= j, got (i, j, k) = ({i}, {j}, {k})")));
    }
    let mut lhs = UniPoly::default();
    for l in 0..=i - k {
        let lk = l + k;
        let c = sign(l) * factorial(lk) * binomial(i, lk as i64) * binomial(j, lk as i64) * binomial(lk, l as i64);
        lhs = lhs.add(&UniPoly::rising(&int(j as i64), i - lk).scale(&c));
    }
    let c = factorial(k) * binomial(i, k as i64) * binomial(j, k as i64);
    let rhs = UniPoly::rising(&int(k as i64), i - k).scale(&c);
    Ok((lhs, rhs))
}

fn evaluate_side(i: usize, j: usize, k: usize, a: &Rational) -> (Rational, Rational) {
    let mut lhs = Rational::zero();
    for l in 0..=i - k {
        let lk = l + k;
        lhs += sign(l)
            * factorial(lk)
            * binomial(i, lk as i64)
            * binomial(j, lk as i64)
            * binomial(lk, l as i64)
            * pochhammer(&(a + int(j as i64)), i - lk);
    }
    let rhs = factorial(k) * binomial(i, k as i64) * binomial(j, k as i64) * pochhammer(&(a + int(k as i64)), i - k);
    (lhs, rhs)
}

/// Checks the identity for all `a` by exact evaluation at `i - k + 1`
/// distinct points; both sides have degree at most `i - k`.
pub fn binomial_identity_check(i: usize, j: usize, k: usize) -> Result<bool> {
    if !(k <= i && i <= j) {
        return Err(Error::Constraint(format!("need 0 <= k <= i <= j, got (i, j, k) = ({i}, {j}, {k})")));
    }
    Ok((0..=(i - k) as i64).all(|p| {
        let (l, r) = evaluate_side(i, j, k, &int(p));
        l == r
    }))
}

/// Both sides of the reduced quasi-invariance identity in `x = |z|^2`:
/// `sum_r r! C(i,r) C(j,r) (beta+j)_{i-r} (1-x)^r x^{i-r}` and
/// `sum_k k! C(i,k) C(j,k) (beta)_i/(beta)_k x^{i-k}`.
pub fn quasi_invariance_sides(i: usize, j: usize, beta: &Rational) -> (UniPoly, UniPoly) {
    let one_minus_x = UniPoly::new(vec![int(1), int(-1)]);
    let mut lhs = UniPoly::default();
    let mut rhs = UniPoly::default();
    for r in 0..=i {
        let common = factorial(r) * binomial(i, r as i64) * binomial(j, r as i64);
        let l = common.clone() * pochhammer(&(beta + int(j as i64)), i - r);
        lhs = lhs.add(&one_minus_x.pow(r).mul(&UniPoly::x().pow(i - r)).scale(&l));
        let rc = common * pochhammer(beta, i) / pochhammer(beta, r);
        rhs = rhs.add(&UniPoly::x().pow(i - r).scale(&rc));
    }
    (lhs, rhs)
}

pub fn quasi_invariance_polynomial(i: usize, j: usize, beta: &Rational, n: usize) -> Result<bool> {
    if !(i <= j && j <= n) {
        return Err(Error::Constraint(format!("need 0 <= i <= j <= n, got ({i}, {j}, {n})")));
    }
    let (l, r) = quasi_invariance_sides(i, j, beta);
    Ok(l == r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn hand_expansions() {
        let (l, r) = binomial_identity_sides(1, 1, 0).unwrap();
        assert_eq!(l, UniPoly::x());
        assert_eq!(r, UniPoly::x());
        let (l, r) = binomial_identity_sides(2, 2, 0).unwrap();
        let expected = UniPoly::x().mul(&UniPoly::linear(int(1)));
        assert_eq!(l, expected);
        assert_eq!(r, expected);
        for (i, j) in [(0, 0), (3, 5), (4, 4)] {
            assert!(binomial_identity_check(i, j, i).unwrap());
        }
    }

    #[test]
    fn evaluation_agrees_with_expansion() {
        for j in 0..=8 {
            for i in 0..=j {
                for k in 0..=i {
                    let (l, r) = binomial_identity_sides(i, j, k).unwrap();
                    assert_eq!(l, r, "({i},{j},{k})");
                    assert!(r.degree().is_some_and(|d| d == i - k));
                    assert!(binomial_identity_check(i, j, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn constraint_violations() {
        assert!(binomial_identity_check(3, 2, 0).is_err());
        assert!(binomial_identity_check(2, 3, 3).is_err());
        assert!(quasi_invariance_polynomial(2, 3, &int(1), 2).is_err());
    }

    #[test]
    fn quasi_invariance_examples() {
        let (l, r) = quasi_invariance_sides(0, 0, &int(1));
        assert_eq!((l.clone(), r), (UniPoly::constant(int(1)), UniPoly::constant(int(1))));
        let (l, r) = quasi_invariance_sides(1, 1, &int(1));
        assert_eq!(l, UniPoly::linear(int(1)));
        assert_eq!(r, UniPoly::linear(int(1)));
        for beta in [ratio(1, 2), int(1), ratio(5, 2)] {
            for j in 0..=6 {
                for i in 0..=j {
                    assert!(quasi_invariance_polynomial(i, j, &beta, 6).unwrap());
                }
            }
        }
    }

    #[test]
    fn perturbed_side_fails() {
        let (l, r) = quasi_invariance_sides(2, 3, &ratio(1, 2));
        assert_ne!(l.add(&UniPoly::x()), r);
    }

    #[test]
    fn poly_basics() {
        let p = UniPoly::rising(&int(2), 3);
        assert_eq!(p.eval(&int(0)), int(24));
        assert_eq!(p.eval(&int(1)), int(60));
        assert_eq!(UniPoly::new(vec![int(0), int(0)]).degree(), None);
    }
}

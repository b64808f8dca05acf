use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::matrix::Matrix;
use crate::scalar::{
    binomial, factorial, int, pochhammer, rational_to_f64, rational_to_string, ComplexRational, Rational,
};
use crate::series::MatrixSeries;

/// Coefficient of `(z wbar)^m` in `S(z, w)^r = (1 - z wbar)^-r` is `(r)_m / m!`.
pub fn szego_power_series(r: &Rational, trunc: usize) -> MatrixSeries<Rational> {
    MatrixSeries::scalar_from_fn(trunc, |m, p| {
        if m == p {
            pochhammer(r, m) / factorial(m)
        } else {
            Rational::zero()
        }
    })
}

/// `coeff * z^zpow * wbar^wpow * S(z, w)^exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct SzegoTerm {
    pub coeff: Rational,
    pub zpow: usize,
    pub wpow: usize,
    pub exponent: Rational,
}

/// A finite sum of [`SzegoTerm`]s with distinct `(zpow, wpow, exponent)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SzegoTermSum {
    terms: Vec<SzegoTerm>,
}

impl SzegoTermSum {
    /// Combines like terms and drops zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = SzegoTerm>) -> Self {
        let mut combined: BTreeMap<(usize, usize, Rational), Rational> = BTreeMap::new();
        for t in terms {
            *combined.entry((t.zpow, t.wpow, t.exponent)).or_insert_with(Rational::zero) += t.coeff;
        }
        let terms = combined
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((zpow, wpow, exponent), coeff)| SzegoTerm { coeff, zpow, wpow, exponent })
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[SzegoTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient table up to `z^trunc wbar^trunc`.
    pub fn to_series(&self, trunc: usize) -> MatrixSeries<Rational> {
        let mut out = MatrixSeries::zero(1, trunc);
        for t in &self.terms {
            for k in 0..=trunc {
                let (m, p) = (t.zpow + k, t.wpow + k);
                if m > trunc || p > trunc {
                    break;
                }
                let add = &t.coeff * pochhammer(&t.exponent, k) / factorial(k);
                let cur = out.entry(m, p, 0, 0);
                out.set(m, p, Matrix::from_rows(vec![vec![cur + add]]));
            }
        }
        out
    }

    /// Exact value at `(z, w)`; `None` unless every exponent is an integer.
    pub fn evaluate_exact(&self, z: &ComplexRational, w: &ComplexRational) -> Option<ComplexRational> {
        let one_minus = ComplexRational::one() - z.clone() * w.conj();
        let mut acc = ComplexRational::zero();
        for t in &self.terms {
            if !t.exponent.is_integer() {
                return None;
            }
            let e = t.exponent.to_integer().to_i64()?;
            let term = z.powi(t.zpow as i64) * w.conj().powi(t.wpow as i64) * one_minus.powi(-e);
            acc = acc + term.scale(&t.coeff);
        }
        Some(acc)
    }

    /// Principal-branch floating value at `(z, w)`.
    pub fn evaluate_f64(&self, z: Complex64, w: Complex64) -> Complex64 {
        let one_minus = Complex64::new(1.0, 0.0) - z * w.conj();
        self.terms
            .iter()
            .map(|t| {
                rational_to_f64(&t.coeff)
                    * z.powu(t.zpow as u32)
                    * w.conj().powu(t.wpow as u32)
                    * one_minus.powf(-rational_to_f64(&t.exponent))
            })
            .sum()
    }

    /// Writes the sum as `P(z, wbar) * S^base` and returns the coefficients of
    /// `P`; `None` when some `base - exponent` is not a non-negative integer
    /// or `P` does not fit in `trunc`.
    pub fn polynomial_part(&self, base: &Rational, trunc: usize) -> Option<MatrixSeries<Rational>> {
        let mut out = MatrixSeries::zero(1, trunc);
        for t in &self.terms {
            let gap = base - &t.exponent;
            if !gap.is_integer() || gap.is_negative() {
                return None;
            }
            let e = gap.to_integer().to_usize()?;
            for k in 0..=e {
                let (m, p) = (t.zpow + k, t.wpow + k);
                if m > trunc || p > trunc {
                    return None;
                }
                let sign = if k.is_even() { int(1) } else { int(-1) };
                let add = &t.coeff * sign * binomial(e, k as i64);
                let cur = out.entry(m, p, 0, 0);
                out.set(m, p, Matrix::from_rows(vec![vec![cur + add]]));
            }
        }
        Some(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| {
                    json!({
                        "coeff": rational_to_string(&t.coeff),
                        "zpow": t.zpow,
                        "wpow": t.wpow,
                        "exponent": rational_to_string(&t.exponent),
                    })
                })
                .collect(),
        )
    }
}

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::matrix::Matrix;
use crate::scalar::{factorial, int, pochhammer, ratio, rational_to_string, Rational};

use super::NormalizedCoeffs;

/// Coefficient families with a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeffName {
    /// `a_00`.
    A00,
    /// `a_m0`, indexed by `m`.
    Am0,
    /// `a_{m+1,1}`, indexed by `m`.
    Am1,
    /// `c_k0`, indexed by `k`.
    Ck0,
    /// `N_k1` for `2 <= k <= n+1`, indexed by `k`.
    Ak1,
}

impl CoeffName {
    pub const ALL: [CoeffName; 5] = [Self::A00, Self::Am0, Self::Am1, Self::Ck0, Self::Ak1];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::A00 => "a00",
            Self::Am0 => "am0",
            Self::Am1 => "am1",
            Self::Ck0 => "ck0",
            Self::Ak1 => "Ak1",
        }
    }

    /// Admissible indices for jet order `n`.
    pub fn indices(self, n: usize) -> std::ops::RangeInclusive<usize> {
        match self {
            Self::A00 => 0..=0,
            Self::Am0 | Self::Am1 | Self::Ck0 => 0..=n,
            Self::Ak1 => 2..=n + 1,
        }
    }
}

impl fmt::Display for CoeffName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoeffName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownCoefficient(s.to_string()))
    }
}

/// The closed-form matrix of a coefficient family at `index`.
pub fn closed_form_coefficient(name: CoeffName, spec: &KernelSpec, index: usize) -> Result<Matrix<Rational>> {
    spec.require_bidisc()?;
    let n = spec.jet_order;
    if !name.indices(n).contains(&index) {
        return Err(Error::IndexOutOfRange(format!("{name} index {index} for jet order {n}")));
    }
    let (alpha, beta) = (&spec.alpha, &spec.beta);
    let d = n + 1;
    let band = |m: usize, f: &dyn Fn(usize) -> Rational| {
        let mut out = Matrix::zeros(d, d);
        for r in 0..d.saturating_sub(m) {
            out[(r, r + m)] = f(r);
        }
        out
    };
    let lead = |m: usize, r: usize| factorial(m + r) / factorial(m) * pochhammer(beta, m + r);
    Ok(match name {
        CoeffName::A00 => band(0, &|k| factorial(k) * pochhammer(beta, k)),
        CoeffName::Am0 => band(index, &|r| lead(index, r)),
        CoeffName::Am1 => {
            let m = index;
            band(m, &|r| {
                let shift = int(1) + ratio(r as i64, m as i64 + 1);
                lead(m, r) * (alpha + shift * (beta + int((m + r) as i64)))
            })
        }
        CoeffName::Ck0 => {
            let k = index;
            let sign = if k.is_multiple_of(2) { int(1) } else { int(-1) };
            band(k, &|r| &sign * factorial(r + k) / factorial(k) * pochhammer(beta, r + k))
        }
        CoeffName::Ak1 => {
            let k = index;
            let sign = if (k + 1).is_multiple_of(2) { int(1) } else { int(-1) };
            let mut out = Matrix::zeros(d, d);
            out[(n + 1 - k, n)] = sign * factorial(n + 1) * pochhammer(beta, n + 1) / factorial(k);
            out
        }
    })
}

/// The pipeline value a closed form claims to describe.
pub fn pipeline_coefficient(name: CoeffName, coeffs: &NormalizedCoeffs, index: usize) -> Result<Matrix<Rational>> {
    match name {
        CoeffName::A00 => Ok(coeffs.a().coeff(0, 0)),
        CoeffName::Am0 => Ok(coeffs.a().coeff(index, 0)),
        CoeffName::Am1 => Ok(coeffs.a().coeff(index + 1, 1)),
        CoeffName::Ck0 => coeffs.c_k0(index),
        CoeffName::Ak1 => coeffs.n_coeff(index, 1),
    }
}

/// The closed form when `index` is admissible, zero otherwise; the families
/// vanish identically past the jet order.
fn closed_or_zero(name: CoeffName, spec: &KernelSpec, index: usize) -> Result<Matrix<Rational>> {
    if name.indices(spec.jet_order).contains(&index) {
        closed_form_coefficient(name, spec, index)
    } else {
        Ok(Matrix::zeros(spec.dim(), spec.dim()))
    }
}

/// First `m` where `sum_{s<=m} c_s0 D^-1 a_{m-s,0}` fails to vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseRelationFailure {
    pub m: usize,
    pub residual: Matrix<Rational>,
}

impl InverseRelationFailure {
    pub fn to_json(&self) -> Value {
        json!({ "m": self.m, "residual": self.residual.to_json_rows() })
    }
}

/// Checks `sum_s c_s0 D^-1 a_{m-s,0} = 0` for `1 <= m <= max_m` on explicit tables.
pub fn inverse_relation_residual(
    c: &[Matrix<Rational>],
    a: &[Matrix<Rational>],
    max_m: usize,
) -> Result<Option<InverseRelationFailure>> {
    if c.len() <= max_m || a.len() <= max_m {
        return Err(Error::IndexOutOfRange(format!("tables shorter than {max_m}")));
    }
    let d = &a[0];
    let dinv = Matrix::diagonal(&d.diag().iter().map(|x| x.recip()).collect::<Vec<_>>());
    for m in 1..=max_m {
        let mut acc = Matrix::zeros(d.rows(), d.cols());
        for s in 0..=m {
            acc.add_assign(&c[s].matmul(&dinv).matmul(&a[m - s]));
        }
        if !acc.is_zero() {
            return Ok(Some(InverseRelationFailure { m, residual: acc }));
        }
    }
    Ok(None)
}

/// The inverse relation between the closed forms of `c_k0` and `a_m0`.
pub fn verify_inverse_relation(spec: &KernelSpec, max_m: usize) -> Result<bool> {
    if max_m < 1 {
        return Err(Error::Constraint("need max_m >= 1".into()));
    }
    let (c, a) = inverse_relation_tables(spec, max_m)?;
    Ok(inverse_relation_residual(&c, &a, max_m)?.is_none())
}

/// Closed-form `c_k0` and `a_m0` tables, in that order.
pub type InverseTables = (Vec<Matrix<Rational>>, Vec<Matrix<Rational>>);

/// Closed-form `c_k0` and `a_m0` tables for `0..=max_m`.
pub fn inverse_relation_tables(spec: &KernelSpec, max_m: usize) -> Result<InverseTables> {
    let c = (0..=max_m).map(|k| closed_or_zero(CoeffName::Ck0, spec, k)).collect::<Result<Vec<_>>>()?;
    let a = (0..=max_m)
        .map(|m| if m == 0 { closed_or_zero(CoeffName::A00, spec, 0) } else { closed_or_zero(CoeffName::Am0, spec, m) })
        .collect::<Result<Vec<_>>>()?;
    Ok((c, a))
}

/// How `N_k1` departs from its single-entry shape.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternViolation {
    pub k: usize,
    pub matrix: Matrix<Rational>,
    pub expected: Matrix<Rational>,
    pub reason: String,
}

impl PatternViolation {
    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "matrix": self.matrix.to_json_rows(),
            "expected": self.expected.to_json_rows(),
            "reason": self.reason,
        })
    }
}

/// Checks that `actual` (claimed to be `N_k1`) has its single nonzero entry
/// at `(n-k+1, n)` with the closed-form value, and that the band
/// `(r, r+k-1)` vanishes above that entry.
pub fn check_single_entry_pattern(
    spec: &KernelSpec,
    k: usize,
    actual: &Matrix<Rational>,
) -> Result<Option<PatternViolation>> {
    let n = spec.jet_order;
    let expected = closed_form_coefficient(CoeffName::Ak1, spec, k)?;
    let violation = |reason: String| {
        Ok(Some(PatternViolation { k, matrix: actual.clone(), expected: expected.clone(), reason }))
    };
    let nz = actual.nonzero_entries();
    if nz != vec![(n + 1 - k, n)] {
        return violation(format!("nonzero entries at {nz:?}, expected only ({}, {n})", n + 1 - k));
    }
    for r in 0..n + 1 - k {
        if !actual[(r, r + k - 1)].is_zero() {
            return violation(format!("band entry ({r}, {}) is nonzero", r + k - 1));
        }
    }
    if actual != &expected {
        let v = &actual[(n + 1 - k, n)];
        return violation(format!(
            "value {} differs from {}",
            rational_to_string(v),
            rational_to_string(&expected[(n + 1 - k, n)])
        ));
    }
    Ok(None)
}

//! Truncated bivariate power series `sum_{m,p <= M} A_{mp} z^m wbar^p` with
//! square-matrix coefficients.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{parse_rational, Rational, Scalar};

#[derive(Clone, PartialEq, Debug)]
pub struct MatrixSeries<F> {
    dim: usize,
    trunc: usize,
    coeffs: Vec<Matrix<F>>,
}

impl<F: Scalar> MatrixSeries<F> {
    pub fn zero(dim: usize, trunc: usize) -> Self {
        Self { dim, trunc, coeffs: vec![Matrix::zeros(dim, dim); (trunc + 1) * (trunc + 1)] }
    }

    /// `I` at `(0, 0)` and zero elsewhere.
    pub fn identity(dim: usize, trunc: usize) -> Self {
        let mut s = Self::zero(dim, trunc);
        s.set(0, 0, Matrix::identity(dim));
        s
    }

    pub fn from_fn(dim: usize, trunc: usize, mut f: impl FnMut(usize, usize) -> Matrix<F>) -> Self {
        let mut coeffs = Vec::with_capacity((trunc + 1) * (trunc + 1));
        for m in 0..=trunc {
            for p in 0..=trunc {
                let c = f(m, p);
                assert_eq!((c.rows(), c.cols()), (dim, dim), "coefficient ({m},{p}) has wrong shape");
                coeffs.push(c);
            }
        }
        Self { dim, trunc, coeffs }
    }

    /// A 1x1 series from scalar coefficients.
    pub fn scalar_from_fn(trunc: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        Self::from_fn(1, trunc, |m, p| Matrix::from_rows(vec![vec![f(m, p)]]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    fn slot(&self, m: usize, p: usize) -> usize {
        m * (self.trunc + 1) + p
    }

    /// Coefficient of `z^m wbar^p`; `None` beyond the truncation.
    pub fn get(&self, m: usize, p: usize) -> Option<&Matrix<F>> {
        (m <= self.trunc && p <= self.trunc).then(|| &self.coeffs[self.slot(m, p)])
    }

    /// Coefficient of `z^m wbar^p`, reading absent entries as zero.
    pub fn coeff(&self, m: usize, p: usize) -> Matrix<F> {
        self.get(m, p).cloned().unwrap_or_else(|| Matrix::zeros(self.dim, self.dim))
    }

    pub fn set(&mut self, m: usize, p: usize, c: Matrix<F>) {
        assert!(m <= self.trunc && p <= self.trunc, "index ({m},{p}) beyond truncation {}", self.trunc);
        assert_eq!((c.rows(), c.cols()), (self.dim, self.dim), "coefficient has wrong shape");
        let k = self.slot(m, p);
        self.coeffs[k] = c;
    }

    /// Scalar entry `(i, j)` of the coefficient of `z^m wbar^p`.
    pub fn entry(&self, m: usize, p: usize, i: usize, j: usize) -> F {
        self.get(m, p).map_or_else(F::zero, |c| c[(i, j)].clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Matrix<F>)> {
        let t = self.trunc + 1;
        self.coeffs.iter().enumerate().map(move |(k, c)| (k / t, k % t, c))
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&Matrix<F>) -> Matrix<G>) -> MatrixSeries<G> {
        MatrixSeries { dim: self.dim, trunc: self.trunc, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn map_entries<G: Scalar>(&self, f: impl Fn(&F) -> G) -> MatrixSeries<G> {
        self.map(|c| c.map(&f))
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        assert!(trunc <= self.trunc, "cannot extend truncation");
        Self::from_fn(self.dim, trunc, |m, p| self.coeff(m, p))
    }

    /// Transposes every coefficient matrix.
    pub fn transpose_coeffs(&self) -> Self {
        self.map(Matrix::transpose)
    }

    /// Single entry `(i, j)` as a scalar series.
    pub fn entry_series(&self, i: usize, j: usize) -> Self {
        Self::scalar_from_fn(self.trunc, |m, p| self.entry(m, p, i, j))
    }

    /// Whether every coefficient with `m > deg` or `p > deg` vanishes.
    pub fn is_polynomial_of_degree(&self, deg: usize) -> bool {
        self.iter().all(|(m, p, c)| (m <= deg && p <= deg) || c.is_zero())
    }

    /// Cauchy product truncated at the smaller truncation.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(self.dim, trunc);
        for m in 0..=trunc {
            for p in 0..=trunc {
                let mut acc = Matrix::zeros(self.dim, self.dim);
                for s in 0..=m {
                    for t in 0..=p {
                        let a = &self.coeffs[self.slot(s, t)];
                        let b = &other.coeffs[other.slot(m - s, p - t)];
                        if a.is_zero() || b.is_zero() {
                            continue;
                        }
                        acc.add_assign(&a.matmul(b));
                    }
                }
                out.set(m, p, acc);
            }
        }
        Ok(out)
    }

    /// Inverse series, requiring an invertible constant term.
    pub fn invert(&self) -> Result<Self> {
        let a00_inv = self.coeffs[0].inverse().map_err(|_| Error::SingularConstantTerm)?;
        let mut out = Self::zero(self.dim, self.trunc);
        out.set(0, 0, a00_inv.clone());
        for m in 0..=self.trunc {
            for p in 0..=self.trunc {
                if m == 0 && p == 0 {
                    continue;
                }
                let mut acc = Matrix::zeros(self.dim, self.dim);
                for s in 0..=m {
                    for t in 0..=p {
                        if s == 0 && t == 0 {
                            continue;
                        }
                        let a = &self.coeffs[self.slot(s, t)];
                        let b = &out.coeffs[out.slot(m - s, p - t)];
                        if a.is_zero() || b.is_zero() {
                            continue;
                        }
                        acc.add_assign(&a.matmul(b));
                    }
                }
                let b = a00_inv.matmul(&acc).scale(&-F::one());
                out.set(m, p, b);
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient on the left and right by fixed matrices.
    pub fn sandwich(&self, left: &Matrix<F>, right: &Matrix<F>) -> Self {
        self.map(|c| left.matmul(c).matmul(right))
    }

    /// Product with a 1x1 series, applied entrywise.
    pub fn scale_by_scalar_series(&self, s: &Self) -> Self {
        assert_eq!(s.dim, 1, "scalar series expected");
        let trunc = self.trunc.min(s.trunc);
        Self::from_fn(self.dim, trunc, |m, p| {
            let mut acc = Matrix::zeros(self.dim, self.dim);
            for a in 0..=m {
                for b in 0..=p {
                    let w = s.entry(a, b, 0, 0);
                    if w.is_zero() {
                        continue;
                    }
                    let c = &self.coeffs[self.slot(m - a, p - b)];
                    if !c.is_zero() {
                        acc.add_assign(&c.scale(&w));
                    }
                }
            }
            acc
        })
    }

    /// Evaluates `sum A_{mp} z^m wbar^p` at a point, where `wbar` is passed
    /// already conjugated.
    pub fn evaluate(&self, z: &F, wbar: &F) -> Matrix<F> {
        let mut zpow = vec![F::one()];
        let mut wpow = vec![F::one()];
        for k in 1..=self.trunc {
            zpow.push(zpow[k - 1].clone() * z.clone());
            wpow.push(wpow[k - 1].clone() * wbar.clone());
        }
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for (m, p, c) in self.iter() {
            if !c.is_zero() {
                acc.add_assign(&c.scale(&(zpow[m].clone() * wpow[p].clone())));
            }
        }
        acc
    }

    /// Restriction to `wbar = 0`, kept as a series whose only nonzero
    /// coefficients have `p = 0`.
    pub fn at_w_zero(&self) -> Self {
        Self::from_fn(self.dim, self.trunc, |m, p| if p == 0 { self.coeff(m, 0) } else { Matrix::zeros(self.dim, self.dim) })
    }

    /// Restriction to `z = 0`.
    pub fn at_z_zero(&self) -> Self {
        Self::from_fn(self.dim, self.trunc, |m, p| if m == 0 { self.coeff(0, p) } else { Matrix::zeros(self.dim, self.dim) })
    }

    /// Largest entrywise magnitude of the difference of two series.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let trunc = self.trunc.min(other.trunc);
        let mut worst = 0.0f64;
        for m in 0..=trunc {
            for p in 0..=trunc {
                worst = worst.max(self.coeff(m, p).max_abs_diff(&other.coeff(m, p)));
            }
        }
        worst
    }

    /// `{dim, trunc, coeffs: [{m, p, matrix}]}`, listing every stored coefficient.
    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .iter()
            .map(|(m, p, c)| json!({ "m": m, "p": p, "matrix": c.to_json() }))
            .collect();
        json!({ "dim": self.dim, "trunc": self.trunc, "coeffs": coeffs })
    }
}

impl MatrixSeries<Rational> {
    /// Inverse of [`MatrixSeries::to_json`] for rational series.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("series JSON: {what}"));
        let dim = v["dim"].as_u64().ok_or_else(|| bad("dim"))? as usize;
        let trunc = v["trunc"].as_u64().ok_or_else(|| bad("trunc"))? as usize;
        let mut out = Self::zero(dim, trunc);
        for c in v["coeffs"].as_array().ok_or_else(|| bad("coeffs"))? {
            let m = c["m"].as_u64().ok_or_else(|| bad("m"))? as usize;
            let p = c["p"].as_u64().ok_or_else(|| bad("p"))? as usize;
            if m > trunc || p > trunc {
                return Err(bad("index beyond trunc"));
            }
            let entries = c["matrix"].as_array().ok_or_else(|| bad("matrix"))?;
            if entries.len() != dim * dim {
                return Err(bad("matrix size"));
            }
            let vals = entries
                .iter()
                .map(|e| e.as_str().ok_or_else(|| bad("entry")).and_then(parse_rational))
                .collect::<Result<Vec<_>>>()?;
            out.set(m, p, Matrix::from_fn(dim, dim, |i, j| vals[i * dim + j].clone()));
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> MatrixSeries<f64> {
        self.map(Matrix::to_f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use proptest::prelude::*;

    type Q = Rational;

    fn one_minus_zw(trunc: usize) -> MatrixSeries<Q> {
        MatrixSeries::scalar_from_fn(trunc, |m, p| match (m, p) {
            (0, 0) => int(1),
            (1, 1) => int(-1),
            _ => int(0),
        })
    }

    fn geometric(trunc: usize) -> MatrixSeries<Q> {
        MatrixSeries::scalar_from_fn(trunc, |m, p| if m == p { int(1) } else { int(0) })
    }

    #[test]
    fn identity_is_neutral() {
        let b = MatrixSeries::from_fn(2, 3, |m, p| {
            Matrix::from_fn(2, 2, |i, j| ratio((m * 7 + p * 3 + i + 2 * j) as i64, 1 + i as i64))
        });
        assert_eq!(MatrixSeries::identity(2, 3).multiply(&b).unwrap(), b);
    }

    #[test]
    fn geometric_series_times_one_minus_zw() {
        let prod = one_minus_zw(6).multiply(&geometric(6)).unwrap();
        assert_eq!(prod, MatrixSeries::identity(1, 6));
    }

    #[test]
    fn square_of_geometric_counts() {
        let sq = geometric(6).multiply(&geometric(6)).unwrap();
        for k in 0..=6 {
            assert_eq!(sq.entry(k, k, 0, 0), int(k as i64 + 1));
        }
    }

    #[test]
    fn inverse_of_squared_geometric() {
        let sq = geometric(6).multiply(&geometric(6)).unwrap();
        let inv = sq.invert().unwrap();
        let expected = MatrixSeries::scalar_from_fn(6, |m, p| match (m, p) {
            (0, 0) => int(1),
            (1, 1) => int(-2),
            (2, 2) => int(1),
            _ => int(0),
        });
        assert_eq!(inv, expected);
    }

    #[test]
    fn errors() {
        let a = MatrixSeries::<Q>::identity(2, 2);
        let b = MatrixSeries::<Q>::identity(3, 2);
        assert_eq!(a.multiply(&b), Err(Error::DimensionMismatch(2, 3)));
        assert_eq!(MatrixSeries::<Q>::zero(2, 2).invert(), Err(Error::SingularConstantTerm));
    }

    #[test]
    fn truncation_is_min() {
        let a = geometric(6);
        let b = geometric(3);
        assert_eq!(a.multiply(&b).unwrap().trunc(), 3);
    }

    #[test]
    fn json_round_trip() {
        let s = MatrixSeries::from_fn(2, 2, |m, p| Matrix::from_fn(2, 2, |i, j| ratio(m as i64 - p as i64 * 3 + i as i64, 1 + j as i64)));
        let v = s.to_json();
        let text = serde_json::to_string(&v).unwrap();
        let back = MatrixSeries::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    fn series_strategy(dim: usize, trunc: usize) -> impl Strategy<Value = MatrixSeries<Q>> {
        let n = dim * dim * (trunc + 1) * (trunc + 1);
        prop::collection::vec((-5i64..=5, 1i64..=4), n).prop_map(move |v| {
            MatrixSeries::from_fn(dim, trunc, |m, p| {
                Matrix::from_fn(dim, dim, |i, j| {
                    let (a, b) = v[((m * (trunc + 1) + p) * dim + i) * dim + j];
                    ratio(a, b)
                })
            })
        })
    }

    fn invertible_series(dim: usize, trunc: usize) -> impl Strategy<Value = MatrixSeries<Q>> {
        (series_strategy(dim, trunc), prop::collection::vec(prop::bool::ANY, dim)).prop_map(move |(mut s, signs)| {
            // Unit upper-triangular up to sign, so the inverse has no
            // determinant denominators piling up.
            let mut c = s.coeff(0, 0);
            for i in 0..dim {
                for j in 0..i {
                    c[(i, j)] = int(0);
                }
                c[(i, i)] = int(if signs[i] { 1 } else { -1 });
            }
            s.set(0, 0, c);
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn multiply_by_inverse_is_identity(
            a in (1usize..=4, 0usize..=6).prop_flat_map(|(d, t)| invertible_series(d, t))
        ) {
            let inv = a.invert().unwrap();
            let id = MatrixSeries::identity(a.dim(), a.trunc());
            prop_assert_eq!(a.multiply(&inv).unwrap(), id.clone());
            prop_assert_eq!(inv.multiply(&a).unwrap(), id);
        }

        #[test]
        fn multiply_is_associative(a in series_strategy(2, 3), b in series_strategy(2, 3), c in series_strategy(2, 3)) {
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn scalar_multiply_commutes(a in series_strategy(1, 5), b in series_strategy(1, 5)) {
            prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
        }

        #[test]
        fn multiply_matches_direct_double_sum(a in series_strategy(2, 3), b in series_strategy(2, 3)) {
            let prod = a.multiply(&b).unwrap();
            for m in 0..=3usize {
                for p in 0..=3usize {
                    let mut direct = Matrix::<Q>::zeros(2, 2);
                    for (s, t, x) in a.iter() {
                        for (u, v, y) in b.iter() {
                            if s + u == m && t + v == p {
                                direct = direct.add(&x.matmul(y));
                            }
                        }
                    }
                    prop_assert_eq!(prod.coeff(m, p), direct);
                }
            }
        }
    }
}

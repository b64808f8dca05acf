use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::{jet_kernel_series, KernelSpec};
use crate::matrix::Matrix;
use crate::scalar::{rational_sqrt, rational_to_f64, Rational};
use crate::series::MatrixSeries;

/// Normalized coefficients of a kernel `K(z, w) = sum a_mp z^m wbar^p`.
///
/// The normalized kernel `K(0,0)^{1/2} K(z,0)^-1 K(z,w) K(0,w)^-1 K(0,0)^{1/2}`
/// has coefficients `D^{-1/2} N_kl D^{-1/2}` with `D = a_00`. When `D` is
/// diagonal every square root cancels from `N`, which is kept exact.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedCoeffs {
    a: MatrixSeries<Rational>,
    d: Matrix<Rational>,
    c_z: MatrixSeries<Rational>,
    c_w: MatrixSeries<Rational>,
    n: MatrixSeries<Rational>,
}

impl NormalizedCoeffs {
    /// Normalizes the bidisc jet kernel up to order `trunc`.
    pub fn for_spec(spec: &KernelSpec, trunc: usize) -> Result<Self> {
        Self::from_series(jet_kernel_series(spec, trunc)?)
    }

    /// Normalizes an arbitrary coefficient table with diagonal, invertible `a_00`.
    pub fn from_series(a: MatrixSeries<Rational>) -> Result<Self> {
        let d = a.coeff(0, 0);
        if !d.is_diagonal() || d.diag().iter().any(Zero::is_zero) {
            return Err(Error::Constraint("a_00 must be diagonal and invertible".into()));
        }
        let dinv = Matrix::diagonal(&d.diag().iter().map(|x| x.recip()).collect::<Vec<_>>());
        let c_z = a.at_w_zero().invert()?.sandwich(&d, &d);
        let c_w = a.at_z_zero().invert()?.sandwich(&d, &d);
        let n = c_z.multiply(&a.sandwich(&dinv, &dinv))?.multiply(&c_w)?;
        Ok(Self { a, d, c_z, c_w, n })
    }

    pub fn trunc(&self) -> usize {
        self.a.trunc()
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &MatrixSeries<Rational> {
        &self.a
    }

    /// `D = a_00`.
    pub fn d(&self) -> &Matrix<Rational> {
        &self.d
    }

    /// The symmetrized normalized series `N`.
    pub fn n(&self) -> &MatrixSeries<Rational> {
        &self.n
    }

    pub fn n_coeff(&self, k: usize, l: usize) -> Result<Matrix<Rational>> {
        self.check_index(k, l)?;
        Ok(self.n.coeff(k, l))
    }

    /// `c_k0 = D b_k0 D` where `b_k0` are the coefficients of `K(z,0)^-1`.
    pub fn c_k0(&self, k: usize) -> Result<Matrix<Rational>> {
        self.check_index(k, 0)?;
        Ok(self.c_z.coeff(k, 0))
    }

    /// `c_0t`, from `K(0,w)^-1`.
    pub fn c_0t(&self, t: usize) -> Result<Matrix<Rational>> {
        self.check_index(0, t)?;
        Ok(self.c_w.coeff(0, t))
    }

    fn check_index(&self, k: usize, l: usize) -> Result<()> {
        if k > self.trunc() || l > self.trunc() {
            return Err(Error::IndexOutOfRange(format!("({k},{l}) beyond truncation {}", self.trunc())));
        }
        Ok(())
    }

    /// `D^{-1/2}` in floating point.
    fn d_inv_sqrt_f64(&self) -> Matrix<f64> {
        Matrix::diagonal(&self.d.diag().iter().map(|x| 1.0 / rational_to_f64(x).sqrt()).collect::<Vec<_>>())
    }

    /// The normalized coefficients in floating point.
    pub fn normalized_f64(&self) -> MatrixSeries<f64> {
        let s = self.d_inv_sqrt_f64();
        self.n.to_f64().sandwich(&s, &s)
    }

    pub fn normalized_coeff_f64(&self, k: usize, l: usize) -> Result<Matrix<f64>> {
        let s = self.d_inv_sqrt_f64();
        Ok(s.matmul(&self.n_coeff(k, l)?.to_f64()).matmul(&s))
    }

    /// The normalized coefficients exactly, when every entry of `D` is the
    /// square of a rational.
    pub fn normalized_exact(&self) -> Option<MatrixSeries<Rational>> {
        let roots: Option<Vec<Rational>> = self.d.diag().iter().map(rational_sqrt).collect();
        let s = Matrix::diagonal(&roots?.iter().map(|r| Rational::one() / r).collect::<Vec<_>>());
        Some(self.n.sandwich(&s, &s))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "D": self.d.to_json_rows(),
            "N": self.n.to_json(),
        })
    }
}

/// `N_kl` for the bidisc jet kernel, computed through order `trunc`.
pub fn symmetrized_normalized_coeff(spec: &KernelSpec, k: usize, l: usize, trunc: usize) -> Result<Matrix<Rational>> {
    if k > trunc || l > trunc {
        return Err(Error::IndexOutOfRange(format!("({k},{l}) beyond truncation {trunc}")));
    }
    NormalizedCoeffs::for_spec(spec, trunc)?.n_coeff(k, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::szego_power_series;
    use crate::scalar::{int, ratio};

    #[test]
    fn normalization_kills_pure_terms() {
        let nc = NormalizedCoeffs::for_spec(&KernelSpec::bidisc(ratio(3, 2), ratio(1, 2), 2).unwrap(), 5).unwrap();
        assert_eq!(nc.n_coeff(0, 0).unwrap(), *nc.d());
        for k in 1..=5 {
            assert!(nc.n_coeff(k, 0).unwrap().is_zero());
            assert!(nc.n_coeff(0, k).unwrap().is_zero());
        }
    }

    #[test]
    fn single_entry_for_order_one() {
        let n21 = symmetrized_normalized_coeff(&KernelSpec::bidisc(int(1), int(1), 1).unwrap(), 2, 1, 3).unwrap();
        assert_eq!(n21, Matrix::from_rows(vec![vec![int(0), int(-2)], vec![int(0), int(0)]]));
    }

    #[test]
    fn c_0t_is_transpose_of_c_t0() {
        let nc = NormalizedCoeffs::for_spec(&KernelSpec::bidisc(int(2), ratio(5, 3), 3).unwrap(), 4).unwrap();
        for t in 0..=4 {
            assert_eq!(nc.c_0t(t).unwrap(), nc.c_k0(t).unwrap().transpose());
        }
    }

    #[test]
    fn scalar_kernel_normalizes_to_itself() {
        // (1 - z wbar)^-r is already normalized.
        let nc = NormalizedCoeffs::from_series(szego_power_series(&ratio(5, 2), 4)).unwrap();
        assert_eq!(nc.n(), &szego_power_series(&ratio(5, 2), 4));
        assert_eq!(nc.normalized_exact().unwrap(), szego_power_series(&ratio(5, 2), 4));
    }

    #[test]
    fn float_and_exact_normalizations_agree() {
        let nc = NormalizedCoeffs::for_spec(&KernelSpec::bidisc(int(1), int(4), 2).unwrap(), 4).unwrap();
        // D = diag(1, 4, 40): 40 is not a square.
        assert!(nc.normalized_exact().is_none());
        let nc = NormalizedCoeffs::for_spec(&KernelSpec::bidisc(int(1), int(1), 1).unwrap(), 4).unwrap();
        let exact = nc.normalized_exact().unwrap().to_f64();
        assert!(exact.max_abs_diff(&nc.normalized_f64()) < 1e-12);
    }

    #[test]
    fn rejects_non_diagonal_constant_term() {
        let a = MatrixSeries::from_fn(2, 1, |_, _| Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(2)]]));
        assert!(NormalizedCoeffs::from_series(a).is_err());
    }
}

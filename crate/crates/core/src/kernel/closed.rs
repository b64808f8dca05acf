use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::Result;
use crate::matrix::Matrix;
use crate::scalar::{int, rational_to_f64, rational_to_string, ComplexRational, Rational, Scalar};
use crate::series::MatrixSeries;

use super::{szego_power_series, KernelSpec};

/// A kernel `P(z, wbar) * (1 - z wbar)^-exponent` with matrix polynomial `P`.
///
/// Keeping the scalar prefactor separate lets the polynomial part stay exact
/// for any rational exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormKernel {
    poly: MatrixSeries<Rational>,
    exponent: Rational,
}

impl ClosedFormKernel {
    pub fn new(poly: MatrixSeries<Rational>, exponent: Rational) -> Self {
        Self { poly, exponent }
    }

    pub fn poly(&self) -> &MatrixSeries<Rational> {
        &self.poly
    }

    pub fn exponent(&self) -> &Rational {
        &self.exponent
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn to_series(&self, trunc: usize) -> MatrixSeries<Rational> {
        let poly = MatrixSeries::from_fn(self.dim(), trunc, |m, p| self.poly.coeff(m, p));
        poly.scale_by_scalar_series(&szego_power_series(&self.exponent, trunc))
    }

    pub fn evaluate_poly(&self, z: &ComplexRational, w: &ComplexRational) -> Matrix<ComplexRational> {
        self.poly.map_entries(ComplexRational::from_rational).evaluate(z, &w.conj())
    }

    /// `(1 - z wbar)^-exponent`, exact only for integer exponents.
    pub fn prefactor_exact(&self, z: &ComplexRational, w: &ComplexRational) -> Option<ComplexRational> {
        if !self.exponent.is_integer() {
            return None;
        }
        let e = self.exponent.to_integer().to_i64()?;
        Some((ComplexRational::one() - z.clone() * w.conj()).powi(-e))
    }

    pub fn evaluate_exact(&self, z: &ComplexRational, w: &ComplexRational) -> Option<Matrix<ComplexRational>> {
        let s = self.prefactor_exact(z, w)?;
        Some(self.evaluate_poly(z, w).scale(&s))
    }

    pub fn evaluate_f64(&self, z: Complex64, w: Complex64) -> Matrix<Complex64> {
        let prefactor = (Complex64::new(1.0, 0.0) - z * w.conj()).powf(-rational_to_f64(&self.exponent));
        self.poly.map_entries(Complex64::from_rational).evaluate(&z, &w.conj()).scale(&prefactor)
    }

    pub fn to_json(&self) -> Value {
        json!({ "poly": self.poly.to_json(), "exponent": rational_to_string(&self.exponent) })
    }
}

/// The first-order jet of `(1-z1 w1bar)^-alpha (1-z2 w2bar)^-beta (1-z3 w3bar)^-gamma`
/// on the diagonal of the tridisc, rows/columns ordered (value, d/dz2, d/dz3).
pub fn tridisc_jet_closed_form(spec: &KernelSpec) -> Result<ClosedFormKernel> {
    let gamma = spec.require_tridisc()?.clone();
    let beta = spec.beta.clone();
    let mut poly: MatrixSeries<Rational> = MatrixSeries::zero(3, 2);
    let mut put = |m: usize, p: usize, i: usize, j: usize, v: Rational| {
        let mut c = poly.coeff(m, p);
        c[(i, j)] = c[(i, j)].clone() + v;
        poly.set(m, p, c);
    };
    // (1 - x)^2
    put(0, 0, 0, 0, int(1));
    put(1, 1, 0, 0, int(-2));
    put(2, 2, 0, 0, int(1));
    // beta z (1 - x), gamma z (1 - x) and their mirrors
    for (k, c) in [(1, &beta), (2, &gamma)] {
        put(1, 0, 0, k, c.clone());
        put(2, 1, 0, k, -c.clone());
        put(0, 1, k, 0, c.clone());
        put(1, 2, k, 0, -c.clone());
    }
    put(0, 0, 1, 1, beta.clone());
    put(1, 1, 1, 1, &beta * &beta);
    put(0, 0, 2, 2, gamma.clone());
    put(1, 1, 2, 2, &gamma * &gamma);
    put(1, 1, 1, 2, &beta * &gamma);
    put(1, 1, 2, 1, &beta * &gamma);
    let exponent = &spec.alpha + &beta + &gamma + int(2);
    Ok(ClosedFormKernel::new(poly, exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn tri() -> KernelSpec {
        KernelSpec::tridisc(int(1), int(9), int(16)).unwrap()
    }

    #[test]
    fn value_at_origin() {
        let g = tridisc_jet_closed_form(&tri()).unwrap();
        let zero = ComplexRational::zero();
        let expected = Matrix::diagonal(&[int(1), int(9), int(16)]).map(ComplexRational::from_rational);
        assert_eq!(g.evaluate_exact(&zero, &zero).unwrap(), expected);
    }

    #[test]
    fn hermitian_symmetry_at_rational_points() {
        let g = tridisc_jet_closed_form(&KernelSpec::tridisc(ratio(1, 2), ratio(2, 3), int(3)).unwrap()).unwrap();
        let z = ComplexRational::new(ratio(1, 3), ratio(1, 4));
        let w = ComplexRational::new(ratio(-2, 5), ratio(1, 6));
        assert_eq!(g.evaluate_poly(&z, &w).adjoint(), g.evaluate_poly(&w, &z));
    }

    #[test]
    fn fractional_exponent_has_no_exact_value() {
        let g = tridisc_jet_closed_form(&KernelSpec::tridisc(ratio(1, 2), int(1), int(1)).unwrap()).unwrap();
        let z = ComplexRational::real(ratio(1, 2));
        assert!(g.evaluate_exact(&z, &z).is_none());
        let f = g.evaluate_f64(z.to_complex64(), z.to_complex64());
        assert!((f[(0, 0)].re - 0.75f64.powi(2) * 0.75f64.powf(-4.5)).abs() < 1e-12);
    }
}

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::{jet_kernel_closed_form, KernelSpec};
use crate::matrix::Matrix;
use crate::scalar::{binomial, int, pochhammer, rational_to_f64, rational_to_string, ComplexRational, Rational, Scalar};

use super::{require_in_disc, MobiusElement};

/// Entrywise tolerance of numeric-mode checks, relative to the entry scale.
pub const NUMERIC_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// Principal-branch complex powers in f64.
    Numeric,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Numeric => "numeric",
        }
    }
}

/// A cocycle matrix in whichever arithmetic produced it.
#[derive(Clone, Debug, PartialEq)]
pub enum CMatrix {
    Exact(Matrix<ComplexRational>),
    Numeric(Matrix<Complex64>),
}

impl CMatrix {
    pub fn to_f64(&self) -> Matrix<Complex64> {
        match self {
            CMatrix::Exact(m) => m.map(ComplexRational::to_complex64),
            CMatrix::Numeric(m) => m.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CMatrix::Exact(m) => m.to_json_rows(),
            CMatrix::Numeric(m) => m.to_json_rows(),
        }
    }
}

/// `c(phi^-1, z)`, the derivative of the inverse of `g = phi` at `z`.
pub fn cocycle_c(g: &MobiusElement, z: &ComplexRational) -> Result<ComplexRational> {
    require_in_disc(z)?;
    Ok(g.invert().derivative(z))
}

/// `p(phi^-1, z) = conj(t a) / (1 + conj(t a) z)` for `g = phi_{t,a}`.
pub fn cocycle_p(g: &MobiusElement, z: &ComplexRational) -> Result<ComplexRational> {
    require_in_disc(z)?;
    let ta = (g.t().clone() * g.a().clone()).conj();
    Ok(ta.clone() / (ComplexRational::one() + ta * z.clone()))
}

pub fn cocycle_c_f64(g: &MobiusElement, z: Complex64) -> Complex64 {
    g.invert().derivative_f64(z)
}

pub fn cocycle_p_f64(g: &MobiusElement, z: Complex64) -> Complex64 {
    let ta = (g.t().to_complex64() * g.a().to_complex64()).conj();
    ta / (1.0 + ta * z)
}

fn base_exponent(spec: &KernelSpec) -> Result<Rational> {
    spec.require_bidisc()?;
    Ok(-(&spec.alpha + &spec.beta) / int(2) - int(spec.jet_order as i64))
}

fn integer_exponent(e: &Rational) -> Result<i64> {
    if !e.is_integer() {
        return Err(Error::NonIntegerExponent(rational_to_string(e)));
    }
    e.to_integer().to_i64().ok_or_else(|| Error::NonIntegerExponent(rational_to_string(e)))
}

/// `(beta)_j / (beta)_i * C(j, i)`.
fn jcoeff(beta: &Rational, i: usize, j: usize) -> Rational {
    pochhammer(beta, j) / pochhammer(beta, i) * binomial(j, i as i64)
}

/// The cocycle matrix `J_{phi^-1}(z)` for `g = phi`, exactly.
///
/// Entry `(i, j)`, `i <= j`, is `c^{e+n-j} (beta)_j/(beta)_i C(j,i) p^{j-i}`
/// with `e = -(alpha+beta)/2 - n`; zero below the diagonal.
pub fn jmatrix_exact(spec: &KernelSpec, g: &MobiusElement, z: &ComplexRational) -> Result<Matrix<ComplexRational>> {
    let e = integer_exponent(&base_exponent(spec)?)?;
    let n = spec.jet_order;
    let c = cocycle_c(g, z)?;
    let p = cocycle_p(g, z)?;
    Ok(Matrix::from_fn(n + 1, n + 1, |i, j| {
        if i > j {
            return ComplexRational::zero();
        }
        let cp = c.powi(e + n as i64 - j as i64);
        (cp * p.powi((j - i) as i64)).scale(&jcoeff(&spec.beta, i, j))
    }))
}

/// As [`jmatrix_exact`] with principal-branch powers of `c`.
pub fn jmatrix_numeric(spec: &KernelSpec, g: &MobiusElement, z: Complex64) -> Result<Matrix<Complex64>> {
    let e = rational_to_f64(&base_exponent(spec)?);
    let n = spec.jet_order;
    if z.norm() >= 1.0 {
        return Err(Error::OutsideDisc(format!("|z| = {}", z.norm())));
    }
    let c = cocycle_c_f64(g, z);
    let p = cocycle_p_f64(g, z);
    let ce = c.powf(e);
    Ok(Matrix::from_fn(n + 1, n + 1, |i, j| {
        if i > j {
            return Complex64::new(0.0, 0.0);
        }
        ce * c.powi((n - j) as i32) * p.powi((j - i) as i32) * rational_to_f64(&jcoeff(&spec.beta, i, j))
    }))
}

pub fn jmatrix(spec: &KernelSpec, g: &MobiusElement, z: &ComplexRational, mode: Mode) -> Result<CMatrix> {
    match mode {
        Mode::Exact => jmatrix_exact(spec, g, z).map(CMatrix::Exact),
        Mode::Numeric => jmatrix_numeric(spec, g, z.to_complex64()).map(CMatrix::Numeric),
    }
}

fn close(a: &Matrix<Complex64>, b: &Matrix<Complex64>) -> bool {
    a.max_abs_diff(b) <= NUMERIC_TOLERANCE * a.max_abs().max(b.max_abs()).max(1.0)
}

/// `J_{psi^-1}(z) J_{phi^-1}(psi^-1 z) = J_{phi^-1 psi^-1}(z)` for `g = phi`, `h = psi`.
pub fn verify_matrix_cocycle(spec: &KernelSpec, g: &MobiusElement, h: &MobiusElement, z: &ComplexRational, mode: Mode) -> Result<bool> {
    let hz = h.invert().apply(z)?;
    // phi^-1 psi^-1 = (psi phi)^-1
    let gh = h.compose(g)?;
    match mode {
        Mode::Exact => {
            let lhs = jmatrix_exact(spec, h, z)?.matmul(&jmatrix_exact(spec, g, &hz)?);
            Ok(lhs == jmatrix_exact(spec, &gh, z)?)
        }
        Mode::Numeric => {
            let zf = z.to_complex64();
            let lhs = jmatrix_numeric(spec, h, zf)?.matmul(&jmatrix_numeric(spec, g, h.invert().apply_f64(zf))?);
            Ok(close(&lhs, &jmatrix_numeric(spec, &gh, zf)?))
        }
    }
}

/// The same identity with the two factors on the left swapped.
pub fn verify_matrix_cocycle_reversed(spec: &KernelSpec, g: &MobiusElement, h: &MobiusElement, z: &ComplexRational) -> Result<bool> {
    let hz = h.invert().apply(z)?;
    let lhs = jmatrix_exact(spec, g, &hz)?.matmul(&jmatrix_exact(spec, h, z)?);
    Ok(lhs == jmatrix_exact(spec, &h.compose(g)?, z)?)
}

/// `h(phi^-1(0)) = conj(J(0))^t h(0) J(0)` with `h(z) = K(z, z)^t` the jet metric.
pub fn quasi_invariance_at_zero(spec: &KernelSpec, g: &MobiusElement, mode: Mode) -> Result<bool> {
    let kernel = jet_kernel_closed_form(spec)?;
    let zero = ComplexRational::zero();
    let w = g.invert().apply(&zero)?;
    match mode {
        Mode::Exact => {
            let j0 = jmatrix_exact(spec, g, &zero)?;
            let exact = |p: &ComplexRational| {
                kernel
                    .evaluate_exact(p, p)
                    .map(|m| m.transpose())
                    .ok_or_else(|| Error::NonIntegerExponent(rational_to_string(kernel.exponent())))
            };
            let lhs = exact(&w)?;
            let rhs = j0.adjoint().matmul(&exact(&zero)?).matmul(&j0);
            Ok(lhs == rhs)
        }
        Mode::Numeric => {
            let j0 = jmatrix_numeric(spec, g, Complex64::new(0.0, 0.0))?;
            let wf = w.to_complex64();
            let lhs = kernel.evaluate_f64(wf, wf).transpose();
            let h0 = kernel.evaluate_f64(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).transpose();
            Ok(close(&lhs, &j0.adjoint().matmul(&h0).matmul(&j0)))
        }
    }
}

/// `G(z,w) = Gamma(z) G(phi^-1 z, phi^-1 w) conj(Gamma(w))` for
/// `G = (1 - z wbar)^{-2e}` and `Gamma = ((phi^-1)')^e`.
pub fn scalar_cocycle_check(exponent: &Rational, g: &MobiusElement, z: &ComplexRational, w: &ComplexRational, mode: Mode) -> Result<bool> {
    let inv = g.invert();
    match mode {
        Mode::Exact => {
            let e = integer_exponent(exponent)?;
            let kernel = |x: &ComplexRational, y: &ComplexRational| (ComplexRational::one() - x.clone() * y.conj()).powi(-2 * e);
            let gamma = |x: &ComplexRational| cocycle_c(g, x).map(|c| c.powi(e));
            let lhs = kernel(z, w);
            let rhs = gamma(z)? * kernel(&inv.apply(z)?, &inv.apply(w)?) * gamma(w)?.conj();
            Ok(lhs == rhs)
        }
        Mode::Numeric => {
            let e = rational_to_f64(exponent);
            let (zf, wf) = (z.to_complex64(), w.to_complex64());
            let kernel = |x: Complex64, y: Complex64| (1.0 - x * y.conj()).powf(-2.0 * e);
            let gamma = |x: Complex64| cocycle_c_f64(g, x).powf(e);
            let lhs = kernel(zf, wf);
            let rhs = gamma(zf) * kernel(inv.apply_f64(zf), inv.apply_f64(wf)) * gamma(wf).conj();
            Ok((lhs - rhs).norm() <= NUMERIC_TOLERANCE * lhs.norm().max(1.0))
        }
    }
}

pub(crate) fn describe(spec: &KernelSpec, g: &MobiusElement, h: Option<&MobiusElement>, z: &ComplexRational) -> Value {
    let mut v = json!({ "spec": spec.to_json(), "g": g.to_json(), "z": z.to_json() });
    if let Some(h) = h {
        v["h"] = h.to_json();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{random_element, random_point};
    use crate::scalar::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bidisc(a: Rational, b: Rational, n: usize) -> KernelSpec {
        KernelSpec::bidisc(a, b, n).unwrap()
    }

    fn half() -> MobiusElement {
        MobiusElement::new(ComplexRational::one(), ComplexRational::real(ratio(1, 2))).unwrap()
    }

    #[test]
    fn identity_element_cocycles() {
        let id = MobiusElement::identity();
        let z = ComplexRational::new(ratio(1, 3), ratio(-1, 4));
        assert_eq!(cocycle_c(&id, &z).unwrap(), ComplexRational::one());
        assert_eq!(cocycle_p(&id, &z).unwrap(), ComplexRational::zero());
        let spec = bidisc(int(1), int(1), 3);
        assert_eq!(jmatrix_exact(&spec, &id, &z).unwrap(), Matrix::identity(4));
    }

    #[test]
    fn documented_entry() {
        let spec = bidisc(int(1), int(1), 1);
        let j = jmatrix_exact(&spec, &half(), &ComplexRational::zero()).unwrap();
        assert_eq!(j[(0, 0)], ComplexRational::real(ratio(4, 3)));
        assert_eq!(j[(1, 0)], ComplexRational::zero());
    }

    #[test]
    fn fractional_exponent_needs_numeric_mode() {
        let spec = bidisc(int(1), ratio(1, 2), 1);
        let err = jmatrix(&spec, &half(), &ComplexRational::zero(), Mode::Exact).unwrap_err();
        assert!(matches!(err, Error::NonIntegerExponent(_)));
        assert!(jmatrix(&spec, &half(), &ComplexRational::zero(), Mode::Numeric).is_ok());
    }

    #[test]
    fn p_is_half_log_derivative_of_c() {
        // p(phi^-1, z) = -(1/2) (phi^-1)'' / (phi^-1)'
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let g = random_element(&mut rng);
            let z = random_point(&mut rng).to_complex64();
            let h = 1e-5;
            let d2 = (cocycle_c_f64(&g, z + h) - cocycle_c_f64(&g, z - h)) / (2.0 * h);
            let expected = -0.5 * d2 / cocycle_c_f64(&g, z);
            assert!((expected - cocycle_p_f64(&g, z)).norm() < 1e-8);
        }
    }

    #[test]
    fn chain_rules_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..40 {
            let (g, h) = (random_element(&mut rng), random_element(&mut rng));
            let z = random_point(&mut rng);
            let hz = h.invert().apply(&z).unwrap();
            let gh = h.compose(&g).unwrap();
            let c_h = cocycle_c(&h, &z).unwrap();
            assert_eq!(cocycle_c(&g, &hz).unwrap() * c_h.clone(), cocycle_c(&gh, &z).unwrap());
            assert_eq!(cocycle_p(&g, &hz).unwrap() * c_h + cocycle_p(&h, &z).unwrap(), cocycle_p(&gh, &z).unwrap());
        }
    }

    #[test]
    fn matrix_cocycle_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = bidisc(int(1), int(1), 2);
        for _ in 0..50 {
            let (g, h) = (random_element(&mut rng), random_element(&mut rng));
            let z = random_point(&mut rng);
            assert!(verify_matrix_cocycle(&spec, &g, &h, &z, Mode::Exact).unwrap());
        }
        let id = MobiusElement::identity();
        let g = random_element(&mut rng);
        assert!(verify_matrix_cocycle(&spec, &g, &id, &ComplexRational::zero(), Mode::Exact).unwrap());
    }

    #[test]
    fn product_order_is_visible() {
        // The swapped product fails for generic non-commuting pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let spec = bidisc(int(1), int(1), 2);
        let mut failures = 0;
        for _ in 0..10 {
            let (g, h) = (random_element(&mut rng), random_element(&mut rng));
            let z = random_point(&mut rng);
            if !verify_matrix_cocycle_reversed(&spec, &g, &h, &z).unwrap() {
                failures += 1;
            }
        }
        assert!(failures > 0);
    }

    #[test]
    fn matrix_cocycle_numeric_fractional() {
        let spec = bidisc(int(1), ratio(1, 2), 1);
        let g = MobiusElement::from_slope(&ratio(1, 10), ComplexRational::new(ratio(1, 10), ratio(1, 20))).unwrap();
        let h = MobiusElement::from_slope(&ratio(-1, 8), ComplexRational::new(ratio(-1, 10), ratio(1, 10))).unwrap();
        let z = ComplexRational::new(ratio(1, 5), ratio(1, 10));
        assert!(verify_matrix_cocycle(&spec, &g, &h, &z, Mode::Numeric).unwrap());
    }

    #[test]
    fn quasi_invariance_examples() {
        assert!(quasi_invariance_at_zero(&bidisc(int(1), int(1), 1), &half(), Mode::Exact).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let spec = bidisc(int(1), int(3), 2);
        for _ in 0..5 {
            assert!(quasi_invariance_at_zero(&spec, &random_element(&mut rng), Mode::Exact).unwrap());
        }
        assert!(quasi_invariance_at_zero(&spec, &MobiusElement::identity(), Mode::Exact).unwrap());
        assert!(quasi_invariance_at_zero(&bidisc(int(1), ratio(1, 2), 2), &half(), Mode::Numeric).unwrap());
    }

    #[test]
    fn quasi_invariance_detects_wrong_beta() {
        // A cocycle built for another beta does not intertwine the metric.
        let spec = bidisc(int(1), int(3), 2);
        let wrong = bidisc(int(2), int(2), 2);
        let g = half();
        let kernel = jet_kernel_closed_form(&spec).unwrap();
        let zero = ComplexRational::zero();
        let w = g.invert().apply(&zero).unwrap();
        let j0 = jmatrix_exact(&wrong, &g, &zero).unwrap();
        let lhs = kernel.evaluate_exact(&w, &w).unwrap().transpose();
        let rhs = j0.adjoint().matmul(&kernel.evaluate_exact(&zero, &zero).unwrap().transpose()).matmul(&j0);
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn scalar_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10 {
            let g = random_element(&mut rng);
            let (z, w) = (random_point(&mut rng), random_point(&mut rng));
            assert!(scalar_cocycle_check(&int(14), &g, &z, &w, Mode::Exact).unwrap());
        }
        let g = MobiusElement::from_slope(&ratio(1, 9), ComplexRational::real(ratio(1, 10))).unwrap();
        let (z, w) = (ComplexRational::real(ratio(1, 5)), ComplexRational::new(ratio(0, 1), ratio(1, 6)));
        assert!(scalar_cocycle_check(&(ratio(3, 4) + int(1)), &g, &z, &w, Mode::Numeric).unwrap());
        assert!(scalar_cocycle_check(&int(3), &MobiusElement::identity(), &z, &w, Mode::Exact).unwrap());
    }
}

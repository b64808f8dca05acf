//! The quotient module of functions modulo those vanishing to second order on
//! the diagonal of the bidisc: images of its orthonormal basis under the jet
//! map, the 2×2 blocks of the weighted shifts `M_1`, `M_2`, and the kernel
//! rebuilt from the basis.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::{jet_kernel_closed_form, KernelSpec};
use crate::matrix::Matrix;
use crate::scalar::{int, rational_to_f64, rational_to_string, Rational, Scalar};

/// `|C(-x, p)|^{1/2} = ((x)_p / p!)^{1/2}`, zero for negative `p`.
fn root_binomial(x: &Rational, p: i64) -> f64 {
    if p < 0 {
        return 0.0;
    }
    let x = rational_to_f64(x);
    (0..p).map(|k| (x + k as f64) / (k + 1) as f64).product::<f64>().sqrt()
}

/// `coefficient * z^power`; `power` is meaningless when the coefficient is 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub coefficient: f64,
    pub power: i64,
}

impl Monomial {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if self.coefficient == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        z.powi(self.power as i32) * self.coefficient
    }

    fn coefficient_at(&self, power: i64) -> f64 {
        if self.power == power {
            self.coefficient
        } else {
            0.0
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "coefficient": self.coefficient, "power": self.power })
    }
}

/// Which basis vector or shift: 1 or 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    First,
    Second,
}

impl Which {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Which::First),
            2 => Ok(Which::Second),
            _ => Err(Error::Constraint(format!("which must be 1 or 2, got {i}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Which::First => 1,
            Which::Second => 2,
        }
    }
}

/// Jet image `(h, d/dz2 h)` on the diagonal of the basis vector `e_p^(which)`.
pub fn onb_image(alpha: &Rational, beta: &Rational, p: usize, which: Which) -> [Monomial; 2] {
    let s = alpha + beta;
    let (sf, bf, af) = (rational_to_f64(&s), rational_to_f64(beta), rational_to_f64(alpha));
    let p = p as i64;
    match which {
        Which::First => [
            Monomial { coefficient: root_binomial(&s, p), power: p },
            Monomial { coefficient: bf * (p as f64 / sf).sqrt() * root_binomial(&(&s + int(1)), p - 1), power: p - 1 },
        ],
        Which::Second => [
            Monomial { coefficient: 0.0, power: p },
            Monomial { coefficient: (af * bf / sf).sqrt() * root_binomial(&(&s + int(2)), p - 1), power: p - 1 },
        ],
    }
}

/// `sum_{p < terms} e_p(z) e_p(w)^*` over both families.
pub fn kq_partial_sum(alpha: &Rational, beta: &Rational, terms: usize, z: Complex64, w: Complex64) -> Matrix<Complex64> {
    let mut k = Matrix::zeros(2, 2);
    for p in 0..terms {
        for which in [Which::First, Which::Second] {
            let e = onb_image(alpha, beta, p, which);
            let ez = [e[0].eval(z), e[1].eval(z)];
            let ew = [e[0].eval(w), e[1].eval(w)];
            k.add_assign(&Matrix::from_fn(2, 2, |i, j| ez[i] * ew[j].conj()));
        }
    }
    k
}

/// Comparison of the basis sum with the closed-form jet kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct WilkinsReport {
    pub alpha: Rational,
    pub beta: Rational,
    pub terms: usize,
    pub z: Complex64,
    pub w: Complex64,
    pub partial_sum: Matrix<Complex64>,
    pub closed_form: Matrix<Complex64>,
    pub max_error: f64,
    /// Least-squares `c` with `partial_sum ≈ c · closed_form`.
    pub scale: f64,
}

impl WilkinsReport {
    pub fn build(alpha: &Rational, beta: &Rational, terms: usize, z: Complex64, w: Complex64) -> Result<Self> {
        if z.norm() >= 1.0 || w.norm() >= 1.0 {
            return Err(Error::OutsideDisc(format!("|z| = {}, |w| = {}", z.norm(), w.norm())));
        }
        let spec = KernelSpec::bidisc(alpha.clone(), beta.clone(), 1)?;
        let closed_form = jet_kernel_closed_form(&spec)?.evaluate_f64(z, w);
        let partial_sum = kq_partial_sum(alpha, beta, terms, z, w);
        let num: Complex64 = partial_sum.data().iter().zip(closed_form.data()).map(|(a, b)| a * b.conj()).sum();
        let den: f64 = closed_form.data().iter().map(|b| b.norm_sqr()).sum();
        Ok(Self {
            alpha: alpha.clone(),
            beta: beta.clone(),
            terms,
            z,
            w,
            max_error: partial_sum.max_abs_diff(&closed_form),
            scale: num.re / den,
            partial_sum,
            closed_form,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "alpha": rational_to_string(&self.alpha),
            "beta": rational_to_string(&self.beta),
            "terms": self.terms,
            "z": self.z.to_json(),
            "w": self.w.to_json(),
            "partial_sum": self.partial_sum.to_json_rows(),
            "closed_form": self.closed_form.to_json_rows(),
            "max_error": self.max_error,
            "scale": self.scale,
        })
    }
}

/// The 2×2 block of `M_1` (`which = First`) or `M_2` mapping
/// `(e_p^(1), e_p^(2))` to `(e_{p+1}^(1), e_{p+1}^(2))`, columns indexed by
/// the source vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftBlock {
    pub p: usize,
    pub which: Which,
    pub matrix: Matrix<f64>,
}

impl ShiftBlock {
    pub fn to_json(&self) -> Value {
        json!({ "p": self.p, "which": self.which.index(), "matrix": self.matrix.to_json_rows() })
    }
}

pub fn shift_block(alpha: &Rational, beta: &Rational, p: usize, which: Which) -> ShiftBlock {
    let s = alpha + beta;
    let (sf, af, bf) = (rational_to_f64(&s), rational_to_f64(alpha), rational_to_f64(beta));
    let pi = p as i64;
    let s2 = &s + int(2);
    let top = root_binomial(&s, pi) / root_binomial(&s, pi + 1);
    let bottom = if p == 0 { 0.0 } else { root_binomial(&s2, pi - 1) / root_binomial(&s2, pi) };
    let ratio = match which {
        Which::First => (bf / af).sqrt(),
        Which::Second => -(af / bf).sqrt(),
    };
    let pf = p as f64;
    let sub = ratio * (sf + 1.0).sqrt() / ((sf + pf) * (sf + pf + 1.0)).sqrt();
    ShiftBlock { p, which, matrix: Matrix::from_rows(vec![vec![top, 0.0], vec![sub, bottom]]) }
}

/// The same block recomputed from the basis images: multiplication by `z1`
/// acts on jets as `(h, h') -> (z h, z h')`, by `z2` as `(h, h') -> (z h, h + z h')`.
///
/// The result agrees with [`shift_block`] after conjugation by `diag(1, -1)`:
/// the displayed blocks use `-e_p^(2)` relative to [`onb_image`].
pub fn shift_block_from_images(alpha: &Rational, beta: &Rational, p: usize, which: Which) -> ShiftBlock {
    let e1 = onb_image(alpha, beta, p, Which::First);
    let e2 = onb_image(alpha, beta, p, Which::Second);
    let f1 = onb_image(alpha, beta, p + 1, Which::First);
    let f2 = onb_image(alpha, beta, p + 1, Which::Second);
    let pi = p as i64;
    let top = e1[0].coefficient_at(pi) / f1[0].coefficient_at(pi + 1);
    // Coefficient of z^p in the second component of the image of e_p^(1).
    let mut second = e1[1].coefficient_at(pi - 1);
    if which == Which::Second {
        second += e1[0].coefficient_at(pi);
    }
    let sub = (second - top * f1[1].coefficient_at(pi)) / f2[1].coefficient_at(pi);
    let bottom = e2[1].coefficient_at(pi - 1) / f2[1].coefficient_at(pi);
    ShiftBlock { p, which, matrix: Matrix::from_rows(vec![vec![top, 0.0], vec![sub, bottom]]) }
}

/// `Q_1 = (M_1 - M_2)/2` and `Q_2 = (M_1 + M_2)/2` at block `p`.
pub fn q_blocks(alpha: &Rational, beta: &Rational, p: usize) -> (Matrix<f64>, Matrix<f64>) {
    let m1 = shift_block(alpha, beta, p, Which::First).matrix;
    let m2 = shift_block(alpha, beta, p, Which::Second).matrix;
    (m1.sub(&m2).scale(&0.5), m1.add(&m2).scale(&0.5))
}

/// `Q_1^2 = 0` within `1e-12`, and `Q_2` diagonal when `alpha = beta`.
pub fn nilpotency_check(alpha: &Rational, beta: &Rational, p: usize) -> bool {
    let (q1, q2) = q_blocks(alpha, beta, p);
    let nilpotent = q1.matmul(&q1).max_abs() < 1e-12;
    let diagonal = alpha != beta || q2[(0, 1)].abs() < 1e-12 && q2[(1, 0)].abs() < 1e-12;
    nilpotent && diagonal
}

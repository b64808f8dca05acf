//! Curvature `dbar(h^-1 dh)` of the metric `h(z) = K(z, z)^t`.

use num_complex::Complex64;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::{jet_kernel_series, KernelSpec};
use crate::matrix::Matrix;
use crate::normalize::NormalizedCoeffs;
use crate::scalar::{factorial, int, pochhammer, rational_to_f64, rational_to_string, Rational};
use crate::series::MatrixSeries;

/// Largest `|z|` at which series evaluation is allowed.
pub const RADIUS_CAP: f64 = 0.5;

/// Curvature at the origin, `D^-1 N_11`, after checking `N_11` is diagonal.
pub fn curvature_at_zero(spec: &KernelSpec) -> Result<Matrix<Rational>> {
    let nc = NormalizedCoeffs::for_spec(spec, 1)?;
    let n11 = nc.n_coeff(1, 1)?;
    if !n11.is_diagonal() {
        return Err(Error::Constraint(format!("N_11 is not diagonal: {}", n11.to_json_rows())));
    }
    let vals: Vec<Rational> = n11.diag().iter().zip(nc.d().diag()).map(|(x, d)| x / d).collect();
    Ok(Matrix::diagonal(&vals))
}

/// `diag(alpha, ..., alpha, alpha + (n+1)(beta+n))`.
pub fn curvature_at_zero_closed_form(spec: &KernelSpec) -> Result<Matrix<Rational>> {
    spec.require_bidisc()?;
    let n = spec.jet_order;
    let last = &spec.alpha + int(n as i64 + 1) * (&spec.beta + int(n as i64));
    let mut vals = vec![spec.alpha.clone(); n];
    vals.push(if n == 0 { &spec.alpha + &spec.beta } else { last });
    Ok(Matrix::diagonal(&vals))
}

/// Diagonal of `a_11 + c_10 a_00^-1 a_01`, the partial sum inside `N_11`.
pub fn intermediate_diagonal(spec: &KernelSpec) -> Result<Vec<Rational>> {
    let nc = NormalizedCoeffs::for_spec(spec, 1)?;
    let a = nc.a();
    let dinv = Matrix::diagonal(&nc.d().diag().iter().map(|x| x.recip()).collect::<Vec<_>>());
    let m = a.coeff(1, 1).add(&nc.c_k0(1)?.matmul(&dinv).matmul(&a.coeff(0, 1)));
    Ok(m.diag())
}

/// The values the intermediate diagonal takes: `alpha r! (beta)_r` for
/// `r < n` and `n! (beta)_n (alpha + (n+1)(beta+n))` in the corner.
pub fn intermediate_diagonal_expected(spec: &KernelSpec) -> Vec<Rational> {
    let n = spec.jet_order;
    let corner = &spec.alpha + int(n as i64 + 1) * (&spec.beta + int(n as i64));
    (0..=n)
        .map(|r| {
            let d = factorial(r) * pochhammer(&spec.beta, r);
            if r < n { &spec.alpha * d } else { d * &corner }
        })
        .collect()
}

/// The pair `(alpha, alpha + (n+1)(beta+n))` read off the curvature at 0.
pub fn invariant_pair(spec: &KernelSpec) -> Result<(Rational, Rational)> {
    if spec.jet_order == 0 {
        return Err(Error::Constraint("invariant pair needs jet order >= 1".into()));
    }
    let k = curvature_at_zero(spec)?;
    let d = k.diag();
    Ok((d[0].clone(), d[d.len() - 1].clone()))
}

/// Unitary equivalence of the two multiplication tuples, decided by the
/// invariant pair.
pub fn equivalence_test(a: &KernelSpec, b: &KernelSpec) -> Result<bool> {
    if a.jet_order != b.jet_order {
        return Err(Error::JetOrderMismatch(a.jet_order, b.jet_order));
    }
    Ok(invariant_pair(a)? == invariant_pair(b)?)
}

/// Which metric the series curvature is computed for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    /// `h(z) = K(z, z)^t` for the jet kernel itself.
    Jet,
    /// The same for the normalized kernel.
    Normalized,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Jet => "jet",
            Self::Normalized => "normalized",
        }
    }
}

/// Truncated expansions in `z`, `zbar` of `h^-1 dh` and of the curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSeries {
    pub kind: MetricKind,
    /// Coefficients of `h^-1 dh`.
    pub connection: MatrixSeries<f64>,
    /// Coefficients of `dbar(h^-1 dh)`.
    pub curvature: MatrixSeries<f64>,
}

/// Value of a truncated series together with the size of its outermost shell.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Matrix<Complex64>,
    pub tail: f64,
}

fn evaluate_with_tail(s: &MatrixSeries<f64>, z: Complex64) -> Result<SeriesValue> {
    if z.norm() > RADIUS_CAP {
        return Err(Error::RadiusTooLarge { radius: z.norm(), cap: RADIUS_CAP });
    }
    let t = s.trunc();
    let cs = s.map_entries(|x| Complex64::new(*x, 0.0));
    let value = cs.evaluate(&z, &z.conj());
    let r = z.norm();
    let tail = s
        .iter()
        .filter(|(m, p, _)| (*m).max(*p) == t)
        .map(|(m, p, c)| c.max_abs() * r.powi((m + p) as i32))
        .sum();
    Ok(SeriesValue { value, tail })
}

impl CurvatureSeries {
    pub fn evaluate_at(&self, z: Complex64) -> Result<SeriesValue> {
        evaluate_with_tail(&self.curvature, z)
    }

    pub fn connection_at(&self, z: Complex64) -> Result<SeriesValue> {
        evaluate_with_tail(&self.connection, z)
    }
}

/// Builds the curvature of `h(z) = sum h_mp z^m zbar^p` from the metric coefficients.
pub fn curvature_from_metric(h: &MatrixSeries<f64>, kind: MetricKind) -> Result<CurvatureSeries> {
    let t = h.trunc();
    if t < 2 {
        return Err(Error::Constraint("curvature series needs truncation >= 2".into()));
    }
    let d = h.dim();
    let dh = MatrixSeries::from_fn(d, t - 1, |m, p| h.coeff(m + 1, p).scale(&((m + 1) as f64)));
    let connection = h.truncate(t - 1).invert()?.multiply(&dh)?;
    let curvature = MatrixSeries::from_fn(d, t - 2, |m, p| connection.coeff(m, p + 1).scale(&((p + 1) as f64)));
    Ok(CurvatureSeries { kind, connection, curvature })
}

/// Curvature series of the jet kernel metric, built from coefficients up to `trunc`.
pub fn curvature_series(spec: &KernelSpec, trunc: usize, kind: MetricKind) -> Result<CurvatureSeries> {
    if trunc < 2 {
        return Err(Error::Constraint("curvature series needs truncation >= 2".into()));
    }
    let coeffs = match kind {
        MetricKind::Jet => jet_kernel_series(spec, trunc)?.to_f64(),
        MetricKind::Normalized => NormalizedCoeffs::for_spec(spec, trunc)?.normalized_f64(),
    };
    curvature_from_metric(&coeffs.map(Matrix::transpose), kind)
}

fn disc_check(z: Complex64) -> Result<f64> {
    let x = z.norm_sqr();
    if x >= 1.0 {
        return Err(Error::OutsideDisc(format!("|z| = {} >= 1", z.norm())));
    }
    Ok(1.0 - x)
}

/// `[[alpha, -2 beta (beta+1) zbar / (1-|z|^2)], [0, alpha + 2 beta + 2]] (1-|z|^2)^-2`,
/// the curvature of the order-one jet metric.
pub fn jet2_curvature_closed_form(alpha: f64, beta: f64, z: Complex64) -> Result<Matrix<Complex64>> {
    let q = disc_check(z)?;
    let s = 1.0 / (q * q);
    let c = |x: f64| Complex64::new(x, 0.0);
    Ok(Matrix::from_rows(vec![
        vec![c(alpha * s), -2.0 * beta * (beta + 1.0) / q * z.conj() * s],
        vec![c(0.0), c((alpha + 2.0 * beta + 2.0) * s)],
    ]))
}

/// Largest residual `|K v - lambda v|` over the two stated eigenpairs
/// `(1, 0)` and `(-beta zbar, 1 - |z|^2)`.
pub fn jet2_eigenvector_residual(alpha: f64, beta: f64, z: Complex64) -> Result<f64> {
    let k = jet2_curvature_closed_form(alpha, beta, z)?;
    let q = disc_check(z)?;
    let s = 1.0 / (q * q);
    let pairs = [
        ([Complex64::new(1.0, 0.0), Complex64::zero()], alpha * s),
        ([-beta * z.conj(), Complex64::new(q, 0.0)], (alpha + 2.0 * beta + 2.0) * s),
    ];
    let mut worst = 0.0f64;
    for (v, lam) in pairs {
        for i in 0..2 {
            let kv = k[(i, 0)] * v[0] + k[(i, 1)] * v[1];
            worst = worst.max((kv - lam * v[i]).norm());
        }
    }
    Ok(worst)
}

/// Curvature of `(1 - |z1|^2)^-alpha (1 - |z2|^2)^-beta` in the coordinates
/// `u1 = (z1+z2)/2`, `u2 = (z1-z2)/2`.
pub fn rotated_curvature(alpha: f64, beta: f64, u1: Complex64, u2: Complex64) -> Result<Matrix<f64>> {
    let q1 = disc_check(u1 + u2)?;
    let q2 = disc_check(u1 - u2)?;
    let (a, b) = (alpha / (q1 * q1), beta / (q2 * q2));
    Ok(Matrix::from_rows(vec![vec![a + b, a - b], vec![a - b, a + b]]))
}

/// The rotated curvature on `u2 = 0`: `(1-|u1|^2)^-2 [[a+b, a-b], [a-b, a+b]]`.
pub fn rotated_curvature_restriction(alpha: f64, beta: f64, u1: Complex64) -> Result<Matrix<f64>> {
    let q = disc_check(u1)?;
    let s = 1.0 / (q * q);
    Ok(Matrix::from_rows(vec![
        vec![(alpha + beta) * s, (alpha - beta) * s],
        vec![(alpha - beta) * s, (alpha + beta) * s],
    ]))
}

/// Curvature at the origin together with sampled series values.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub spec: KernelSpec,
    pub at_zero: Matrix<Rational>,
    pub invariant_pair: Option<(Rational, Rational)>,
    pub trunc: usize,
    pub samples: Vec<(Complex64, SeriesValue)>,
}

impl CurvatureReport {
    pub fn build(spec: &KernelSpec, trunc: usize, points: &[Complex64]) -> Result<Self> {
        let at_zero = curvature_at_zero(spec)?;
        let invariant_pair = if spec.jet_order >= 1 { Some(invariant_pair(spec)?) } else { None };
        let series = curvature_series(spec, trunc, MetricKind::Jet)?;
        let samples = points.iter().map(|&z| Ok((z, series.evaluate_at(z)?))).collect::<Result<Vec<_>>>()?;
        Ok(Self { spec: spec.clone(), at_zero, invariant_pair, trunc, samples })
    }

    pub fn to_json(&self) -> Value {
        let cjson = |c: &Complex64| json!([c.re, c.im]);
        json!({
            "spec": self.spec.to_json(),
            "at_zero": self.at_zero.diag().iter().map(rational_to_string).collect::<Vec<_>>(),
            "invariant_pair": self.invariant_pair.as_ref().map(|(a, b)| vec![rational_to_string(a), rational_to_string(b)]),
            "metric": MetricKind::Jet.as_str(),
            "trunc": self.trunc,
            "samples": self.samples.iter().map(|(z, s)| json!({
                "z": cjson(z),
                "value": (0..s.value.rows()).map(|i| (0..s.value.cols()).map(|j| cjson(&s.value[(i, j)])).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "tail_estimate": s.tail,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Float form of an exact diagonal, for comparisons with series values.
pub fn to_complex_matrix(m: &Matrix<Rational>) -> Matrix<Complex64> {
    m.map(|q| Complex64::new(rational_to_f64(q), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn documented_values_at_zero() {
        let k = curvature_at_zero(&KernelSpec::bidisc(int(1), int(1), 1).unwrap()).unwrap();
        assert_eq!(k, Matrix::diagonal(&[int(1), int(5)]));
        let k = curvature_at_zero(&KernelSpec::bidisc(ratio(1, 2), ratio(3, 2), 2).unwrap()).unwrap();
        assert_eq!(k, Matrix::diagonal(&[ratio(1, 2), ratio(1, 2), int(11)]));
        let k = curvature_at_zero(&KernelSpec::bidisc(ratio(1, 3), ratio(5, 4), 0).unwrap()).unwrap();
        assert_eq!(k, Matrix::diagonal(&[ratio(19, 12)]));
    }

    #[test]
    fn intermediate_diagonal_value() {
        for (a, b, n) in [(int(1), int(1), 2), (ratio(1, 2), ratio(3, 2), 3), (int(2), ratio(1, 2), 1)] {
            let spec = KernelSpec::bidisc(a, b, n).unwrap();
            assert_eq!(intermediate_diagonal(&spec).unwrap(), intermediate_diagonal_expected(&spec));
        }
    }

    #[test]
    fn equivalence() {
        let s = |a: i64, b: i64, n| KernelSpec::bidisc(int(a), int(b), n).unwrap();
        assert!(equivalence_test(&s(1, 1, 2), &s(1, 1, 2)).unwrap());
        assert!(!equivalence_test(&s(1, 1, 1), &s(1, 2, 1)).unwrap());
        assert!(!equivalence_test(&s(1, 2, 1), &s(2, 1, 1)).unwrap());
        assert_eq!(invariant_pair(&s(1, 2, 1)).unwrap(), (int(1), int(7)));
        assert_eq!(invariant_pair(&s(2, 1, 1)).unwrap(), (int(2), int(6)));
        assert!(matches!(equivalence_test(&s(1, 1, 1), &s(1, 1, 2)), Err(Error::JetOrderMismatch(1, 2))));
    }

    #[test]
    fn series_at_origin() {
        for kind in [MetricKind::Jet, MetricKind::Normalized] {
            let spec = KernelSpec::bidisc(ratio(3, 2), ratio(1, 2), 2).unwrap();
            let v = curvature_series(&spec, 6, kind).unwrap().evaluate_at(Complex64::zero()).unwrap();
            let exact = to_complex_matrix(&curvature_at_zero(&spec).unwrap());
            assert!(v.value.max_abs_diff(&exact) < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn normalized_series_at_origin_is_transposed_coefficient() {
        let spec = KernelSpec::bidisc(int(2), ratio(3, 2), 2).unwrap();
        let series = curvature_series(&spec, 4, MetricKind::Normalized).unwrap();
        let a11 = NormalizedCoeffs::for_spec(&spec, 4).unwrap().normalized_coeff_f64(1, 1).unwrap();
        assert!(series.curvature.coeff(0, 0).max_abs_diff(&a11.transpose()) < 1e-12);
    }

    #[test]
    fn scalar_curvature() {
        let spec = KernelSpec::bidisc(int(1), int(1), 0).unwrap();
        let v = curvature_series(&spec, 20, MetricKind::Jet).unwrap().evaluate_at(c(0.3, 0.0)).unwrap();
        assert!((v.value[(0, 0)].re - 2.0 / (0.91f64 * 0.91)).abs() < 1e-8);
        assert!(v.tail < 1e-8);
    }

    #[test]
    fn jet_series_matches_closed_form() {
        for z in [c(0.2, 0.0), c(0.3, 0.2), c(0.0, -0.35)] {
            for (a, b) in [(1.0, 1.0), (0.5, 1.5), (2.0, 0.5)] {
                let spec = KernelSpec::bidisc(Rational::from_float(a).unwrap(), Rational::from_float(b).unwrap(), 1).unwrap();
                let v = curvature_series(&spec, 20, MetricKind::Jet).unwrap().evaluate_at(z).unwrap();
                let closed = jet2_curvature_closed_form(a, b, z).unwrap();
                assert!(v.value.max_abs_diff(&closed) < 1e-8, "z={z} a={a} b={b}");
            }
        }
    }

    #[test]
    fn radius_cap() {
        let s = curvature_series(&KernelSpec::bidisc(int(1), int(1), 1).unwrap(), 6, MetricKind::Jet).unwrap();
        assert!(matches!(s.evaluate_at(c(0.6, 0.0)), Err(Error::RadiusTooLarge { .. })));
    }

    #[test]
    fn closed_form_values() {
        let k = jet2_curvature_closed_form(1.0, 1.0, c(0.5, 0.0)).unwrap();
        assert!((k[(0, 1)].re + 4.0 / 0.75 * 0.5 / (0.75 * 0.75)).abs() < 1e-12);
        assert!((k[(0, 1)].re + 4.7407407407407).abs() < 1e-10);
        let k0 = jet2_curvature_closed_form(1.5, 2.0, Complex64::zero()).unwrap();
        assert_eq!(k0[(0, 0)].re, 1.5);
        assert_eq!(k0[(1, 1)].re, 7.5);
        assert!(jet2_eigenvector_residual(2.0, 0.5, c(0.3, 0.2)).unwrap() < 1e-12);
        assert!(jet2_curvature_closed_form(1.0, 1.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn finite_difference_of_connection() {
        let h = 1e-4;
        for n in 0..=2 {
            let spec = KernelSpec::bidisc(ratio(3, 2), int(1), n).unwrap();
            for kind in [MetricKind::Jet, MetricKind::Normalized] {
                let s = curvature_series(&spec, 24, kind).unwrap();
                for z in [c(0.1, 0.2), c(-0.3, 0.1), c(0.4, 0.0)] {
                    let x = |w: Complex64| s.connection_at(w).unwrap().value;
                    // Five-point central stencil with step h.
                    let central = |e: Complex64| {
                        let (p1, m1, p2, m2) = (x(z + e * h), x(z - e * h), x(z + e * 2.0 * h), x(z - e * 2.0 * h));
                        p1.sub(&m1).scale(&c(8.0, 0.0)).sub(&p2.sub(&m2)).scale(&c(1.0 / (12.0 * h), 0.0))
                    };
                    let (dx, dy) = (central(c(1.0, 0.0)), central(c(0.0, 1.0)));
                    // dbar = (d/dx + i d/dy) / 2
                    let fd = dx.add(&dy.scale(&c(0.0, 1.0))).scale(&c(0.5, 0.0));
                    let series = s.evaluate_at(z).unwrap().value;
                    assert!(fd.max_abs_diff(&series) < 1e-6, "n={n} {kind:?} z={z} diff={} tail={}", fd.max_abs_diff(&series), s.evaluate_at(z).unwrap().tail);
                }
            }
        }
    }

    #[test]
    fn rotated_curvature_values() {
        let r = rotated_curvature_restriction(1.0, 1.0, Complex64::zero()).unwrap();
        assert_eq!(r, Matrix::from_rows(vec![vec![2.0, 0.0], vec![0.0, 2.0]]));
        let r = rotated_curvature_restriction(2.0, 1.0, Complex64::zero()).unwrap();
        assert_eq!(r, Matrix::from_rows(vec![vec![3.0, 1.0], vec![1.0, 3.0]]));
        let r = rotated_curvature_restriction(1.0, 1.0, c(0.5, 0.0)).unwrap();
        assert!(r.max_abs_diff(&Matrix::from_rows(vec![vec![32.0 / 9.0, 0.0], vec![0.0, 32.0 / 9.0]])) < 1e-12);
    }

    #[test]
    fn rotated_curvature_matches_log_hessian() {
        // d_{u_i} dbar_{u_j} log B by central differences in the real coordinates.
        let (alpha, beta) = (1.5, 0.75);
        let log_b = |u1: Complex64, u2: Complex64| {
            let (z1, z2) = (u1 + u2, u1 - u2);
            -alpha * (1.0 - z1.norm_sqr()).ln() - beta * (1.0 - z2.norm_sqr()).ln()
        };
        let h = 1e-4;
        let u = [c(0.2, -0.1), c(0.05, 0.1)];
        let f = |v: [Complex64; 2]| log_b(v[0], v[1]);
        let exact = rotated_curvature(alpha, beta, u[0], u[1]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                // 4 d_i dbar_j = (dx_i - i dy_i)(dx_j + i dy_j); real part for a real function
                let second = |a: Complex64, b: Complex64| {
                    let pp = f(shift_two(u, i, a, j, b));
                    let pm = f(shift_two(u, i, a, j, -b));
                    let mp = f(shift_two(u, i, -a, j, b));
                    let mm = f(shift_two(u, i, -a, j, -b));
                    (pp - pm - mp + mm) / (4.0 * h * h)
                };
                let xx = second(c(h, 0.0), c(h, 0.0));
                let yy = second(c(0.0, h), c(0.0, h));
                let val = (xx + yy) / 4.0;
                assert!((val - exact[(i, j)]).abs() < 1e-5, "({i},{j}) {val} vs {}", exact[(i, j)]);
            }
        }
        fn shift_two(u: [Complex64; 2], i: usize, a: Complex64, j: usize, b: Complex64) -> [Complex64; 2] {
            let mut v = u;
            v[i] += a;
            v[j] += b;
            v
        }
        let restricted = rotated_curvature(alpha, beta, u[0], Complex64::zero()).unwrap();
        assert!(restricted.max_abs_diff(&rotated_curvature_restriction(alpha, beta, u[0]).unwrap()) < 1e-12);
    }
}

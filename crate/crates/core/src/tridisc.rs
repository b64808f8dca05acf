//! The first-order jet of `(1-z1 w1bar)^-alpha (1-z2 w2bar)^-beta (1-z3 w3bar)^-gamma`
//! on the diagonal of the tridisc: its normalization, the splitting into a
//! 2×2 block and a scalar block, and the identification of the 2×2 block
//! with the bidisc jet kernel for `(alpha, beta + gamma)`.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::Result;
use crate::kernel::{jet_kernel_series, szego_power_series, tridisc_jet_closed_form, KernelSpec};
use crate::matrix::Matrix;
use crate::normalize::{
    commutant_basis, commutant_basis_numeric, irreducibility_verdict, reducing_projections, CommutantReport,
    NormalizedCoeffs, Projection, RealEntries, Verdict,
};
use crate::scalar::{int, rational_sqrt, rational_to_f64, rational_to_string, Rational, Scalar};
use crate::series::MatrixSeries;

/// Truncation used for every series comparison in this module.
pub const TRIDISC_ORDER: usize = 6;
/// Tolerance of the floating-point path.
pub const TRIDISC_TOLERANCE: f64 = 1e-12;

/// Fields the tridisc checks run over: rationals when the needed square
/// roots are rational, floats otherwise.
pub trait TridiscField: RealEntries {
    fn close(a: &MatrixSeries<Self>, b: &MatrixSeries<Self>) -> bool;
    fn close_matrix(a: &Matrix<Self>, b: &Matrix<Self>) -> bool;
    fn commutant(mats: &[Matrix<Self>], size: usize) -> Result<CommutantReport<Self>>;
}

impl TridiscField for Rational {
    fn close(a: &MatrixSeries<Self>, b: &MatrixSeries<Self>) -> bool {
        a == b
    }
    fn close_matrix(a: &Matrix<Self>, b: &Matrix<Self>) -> bool {
        a == b
    }
    fn commutant(mats: &[Matrix<Self>], size: usize) -> Result<CommutantReport<Self>> {
        commutant_basis(mats, size)
    }
}

impl TridiscField for f64 {
    fn close(a: &MatrixSeries<Self>, b: &MatrixSeries<Self>) -> bool {
        let scale = a.iter().fold(1.0f64, |m, (_, _, c)| m.max(c.max_abs()));
        a.max_abs_diff(b) <= TRIDISC_TOLERANCE * scale
    }
    fn close_matrix(a: &Matrix<Self>, b: &Matrix<Self>) -> bool {
        a.max_abs_diff(b) <= TRIDISC_TOLERANCE * a.max_abs().max(1.0)
    }
    fn commutant(mats: &[Matrix<Self>], size: usize) -> Result<CommutantReport<Self>> {
        commutant_basis_numeric(mats, size, 1e-9)
    }
}

/// `sqrt(beta)`, `sqrt(gamma)`, `sqrt(beta + gamma)` in the chosen field.
#[derive(Clone, Debug)]
pub struct Roots<F> {
    pub beta: F,
    pub gamma: F,
    pub sum: F,
}

impl Roots<Rational> {
    /// Present only when all three roots are rational.
    pub fn exact(beta: &Rational, gamma: &Rational) -> Option<Self> {
        Some(Self { beta: rational_sqrt(beta)?, gamma: rational_sqrt(gamma)?, sum: rational_sqrt(&(beta + gamma))? })
    }
}

impl Roots<f64> {
    pub fn numeric(beta: &Rational, gamma: &Rational) -> Self {
        let (b, g) = (rational_to_f64(beta), rational_to_f64(gamma));
        Self { beta: b.sqrt(), gamma: g.sqrt(), sum: (b + g).sqrt() }
    }
}

/// Series from `(m, p, i, j, value)` entries.
fn series_from<F: Scalar>(dim: usize, trunc: usize, entries: &[(usize, usize, usize, usize, F)]) -> MatrixSeries<F> {
    let mut s: MatrixSeries<F> = MatrixSeries::zero(dim, trunc);
    for (m, p, i, j, v) in entries {
        let mut c = s.coeff(*m, *p);
        c[(*i, *j)] = c[(*i, *j)].clone() + v.clone();
        s.set(*m, *p, c);
    }
    s
}

/// The polynomial part of `D^{1/2} G(z,0)^-1 G(z,w) G(0,w)^-1 D^{1/2}`,
/// `D = G(0,0)`, computed from the jet kernel; the scalar factors
/// `(1 - z wbar)^-e` of `G(z,0)` and `G(0,w)` are 1 and cancel.
pub fn normalized_poly<F: Scalar>(spec: &KernelSpec, roots: &Roots<F>) -> Result<MatrixSeries<F>> {
    let g = tridisc_jet_closed_form(spec)?;
    let p = MatrixSeries::from_fn(3, TRIDISC_ORDER, |m, q| g.poly().coeff(m, q));
    let x = p.at_w_zero().invert()?.multiply(&p)?.multiply(&p.at_z_zero().invert()?)?;
    let half = Matrix::diagonal(&[F::one(), roots.beta.clone(), roots.gamma.clone()]);
    Ok(x.map_entries(F::from_rational).sandwich(&half, &half))
}

/// The asserted closed form of that polynomial part, with `s = beta + gamma`
/// and `x = z wbar`: `(1-x)^2 - s(1-x)x + s(1+s)x^2` in the corner,
/// `-sqrt(beta)(1+s) z^2 wbar` along the first row, `1 + beta x`,
/// `sqrt(beta gamma) x`, `1 + gamma x` in the lower block.
pub fn displayed_normalized_poly<F: Scalar>(spec: &KernelSpec, roots: &Roots<F>) -> Result<MatrixSeries<F>> {
    let gamma = spec.require_tridisc()?;
    let q = |r: &Rational| F::from_rational(r);
    let s = &spec.beta + gamma;
    let one_s = q(&(int(1) + &s));
    let mut e = corner_entries::<F>(&s);
    for (k, root) in [(1, &roots.beta), (2, &roots.gamma)] {
        let v = -(root.clone() * one_s.clone());
        e.push((2, 1, 0, k, v.clone()));
        e.push((1, 2, k, 0, v));
        e.push((0, 0, k, k, F::one()));
    }
    e.push((1, 1, 1, 1, q(&spec.beta)));
    e.push((1, 1, 2, 2, q(gamma)));
    let bg = roots.beta.clone() * roots.gamma.clone();
    e.push((1, 1, 1, 2, bg.clone()));
    e.push((1, 1, 2, 1, bg));
    Ok(series_from(3, TRIDISC_ORDER, &e))
}

/// `(1-x)^2 - s(1-x)x + s(1+s)x^2 = 1 - (2+s) x + (1 + 2s + s^2) x^2`.
fn corner_entries<F: Scalar>(s: &Rational) -> Vec<(usize, usize, usize, usize, F)> {
    let q = |r: Rational| F::from_rational(&r);
    vec![
        (0, 0, 0, 0, F::one()),
        (1, 1, 0, 0, q(-(int(2) + s))),
        (2, 2, 0, 0, q(int(1) + int(2) * s + s * s)),
    ]
}

/// The asserted 2×2 block, polynomial part.
pub fn displayed_g1_poly<F: Scalar>(s: &Rational, root_s: &F) -> MatrixSeries<F> {
    let mut e = corner_entries::<F>(s);
    let v = -(root_s.clone() * F::from_rational(&(int(1) + s)));
    e.push((2, 1, 0, 1, v.clone()));
    e.push((1, 2, 1, 0, v));
    e.push((0, 0, 1, 1, F::one()));
    e.push((1, 1, 1, 1, F::from_rational(s)));
    series_from(2, TRIDISC_ORDER, &e)
}

/// `diag(1, R)` with `R = [[sqrt(beta), sqrt(gamma)], [-sqrt(gamma), sqrt(beta)]] / sqrt(beta + gamma)`.
pub fn unitary<F: Scalar>(roots: &Roots<F>) -> Matrix<F> {
    let z = F::zero;
    let r = |x: &F| x.clone() / roots.sum.clone();
    Matrix::from_rows(vec![
        vec![F::one(), z(), z()],
        vec![z(), r(&roots.beta), r(&roots.gamma)],
        vec![z(), -r(&roots.gamma), r(&roots.beta)],
    ])
}

/// Normalized kernel `poly(z, wbar) (1 - z wbar)^-exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedTridisc<F> {
    pub poly: MatrixSeries<F>,
    pub exponent: Rational,
}

impl<F: Scalar> NormalizedTridisc<F> {
    pub fn evaluate_f64(&self, z: Complex64, w: Complex64, to_f64: impl Fn(&F) -> f64) -> Matrix<Complex64> {
        let poly = self.poly.map_entries(|x| Complex64::new(to_f64(x), 0.0)).evaluate(&z, &w.conj());
        let pre = (Complex64::new(1.0, 0.0) - z * w.conj()).powf(-rational_to_f64(&self.exponent));
        poly.scale(&pre)
    }
}

/// The normalized tridisc kernel in floating point, for any parameters.
pub fn tridisc_normalized(spec: &KernelSpec, z: Complex64, w: Complex64) -> Result<Matrix<Complex64>> {
    let gamma = spec.require_tridisc()?;
    let k = NormalizedTridisc {
        poly: normalized_poly(spec, &Roots::numeric(&spec.beta, gamma))?,
        exponent: &spec.alpha + &spec.beta + gamma + int(2),
    };
    Ok(k.evaluate_f64(z, w, |x| *x))
}

/// The exact normalized tridisc kernel, when `sqrt(beta)`, `sqrt(gamma)`,
/// `sqrt(beta + gamma)` are rational.
pub fn tridisc_normalized_exact(spec: &KernelSpec) -> Result<Option<NormalizedTridisc<Rational>>> {
    let gamma = spec.require_tridisc()?;
    let Some(roots) = Roots::exact(&spec.beta, gamma) else { return Ok(None) };
    Ok(Some(NormalizedTridisc {
        poly: normalized_poly(spec, &roots)?,
        exponent: &spec.alpha + &spec.beta + gamma + int(2),
    }))
}

fn block_f<F: Scalar>(s: &MatrixSeries<F>, rows: std::ops::Range<usize>) -> MatrixSeries<F> {
    MatrixSeries::from_fn(rows.len(), s.trunc(), |m, p| s.coeff(m, p).submatrix(rows.clone(), rows.clone()))
}

/// Outcome of every tridisc check.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiscReport {
    pub spec: KernelSpec,
    pub exact: bool,
    pub u: Value,
    pub u_unitary: bool,
    pub normalized_at_w_zero_identity: bool,
    pub normalized_matches_display: bool,
    /// Normalizing the full jet series agrees with the polynomial route.
    pub normalized_series_consistent: bool,
    pub block_diagonal: bool,
    pub g2_exponent: Rational,
    pub g2_is_szego_power: bool,
    pub g1_matches_display: bool,
    pub g1_at_w_zero_identity: bool,
    pub bidisc_beta: Rational,
    pub match_bidisc: bool,
    pub bidisc_irreducible: bool,
    pub commutant_dimension: usize,
    pub projection_ranks: Vec<usize>,
    /// The rank-one reducing projection is the one realized by `U`.
    pub projection_matches_u: bool,
    pub projections: Vec<Projection>,
    pub reducible: bool,
}

impl TridiscReport {
    pub fn passed(&self) -> bool {
        self.u_unitary
            && self.normalized_at_w_zero_identity
            && self.normalized_matches_display
            && self.normalized_series_consistent
            && self.block_diagonal
            && self.g2_is_szego_power
            && self.g1_matches_display
            && self.g1_at_w_zero_identity
            && self.match_bidisc
            && self.bidisc_irreducible
            && self.projection_matches_u
            && self.reducible
    }

    /// Names of the failed checks.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("u_unitary", self.u_unitary),
            ("normalized_at_w_zero_identity", self.normalized_at_w_zero_identity),
            ("normalized_matches_display", self.normalized_matches_display),
            ("normalized_series_consistent", self.normalized_series_consistent),
            ("block_diagonal", self.block_diagonal),
            ("g2_is_szego_power", self.g2_is_szego_power),
            ("g1_matches_display", self.g1_matches_display),
            ("g1_at_w_zero_identity", self.g1_at_w_zero_identity),
            ("match_bidisc", self.match_bidisc),
            ("bidisc_irreducible", self.bidisc_irreducible),
            ("projection_matches_u", self.projection_matches_u),
            ("reducible", self.reducible),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| n)
        .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "spec": self.spec.to_json(),
            "exact": self.exact,
            "U": self.u,
            "u_unitary": self.u_unitary,
            "normalized_at_w_zero_identity": self.normalized_at_w_zero_identity,
            "normalized_matches_display": self.normalized_matches_display,
            "normalized_series_consistent": self.normalized_series_consistent,
            "block_diagonal": self.block_diagonal,
            "g2_exponent": rational_to_string(&self.g2_exponent),
            "g2_is_szego_power": self.g2_is_szego_power,
            "g1_matches_display": self.g1_matches_display,
            "g1_at_w_zero_identity": self.g1_at_w_zero_identity,
            "bidisc_beta": rational_to_string(&self.bidisc_beta),
            "match_bidisc": self.match_bidisc,
            "bidisc_irreducible": self.bidisc_irreducible,
            "commutant_dimension": self.commutant_dimension,
            "projection_ranks": self.projection_ranks,
            "projection_matches_u": self.projection_matches_u,
            "projections": self.projections.iter().map(Projection::to_json).collect::<Vec<_>>(),
            "reducible": self.reducible,
            "passed": self.passed(),
            "failures": self.failures(),
        })
    }
}

/// Runs every check against the bidisc kernel with second parameter
/// `beta + gamma`.
pub fn tridisc_block_diagonalize(spec: &KernelSpec) -> Result<TridiscReport> {
    let gamma = spec.require_tridisc()?;
    tridisc_report_with(spec, &(&spec.beta + gamma))
}

/// As [`tridisc_block_diagonalize`], comparing against the bidisc kernel
/// with an arbitrary second parameter.
pub fn tridisc_report_with(spec: &KernelSpec, bidisc_beta: &Rational) -> Result<TridiscReport> {
    let gamma = spec.require_tridisc()?;
    match Roots::exact(&spec.beta, gamma) {
        Some(roots) => analyze(spec, &roots, bidisc_beta, true),
        None => analyze(spec, &Roots::numeric(&spec.beta, gamma), bidisc_beta, false),
    }
}

/// Whether the 2×2 block equals the normalized bidisc jet kernel with
/// parameters `(alpha, beta + gamma)`.
pub fn tridisc_match_bidisc(spec: &KernelSpec) -> Result<bool> {
    Ok(tridisc_block_diagonalize(spec)?.match_bidisc)
}

fn analyze<F: TridiscField>(spec: &KernelSpec, roots: &Roots<F>, bidisc_beta: &Rational, exact: bool) -> Result<TridiscReport> {
    let gamma = spec.require_tridisc()?;
    let t = TRIDISC_ORDER;
    let s = &spec.beta + gamma;
    let exponent = &spec.alpha + &s + int(2);
    let szego = szego_power_series(&exponent, t).map_entries(F::from_rational);

    let poly = normalized_poly(spec, roots)?;
    let normalized_at_w_zero_identity = F::close(&poly.at_w_zero(), &MatrixSeries::identity(3, t));
    let normalized_matches_display = F::close(&poly, &displayed_normalized_poly(spec, roots)?);

    let full = NormalizedCoeffs::from_series(tridisc_jet_closed_form(spec)?.to_series(t))?;
    let full_series = normalized_series::<F>(&full, roots)?;
    let normalized_series_consistent = F::close(&full_series, &poly.scale_by_scalar_series(&szego));

    let u = unitary(roots);
    let u_unitary = F::close_matrix(&u.matmul(&u.transpose()), &Matrix::identity(3));
    let conj = poly.sandwich(&u, &u.transpose());
    let off_block = conj.map(|c| {
        let mut m = c.clone();
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = F::zero();
            }
        }
        m[(2, 2)] = F::zero();
        m
    });
    let block_diagonal = F::close(&off_block, &MatrixSeries::zero(3, t));
    let g2 = block_f(&conj, 2..3);
    let g2_is_szego_power = F::close(&g2, &MatrixSeries::identity(1, t));
    let g1 = block_f(&conj, 0..2);
    let g1_matches_display = F::close(&g1, &displayed_g1_poly(&s, &roots.sum));
    let g1_at_w_zero_identity = F::close(&g1.at_w_zero(), &MatrixSeries::identity(2, t));

    let bidisc = KernelSpec::bidisc(spec.alpha.clone(), bidisc_beta.clone(), 1)?;
    let bidisc_norm = NormalizedCoeffs::from_series(jet_kernel_series(&bidisc, t)?)?;
    let g1_full = g1.scale_by_scalar_series(&szego);
    let match_bidisc = match F::sqrt_of(bidisc_beta) {
        Some(r) => F::close(&bidisc_normalized(&bidisc_norm, &r), &g1_full),
        None => {
            let r = rational_to_f64(bidisc_beta).sqrt();
            f64::close(&bidisc_normalized(&bidisc_norm, &r), &g1_full.map_entries(RealEntries::to_f64_value))
        }
    };
    let bidisc_irreducible = irreducibility_verdict(&bidisc)?.verdict == Verdict::Irreducible;

    let inputs: Vec<Matrix<F>> = full_series.iter().map(|(_, _, c)| c.clone()).filter(|c| !c.is_zero()).collect();
    let commutant = F::commutant(&inputs, 3)?;
    let projections = reducing_projections(&commutant);
    let mut projection_ranks: Vec<usize> = projections.iter().map(|p| p.rank).collect();
    projection_ranks.sort_unstable();
    let outer = Matrix::from_fn(3, 3, |i, j| u[(2, i)].clone() * u[(2, j)].clone());
    let outer_exact: Option<Vec<Rational>> = outer.data().iter().map(RealEntries::as_rational).collect();
    let projection_matches_u = projections.iter().any(|p| {
        let numeric_ok = p.rank == 1 && p.numeric.max_abs_diff(&outer.map(RealEntries::to_f64_value)) < 1e-9;
        let exact_ok = match (&outer_exact, &p.exact) {
            (Some(o), Some(e)) => e.data() == o.as_slice(),
            (Some(_), None) => false,
            (None, _) => true,
        };
        numeric_ok && exact_ok
    });
    let reducible = commutant.dimension >= 2 && projection_ranks == vec![1, 2];

    Ok(TridiscReport {
        spec: spec.clone(),
        exact,
        u: u.to_json_rows(),
        u_unitary,
        normalized_at_w_zero_identity,
        normalized_matches_display,
        normalized_series_consistent,
        block_diagonal,
        g2_exponent: exponent,
        g2_is_szego_power,
        g1_matches_display,
        g1_at_w_zero_identity,
        bidisc_beta: bidisc_beta.clone(),
        match_bidisc,
        bidisc_irreducible,
        commutant_dimension: commutant.dimension,
        projection_ranks,
        projection_matches_u,
        projections,
        reducible,
    })
}

/// `D^{-1/2} N D^{-1/2}` for the tridisc, `D = diag(1, beta, gamma)`.
fn normalized_series<F: Scalar>(c: &NormalizedCoeffs, roots: &Roots<F>) -> Result<MatrixSeries<F>> {
    let inv = Matrix::diagonal(&[F::one(), F::one() / roots.beta.clone(), F::one() / roots.gamma.clone()]);
    Ok(c.n().map_entries(F::from_rational).sandwich(&inv, &inv))
}

/// `D^{-1/2} N D^{-1/2}` for the bidisc first-order jet, `D = diag(1, b)`.
fn bidisc_normalized<F: Scalar>(c: &NormalizedCoeffs, root_b: &F) -> MatrixSeries<F> {
    let inv = Matrix::diagonal(&[F::one(), F::one() / root_b.clone()]);
    c.n().map_entries(F::from_rational).sandwich(&inv, &inv)
}

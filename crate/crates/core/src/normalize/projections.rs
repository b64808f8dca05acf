use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Value};

use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

use super::CommutantReport;

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
const CLUSTER_TOL: f64 = 1e-8;

/// A self-adjoint idempotent in the commutant.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub rank: usize,
    /// Exact form when the spectral data turned out rational.
    pub exact: Option<Matrix<Rational>>,
    pub numeric: Matrix<f64>,
}

impl Projection {
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "rank": self.rank, "numeric": self.numeric.to_json_rows() });
        if let Some(e) = &self.exact {
            v["exact"] = e.to_json_rows();
        }
        v
    }
}

/// Real matrices supported by the projection search.
pub trait RealEntries: Scalar {
    fn to_f64_value(&self) -> f64;
    fn as_rational(&self) -> Option<Rational>;
}

impl RealEntries for Rational {
    fn to_f64_value(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

impl RealEntries for f64 {
    fn to_f64_value(&self) -> f64 {
        *self
    }
    fn as_rational(&self) -> Option<Rational> {
        None
    }
}

fn to_dmatrix(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Spectral projections of one generic self-adjoint element.
fn spectral_split(h: &Matrix<f64>) -> Vec<(f64, Matrix<f64>)> {
    let d = h.rows();
    let eig = SymmetricEigen::new(to_dmatrix(h));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut clusters: Vec<(f64, Vec<usize>)> = vec![];
    for k in order {
        let lam = eig.eigenvalues[k];
        match clusters.last_mut() {
            Some((l, idx)) if (lam - *l).abs() <= CLUSTER_TOL * scale => idx.push(k),
            _ => clusters.push((lam, vec![k])),
        }
    }
    clusters
        .into_iter()
        .map(|(lam, idx)| {
            let p = Matrix::from_fn(d, d, |i, j| idx.iter().map(|&k| eig.eigenvectors[(i, k)] * eig.eigenvectors[(j, k)]).sum());
            (lam, p)
        })
        .collect()
}

/// Best rational approximation by continued fractions with bounded denominator.
fn rationalize(x: f64, max_den: i64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    (k1 != 0).then(|| Rational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Lagrange-product spectral projections of an exact `h`, checked to be
/// complete orthogonal idempotents.
fn exact_projections(h: &Matrix<Rational>, eigenvalues: &[f64]) -> Option<Vec<Matrix<Rational>>> {
    let lams: Vec<Rational> = eigenvalues.iter().map(|&x| rationalize(x, 1 << 20)).collect::<Option<_>>()?;
    let d = h.rows();
    let id = Matrix::<Rational>::identity(d);
    let projs: Vec<Matrix<Rational>> = lams
        .iter()
        .enumerate()
        .map(|(i, li)| {
            lams.iter().enumerate().filter(|(j, _)| *j != i).fold(id.clone(), |acc, (_, lj)| {
                acc.matmul(&h.sub(&id.scale(lj))).scale(&(Rational::one() / (li - lj)))
            })
        })
        .collect();
    let mut total = Matrix::zeros(d, d);
    for (p, l) in projs.iter().zip(&lams) {
        let ok = p.matmul(p) == *p && p.transpose() == *p && h.matmul(p) == p.scale(l);
        if !ok {
            return None;
        }
        total.add_assign(p);
    }
    (total == id).then_some(projs)
}

fn generic_element<F: RealEntries>(basis: &[Matrix<F>], primes: &[u32]) -> Matrix<F> {
    let d = basis[0].rows();
    let mut h = Matrix::<F>::zeros(d, d);
    for (b, &p) in basis.iter().zip(primes.iter().cycle()) {
        let w = F::from_rational(&Rational::from_integer(BigInt::from(p)));
        h.add_assign(&b.add(&b.transpose()).scale(&w));
    }
    h
}

/// Eigenvalue clusters with their spectral projections.
type SpectralSplit = Vec<(f64, Matrix<f64>)>;

/// Reducing projections read off the commutant: spectral projections of a
/// generic self-adjoint commutant element. Empty when the commutant is trivial.
///
/// Coefficients are successive primes; a rotated prime sequence is tried
/// until two runs agree, so an accidental eigenvalue collision is caught.
pub fn reducing_projections<F: RealEntries>(report: &CommutantReport<F>) -> Vec<Projection> {
    if report.dimension <= 1 || report.basis.is_empty() {
        return vec![];
    }
    let mut best: Option<(SpectralSplit, Matrix<F>)> = None;
    let mut previous_ranks: Option<Vec<usize>> = None;
    for shift in 0..PRIMES.len() {
        let primes: Vec<u32> = PRIMES.iter().cycle().skip(shift).take(report.basis.len()).cloned().collect();
        let h = generic_element(&report.basis, &primes);
        let split = spectral_split(&h.map(RealEntries::to_f64_value));
        let mut ranks: Vec<usize> = split.iter().map(|(_, p)| rank_of(p)).collect();
        ranks.sort_unstable();
        let finer = best.as_ref().is_none_or(|(b, _)| split.len() > b.len());
        if finer {
            best = Some((split, h));
        }
        if previous_ranks.as_ref() == Some(&ranks) && !finer {
            break;
        }
        previous_ranks = Some(ranks);
    }
    let (split, h) = best.expect("at least one attempt");
    let exact_h: Option<Matrix<Rational>> = h
        .data()
        .iter()
        .map(RealEntries::as_rational)
        .collect::<Option<Vec<_>>>()
        .map(|v| Matrix::from_fn(h.rows(), h.cols(), |i, j| v[i * h.cols() + j].clone()));
    let eigenvalues: Vec<f64> = split.iter().map(|(l, _)| *l).collect();
    let exact = exact_h.and_then(|eh| exact_projections(&eh, &eigenvalues));
    split
        .into_iter()
        .enumerate()
        .map(|(i, (_, numeric))| Projection {
            rank: rank_of(&numeric),
            exact: exact.as_ref().map(|e| e[i].clone()),
            numeric,
        })
        .collect()
}

fn rank_of(p: &Matrix<f64>) -> usize {
    p.diag().iter().sum::<f64>().round() as usize
}

/// Whether `p` is an orthogonal projection commuting with every input of the report.
pub fn is_reducing<F: RealEntries>(p: &Projection, report: &CommutantReport<F>, tol: f64) -> bool {
    let n = &p.numeric;
    let idempotent = n.matmul(n).max_abs_diff(n) < tol && n.transpose().max_abs_diff(n) < tol;
    let commutes = report.inputs.iter().all(|a| {
        let a = a.map(RealEntries::to_f64_value);
        a.matmul(n).max_abs_diff(&n.matmul(&a)) < tol * a.max_abs().max(1.0)
    });
    let exact_ok = p.exact.as_ref().is_none_or(|e| {
        let inputs: Option<Vec<Matrix<Rational>>> = report
            .inputs
            .iter()
            .map(|a| a.data().iter().map(RealEntries::as_rational).collect::<Option<Vec<_>>>().map(|v| Matrix::from_fn(a.rows(), a.cols(), |i, j| v[i * a.cols() + j].clone())))
            .collect();
        e.matmul(e) == *e && inputs.is_none_or(|ins| ins.iter().all(|a| a.matmul(e) == e.matmul(a)))
    });
    idempotent && commutes && exact_ok && p.rank > 0
}

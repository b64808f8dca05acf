use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Irreducible,
    Reducible,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Irreducible => "irreducible",
            Self::Reducible => "reducible",
            Self::Inconclusive => "inconclusive",
        }
    }

    fn from_dimension(dim: usize) -> Self {
        if dim == 1 {
            Self::Irreducible
        } else {
            Self::Reducible
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Arithmetic {
    Exact,
    Numeric { tolerance: f64 },
}

impl Arithmetic {
    pub fn to_json(&self) -> Value {
        match self {
            Self::Exact => json!({ "mode": "exact" }),
            Self::Numeric { tolerance } => json!({ "mode": "numeric", "tolerance": tolerance }),
        }
    }
}

/// Basis of `{X : XA = AX for every input A}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutantReport<F: Scalar> {
    pub size: usize,
    pub inputs: Vec<Matrix<F>>,
    pub dimension: usize,
    pub basis: Vec<Matrix<F>>,
    pub verdict: Verdict,
    pub arithmetic: Arithmetic,
    /// Largest `|XA - AX|` over basis elements and inputs.
    pub max_residual: f64,
    /// Why the verdict is inconclusive, if it is.
    pub note: Option<Value>,
}

impl<F: Scalar> CommutantReport<F> {
    pub(crate) fn inconclusive(size: usize, inputs: Vec<Matrix<F>>, arithmetic: Arithmetic, note: Value) -> Self {
        Self {
            size,
            inputs,
            dimension: 0,
            basis: vec![],
            verdict: Verdict::Inconclusive,
            arithmetic,
            max_residual: 0.0,
            note: Some(note),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "size": self.size,
            "inputs": self.inputs.iter().map(Matrix::to_json_rows).collect::<Vec<_>>(),
            "dimension": self.dimension,
            "basis": self.basis.iter().map(Matrix::to_json_rows).collect::<Vec<_>>(),
            "verdict": self.verdict.as_str(),
            "arithmetic": self.arithmetic.to_json(),
            "max_residual": self.max_residual,
        });
        if let Some(note) = &self.note {
            v["note"] = note.clone();
        }
        v
    }
}

/// Coefficient rows of `XA - AX = 0` in the unknowns `x_(i*d+j)`.
fn commutation_system<F: Scalar>(mats: &[Matrix<F>], d: usize) -> Vec<Vec<F>> {
    let mut rows = Vec::with_capacity(mats.len() * d * d);
    for a in mats {
        for i in 0..d {
            for j in 0..d {
                let mut row = vec![F::zero(); d * d];
                for k in 0..d {
                    // (XA)_ij = sum_k x_ik a_kj, (AX)_ij = sum_k a_ik x_kj
                    row[i * d + k] = row[i * d + k].clone() + a[(k, j)].clone();
                    row[k * d + j] = row[k * d + j].clone() - a[(i, k)].clone();
                }
                rows.push(row);
            }
        }
    }
    rows
}

fn check_inputs<F: Scalar>(mats: &[Matrix<F>], size: usize) -> Result<()> {
    for m in mats {
        if m.rows() != size || m.cols() != size {
            return Err(Error::DimensionMismatch(size, m.rows().max(m.cols())));
        }
    }
    Ok(())
}

fn residual<F: Scalar>(basis: &[Matrix<F>], mats: &[Matrix<F>]) -> f64 {
    let mut worst = 0.0f64;
    for x in basis {
        for a in mats {
            worst = worst.max(x.matmul(a).sub(&a.matmul(x)).max_abs());
        }
    }
    worst
}

fn reshape<F: Scalar>(v: &[F], d: usize) -> Matrix<F> {
    Matrix::from_fn(d, d, |i, j| v[i * d + j].clone())
}

/// Integer row with common denominators cleared.
fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
}

fn remove_content(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Nullspace basis of an integer-cleared rational system by fraction-free
/// elimination. Each basis vector has a 1 in one free column and zeros in
/// the other free columns.
pub fn nullspace_exact(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut work: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| clear_denominators(r))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut pivots: Vec<(usize, Vec<BigInt>)> = vec![];
    for col in 0..ncols {
        let pick = work
            .iter()
            .enumerate()
            .filter(|(_, r)| !r[col].is_zero())
            .min_by_key(|(_, r)| r[col].abs())
            .map(|(i, _)| i);
        let Some(pi) = pick else { continue };
        let pivot = work.swap_remove(pi);
        for r in work.iter_mut() {
            if r[col].is_zero() {
                continue;
            }
            let g = pivot[col].gcd(&r[col]);
            let (fp, fr) = (&r[col] / &g, &pivot[col] / &g);
            for k in col..ncols {
                r[k] = &r[k] * &fr - &pivot[k] * &fp;
            }
            remove_content(r);
        }
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
        pivots.push((col, pivot));
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|(c, _)| *c).collect();
    let free: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); ncols];
            x[f] = Rational::one();
            for (col, row) in pivots.iter().rev() {
                let mut acc = Rational::zero();
                for k in col + 1..ncols {
                    if !row[k].is_zero() && !x[k].is_zero() {
                        acc += Rational::from_integer(row[k].clone()) * &x[k];
                    }
                }
                x[*col] = -acc / Rational::from_integer(row[*col].clone());
            }
            x
        })
        .collect()
}

/// Exact commutant of a family of `size x size` rational matrices.
pub fn commutant_basis(mats: &[Matrix<Rational>], size: usize) -> Result<CommutantReport<Rational>> {
    check_inputs(mats, size)?;
    let rows = commutation_system(mats, size);
    let basis: Vec<Matrix<Rational>> =
        nullspace_exact(&rows, size * size).iter().map(|v| reshape(v, size)).collect();
    let max_residual = residual(&basis, mats);
    Ok(CommutantReport {
        size,
        inputs: mats.to_vec(),
        dimension: basis.len(),
        verdict: Verdict::from_dimension(basis.len()),
        basis,
        arithmetic: Arithmetic::Exact,
        max_residual,
        note: None,
    })
}

/// Numeric commutant via the singular values of the commutation system.
/// A singular value counts as zero below `tolerance` times the largest one.
pub fn commutant_basis_numeric(mats: &[Matrix<f64>], size: usize, tolerance: f64) -> Result<CommutantReport<f64>> {
    check_inputs(mats, size)?;
    let n = size * size;
    let rows = commutation_system(mats, size);
    let nrows = rows.len().max(n);
    let mut sys = DMatrix::<f64>::zeros(nrows, n);
    for (i, r) in rows.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            sys[(i, j)] = *x;
        }
    }
    let svd = sys.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = tolerance * smax.max(1.0);
    let basis: Vec<Matrix<f64>> = (0..n)
        .filter(|&k| svd.singular_values[k] <= cutoff)
        .map(|k| {
            let v: Vec<f64> = (0..n).map(|j| v_t[(k, j)]).collect();
            reshape(&v, size)
        })
        .collect();
    let max_residual = residual(&basis, mats);
    Ok(CommutantReport {
        size,
        inputs: mats.to_vec(),
        dimension: basis.len(),
        verdict: Verdict::from_dimension(basis.len()),
        basis,
        arithmetic: Arithmetic::Numeric { tolerance },
        max_residual,
        note: None,
    })
}

//! Brute-force oracle for the jet kernels.
//!
//! Expands the product kernel as a sparse multivariate series in all the
//! `z_k` and `wbar_k`, differentiates monomial by monomial, then identifies
//! the variables on the diagonal. It shares no code with the Leibniz-rule
//! closed forms; the binomial series are generated from `C(-e, k)` rather
//! than from Pochhammer symbols.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::Result;
use crate::matrix::Matrix;
use crate::scalar::{binomial_general, int, Rational};
use crate::series::MatrixSeries;

use super::KernelSpec;

/// Sparse series in `nvars` commuting variables, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSeries {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl MultiSeries {
    pub fn one(nvars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; nvars], int(1));
        Self { nvars, terms }
    }

    /// `(1 - x_zvar x_wvar)^-exponent` up to `(x_zvar x_wvar)^max_power`.
    pub fn szego_factor(nvars: usize, zvar: usize, wvar: usize, exponent: &Rational, max_power: u32) -> Self {
        let mut terms = BTreeMap::new();
        let neg = -exponent.clone();
        for k in 0..=max_power {
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            let c = sign * binomial_general(&neg, k as i64);
            if c.is_zero() {
                continue;
            }
            let mut key = vec![0; nvars];
            key[zvar] = k;
            key[wvar] = k;
            terms.insert(key, c);
        }
        Self { nvars, terms }
    }

    /// Product, keeping only monomials accepted by `keep`.
    pub fn multiply(&self, other: &Self, keep: impl Fn(&[u32]) -> bool) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let key: Vec<u32> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                if !keep(&key) {
                    continue;
                }
                *terms.entry(key).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self { nvars: self.nvars, terms }
    }

    /// `times`-fold partial derivative in variable `var`.
    pub fn differentiate(&self, var: usize, times: u32) -> Self {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if k[var] < times {
                continue;
            }
            let falling = (0..times).fold(int(1), |acc, s| acc * int((k[var] - s) as i64));
            let mut key = k.clone();
            key[var] -= times;
            terms.insert(key, c * falling);
        }
        Self { nvars: self.nvars, terms }
    }

    /// Sets every `z` variable equal to `z` and every `w` variable equal to
    /// `wbar`, returning coefficients of `z^m wbar^p`.
    pub fn restrict(&self, zvars: &[usize], wvars: &[usize]) -> BTreeMap<(u32, u32), Rational> {
        let mut out: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
        for (k, c) in &self.terms {
            let m = zvars.iter().map(|&v| k[v]).sum();
            let p = wvars.iter().map(|&v| k[v]).sum();
            *out.entry((m, p)).or_insert_with(Rational::zero) += c;
        }
        out
    }
}

fn product_kernel(exponents: &[&Rational], cap: u32) -> MultiSeries {
    let nf = exponents.len();
    let nvars = 2 * nf;
    let zsum = |k: &[u32]| k[..nf].iter().sum::<u32>() <= cap;
    exponents.iter().enumerate().fold(MultiSeries::one(nvars), |acc, (f, e)| {
        acc.multiply(&MultiSeries::szego_factor(nvars, f, nf + f, e, cap), zsum)
    })
}

fn collect(
    base: &MultiSeries,
    derivs: &[(usize, u32)],
    zvars: &[usize],
    wvars: &[usize],
    trunc: usize,
) -> MatrixSeries<Rational> {
    let d = derivs.iter().fold(base.clone(), |acc, &(v, t)| acc.differentiate(v, t));
    let mut out = MatrixSeries::zero(1, trunc);
    for ((m, p), c) in d.restrict(zvars, wvars) {
        let (m, p) = (m as usize, p as usize);
        if m <= trunc && p <= trunc {
            out.set(m, p, Matrix::from_rows(vec![vec![c]]));
        }
    }
    out
}

fn assemble(entries: Vec<Vec<MatrixSeries<Rational>>>, trunc: usize) -> MatrixSeries<Rational> {
    let d = entries.len();
    MatrixSeries::from_fn(d, trunc, |m, p| Matrix::from_fn(d, d, |i, j| entries[i][j].entry(m, p, 0, 0)))
}

/// Jet kernel coefficients of the bidisc kernel via four-variable expansion.
pub fn jet_kernel_series_bruteforce(spec: &KernelSpec, trunc: usize) -> Result<MatrixSeries<Rational>> {
    spec.require_bidisc()?;
    let n = spec.jet_order;
    // Variables: z1, z2, w1, w2. Total z-degree up to trunc + n survives n
    // derivatives with every coefficient of degree <= trunc intact.
    let cap = (trunc + n) as u32;
    let base = product_kernel(&[&spec.alpha, &spec.beta], cap);
    let entries = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| collect(&base, &[(1, i as u32), (3, j as u32)], &[0, 1], &[2, 3], trunc))
                .collect()
        })
        .collect();
    Ok(assemble(entries, trunc))
}

/// First-order jet of the tridisc kernel via six-variable expansion.
pub fn tridisc_jet_series_bruteforce(spec: &KernelSpec, trunc: usize) -> Result<MatrixSeries<Rational>> {
    let gamma = spec.require_tridisc()?;
    // Variables: z1, z2, z3, w1, w2, w3. Row k differentiates in z_(k+1),
    // column k in w_(k+1); index 0 means no derivative.
    let cap = (trunc + 1) as u32;
    let base = product_kernel(&[&spec.alpha, &spec.beta, gamma], cap);
    let zderiv = |i: usize| if i == 0 { None } else { Some(i) };
    let wderiv = |j: usize| if j == 0 { None } else { Some(3 + j) };
    let entries = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| {
                    let derivs: Vec<(usize, u32)> =
                        zderiv(i).into_iter().chain(wderiv(j)).map(|v| (v, 1)).collect();
                    collect(&base, &derivs, &[0, 1, 2], &[3, 4, 5], trunc)
                })
                .collect()
        })
        .collect();
    Ok(assemble(entries, trunc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{jet_kernel_series, szego_power_series, tridisc_jet_closed_form};
    use crate::scalar::ratio;

    fn halves() -> Vec<Rational> {
        vec![ratio(1, 2), int(1), ratio(3, 2), int(2)]
    }

    #[test]
    fn agrees_with_closed_form_on_grid() {
        for a in halves() {
            for b in halves() {
                for n in 0..=3 {
                    let spec = KernelSpec::bidisc(a.clone(), b.clone(), n).unwrap();
                    assert_eq!(
                        jet_kernel_series_bruteforce(&spec, 6).unwrap(),
                        jet_kernel_series(&spec, 6).unwrap(),
                        "alpha={a} beta={b} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn corner_entry_and_scalar_case() {
        let spec = KernelSpec::bidisc(ratio(1, 2), ratio(3, 2), 2).unwrap();
        let bf = jet_kernel_series_bruteforce(&spec, 5).unwrap();
        assert_eq!(bf.entry_series(0, 0), szego_power_series(&int(2), 5));
        let scalar = KernelSpec::bidisc(ratio(1, 3), int(1), 0).unwrap();
        assert_eq!(jet_kernel_series_bruteforce(&scalar, 5).unwrap(), szego_power_series(&ratio(4, 3), 5));
    }

    #[test]
    fn tridisc_matches_display() {
        for (a, b, g) in [(int(1), int(9), int(16)), (ratio(1, 2), int(1), int(2)), (ratio(3, 2), ratio(1, 3), ratio(5, 4))] {
            let spec = KernelSpec::tridisc(a, b, g).unwrap();
            let closed = tridisc_jet_closed_form(&spec).unwrap();
            assert_eq!(tridisc_jet_series_bruteforce(&spec, 5).unwrap(), closed.to_series(5));
        }
    }

    #[test]
    fn derivative_of_monomial() {
        let mut s = MultiSeries::one(2);
        s = s.multiply(&MultiSeries::szego_factor(2, 0, 1, &int(1), 4), |_| true);
        let d = s.differentiate(0, 2);
        // d^2/dz^2 of sum (zw)^k = sum k(k-1) z^(k-2) w^k
        let r = d.restrict(&[0], &[1]);
        assert_eq!(r[&(0, 2)], int(2));
        assert_eq!(r[&(2, 4)], int(12));
    }
}

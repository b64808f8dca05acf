use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{binomial, factorial, int, pochhammer, Rational};
use crate::series::MatrixSeries;

use super::{ClosedFormKernel, KernelSpec, SzegoTerm, SzegoTermSum};

/// Entry `(i, j)` of the jet kernel restricted to the diagonal: `i`
/// derivatives in `z2` and `j` in `w2bar` of
/// `(1 - z1 w1bar)^-alpha (1 - z2 w2bar)^-beta`, then `z1 = z2`, `w1 = w2`.
///
/// `d^i/dz` of `S^beta` is `(beta)_i wbar^i S^(beta+i)`; expanding the
/// `wbar`-derivatives by Leibniz gives
/// `(beta)_i sum_l C(j,l) (beta+i)_(j-l) l! C(i,l) z^(j-l) wbar^(i-l) S^(alpha+beta+i+j-l)`.
pub fn jet_entry_closed_form(spec: &KernelSpec, i: usize, j: usize) -> Result<SzegoTermSum> {
    spec.require_bidisc()?;
    let n = spec.jet_order;
    if i > n || j > n {
        return Err(Error::IndexOutOfRange(format!("entry ({i},{j}) for jet order {n}")));
    }
    let beta = &spec.beta;
    let lead = pochhammer(beta, i);
    let shifted = beta + int(i as i64);
    let base = &spec.alpha + beta + int((i + j) as i64);
    let terms = (0..=i.min(j)).map(|l| SzegoTerm {
        coeff: &lead
            * binomial(j, l as i64)
            * pochhammer(&shifted, j - l)
            * factorial(l)
            * binomial(i, l as i64),
        zpow: j - l,
        wpow: i - l,
        exponent: &base - int(l as i64),
    });
    Ok(SzegoTermSum::new(terms))
}

/// All entries of the jet kernel as Szegő term sums, row-major.
pub fn jet_kernel_terms(spec: &KernelSpec) -> Result<Vec<Vec<SzegoTermSum>>> {
    let d = spec.dim();
    (0..d).map(|i| (0..d).map(|j| jet_entry_closed_form(spec, i, j)).collect()).collect()
}

/// Coefficients `a_mp` of the jet kernel `K(z, w) = sum a_mp z^m wbar^p`.
pub fn jet_kernel_series(spec: &KernelSpec, trunc: usize) -> Result<MatrixSeries<Rational>> {
    let terms = jet_kernel_terms(spec)?;
    let d = spec.dim();
    let entries: Vec<Vec<MatrixSeries<Rational>>> =
        terms.iter().map(|row| row.iter().map(|t| t.to_series(trunc)).collect()).collect();
    Ok(MatrixSeries::from_fn(d, trunc, |m, p| Matrix::from_fn(d, d, |i, j| entries[i][j].entry(m, p, 0, 0))))
}

/// The jet kernel as `P(z, wbar) * S^(alpha + beta + 2n)` with polynomial `P`.
pub fn jet_kernel_closed_form(spec: &KernelSpec) -> Result<ClosedFormKernel> {
    let terms = jet_kernel_terms(spec)?;
    let n = spec.jet_order;
    let d = spec.dim();
    let exponent = &spec.alpha + &spec.beta + int(2 * n as i64);
    let deg = 2 * n;
    let parts: Vec<Vec<MatrixSeries<Rational>>> = terms
        .iter()
        .map(|row| {
            row.iter()
                .map(|t| t.polynomial_part(&exponent, deg).expect("jet entry exponents differ from the base by 0..=2n"))
                .collect()
        })
        .collect();
    let poly = MatrixSeries::from_fn(d, deg, |m, p| Matrix::from_fn(d, d, |i, j| parts[i][j].entry(m, p, 0, 0)));
    Ok(ClosedFormKernel::new(poly, exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::szego_power_series;
    use crate::scalar::ratio;

    fn spec(a: Rational, b: Rational, n: usize) -> KernelSpec {
        KernelSpec::bidisc(a, b, n).unwrap()
    }

    #[test]
    fn corner_entry_is_plain_szego_power() {
        let s = spec(ratio(3, 2), ratio(1, 2), 2);
        let e = jet_entry_closed_form(&s, 0, 0).unwrap();
        assert_eq!(e.terms().len(), 1);
        let t = &e.terms()[0];
        assert_eq!((t.coeff.clone(), t.zpow, t.wpow, t.exponent.clone()), (int(1), 0, 0, int(2)));
    }

    #[test]
    fn first_row_carries_z() {
        // Slot (0,1) of the quotient-module kernel: beta z S^(alpha+beta+1).
        for (a, b) in [(int(1), int(1)), (ratio(1, 2), ratio(3, 2)), (int(2), ratio(5, 3))] {
            let s = spec(a.clone(), b.clone(), 1);
            let e = jet_entry_closed_form(&s, 0, 1).unwrap();
            assert_eq!(e.terms().len(), 1);
            let t = &e.terms()[0];
            assert_eq!(t.coeff, b);
            assert_eq!((t.zpow, t.wpow), (1, 0));
            assert_eq!(t.exponent, &a + &b + int(1));
        }
    }

    #[test]
    fn out_of_range_entry() {
        let s = spec(int(1), int(1), 1);
        assert!(matches!(jet_entry_closed_form(&s, 2, 0), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn constant_term_for_order_two() {
        let a = jet_kernel_series(&spec(int(1), int(1), 2), 3).unwrap();
        assert_eq!(a.coeff(0, 0), Matrix::diagonal(&[int(1), int(1), int(4)]));
        assert_eq!(a.entry(1, 0, 0, 1), int(1));
    }

    #[test]
    fn scalar_jet_is_szego_power() {
        let s = spec(int(1), int(2), 0);
        assert_eq!(jet_kernel_series(&s, 5).unwrap(), szego_power_series(&int(3), 5));
    }

    #[test]
    fn closed_form_polynomial_reproduces_series() {
        for n in 0..=3 {
            let s = spec(ratio(1, 2), ratio(3, 2), n);
            let cf = jet_kernel_closed_form(&s).unwrap();
            assert_eq!(cf.to_series(6), jet_kernel_series(&s, 6).unwrap(), "n={n}");
        }
    }

    #[test]
    fn order_one_closed_form_matches_display() {
        // [[(1-x)^2, b z (1-x)], [b wbar (1-x), b (1 + b x)]] S^(a+b+2), x = z wbar.
        let b = ratio(5, 2);
        let cf = jet_kernel_closed_form(&spec(int(1), b.clone(), 1)).unwrap();
        let p = cf.poly();
        let e = |m, q, i, j| p.entry(m, q, i, j);
        assert_eq!((e(0, 0, 0, 0), e(1, 1, 0, 0), e(2, 2, 0, 0)), (int(1), int(-2), int(1)));
        assert_eq!((e(1, 0, 0, 1), e(2, 1, 0, 1)), (b.clone(), -b.clone()));
        assert_eq!((e(0, 1, 1, 0), e(1, 2, 1, 0)), (b.clone(), -b.clone()));
        assert_eq!((e(0, 0, 1, 1), e(1, 1, 1, 1)), (b.clone(), &b * &b));
        assert_eq!(cf.exponent(), &(int(1) + &b + int(2)));
    }
}

use serde_json::json;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::matrix::Matrix;
use crate::scalar::Rational;

use super::{
    check_single_entry_pattern, commutant_basis, commutant_basis_numeric, Arithmetic, CommutantReport,
    NormalizedCoeffs,
};

fn require_positive_order(spec: &KernelSpec) -> Result<()> {
    spec.require_bidisc()?;
    if spec.jet_order == 0 {
        return Err(Error::Constraint("irreducibility needs jet order >= 1".into()));
    }
    Ok(())
}

/// Exact irreducibility check on the coefficients `N_k1`, `N_1k`, `2 <= k <= n+1`.
///
/// Once each `N_k1` is confirmed to be a nonzero multiple of `E_{n-k+1,n}`,
/// the normalized coefficients are nonzero multiples of the same elementary
/// matrices (conjugation by the diagonal `D^{-1/2}` only rescales), so their
/// commutant is that of the elementary matrices and their transposes.
pub fn irreducibility_verdict(spec: &KernelSpec) -> Result<CommutantReport<Rational>> {
    require_positive_order(spec)?;
    let n = spec.jet_order;
    let coeffs = NormalizedCoeffs::for_spec(spec, n + 1)?;
    irreducibility_from_coeffs(spec, &coeffs)
}

/// As [`irreducibility_verdict`] on precomputed coefficients.
pub fn irreducibility_from_coeffs(spec: &KernelSpec, coeffs: &NormalizedCoeffs) -> Result<CommutantReport<Rational>> {
    require_positive_order(spec)?;
    let n = spec.jet_order;
    let d = n + 1;
    let mut inputs = vec![];
    for k in 2..=n + 1 {
        let nk1 = coeffs.n_coeff(k, 1)?;
        if let Some(v) = check_single_entry_pattern(spec, k, &nk1)? {
            return Ok(CommutantReport::inconclusive(d, vec![nk1], Arithmetic::Exact, v.to_json()));
        }
        let n1k = coeffs.n_coeff(1, k)?;
        if n1k != nk1.transpose() {
            let note = json!({ "k": k, "reason": "N_1k is not the transpose of N_k1", "matrix": n1k.to_json_rows() });
            return Ok(CommutantReport::inconclusive(d, vec![n1k], Arithmetic::Exact, note));
        }
        let e = Matrix::unit(d, n + 1 - k, n);
        inputs.push(e.transpose());
        inputs.push(e);
    }
    commutant_basis(&inputs, d)
}

/// Numeric irreducibility check on the actual normalized coefficients.
pub fn irreducibility_verdict_numeric(spec: &KernelSpec, tolerance: f64) -> Result<CommutantReport<f64>> {
    require_positive_order(spec)?;
    let n = spec.jet_order;
    let coeffs = NormalizedCoeffs::for_spec(spec, n + 1)?;
    let mut inputs = vec![];
    for k in 2..=n + 1 {
        inputs.push(coeffs.normalized_coeff_f64(k, 1)?);
        inputs.push(coeffs.normalized_coeff_f64(1, k)?);
    }
    commutant_basis_numeric(&inputs, n + 1, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::{reducing_projections, Verdict, DEFAULT_TOLERANCE};
    use crate::scalar::{int, ratio};

    #[test]
    fn documented_cases() {
        for (a, b, n) in [(int(1), int(1), 1), (ratio(3, 2), ratio(1, 2), 3)] {
            let r = irreducibility_verdict(&KernelSpec::bidisc(a, b, n).unwrap()).unwrap();
            assert_eq!(r.dimension, 1);
            assert_eq!(r.verdict, Verdict::Irreducible);
            assert_eq!(r.basis, vec![Matrix::identity(n + 1)]);
            assert!(reducing_projections(&r).is_empty());
        }
    }

    #[test]
    fn numeric_agrees() {
        let r = irreducibility_verdict_numeric(&KernelSpec::bidisc(int(2), ratio(1, 2), 3).unwrap(), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(r.verdict, Verdict::Irreducible);
        assert!(r.max_residual < 1e-10);
    }

    #[test]
    fn order_zero_is_rejected() {
        assert!(irreducibility_verdict(&KernelSpec::bidisc(int(1), int(1), 0).unwrap()).is_err());
    }
}

//! Disc automorphisms `phi_{t,a}(z) = t (z - a) / (1 - abar z)` with exact
//! rational parameters, the scalar cocycles `c` and `p`, the matrix cocycle
//! built from them, and the polynomial identities behind quasi-invariance.
//!
//! Functions taking a group element `g = phi` work with its inverse: `c`, `p`
//! and the cocycle matrix are evaluated for `phi^-1`.

mod cocycle;
mod identity;
mod trials;

pub use cocycle::{
    cocycle_c, cocycle_c_f64, cocycle_p, cocycle_p_f64, jmatrix, jmatrix_exact, jmatrix_numeric,
    quasi_invariance_at_zero, scalar_cocycle_check, verify_matrix_cocycle, verify_matrix_cocycle_reversed, CMatrix,
    Mode, NUMERIC_TOLERANCE,
};
pub use identity::{binomial_identity_check, binomial_identity_sides, quasi_invariance_polynomial, quasi_invariance_sides, UniPoly};
pub use trials::{cocycle_trials, random_element, random_point, Counterexample, TrialReport};

use num_complex::Complex64;
use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{rational_to_string, ComplexRational, Rational, Scalar};

/// The automorphism `z -> t (z - a) / (1 - abar z)`, `|t| = 1`, `|a| < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MobiusElement {
    t: ComplexRational,
    a: ComplexRational,
}

impl MobiusElement {
    pub fn new(t: ComplexRational, a: ComplexRational) -> Result<Self> {
        if !t.norm_sqr().is_one() {
            return Err(Error::OutsideDisc(format!("|t|^2 = {} is not 1", rational_to_string(&t.norm_sqr()))));
        }
        if a.norm_sqr() >= Rational::one() {
            return Err(Error::OutsideDisc(format!("|a|^2 = {} is not below 1", rational_to_string(&a.norm_sqr()))));
        }
        Ok(Self { t, a })
    }

    pub fn identity() -> Self {
        Self { t: ComplexRational::one(), a: ComplexRational::zero() }
    }

    /// `t` on the circle through the slope parametrization.
    pub fn from_slope(s: &Rational, a: ComplexRational) -> Result<Self> {
        Self::new(ComplexRational::unit_from_slope(s), a)
    }

    pub fn t(&self) -> &ComplexRational {
        &self.t
    }

    pub fn a(&self) -> &ComplexRational {
        &self.a
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn apply(&self, z: &ComplexRational) -> Result<ComplexRational> {
        require_in_disc(z)?;
        let num = self.t.clone() * (z.clone() - self.a.clone());
        let den = ComplexRational::one() - self.a.conj() * z.clone();
        Ok(num / den)
    }

    pub fn apply_f64(&self, z: Complex64) -> Complex64 {
        let (t, a) = (self.t.to_complex64(), self.a.to_complex64());
        t * (z - a) / (1.0 - a.conj() * z)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let (s, b) = (&self.t, &self.a);
        let (t, a) = (&other.t, &other.a);
        let one = ComplexRational::one();
        let new_t = s.clone() * (t.clone() + a.conj() * b.clone()) / (one.clone() + t.clone() * a.clone() * b.conj());
        let new_a = (a.clone() + t.conj() * b.clone()) / (one + (t.clone() * a.clone()).conj() * b.clone());
        Self::new(new_t, new_a)
    }

    pub fn invert(&self) -> Self {
        Self { t: self.t.conj(), a: -(self.t.clone() * self.a.clone()) }
    }

    /// Derivative of the map at `z`.
    pub fn derivative(&self, z: &ComplexRational) -> ComplexRational {
        let den = ComplexRational::one() - self.a.conj() * z.clone();
        self.t.scale(&(Rational::one() - self.a.norm_sqr())) / (den.clone() * den)
    }

    pub fn derivative_f64(&self, z: Complex64) -> Complex64 {
        let (t, a) = (self.t.to_complex64(), self.a.to_complex64());
        let den = 1.0 - a.conj() * z;
        t * (1.0 - a.norm_sqr()) / (den * den)
    }

    pub fn to_json(&self) -> Value {
        json!({ "t": self.t.to_json(), "a": self.a.to_json() })
    }
}

pub(crate) fn require_in_disc(z: &ComplexRational) -> Result<()> {
    if z.norm_sqr() >= Rational::one() {
        return Err(Error::OutsideDisc(format!("|z|^2 = {}", rational_to_string(&z.norm_sqr()))));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: Rational, im: Rational) -> ComplexRational {
        ComplexRational::new(re, im)
    }

    #[test]
    fn identity_laws() {
        let id = MobiusElement::identity();
        assert_eq!(id.invert(), id);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_element(&mut rng);
            assert_eq!(g.compose(&g.invert()).unwrap(), id);
            assert_eq!(g.invert().compose(&g).unwrap(), id);
            assert_eq!(g.compose(&id).unwrap(), g);
            assert_eq!(id.compose(&g).unwrap(), g);
        }
    }

    #[test]
    fn compose_is_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let (g, h, k) = (random_element(&mut rng), random_element(&mut rng), random_element(&mut rng));
            let z = random_point(&mut rng);
            let gh = g.compose(&h).unwrap();
            assert_eq!(gh.apply(&z).unwrap(), g.apply(&h.apply(&z).unwrap()).unwrap());
            let left = gh.compose(&k).unwrap();
            let right = g.compose(&h.compose(&k).unwrap()).unwrap();
            assert_eq!(left.apply(&z).unwrap(), right.apply(&z).unwrap());
        }
    }

    #[test]
    fn inverse_undoes_apply() {
        let g = MobiusElement::from_slope(&ratio(1, 3), c(ratio(1, 2), ratio(-1, 5))).unwrap();
        let z = c(ratio(1, 7), ratio(2, 9));
        assert_eq!(g.invert().apply(&g.apply(&z).unwrap()).unwrap(), z);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let g = MobiusElement::from_slope(&ratio(2, 3), c(ratio(1, 3), ratio(1, 4))).unwrap();
        let z = Complex64::new(0.2, -0.1);
        let h = 1e-6;
        let fd = (g.apply_f64(z + h) - g.apply_f64(z - h)) / (2.0 * h);
        assert!((fd - g.derivative_f64(z)).norm() < 1e-8);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(MobiusElement::new(c(ratio(1, 2), ratio(0, 1)), ComplexRational::zero()).is_err());
        assert!(MobiusElement::new(ComplexRational::one(), c(ratio(3, 5), ratio(4, 5))).is_err());
        assert!(MobiusElement::identity().apply(&c(ratio(1, 1), ratio(0, 1))).is_err());
    }
}

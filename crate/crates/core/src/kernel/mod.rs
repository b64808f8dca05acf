//! Kernel specifications and the jet kernels built from products of Szegő
//! kernel powers, in closed form and as coefficient tables.

mod closed;
mod jet;
pub mod oracle;
mod szego;

pub use closed::{tridisc_jet_closed_form, ClosedFormKernel};
pub use jet::{jet_entry_closed_form, jet_kernel_closed_form, jet_kernel_series, jet_kernel_terms};
pub use oracle::{jet_kernel_series_bruteforce, tridisc_jet_series_bruteforce};
pub use szego::{szego_power_series, SzegoTerm, SzegoTermSum};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::scalar::{rational_to_string, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Bidisc,
    Tridisc,
}

/// Parameters of `(1 - z1 w1bar)^-alpha (1 - z2 w2bar)^-beta [(1 - z3 w3bar)^-gamma]`
/// together with the jet order.
///
/// On the bidisc the jet has `jet_order + 1` rows: derivatives of order
/// `0..=jet_order` in the second variable. The tridisc always uses the
/// first-order jet in the second and third variables.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub domain: Domain,
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Option<Rational>,
    pub jet_order: usize,
}

impl KernelSpec {
    pub fn bidisc(alpha: Rational, beta: Rational, jet_order: usize) -> Result<Self> {
        let spec = Self { domain: Domain::Bidisc, alpha, beta, gamma: None, jet_order };
        spec.validate()?;
        Ok(spec)
    }

    pub fn tridisc(alpha: Rational, beta: Rational, gamma: Rational) -> Result<Self> {
        let spec = Self { domain: Domain::Tridisc, alpha, beta, gamma: Some(gamma), jet_order: 1 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, q: &Rational| {
            if q.is_positive() {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!("{name} must be positive, got {}", rational_to_string(q))))
            }
        };
        positive("alpha", &self.alpha)?;
        positive("beta", &self.beta)?;
        match (self.domain, &self.gamma) {
            (Domain::Bidisc, None) => Ok(()),
            (Domain::Bidisc, Some(_)) => Err(Error::InvalidSpec("gamma given for the bidisc".into())),
            (Domain::Tridisc, Some(g)) => positive("gamma", g),
            (Domain::Tridisc, None) => Err(Error::InvalidSpec("tridisc needs gamma".into())),
        }
    }

    /// Size of the jet matrices.
    pub fn dim(&self) -> usize {
        match self.domain {
            Domain::Bidisc => self.jet_order + 1,
            Domain::Tridisc => 3,
        }
    }

    pub(crate) fn require_bidisc(&self) -> Result<()> {
        match self.domain {
            Domain::Bidisc => Ok(()),
            Domain::Tridisc => Err(Error::InvalidSpec("bidisc spec required".into())),
        }
    }

    pub(crate) fn require_tridisc(&self) -> Result<&Rational> {
        match (self.domain, &self.gamma) {
            (Domain::Tridisc, Some(g)) => Ok(g),
            _ => Err(Error::InvalidSpec("tridisc spec required".into())),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "domain": match self.domain { Domain::Bidisc => "bidisc", Domain::Tridisc => "tridisc" },
            "alpha": rational_to_string(&self.alpha),
            "beta": rational_to_string(&self.beta),
            "jet_order": self.jet_order,
        });
        if let Some(g) = &self.gamma {
            v["gamma"] = serde_json::Value::String(rational_to_string(g));
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn spec_validation() {
        assert!(KernelSpec::bidisc(int(1), ratio(1, 2), 0).is_ok());
        assert!(KernelSpec::bidisc(int(0), int(1), 1).is_err());
        assert!(KernelSpec::bidisc(int(1), int(-1), 1).is_err());
        assert!(KernelSpec::tridisc(int(1), int(9), int(0)).is_err());
        let t = KernelSpec::tridisc(int(1), int(9), int(16)).unwrap();
        assert_eq!(t.dim(), 3);
        assert!(t.require_bidisc().is_err());
    }
}

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Result;
use crate::kernel::KernelSpec;
use crate::scalar::{ratio, ComplexRational, Rational};

use super::cocycle::describe;
use super::{cocycle_c, cocycle_p, verify_matrix_cocycle, MobiusElement, Mode};

/// Largest `|a|^2` and `|z|^2` produced by the generators.
fn radius_sq_cap() -> Rational {
    ratio(49, 100)
}

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(-6..=6), rng.gen_range(1..=9))
}

/// A point with `|z| <= 7/10`, rational coordinates with small denominators.
pub fn random_point<R: Rng>(rng: &mut R) -> ComplexRational {
    loop {
        let z = ComplexRational::new(small_rational(rng), small_rational(rng));
        if z.norm_sqr() <= radius_sq_cap() {
            return z;
        }
    }
}

/// `t` from a random rational slope, `a` from [`random_point`].
pub fn random_element<R: Rng>(rng: &mut R) -> MobiusElement {
    let s = small_rational(rng);
    MobiusElement::from_slope(&s, random_point(rng)).expect("generated parameters are valid")
}

/// Parameters near the identity for principal-branch checks.
fn near_identity<R: Rng>(rng: &mut R) -> (MobiusElement, ComplexRational) {
    let tiny = |rng: &mut R| ratio(rng.gen_range(-3..=3), 20);
    let g = MobiusElement::from_slope(&tiny(rng), ComplexRational::new(tiny(rng), tiny(rng))).expect("small parameters");
    (g, ComplexRational::new(tiny(rng), tiny(rng)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub check: String,
    pub inputs: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub spec: KernelSpec,
    pub mode: Mode,
    pub seed: u64,
    pub trials: usize,
    pub failures: Vec<Counterexample>,
}

impl TrialReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "spec": self.spec.to_json(),
            "mode": self.mode.as_str(),
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed(),
            "counterexamples": self.failures.iter().map(|c| json!({ "check": c.check, "inputs": c.inputs })).collect::<Vec<_>>(),
        })
    }
}

/// Random pairs `(phi, psi)` and points `z` checked against the chain rule
/// for `c`, the cocycle rule for `p` and the matrix cocycle identity.
///
/// Numeric mode draws parameters near the identity and checks only the
/// matrix identity.
pub fn cocycle_trials(spec: &KernelSpec, trials: usize, seed: u64, mode: Mode) -> Result<TrialReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = vec![];
    for _ in 0..trials {
        let (g, h, z) = match mode {
            Mode::Exact => (random_element(&mut rng), random_element(&mut rng), random_point(&mut rng)),
            Mode::Numeric => {
                let (g, z) = near_identity(&mut rng);
                (g, near_identity(&mut rng).0, z)
            }
        };
        let mut fail = |check: &str| failures.push(Counterexample { check: check.into(), inputs: describe(spec, &g, Some(&h), &z) });
        if mode == Mode::Exact {
            let hz = h.invert().apply(&z)?;
            let gh = h.compose(&g)?;
            let c_h = cocycle_c(&h, &z)?;
            if cocycle_c(&g, &hz)? * c_h.clone() != cocycle_c(&gh, &z)? {
                fail("c chain rule");
            }
            if cocycle_p(&g, &hz)? * c_h + cocycle_p(&h, &z)? != cocycle_p(&gh, &z)? {
                fail("p cocycle rule");
            }
        }
        if !verify_matrix_cocycle(spec, &g, &h, &z, mode)? {
            fail("matrix cocycle");
        }
    }
    Ok(TrialReport { spec: spec.clone(), mode, seed, trials, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn generators_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            assert!(random_point(&mut rng).norm_sqr() <= radius_sq_cap());
            assert!(random_element(&mut rng).a().norm_sqr() <= radius_sq_cap());
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let spec = KernelSpec::bidisc(int(1), int(1), 1).unwrap();
        let a = cocycle_trials(&spec, 5, 42, Mode::Exact).unwrap();
        let b = cocycle_trials(&spec, 5, 42, Mode::Exact).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.passed());
    }

    #[test]
    fn numeric_smoke() {
        let spec = KernelSpec::bidisc(int(1), ratio(1, 2), 2).unwrap();
        assert!(cocycle_trials(&spec, 20, 3, Mode::Numeric).unwrap().passed());
    }
}

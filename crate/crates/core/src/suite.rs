//! The acceptance grid: twelve checks, each reporting pass/fail, details
//! and a counterexample when it fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::curvature::{
    curvature_at_zero, curvature_at_zero_closed_form, curvature_series, equivalence_test, jet2_curvature_closed_form,
    jet2_eigenvector_residual, MetricKind,
};
use crate::error::Result;
use crate::kernel::{jet_kernel_series, jet_kernel_series_bruteforce, KernelSpec};
use crate::matrix::Matrix;
use crate::mobius::{
    binomial_identity_check, cocycle_trials, quasi_invariance_at_zero, quasi_invariance_polynomial, random_element, Mode,
};
use crate::normalize::{
    check_single_entry_pattern, closed_form_coefficient, irreducibility_verdict, pipeline_coefficient, CoeffName,
    NormalizedCoeffs,
};
use crate::onb::{q_blocks, WilkinsReport};
use crate::scalar::{int, ratio, rational_to_f64, rational_to_string, Rational};
use crate::tridisc::{tridisc_block_diagonalize, tridisc_report_with, TridiscReport};

/// Truncation used on the grid.
pub const GRID_TRUNC: usize = 6;
/// Truncation for the series curvature comparison.
pub const CURVATURE_TRUNC: usize = 20;
pub const CURVATURE_TOLERANCE: f64 = 1e-8;
pub const EIGENVECTOR_TOLERANCE: f64 = 1e-12;
pub const WILKINS_TOLERANCE: f64 = 1e-8;
/// Exact trials per integer-exponent spec; twelve specs give 300 trials.
pub const EXACT_TRIALS_PER_SPEC: usize = 25;
pub const NUMERIC_TRIALS_PER_SPEC: usize = 20;
pub const DEFAULT_SEED: u64 = 20240601;

/// `(alpha, beta)` in `{1/2, 1, 3/2, 2}^2`.
pub fn grid_pairs() -> Vec<(Rational, Rational)> {
    let vals = [ratio(1, 2), int(1), ratio(3, 2), int(2)];
    let mut out = vec![];
    for a in &vals {
        for b in &vals {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

/// Every grid pair at jet orders 1, 2, 3.
pub fn grid() -> Vec<KernelSpec> {
    let mut out = vec![];
    for (a, b) in grid_pairs() {
        for n in 1..=3 {
            out.push(KernelSpec::bidisc(a.clone(), b.clone(), n).expect("grid parameters are positive"));
        }
    }
    out
}

/// Parameter sets whose cocycle exponent `-(alpha+beta)/2 - n` is an integer.
pub fn integer_exponent_grid() -> Vec<KernelSpec> {
    let pairs = [(ratio(1, 2), ratio(3, 2)), (ratio(3, 2), ratio(1, 2)), (int(1), int(1)), (int(2), int(2))];
    let mut out = vec![];
    for (a, b) in pairs {
        for n in 1..=3 {
            out.push(KernelSpec::bidisc(a.clone(), b.clone(), n).expect("positive"));
        }
    }
    out
}

/// Parameter sets with a half-integer cocycle exponent, for numeric mode.
pub fn fractional_exponent_grid() -> Vec<KernelSpec> {
    let pairs = [(int(1), ratio(1, 2)), (ratio(1, 2), int(1)), (int(2), ratio(3, 2))];
    let mut out = vec![];
    for (a, b) in pairs {
        for n in 1..=3 {
            out.push(KernelSpec::bidisc(a.clone(), b.clone(), n).expect("positive"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
    /// Present exactly when the check failed.
    pub counterexample: Option<Value>,
    pub elapsed: Duration,
}

impl CheckResult {
    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "counterexample": self.counterexample,
            "seconds": self.elapsed.as_secs_f64(),
        })
    }

    /// `PASS [ 1] name (0.12s)`.
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64()
        )
    }
}

/// What a check body returns: details plus the first counterexample, if any.
struct Outcome {
    detail: Value,
    counterexample: Option<Value>,
}

fn run(id: usize, name: &'static str, body: impl FnOnce() -> Result<Outcome>) -> CheckResult {
    let start = Instant::now();
    let (detail, counterexample) = match body() {
        Ok(o) => (o.detail, o.counterexample),
        Err(e) => (Value::Null, Some(json!({ "error": e.to_string() }))),
    };
    CheckResult { id, name, passed: counterexample.is_none(), detail, counterexample, elapsed: start.elapsed() }
}

fn cjson(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn first_series_difference(spec: &KernelSpec, trunc: usize) -> Result<Option<Value>> {
    let closed = jet_kernel_series(spec, trunc)?;
    let brute = jet_kernel_series_bruteforce(spec, trunc)?;
    for m in 0..=trunc {
        for p in 0..=trunc {
            let (a, b) = (closed.coeff(m, p), brute.coeff(m, p));
            if a != b {
                return Ok(Some(json!({
                    "spec": spec.to_json(),
                    "coefficient": [m, p],
                    "closed_form": a.to_json_rows(),
                    "bruteforce": b.to_json_rows(),
                })));
            }
        }
    }
    Ok(None)
}

/// 1. The closed-form jet series equals the brute-force expansion.
pub fn check_oracle_equivalence() -> CheckResult {
    run(1, "oracle equivalence", || {
        let specs = grid();
        for spec in &specs {
            if let Some(cx) = first_series_difference(spec, GRID_TRUNC)? {
                return Ok(Outcome { detail: json!({ "trunc": GRID_TRUNC }), counterexample: Some(cx) });
            }
        }
        Ok(Outcome { detail: json!({ "specs": specs.len(), "trunc": GRID_TRUNC }), counterexample: None })
    })
}

fn closed_form_mismatch(
    spec: &KernelSpec,
    coeffs: &NormalizedCoeffs,
    name: CoeffName,
    index: usize,
    closed: &Matrix<Rational>,
) -> Result<Option<Value>> {
    let pipeline = pipeline_coefficient(name, coeffs, index)?;
    Ok((closed != &pipeline).then(|| {
        json!({
            "spec": spec.to_json(),
            "coefficient": name.as_str(),
            "index": index,
            "closed_form": closed.to_json_rows(),
            "pipeline": pipeline.to_json_rows(),
        })
    }))
}

/// 2. `a_00`, `a_m0`, `a_{m+1,1}` and `c_k0` closed forms match the pipeline.
pub fn check_closed_forms() -> CheckResult {
    run(2, "closed-form coefficients", || {
        let mut compared = 0usize;
        for spec in grid() {
            let coeffs = NormalizedCoeffs::for_spec(&spec, GRID_TRUNC)?;
            for name in [CoeffName::A00, CoeffName::Am0, CoeffName::Am1, CoeffName::Ck0] {
                for index in name.indices(spec.jet_order) {
                    let closed = closed_form_coefficient(name, &spec, index)?;
                    compared += 1;
                    if let Some(cx) = closed_form_mismatch(&spec, &coeffs, name, index, &closed)? {
                        return Ok(Outcome { detail: json!({ "compared": compared }), counterexample: Some(cx) });
                    }
                }
            }
        }
        Ok(Outcome { detail: json!({ "compared": compared }), counterexample: None })
    })
}

/// 3. `N_k1` has a single nonzero entry with the closed-form value.
pub fn check_single_entry() -> CheckResult {
    run(3, "single-entry pattern of N_k1", || {
        let mut checked = 0usize;
        for spec in grid() {
            let n = spec.jet_order;
            let coeffs = NormalizedCoeffs::for_spec(&spec, n + 1)?;
            for k in 2..=n + 1 {
                checked += 1;
                if let Some(v) = check_single_entry_pattern(&spec, k, &coeffs.n_coeff(k, 1)?)? {
                    let cx = json!({ "spec": spec.to_json(), "violation": v.to_json() });
                    return Ok(Outcome { detail: json!({ "checked": checked }), counterexample: Some(cx) });
                }
            }
        }
        Ok(Outcome { detail: json!({ "checked": checked }), counterexample: None })
    })
}

/// 4. The commutant of the normalized coefficients is the scalars.
pub fn check_irreducibility() -> CheckResult {
    run(4, "irreducibility", || {
        let specs = grid();
        for spec in &specs {
            let report = irreducibility_verdict(spec)?;
            if report.dimension != 1 {
                let cx = json!({ "spec": spec.to_json(), "report": report.to_json() });
                return Ok(Outcome { detail: Value::Null, counterexample: Some(cx) });
            }
        }
        Ok(Outcome { detail: json!({ "specs": specs.len(), "commutant_dimension": 1 }), counterexample: None })
    })
}

/// 5. Curvature at the origin and the equivalence test it induces.
pub fn check_curvature_at_zero() -> CheckResult {
    run(5, "curvature at the origin", || {
        let specs = grid();
        for spec in &specs {
            let (k, closed) = (curvature_at_zero(spec)?, curvature_at_zero_closed_form(spec)?);
            if k != closed {
                let cx = json!({ "spec": spec.to_json(), "pipeline": k.to_json_rows(), "closed_form": closed.to_json_rows() });
                return Ok(Outcome { detail: Value::Null, counterexample: Some(cx) });
            }
        }
        let mut pairs = 0usize;
        for a in &specs {
            for b in specs.iter().filter(|b| b.jet_order == a.jet_order) {
                let same = a.alpha == b.alpha && a.beta == b.beta;
                if equivalence_test(a, b)? != same {
                    let cx = json!({ "first": a.to_json(), "second": b.to_json(), "expected_equivalent": same });
                    return Ok(Outcome { detail: Value::Null, counterexample: Some(cx) });
                }
                pairs += 1;
            }
        }
        Ok(Outcome { detail: json!({ "specs": specs.len(), "pairs": pairs }), counterexample: None })
    })
}

/// 6. Series curvature of the order-one jet metric against its closed form.
pub fn check_curvature_series() -> CheckResult {
    run(6, "curvature series vs closed form", || {
        let points = [Complex64::new(0.2, 0.0), Complex64::new(0.3, 0.2)];
        let (mut worst, mut worst_residual) = (0.0f64, 0.0f64);
        for (a, b) in grid_pairs() {
            let spec = KernelSpec::bidisc(a.clone(), b.clone(), 1)?;
            let series = curvature_series(&spec, CURVATURE_TRUNC, MetricKind::Jet)?;
            let (af, bf) = (rational_to_f64(&a), rational_to_f64(&b));
            for &z in &points {
                let value = series.evaluate_at(z)?.value;
                let closed = jet2_curvature_closed_form(af, bf, z)?;
                let err = value.max_abs_diff(&closed);
                let residual = jet2_eigenvector_residual(af, bf, z)?;
                worst = worst.max(err);
                worst_residual = worst_residual.max(residual);
                if err >= CURVATURE_TOLERANCE || residual >= EIGENVECTOR_TOLERANCE {
                    let cx = json!({
                        "spec": spec.to_json(),
                        "z": cjson(z),
                        "series": value.to_json_rows(),
                        "closed_form": closed.to_json_rows(),
                        "error": err,
                        "eigenvector_residual": residual,
                    });
                    return Ok(Outcome { detail: Value::Null, counterexample: Some(cx) });
                }
            }
        }
        let detail = json!({ "trunc": CURVATURE_TRUNC, "max_error": worst, "max_eigenvector_residual": worst_residual });
        Ok(Outcome { detail, counterexample: None })
    })
}

/// 7. The binomial identity for `0 <= k <= i <= j <= 10`.
pub fn check_binomial_identity() -> CheckResult {
    run(7, "binomial identity", || {
        let mut checked = 0usize;
        for j in 0..=10 {
            for i in 0..=j {
                for k in 0..=i {
                    checked += 1;
                    if !binomial_identity_check(i, j, k)? {
                        return Ok(Outcome { detail: Value::Null, counterexample: Some(json!({ "i": i, "j": j, "k": k })) });
                    }
                }
            }
        }
        Ok(Outcome { detail: json!({ "triples": checked }), counterexample: None })
    })
}

/// 8. Chain rule for `c`, cocycle rule for `p`, and the matrix cocycle.
pub fn check_cocycles(seed: u64) -> CheckResult {
    run(8, "cocycle identities", || {
        let mut exact = 0usize;
        for (i, spec) in integer_exponent_grid().iter().enumerate() {
            let report = cocycle_trials(spec, EXACT_TRIALS_PER_SPEC, seed + i as u64, Mode::Exact)?;
            exact += report.trials;
            if !report.passed() {
                return Ok(Outcome { detail: Value::Null, counterexample: Some(report.to_json()) });
            }
        }
        let mut numeric = 0usize;
        for (i, spec) in fractional_exponent_grid().iter().enumerate() {
            let report = cocycle_trials(spec, NUMERIC_TRIALS_PER_SPEC, seed + 100 + i as u64, Mode::Numeric)?;
            numeric += report.trials;
            if !report.passed() {
                return Ok(Outcome { detail: Value::Null, counterexample: Some(report.to_json()) });
            }
        }
        Ok(Outcome { detail: json!({ "seed": seed, "exact_trials": exact, "numeric_trials": numeric }), counterexample: None })
    })
}

/// 9. Quasi-invariance, as a polynomial identity and at the origin.
pub fn check_quasi_invariance(seed: u64) -> CheckResult {
    run(9, "quasi-invariance", || {
        let mut polys = 0usize;
        for beta in [ratio(1, 2), int(1), ratio(5, 2)] {
            for j in 0..=6 {
                for i in 0..=j {
                    polys += 1;
                    if !quasi_invariance_polynomial(i, j, &beta, 6)? {
                        let cx = json!({ "i": i, "j": j, "beta": rational_to_string(&beta) });
                        return Ok(Outcome { detail: Value::Null, counterexample: Some(cx) });
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut elements = 0usize;
        for spec in integer_exponent_grid() {
            for _ in 0..5 {
                let g = random_element(&mut rng);
                elements += 1;
                if !quasi_invariance_at_zero(&spec, &g, Mode::Exact)? {
                    let cx = json!({ "spec": spec.to_json(), "element": g.to_json() });
                    return Ok(Outcome { detail: Value::Null, counterexample: Some(cx) });
                }
            }
        }
        Ok(Outcome { detail: json!({ "polynomials": polys, "elements": elements, "seed": seed }), counterexample: None })
    })
}

/// 10. The basis sum at `z = w = 0.3` and the shift blocks.
pub fn check_wilkins() -> CheckResult {
    run(10, "orthonormal basis example", || {
        let one = int(1);
        let z = Complex64::new(0.3, 0.0);
        let report = WilkinsReport::build(&one, &one, 60, z, z)?;
        if report.max_error >= WILKINS_TOLERANCE {
            return Ok(Outcome { detail: Value::Null, counterexample: Some(report.to_json()) });
        }
        for p in 0..=50 {
            let (q1, q2) = q_blocks(&one, &one, p);
            let square = q1.matmul(&q1);
            if !square.data().iter().all(|x| *x == 0.0) || q2[(0, 1)] != 0.0 || q2[(1, 0)] != 0.0 {
                let cx = json!({ "p": p, "q1": q1.to_json_rows(), "q1_squared": square.to_json_rows(), "q2": q2.to_json_rows() });
                return Ok(Outcome { detail: Value::Null, counterexample: Some(cx) });
            }
        }
        let detail = json!({ "terms": 60, "max_error": report.max_error, "scale": report.scale, "blocks": 51 });
        Ok(Outcome { detail, counterexample: None })
    })
}

/// The Pythagorean tridisc parameters `(1, 9, 16)`.
pub fn tridisc_spec() -> KernelSpec {
    KernelSpec::tridisc(int(1), int(9), int(16)).expect("positive")
}

fn tridisc_verdict(r: &TridiscReport) -> bool {
    let mut ranks = r.projection_ranks.clone();
    ranks.sort_unstable();
    r.passed() && r.exact && r.g2_exponent == int(28) && r.commutant_dimension >= 2 && ranks == [1, 2]
}

/// 11. Block diagonalization and reducibility on the tridisc.
pub fn check_tridisc() -> CheckResult {
    run(11, "tridisc block diagonalization", || {
        let report = tridisc_block_diagonalize(&tridisc_spec())?;
        let detail = json!({
            "g2_exponent": rational_to_string(&report.g2_exponent),
            "commutant_dimension": report.commutant_dimension,
            "projection_ranks": report.projection_ranks,
        });
        let counterexample = (!tridisc_verdict(&report)).then(|| report.to_json());
        Ok(Outcome { detail, counterexample })
    })
}

/// Record of one mutation: whether the perturbed value was caught.
struct Mutation {
    family: &'static str,
    caught: bool,
    evidence: Value,
}

fn bump(m: &Matrix<Rational>, r: usize, c: usize) -> Matrix<Rational> {
    let mut out = m.clone();
    out[(r, c)] += int(1);
    out
}

fn coefficient_mutations(out: &mut Vec<Mutation>) -> Result<()> {
    for spec in grid() {
        let n = spec.jet_order;
        let coeffs = NormalizedCoeffs::for_spec(&spec, GRID_TRUNC)?;
        for name in CoeffName::ALL {
            for index in name.indices(n) {
                let closed = closed_form_coefficient(name, &spec, index)?;
                for (r, c) in closed.nonzero_entries() {
                    let evidence = closed_form_mismatch(&spec, &coeffs, name, index, &bump(&closed, r, c))?;
                    out.push(Mutation {
                        family: "closed-form coefficient",
                        caught: evidence.is_some(),
                        evidence: json!({ "entry": [r, c], "mismatch": evidence }),
                    });
                }
            }
        }
        for k in 2..=n + 1 {
            let nk1 = coeffs.n_coeff(k, 1)?;
            let v = check_single_entry_pattern(&spec, k, &bump(&nk1, n + 1 - k, n))?;
            out.push(Mutation {
                family: "single-entry value",
                caught: v.is_some(),
                evidence: v.map_or(json!({ "spec": spec.to_json(), "k": k }), |v| v.to_json()),
            });
        }
        let curv = curvature_at_zero(&spec)?;
        let closed = curvature_at_zero_closed_form(&spec)?;
        for i in 0..=n {
            let bumped = bump(&closed, i, i);
            out.push(Mutation {
                family: "curvature at the origin",
                caught: bumped != curv,
                evidence: json!({ "spec": spec.to_json(), "entry": i, "closed_form": bumped.to_json_rows(), "pipeline": curv.to_json_rows() }),
            });
        }
    }
    Ok(())
}

fn curvature_mutations(out: &mut Vec<Mutation>) -> Result<()> {
    let z = Complex64::new(0.2, 0.0);
    for (a, b) in grid_pairs() {
        let spec = KernelSpec::bidisc(a.clone(), b.clone(), 1)?;
        let value = curvature_series(&spec, CURVATURE_TRUNC, MetricKind::Jet)?.evaluate_at(z)?.value;
        let closed = jet2_curvature_closed_form(rational_to_f64(&a), rational_to_f64(&b), z)?;
        for (r, c) in [(0, 0), (0, 1), (1, 1)] {
            let mut bumped = closed.clone();
            bumped[(r, c)] += 1.0;
            let err = value.max_abs_diff(&bumped);
            out.push(Mutation {
                family: "curvature closed form",
                caught: err >= CURVATURE_TOLERANCE,
                evidence: json!({ "spec": spec.to_json(), "z": cjson(z), "entry": [r, c], "error": err }),
            });
        }
    }
    Ok(())
}

fn tridisc_mutation(out: &mut Vec<Mutation>) -> Result<()> {
    let spec = tridisc_spec();
    let gamma = spec.gamma.clone().expect("tridisc");
    let wrong = &spec.beta + gamma - int(1);
    let report = tridisc_report_with(&spec, &wrong)?;
    out.push(Mutation {
        family: "tridisc bidisc parameter",
        caught: !tridisc_verdict(&report),
        evidence: json!({ "bidisc_beta": rational_to_string(&wrong), "failures": report.failures() }),
    });
    Ok(())
}

/// 12. Each single +1 perturbation of a closed form is detected.
pub fn check_mutations() -> CheckResult {
    run(12, "mutation sensitivity", || {
        let mut mutations = vec![];
        coefficient_mutations(&mut mutations)?;
        curvature_mutations(&mut mutations)?;
        tridisc_mutation(&mut mutations)?;
        let mut families: Vec<&str> = mutations.iter().map(|m| m.family).collect();
        families.dedup();
        let per_family = families
            .iter()
            .map(|f| {
                let of: Vec<&Mutation> = mutations.iter().filter(|m| m.family == *f).collect();
                json!({
                    "family": f,
                    "mutations": of.len(),
                    "caught": of.iter().filter(|m| m.caught).count(),
                    "sample_counterexample": of.iter().find(|m| m.caught).map(|m| m.evidence.clone()),
                })
            })
            .collect::<Vec<_>>();
        let survivor = mutations.iter().find(|m| !m.caught).map(|m| json!({ "family": m.family, "survived": m.evidence }));
        Ok(Outcome { detail: json!({ "mutations": mutations.len(), "families": per_family }), counterexample: survivor })
    })
}

/// All twelve checks in order.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    vec![
        check_oracle_equivalence(),
        check_closed_forms(),
        check_single_entry(),
        check_irreducibility(),
        check_curvature_at_zero(),
        check_curvature_series(),
        check_binomial_identity(),
        check_cocycles(seed),
        check_quasi_invariance(seed),
        check_wilkins(),
        check_tridisc(),
        check_mutations(),
    ]
}

/// Summary document for a finished run.
pub fn summary_json(results: &[CheckResult], seed: u64) -> Value {
    json!({
        "seed": seed,
        "passed": results.iter().all(|r| r.passed),
        "checks": results.iter().map(CheckResult::to_json).collect::<Vec<_>>(),
        "seconds": results.iter().map(|r| r.elapsed.as_secs_f64()).sum::<f64>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_have_expected_sizes() {
        assert_eq!(grid().len(), 48);
        assert_eq!(integer_exponent_grid().len() * EXACT_TRIALS_PER_SPEC, 300);
        for spec in integer_exponent_grid() {
            let e = -(&spec.alpha + &spec.beta) / int(2) - int(spec.jet_order as i64);
            assert!(e.is_integer());
        }
        for spec in fractional_exponent_grid() {
            let e = -(&spec.alpha + &spec.beta) / int(2) - int(spec.jet_order as i64);
            assert!(!e.is_integer());
        }
    }

    #[test]
    fn failing_body_reports_error() {
        let r = run(0, "broken", || Err(crate::Error::Singular));
        assert!(!r.passed);
        assert!(r.counterexample.as_ref().unwrap()["error"].as_str().unwrap().contains("singular"));
        assert!(r.line().starts_with("FAIL"));
    }

    #[test]
    fn binomial_check_passes() {
        assert!(check_binomial_identity().passed);
    }
}

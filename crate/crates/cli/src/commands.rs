use jetkernel::curvature::{curvature_at_zero_closed_form, CurvatureReport};
use jetkernel::kernel::{
    jet_kernel_series, jet_kernel_series_bruteforce, tridisc_jet_closed_form, tridisc_jet_series_bruteforce, KernelSpec,
};
use jetkernel::mobius::{binomial_identity_check, cocycle_trials, Mode};
use jetkernel::normalize::{irreducibility_verdict, irreducibility_verdict_numeric, Verdict};
use jetkernel::onb::WilkinsReport;
use jetkernel::scalar::int;
use jetkernel::suite::{run_all, summary_json};
use jetkernel::tridisc::tridisc_block_diagonalize;
use jetkernel::Result;
use serde_json::{json, Value};

use crate::args::{
    CocycleArgs, CurvatureArgs, IdentityArgs, IrreducibilityArgs, JetCoeffsArgs, ModeArg, Params, TridiscArgs,
    VerifyAllArgs, WilkinsArgs,
};

/// A finished command: the JSON document and whether its checks passed.
pub struct Report {
    pub document: Value,
    pub passed: bool,
    /// One line per check, shown on stderr.
    pub lines: Vec<String>,
}

impl Report {
    fn new(document: Value, passed: bool) -> Self {
        Self { document, passed, lines: vec![] }
    }
}

fn bidisc(p: &Params) -> Result<KernelSpec> {
    KernelSpec::bidisc(p.alpha.clone(), p.beta.clone(), p.order)
}

pub fn jet_coeffs(a: &JetCoeffsArgs) -> Result<Report> {
    let (spec, series) = match &a.gamma {
        Some(g) => {
            let spec = KernelSpec::tridisc(a.params.alpha.clone(), a.params.beta.clone(), g.clone())?;
            let s = if a.oracle {
                tridisc_jet_series_bruteforce(&spec, a.trunc)?
            } else {
                tridisc_jet_closed_form(&spec)?.to_series(a.trunc)
            };
            (spec, s)
        }
        None => {
            let spec = bidisc(&a.params)?;
            let s = if a.oracle { jet_kernel_series_bruteforce(&spec, a.trunc)? } else { jet_kernel_series(&spec, a.trunc)? };
            (spec, s)
        }
    };
    let doc = json!({
        "spec": spec.to_json(),
        "source": if a.oracle { "oracle" } else { "closed_form" },
        "series": series.to_json(),
    });
    Ok(Report::new(doc, true))
}

pub fn irreducibility(a: &IrreducibilityArgs) -> Result<Report> {
    let spec = bidisc(&a.params)?;
    let (report, verdict) = if a.numeric {
        let r = irreducibility_verdict_numeric(&spec, a.tol)?;
        (r.to_json(), r.verdict)
    } else {
        let r = irreducibility_verdict(&spec)?;
        (r.to_json(), r.verdict)
    };
    Ok(Report::new(json!({ "spec": spec.to_json(), "report": report }), verdict == Verdict::Irreducible))
}

pub fn curvature(a: &CurvatureArgs) -> Result<Report> {
    let spec = bidisc(&a.params)?;
    let report = CurvatureReport::build(&spec, a.trunc, &a.at)?;
    let matches = report.at_zero == curvature_at_zero_closed_form(&spec)?;
    let mut doc = report.to_json();
    doc["at_zero_matches_closed_form"] = json!(matches);
    Ok(Report::new(doc, matches))
}

pub fn cocycle_check(a: &CocycleArgs) -> Result<Report> {
    let spec = bidisc(&a.params)?;
    let mode = match a.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Numeric => Mode::Numeric,
        ModeArg::Auto => {
            let e = -(&spec.alpha + &spec.beta) / int(2) - int(spec.jet_order as i64);
            if e.is_integer() {
                Mode::Exact
            } else {
                Mode::Numeric
            }
        }
    };
    let report = cocycle_trials(&spec, a.trials, a.seed, mode)?;
    Ok(Report::new(report.to_json(), report.passed()))
}

pub fn identity_check(a: &IdentityArgs) -> Result<Report> {
    let mut triples = 0usize;
    let mut counterexamples = vec![];
    for j in 0..=a.max_ij {
        for i in 0..=j {
            for k in 0..=i {
                triples += 1;
                if !binomial_identity_check(i, j, k)? {
                    counterexamples.push(json!({ "i": i, "j": j, "k": k }));
                }
            }
        }
    }
    let passed = counterexamples.is_empty();
    let doc = json!({ "max_ij": a.max_ij, "triples": triples, "passed": passed, "counterexamples": counterexamples });
    Ok(Report::new(doc, passed))
}

pub fn wilkins(a: &WilkinsArgs) -> Result<Report> {
    let report = WilkinsReport::build(&a.alpha, &a.beta, a.terms, a.at, a.w.unwrap_or(a.at))?;
    let passed = report.max_error < a.tol;
    let mut doc = report.to_json();
    doc["tolerance"] = json!(a.tol);
    doc["passed"] = json!(passed);
    Ok(Report::new(doc, passed))
}

pub fn tridisc(a: &TridiscArgs) -> Result<Report> {
    let spec = KernelSpec::tridisc(a.alpha.clone(), a.beta.clone(), a.gamma.clone())?;
    let report = tridisc_block_diagonalize(&spec)?;
    Ok(Report::new(report.to_json(), report.passed()))
}

pub fn verify_all(a: &VerifyAllArgs) -> Result<Report> {
    let results = run_all(a.seed);
    let mut doc = summary_json(&results, a.seed);
    if a.no_timings {
        if let Some(obj) = doc.as_object_mut() {
            obj.remove("seconds");
        }
        for check in doc["checks"].as_array_mut().into_iter().flatten() {
            if let Some(obj) = check.as_object_mut() {
                obj.remove("seconds");
            }
        }
    }
    let passed = results.iter().all(|r| r.passed);
    let lines = results.iter().map(|r| r.line()).collect();
    Ok(Report { document: doc, passed, lines })
}

//! The thirteen acceptance criteria, one PASS/FAIL line each.
//!
//! Criterion 11 is red: the two-qubit geometry has genuine counterexamples to
//! irreducibility and to the restricted quadrangle axiom. The test pins those
//! counterexample counts instead of hiding them.

use std::io::Write;
use std::time::{Duration, Instant};

use qlattice::quantum::{bool_pair, BellScenario};
use qlattice::report::Check;
use qlattice::tensor::DEFAULT_TENSOR_CAP;
use qlattice::verify::{self, expected_bell_marginals, Options};

struct Outcome {
    id: u8,
    passed: bool,
}

fn line(msg: &str) {
    // Straight to the handle so the lines survive test output capture.
    let _ = writeln!(std::io::stderr().lock(), "{msg}");
}

fn criterion(id: u8, title: &str, limit: Duration, f: impl FnOnce() -> Vec<Check>) -> Outcome {
    let t = Instant::now();
    let checks = f();
    let took = t.elapsed();
    let ok = checks.iter().all(|c| c.passed) && took <= limit;
    let cases: u64 = checks.iter().map(|c| c.cases).sum();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} ({}/{})", c.name, c.failures, c.cases))
        .collect();
    let mut msg = format!(
        "{} criterion {id:>2}: {title} [{cases} cases, {:.2?} of {:?}]",
        if ok { "PASS" } else { "FAIL" },
        took,
        limit
    );
    if !failed.is_empty() {
        msg.push_str(&format!(" failing: {}", failed.join(", ")));
    }
    if took > limit {
        msg.push_str(" over time limit");
    }
    line(&msg);
    Outcome { id, passed: ok }
}

fn suite(name: &str, opts: &Options) -> Vec<Check> {
    verify::run_suite(name, opts).unwrap_or_else(|e| vec![Check::verdict(name, "suite error", false, e.to_string())])
}

fn named<'a>(checks: &'a [Check], name: &str) -> &'a Check {
    checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("missing check {name}"))
}

const GEOMETRY_CHECKS: [&str; 9] =
    ["vy1", "vy2", "vy3-restricted", "o1", "o2", "o3", "o4", "irreducibility", "nondegeneracy"];

#[test]
fn acceptance() {
    let opts = Options::default();
    let s = Duration::from_secs;
    let mut out = Vec::new();

    out.push(criterion(1, "boolean domain tables", Duration::from_millis(1), || suite("boolean", &opts)));
    out.push(criterion(2, "pre-closure counterexample", s(1), || suite("closure", &opts)));
    out.push(criterion(3, "cl_c idempotency", s(60), || suite("idempotency", &opts)));
    out.push(criterion(4, "simplex tensor", s(5), || suite("simplex", &opts)));
    out.push(criterion(5, "ontic completion of Z'2", s(5), || suite("completion", &opts)));
    out.push(criterion(6, "tensor order oracle equivalence", s(120), || suite("tensor", &opts)));
    out.push(criterion(7, "Bell pipeline", s(60), || {
        let mut checks = suite("bell", &opts);
        // The literal marginal strings normalise to the computed elements.
        let bb = bool_pair();
        let sc = BellScenario::new(2, 2, DEFAULT_TENSOR_CAP).unwrap();
        let phi = sc.marginals(&bb).unwrap();
        checks.push(Check::verdict(
            "bell-marginals-literal",
            "N⊗⊥⊓Y⊗N, Y⊗⊥⊓N⊗Y, Y⊗N⊓⊥⊗Y, ⊥⊗⊥",
            phi == expected_bell_marginals(&bb).unwrap() && bb.label(phi[0]) == "N⊗⊥ ⊓ Y⊗N",
            format!("{:?}", phi.map(|z| bb.label(z).to_string())),
        ));
        checks
    }));
    out.push(criterion(8, "no-broadcasting", s(10), || suite("broadcast", &opts)));
    out.push(criterion(9, "contextuality", s(60), || suite("contexts", &opts)));
    out.push(criterion(10, "orthoclosure", s(5), || suite("orthoclosure", &opts)));
    let mut geo = Vec::new();
    out.push(criterion(11, "two-qubit geometry", s(600), || {
        geo = suite("geometry", &opts);
        GEOMETRY_CHECKS.iter().map(|n| named(&geo, n).clone()).collect()
    }));
    out.push(criterion(12, "covering preservation", s(60), || suite("covering", &opts)));
    out.push(criterion(13, "non-completeness", s(10), || {
        let checks = suite("noncompleteness", &opts);
        line(&format!("     growth chain: {}", checks[0].witnesses[0]));
        checks
    }));

    let red: Vec<u8> = out.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    line(&format!("acceptance: {} of 13 pass; red: {red:?}", 13 - red.len()));

    // Every criterion other than 11 must pass.
    assert_eq!(red, vec![11], "unexpected acceptance result");

    // Criterion 11 fails exactly on the counterexamples recorded in the decision log.
    let geo = &geo;
    for name in ["vy1", "vy2", "o1", "o2", "o3", "o4", "nondegeneracy"] {
        assert!(named(geo, name).passed, "{name} should pass");
    }
    let irr = named(geo, "irreducibility");
    assert_eq!((irr.failures, irr.cases), (16, irr.cases));
    let vy3 = named(geo, "vy3-restricted");
    assert_eq!((vy3.failures, vy3.cases), (64, 512));
    let types = named(geo, "cover-types");
    assert_eq!(types.failures, 96);
    let other_failures: Vec<&str> = geo
        .iter()
        .filter(|c| !c.passed && !["irreducibility", "vy3-restricted", "cover-types"].contains(&c.name.as_str()))
        .map(|c| c.name.as_str())
        .collect();
    assert!(other_failures.is_empty(), "unexpected geometry failures: {other_failures:?}");
}

use nscurve::ns_system::{LambdaSign, Profile, Zeta};
use nscurve::report::*;

fn filter(zeta: Zeta, h: Profile) -> Filter {
    Filter {
        zeta: Some(zeta),
        h: Some(h),
        lambda_sign: None,
    }
}

#[test]
fn controls_are_refuted_and_counted_as_passes() {
    let opts = RunOptions {
        controls: true,
        ..RunOptions::default()
    };
    let r = run_verify(&filter(Zeta::Any, Profile::Linear), &opts).unwrap();
    let controls: Vec<_> = r.checks.iter().filter(|c| c.kind == "control").collect();
    assert!(!controls.is_empty());
    assert!(controls.iter().all(|c| c.verdict == Outcome::Refuted && c.passed()));
    assert!(r.ok());
}

#[test]
fn default_reports_have_no_refutations() {
    let opts = RunOptions::default();
    let r = run_invariants(&filter(Zeta::Power, Profile::Const), &opts).unwrap();
    assert!(r.checks.iter().all(|c| c.verdict != Outcome::Refuted));
    assert!(r.checks.iter().all(|c| c.runtime_ms == 0));
    assert!(r.ok());
}

#[test]
fn quadratic_sign_selects_cells() {
    let mut f = filter(Zeta::Any, Profile::Quadratic(LambdaSign::Negative));
    let r = run_verify(&f, &RunOptions::default()).unwrap();
    let cases: std::collections::BTreeSet<_> = r.checks.iter().map(|c| c.case.clone()).collect();
    assert_eq!(cases.len(), 2);
    f.lambda_sign = Some(LambdaSign::Positive);
    let r = run_verify(&f, &RunOptions::default()).unwrap();
    assert!(r.checks.iter().all(|c| c.case.ends_with("quadratic-pos")));
}

#[test]
fn empty_filter_selection_is_an_error() {
    let f = filter(Zeta::Linear, Profile::Power);
    assert!(matches!(run_verify(&f, &RunOptions::default()), Err(RunError::NoCells(_))));
}

#[test]
fn bound_parameters_still_pass() {
    let mut opts = RunOptions::default();
    opts.bindings.pin("beta", Some(3.0));
    let r = run_verify(&filter(Zeta::Power, Profile::Exp), &opts).unwrap();
    assert_eq!(r.checks.iter().filter(|c| c.kind == "symmetry").count(), 4);
    assert!(r.ok());
}

#[test]
fn swapping_the_test_function_changes_admissibility() {
    let mut opts = RunOptions::default();
    let base = run_thermo(&filter(Zeta::Any, Profile::Const), &opts).unwrap();
    assert!(base.ok());
    opts.function = Some("cosh".into());
    let other = run_thermo(&filter(Zeta::Any, Profile::Const), &opts).unwrap();
    let symbolic = |r: &Report| r.checks.iter().filter(|c| c.kind != "admissibility").all(|c| c.passed());
    assert!(symbolic(&other));
}

#[test]
fn report_json_schema() {
    let r = run_lift_checks(&RunOptions::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["summary"]["pass"], 6);
    assert!(v["checks"][0].get("expected").is_none());
}

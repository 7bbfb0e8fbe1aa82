use std::process::Command;

fn nscurve(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nscurve")).args(args).output().expect("binary runs")
}

#[test]
fn verify_power_exp() {
    let out = nscurve(&["verify", "--zeta", "power", "--beta", "3", "--h", "exp"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains("symmetry:X")).count(), 4);
    assert!(text.contains("pass 10 fail 0 inconclusive 0"));
}

#[test]
fn verify_trigonometric_branch() {
    let out = nscurve(&["verify", "--zeta", "any", "--h", "quadratic", "--lambda", "-1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));
    assert!(text.contains("h=quadratic-neg"));
    assert!(!text.contains("h=quadratic-pos"));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = nscurve(&["invariants", "--zeta", "linear", "--seed", "5", "--report", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["seed"], 5);
    let first = &json["checks"][0];
    for key in ["id", "case", "kind", "verdict", "residual", "runtime_ms"] {
        assert!(first.get(key).is_some(), "{key}");
    }
    assert_eq!(json["summary"]["fail"], 0);
}

#[test]
fn thermo_chart_and_no_state() {
    let out = nscurve(&["thermo", "--zeta", "any", "--h", "const", "--F", "exp"]);
    assert!(out.status.success());
    let out = nscurve(&["thermo", "--zeta", "any", "--h", "any"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("NoState"));
}

#[test]
fn user_chart_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("charts.toml");
    std::fs::write(
        &path,
        r#"
[[chart]]
id = "swapped"
params = []
arg = "rho"
p = "s"
T = "rho"
region = []
generator = {}
"#,
    )
    .unwrap();
    let out = nscurve(&["thermo", "--zeta", "any", "--h", "const", "--charts", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL"));
}

#[test]
fn lift_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let out = nscurve(&["lift", "--h", "log", "--plane", "circle", "--n", "400", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("tau,x,y,z,l"));
    assert_eq!(text.lines().count(), 401);
}

#[test]
fn lift_checks() {
    let out = nscurve(&["lift", "--all"]);
    assert!(out.status.success());
}

#[test]
fn missing_filter_is_a_usage_error() {
    let out = nscurve(&["verify"]);
    assert_eq!(out.status.code(), Some(2));
}

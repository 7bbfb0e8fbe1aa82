use nscurve::expr::{Verdict, ZeroTester};
use nscurve::ns_system::{Case, Profile, Zeta};
use nscurve::thermo::*;

#[test]
fn library_charts_pass() {
    let t = ZeroTester::new(0);
    for chart in library() {
        let r = check_chart(&chart, &t);
        assert!(r.passed(), "{} {:?}", chart.id(), r);
        assert_eq!(r.lagrangian, Verdict::ProvenZero);
        assert!(r.admissibility.definite_inside >= 50);
    }
}

#[test]
fn every_entry_resolves() {
    let mut no_state = 0;
    for cell in nscurve::cases::all_cells() {
        let entries = state_library(&cell.case);
        assert!(!entries.is_empty());
        no_state += entries.iter().filter(|e| matches!(e, StateEntry::NoState(_))).count();
    }
    assert_eq!(no_state, 4);
}

#[test]
fn no_state_cases_hold() {
    let t = ZeroTester::new(0);
    for case in [Case::new(Zeta::Any, Profile::Any), Case::new(Zeta::Power, Profile::Any)] {
        assert!(check_no_state(&case, &t).unwrap().holds(), "{case}");
    }
}

#[test]
fn library_text_round_trips() {
    let charts = library();
    let specs: Vec<ChartSpec> = charts.iter().map(|c| c.spec.clone()).collect();
    #[derive(serde::Serialize)]
    struct File {
        chart: Vec<ChartSpec>,
    }
    let text = toml::to_string(&File { chart: specs.clone() }).unwrap();
    let back: Vec<ChartSpec> = load_charts(&text).unwrap().into_iter().map(|c| c.spec).collect();
    assert_eq!(back, specs);
}

#[test]
fn perturbed_chart_is_not_lagrangian() {
    let mut spec = library_chart("zeta-any").unwrap().spec;
    spec.temp = format!("({}) + rho", spec.temp);
    let chart = StateChart::from_spec(&spec).unwrap();
    assert!(is_lagrangian(&chart, &ZeroTester::new(0)).is_refuted());
}

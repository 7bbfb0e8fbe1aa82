use nscurve::expr::ZeroTester;
use nscurve::invariants::*;
use nscurve::ns_system::{Case, Profile, Zeta};

fn basis(zeta: Zeta, h: Profile, kind: Kind) -> InvariantBasis {
    bases_for(&Case::new(zeta, h), kind).unwrap().remove(0)
}

#[test]
fn every_cell_has_a_kinematic_basis() {
    let all = all_bases().unwrap();
    let kinematic = all.iter().filter(|b| b.kind == Kind::Kinematic).count();
    assert_eq!(kinematic, 19);
    assert!(all.iter().filter(|b| b.kind == Kind::NavierStokes).count() >= 16);
}

#[test]
fn printed_power_log_basis() {
    let b = basis(Zeta::Power, Profile::Log, Kind::NavierStokes);
    assert_eq!(b.invariants.len(), 8);
    let t = ZeroTester::new(1);
    let fields = algebra(&b, 1).unwrap();
    let red = Reducer::new(&b.case).unwrap();
    for j in &b.invariants {
        assert!(check_annihilated(j, &fields, red.system(), &b.ctx, &t).unwrap().is_zero(), "{j}");
    }
    for d in &b.derivatives {
        assert!(check_invariant_derivative(d, &b.invariants, &fields, red.system(), &b.ctx, &t).unwrap().is_zero());
    }
}

#[test]
fn errata_are_confirmed() {
    let t = ZeroTester::new(2);
    let mut seen = Vec::new();
    for b in all_bases().unwrap() {
        let fields = algebra(&b, 2).unwrap();
        let red = Reducer::new(&b.case).unwrap();
        for e in &b.errata {
            let c = check_erratum(e, &fields, red.system(), &b.ctx, &t).unwrap();
            assert!(c.confirmed(), "{} {:?}", b.id, c);
            seen.push(b.id);
        }
    }
    seen.sort();
    assert_eq!(seen, ["ns-linear-linear", "ns-power-const", "ns-power-exp"]);
}

#[test]
fn non_invariant_is_refuted() {
    let b = basis(Zeta::Any, Profile::Const, Kind::NavierStokes);
    let fields = algebra(&b, 3).unwrap();
    let red = Reducer::new(&b.case).unwrap();
    let v = check_annihilated(&nscurve::expr::Expr::symbol("u"), &fields, red.system(), &b.ctx, &ZeroTester::new(3)).unwrap();
    assert!(v.is_refuted());
}

#[test]
fn dependent_set_loses_rank() {
    let b = basis(Zeta::Any, Profile::Any, Kind::Kinematic);
    let red = Reducer::new(&b.case).unwrap();
    let mut exprs = b.invariants.clone();
    exprs.push(exprs[0].clone() * exprs[1].clone());
    let r = independence_rank(&exprs, 1, &red, &b.ctx, 6, 4).unwrap();
    assert_eq!(r, b.invariants.len());
}

#[test]
fn pure_order_counts() {
    let b = basis(Zeta::Linear, Profile::Const, Kind::Kinematic);
    let red = Reducer::new(&b.case).unwrap();
    assert_eq!(pure_order_count(&b, 1, &red, 5).unwrap(), 5);
    assert_eq!(pure_order_count(&b, 2, &red, 5).unwrap(), 5);
}

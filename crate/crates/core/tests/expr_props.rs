use std::collections::HashMap;

use nscurve::expr::*;
use nscurve::jet::Jet;
use proptest::prelude::*;

fn leaf(names: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Expr::rational(n, d)),
        proptest::sample::select(names).prop_map(Expr::symbol),
    ]
}

fn tree(names: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    leaf(names).prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), -2i64..=3).prop_map(|(a, n)| Expr::powi(a, n)),
            inner.clone().prop_map(|a| Expr::exp(a * Expr::rational(1, 4))),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
        ]
    })
}

const XY: &[&str] = &["x", "y"];
const JET: &[&str] = &["t", "a", "u", "rho", "u_a", "s_t", "rho_a"];

fn point(x: f64, y: f64) -> HashMap<String, f64> {
    HashMap::from([("x".to_string(), x), ("y".to_string(), y)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn canonicalize_is_idempotent(e in tree(XY)) {
        if let Ok(c) = canonicalize(&e) {
            prop_assert_eq!(canonicalize(&c).unwrap(), c);
        }
    }

    #[test]
    fn render_parse_round_trip(e in tree(XY)) {
        let ctx = Context::new().with_var("x").with_var("y");
        let back = parse(&e.to_string(), &ctx).unwrap();
        prop_assert_eq!(canonicalize(&back).unwrap(), canonicalize(&e).unwrap());
    }

    #[test]
    fn derivative_matches_finite_difference(e in tree(XY), x in 0.3f64..1.7, y in -1.0f64..1.0) {
        let d = differentiate(&e, "x");
        let funcs = FuncTable::new();
        let h = 1e-5;
        let (Ok(exact), Ok(fp), Ok(fm)) = (
            eval(&d, &point(x, y), &funcs),
            eval(&e, &point(x + h, y), &funcs),
            eval(&e, &point(x - h, y), &funcs),
        ) else {
            return Ok(());
        };
        prop_assume!(exact.abs() < 1e4 && fp.abs() < 1e4);
        let fd = (fp - fm) / (2.0 * h);
        prop_assert!((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()), "{}: fd {} exact {}", e, fd, exact);
    }

    #[test]
    fn total_derivatives_commute(e in tree(JET)) {
        let jet = Jet::new(4);
        let ta = jet.d_a(&jet.d_t(&e).unwrap()).unwrap();
        let at = jet.d_t(&jet.d_a(&e).unwrap()).unwrap();
        let ctx = Context::new();
        prop_assert!(ZeroTester::new(3).is_zero(&(ta - at), &ctx).is_zero());
    }
}

use nscurve::curvelift::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn relations_hold_up_to_a_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for tag in ["linear", "quadratic", "exp", "log"] {
        let mut worst = 0f64;
        for _ in 0..20 {
            let shape = sample_profile(tag, &mut rng).unwrap();
            let (a0, a) = (sample_point(&shape, &mut rng), sample_point(&shape, &mut rng));
            let rel = shape.relation().unwrap();
            worst = worst.max(relation_residual(&rel, a0, a).unwrap());
        }
        assert!(worst <= 1e-8, "{tag}: residual {worst:e}");
    }
}

#[test]
fn quadratic_constant_is_minus_half_pi() {
    let shape = HShape::Quadratic { lambda: 0.5 };
    let rel = shape.relation().unwrap();
    let l = arclength_l_of_a(&shape, 0.5).unwrap();
    assert!((l - 0.4783).abs() < 1e-4);
    let g = rel.g(shape.h(0.5)).unwrap();
    assert!((g - (-0.6142)).abs() < 1e-4);
    assert!((g + std::f64::consts::FRAC_PI_2 - 2.0 * l).abs() < 1e-9);
}

#[test]
fn linear_is_proportional() {
    let lambda = 1.0 / 2f64.sqrt();
    let shape = HShape::Linear { lambda };
    let l = arclength_l_of_a(&shape, 3.0).unwrap();
    assert!((l - 3.0 / 2f64.sqrt()).abs() < 1e-10);
    let rel = shape.relation().unwrap();
    assert!(relation_residual(&rel, 0.0, 3.0).unwrap() < 1e-10);
    assert!((rel.c - 1.0).abs() < 1e-12);
}

#[test]
fn constant_profile_keeps_length_and_height() {
    let shape = HShape::Const { c: 2.0 };
    assert!((arclength_l_of_a(&shape, 1.7).unwrap() - 1.7).abs() < 1e-12);
    let pts = lift_curve(&PlaneCurve::circle(1.0), &shape, LiftStart::default_for(&shape), 50).unwrap();
    assert!(pts.iter().all(|p| p.z == 2.0));
}

#[test]
fn printed_power_instance_matches_quadrature() {
    let shape = HShape::Power {
        lambda1: 1.0,
        lambda2: 11.0 / 3.0,
    };
    let rel = shape.relation().unwrap();
    let mut worst = 0f64;
    for i in 1..=40 {
        let z_max = (0.9 * 9.0 / 121.0f64).powf(11.0 / 16.0);
        let z = z_max * i as f64 / 40.0;
        let printed = z.powf(3.0 / 11.0) * hyp2f1(-0.5, 3.0 / 16.0, 19.0 / 16.0, 121.0 / 9.0 * z.powf(16.0 / 11.0)).unwrap();
        let a = z.powf(3.0 / 11.0);
        let l = arclength_l_of_a(&shape, a).unwrap();
        worst = worst.max((printed - l).abs()).max((rel.g(z).unwrap() - printed).abs());
    }
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn exponential_circle_never_meets_the_plane() {
    let shape = HShape::Exp { lambda1: 1.0, lambda2: 1.0 };
    let start = LiftStart::default_for(&shape);
    assert_eq!(start.z0, 1.0);
    let pts = lift_curve(&PlaneCurve::circle(1.0), &shape, start, 400).unwrap();
    let rel = shape.relation().unwrap();
    assert!((pts[0].z - 1.0).abs() < 1e-9);
    assert!(pts.windows(2).all(|w| w[1].z < w[0].z));
    let min = pts.iter().map(|p| p.z).fold(f64::INFINITY, f64::min);
    assert!(min > rel.lo, "min z {min}");
}

#[test]
fn log_circle_endpoint() {
    let shape = HShape::Log;
    let pts = lift_curve(&PlaneCurve::circle(1.0), &shape, LiftStart::default_for(&shape), 400).unwrap();
    assert_eq!(pts.len(), 400);
    let last = pts.last().unwrap();
    assert!((last.l - 2.0 * std::f64::consts::PI).abs() < 1e-8);
    let rel = shape.relation().unwrap();
    assert!((rel.g(last.z).unwrap() - last.l).abs() < 1e-8);
}

#[test]
fn csv_shape() {
    let shape = HShape::Log;
    let pts = lift_curve(&PlaneCurve::circle(1.0), &shape, LiftStart::default_for(&shape), 5).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, &pts).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "tau,x,y,z,l");
    assert_eq!(lines.len(), 6);
}

#[test]
fn plane_velocities_are_consistent() {
    for name in ["circle", "ellipse", "segment"] {
        let c = PlaneCurve::by_name(name).unwrap();
        assert!(c.derivative_error(64) <= 1e-6, "{name}");
    }
}

#[test]
fn lift_outside_branch_is_an_error() {
    let shape = HShape::Quadratic { lambda: 1.0 };
    let err = lift_curve(&PlaneCurve::circle(1.0), &shape, LiftStart::default_for(&shape), 10).unwrap_err();
    assert!(matches!(err, LiftError::Unbracketed { .. }));
}

fn slope_tag() -> impl Strategy<Value = (usize, f64, f64)> {
    (0usize..4, 0.1f64..0.9, 0.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // dG/da equals sign*c*sqrt(1 - h'^2).
    #[test]
    fn relation_derivative((k, p, t) in slope_tag()) {
        let shape = match k {
            0 => HShape::Linear { lambda: p },
            1 => HShape::Quadratic { lambda: -p },
            2 => HShape::Exp { lambda1: p, lambda2: -1.5 * p },
            _ => HShape::Log,
        };
        let (lo, hi) = shape.a_domain();
        let a = match k {
            0 => 0.2 + 3.0 * t,
            1 => lo + (0.05 + 0.9 * t) * (hi - lo),
            2 => lo + 0.05 + 2.0 * t,
            _ => 1.05 + 3.0 * t,
        };
        let rel = shape.relation().unwrap();
        let eps = 1e-6;
        let fd = (rel.g(shape.h(a + eps)).unwrap() - rel.g(shape.h(a - eps)).unwrap()) / (2.0 * eps);
        let exact = rel.sign * rel.c * (1.0 - shape.dh(a).powi(2)).sqrt();
        prop_assert!((fd - exact).abs() <= 1e-6, "fd {} exact {}", fd, exact);
    }

    #[test]
    fn relation_is_monotone_on_branch(p in 0.2f64..2.0, s in 0.0f64..1.0) {
        let rel = HShape::Exp { lambda1: 1.0, lambda2: p }.relation().unwrap();
        let z1 = rel.lo + (rel.hi - rel.lo) * (0.01 + 0.9 * s);
        let z2 = z1 + 0.05 * (rel.hi - rel.lo);
        prop_assert!(rel.g(z2).unwrap() > rel.g(z1).unwrap());
    }
}

#[test]
fn shallow_power_falls_back_to_quadrature() {
    let shape = HShape::Power { lambda1: 1.0, lambda2: 0.5 };
    assert!(matches!(shape.relation(), Err(LiftError::NoRelation(_))));
    let edge = shape.a_domain().0;
    let start = LiftStart { z0: shape.h(edge), direction: 1.0 };
    let pts = lift_curve(&PlaneCurve::segment(1.0), &shape, start, 11).unwrap();
    for p in &pts {
        let a = p.z.powi(2);
        assert!((arclength_between(&shape, edge, a).unwrap() - p.l).abs() < 1e-8);
    }
}

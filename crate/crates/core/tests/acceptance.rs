//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nscurve::cases::{self, perturbed, Cell};
use nscurve::expr::{differentiate, eval, Context, Expr, FuncTable, Verdict, ZeroTester, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};
use nscurve::invariants::{self, Kind, Reducer};
use nscurve::jet::prolong;
use nscurve::lie::{self, LieAlgebraSpan};
use nscurve::ns_system::{is_symmetry_in, solve_for_leading, Case, LambdaSign, Profile, Variant, Zeta};
use nscurve::report::{self, RunOptions};
use nscurve::thermo;

const SEED: u64 = 0;
const SYMMETRY_BUDGET: Duration = Duration::from_secs(60);
const FD_TOLERANCE: f64 = 1e-5;
const FD_EXPRESSIONS: usize = 100;
const ADMISSIBLE_POINTS: usize = 50;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn tester() -> ZeroTester {
    ZeroTester::new(SEED)
}

fn within_tolerance(v: &Verdict) -> bool {
    match v {
        Verdict::ProvenZero => true,
        Verdict::NumericallyZero { max_residual, samples } => *max_residual <= DEFAULT_TOLERANCE && *samples >= DEFAULT_SAMPLES,
        _ => false,
    }
}

fn symmetry_tables(cells: &[Cell]) -> Outcome {
    let start = Instant::now();
    let t = tester();
    let mut bad = Vec::new();
    let (mut generators, mut controls) = (0, 0);
    for c in cells {
        let sys = solve_for_leading(&c.case, Variant::default()).unwrap();
        let ctx = c.case.context();
        for (n, g) in c.generators.iter().enumerate() {
            generators += 1;
            let v = is_symmetry_in(&g.field, &sys, &ctx, &t).unwrap().verdict;
            if !within_tolerance(&v) {
                bad.push(format!("{} {} {}", c.case, g.label, v.label()));
            }
            let (x, breaker) = perturbed(&g.field, n);
            controls += 1;
            if !is_symmetry_in(&x, &sys, &ctx, &t).unwrap().verdict.is_refuted() {
                bad.push(format!("{} {}+d_{breaker} not refuted", c.case, g.label));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > SYMMETRY_BUDGET {
        bad.push(format!("runtime {elapsed:?} over budget"));
    }
    outcome(
        bad.is_empty() && cells.len() == 19,
        format!(
            "{} cells, {generators} generators symmetric, {controls} perturbed controls refuted, {:.1}s {}",
            cells.len(),
            elapsed.as_secs_f64(),
            bad.join("; ")
        ),
    )
}

fn span(c: &Cell) -> LieAlgebraSpan {
    LieAlgebraSpan {
        generators: c.fields(),
        ctx: c.case.context(),
        seed: SEED,
    }
}

fn lie_structure(cells: &[Cell]) -> Outcome {
    use LambdaSign::*;
    let printed: [(Case, &[usize]); 4] = [
        (Case::new(Zeta::Any, Profile::Const), &[6, 3, 0]),
        (Case::new(Zeta::Any, Profile::Quadratic(Negative)), &[5, 2, 0]),
        (Case::new(Zeta::Power, Profile::Const), &[7, 5, 1, 0]),
        (Case::new(Zeta::Power, Profile::Power), &[4, 3, 0]),
    ];
    let mut bad = Vec::new();
    for c in cells {
        let s = span(c);
        let series = s.derived_series().unwrap();
        if series != c.derived_series {
            bad.push(format!("{} series {series:?} vs table {:?}", c.case, c.derived_series));
        }
        if let Some((_, want)) = printed.iter().find(|(k, _)| *k == c.case) {
            if series != *want {
                bad.push(format!("{} series {series:?} vs printed {want:?}", c.case));
            }
        }
        if !s.is_solvable().unwrap() {
            bad.push(format!("{} not solvable", c.case));
        }
    }
    outcome(bad.is_empty(), format!("{} derived series match, all solvable {}", cells.len(), bad.join("; ")))
}

fn theta_projection(cells: &[Cell]) -> Outcome {
    let mut bad = Vec::new();
    let mut any_const_kernel = None;
    for c in cells {
        let s = span(c);
        let images = s.theta_images().unwrap();
        let sampler = s.sampler();
        if !lie::span_equal(&images, &c.y_list, &sampler).unwrap() {
            bad.push(format!("{} theta image differs from the Y-list", c.case));
        }
        let kernel = s.kernel_theta().unwrap().dim().unwrap();
        let image = lie::rank(&sampler.matrix(&images).unwrap());
        if kernel + image != s.dim().unwrap() {
            bad.push(format!("{} kernel {kernel} + image {image} != dim", c.case));
        }
        if c.case == Case::new(Zeta::Any, Profile::Const) {
            any_const_kernel = Some(kernel);
        }
    }
    if any_const_kernel != Some(3) {
        bad.push(format!("zeta any, h const kernel {any_const_kernel:?}"));
    }
    outcome(bad.is_empty(), format!("{} spans equal, kernel dimensions consistent {}", cells.len(), bad.join("; ")))
}

fn thermo_charts(cells: &[Cell]) -> Outcome {
    let t = tester();
    let mut bad = Vec::new();
    let charts = thermo::library();
    for chart in &charts {
        let r = thermo::check_chart(chart, &t);
        if r.lagrangian != Verdict::ProvenZero || r.tangency != Verdict::ProvenZero {
            bad.push(format!("{} not symbolic: {} {}", chart.id(), r.lagrangian.label(), r.tangency.label()));
        }
        if !r.passed() || r.admissibility.definite_inside < ADMISSIBLE_POINTS {
            bad.push(format!("{} admissibility {}/{}", chart.id(), r.admissibility.definite_inside, r.admissibility.inside));
        }
    }
    let mut no_state = 0;
    let mut declarations = BTreeSet::new();
    for c in cells {
        for entry in thermo::state_library(&c.case) {
            if let thermo::StateEntry::NoState(ns) = entry {
                no_state += 1;
                declarations.insert(c.case.zeta.id());
                if !thermo::check_no_state(&ns.case, &t).unwrap().holds() {
                    bad.push(format!("{} no-state not reproduced", c.case));
                }
            }
        }
    }
    if declarations.len() != 2 {
        bad.push(format!("no-state declarations for {declarations:?}"));
    }
    outcome(
        bad.is_empty() && charts.len() == 10,
        format!("{} charts symbolic and admissible, {no_state} no-state cells reproduced {}", charts.len(), bad.join("; ")),
    )
}

fn invariant_bases(cells: &[Cell]) -> Outcome {
    let t = tester();
    let mut bad = Vec::new();
    let (mut bases, mut errata) = (0, 0);
    for c in cells {
        let reducer = Reducer::new(&c.case).unwrap();
        let sys = reducer.system();
        for kind in [Kind::Kinematic, Kind::NavierStokes] {
            for b in invariants::bases_for(&c.case, kind).unwrap() {
                bases += 1;
                let fields = invariants::algebra(&b, SEED).unwrap();
                let tag = format!("{} {}", b.id, c.case);
                for (i, j) in b.invariants.iter().enumerate() {
                    if !invariants::check_annihilated(j, &fields, sys, &b.ctx, &t).unwrap().is_zero() {
                        bad.push(format!("{tag} J{}", i + 1));
                    }
                }
                for (i, d) in b.derivatives.iter().enumerate() {
                    if !invariants::check_invariant_derivative(d, &b.invariants, &fields, sys, &b.ctx, &t).unwrap().is_zero() {
                        bad.push(format!("{tag} D{}", i + 1));
                    }
                }
                let rank = invariants::independence_rank(&b.invariants, 1, &reducer, &b.ctx, 6, SEED).unwrap();
                if rank != b.invariants.len() {
                    bad.push(format!("{tag} rank {rank}/{}", b.invariants.len()));
                }
                if kind == Kind::Kinematic {
                    for k in [1, 2] {
                        let n = invariants::pure_order_count(&b, k, &reducer, SEED).unwrap();
                        if n != 5 {
                            bad.push(format!("{tag} pure order {k} count {n}"));
                        }
                    }
                }
                for e in &b.errata {
                    errata += 1;
                    if !invariants::check_erratum(e, &fields, sys, &b.ctx, &t).unwrap().confirmed() {
                        bad.push(format!("{tag} erratum J{} not confirmed", e.index + 1));
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{bases} (basis, cell) pairs annihilated with full rank; {errata} printed errata refuted, corrected forms annihilated {}", bad.join("; ")),
    )
}

fn lifting() -> Outcome {
    let r = report::run_lift_checks(&RunOptions::default()).unwrap();
    let worst = r.checks.iter().map(|c| c.residual).fold(0.0, f64::max);
    let bad: Vec<String> = r.checks.iter().filter(|c| !c.passed()).map(|c| format!("{} {}", c.case, c.id)).collect();
    outcome(
        r.ok() && r.checks.len() == 6,
        format!(
            "relations for cases 2, 3, 5, 6 at {} points and the printed power instance within {:.0e} (worst {worst:.1e}); exponential circle lift stays above the plane {}",
            report::LIFT_POINTS,
            report::LIFT_TOLERANCE,
            bad.join("; ")
        ),
    )
}

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let x = Expr::symbol("x");
    let y = Expr::symbol("y");
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => x,
            1 => y,
            _ => Expr::rational(rng.gen_range(-5..=5), rng.gen_range(1..=4)),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..7) {
        0 => a + random_expr(rng, depth - 1),
        1 => a - random_expr(rng, depth - 1),
        2 => a * random_expr(rng, depth - 1),
        3 => Expr::powi(a, rng.gen_range(-2..=3)),
        4 => Expr::exp(a * Expr::rational(1, 4)),
        5 => Expr::sin(a),
        _ => Expr::cos(a),
    }
}

fn finite_differences() -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let funcs = FuncTable::new();
    let (mut agreed, mut tried) = (0, 0);
    while tried < FD_EXPRESSIONS {
        let e = random_expr(&mut rng, 4);
        if !e.contains_symbol("x") {
            continue;
        }
        let (x, y) = (rng.gen_range(0.3..1.7), rng.gen_range(-1.0..1.0));
        let at = |x: f64| HashMap::from([("x".to_string(), x), ("y".to_string(), y)]);
        let h = 1e-5;
        let d = differentiate(&e, "x");
        let (Ok(exact), Ok(fp), Ok(fm)) = (eval(&d, &at(x), &funcs), eval(&e, &at(x + h), &funcs), eval(&e, &at(x - h), &funcs)) else {
            continue;
        };
        if exact.abs() > 1e4 {
            continue;
        }
        tried += 1;
        if ((fp - fm) / (2.0 * h) - exact).abs() <= FD_TOLERANCE * (1.0 + exact.abs()) {
            agreed += 1;
        }
    }
    (agreed, tried)
}

fn engine_properties(cells: &[Cell]) -> Outcome {
    let t = tester();
    let mut bad = Vec::new();
    let (agreed, tried) = finite_differences();
    if agreed != tried {
        bad.push(format!("finite differences {agreed}/{tried}"));
    }
    let (mut triples, mut pairs) = (0, 0);
    for c in cells {
        let f = c.fields();
        let ctx: Context = c.case.context();
        for i in 0..f.len() {
            for j in (i + 1)..f.len() {
                for k in (j + 1)..f.len() {
                    triples += 1;
                    if !lie::jacobi(&f[i], &f[j], &f[k], &ctx, &t).unwrap().is_zero() {
                        bad.push(format!("{} Jacobi {i},{j},{k}", c.case));
                    }
                }
                pairs += 1;
                let (px, py) = (prolong(&f[i], 2).unwrap(), prolong(&f[j], 2).unwrap());
                let pb = prolong(&f[i].bracket(&f[j]).unwrap(), 2).unwrap();
                for (name, coeff) in pb.coefficients() {
                    let commutator = px.apply(py.coefficient(name).unwrap()).unwrap() - py.apply(px.coefficient(name).unwrap()).unwrap();
                    if !t.is_zero(&(commutator - coeff.clone()), &ctx).is_zero() {
                        bad.push(format!("{} pr[X{i},X{j}] at {name}", c.case));
                    }
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("finite differences {agreed}/{tried} within {FD_TOLERANCE:.0e}; Jacobi on {triples} triples; pr[X,Y] = [prX, prY] to order 2 on {pairs} pairs {}", bad.join("; ")),
    )
}

fn main() -> ExitCode {
    let cells = cases::all_cells();
    let mut failed = false;
    let criteria: [(&str, &dyn Fn() -> Outcome); 7] = [
        ("symmetry tables", &|| symmetry_tables(&cells)),
        ("Lie structure", &|| lie_structure(&cells)),
        ("theta projection", &|| theta_projection(&cells)),
        ("thermodynamic charts", &|| thermo_charts(&cells)),
        ("invariants", &|| invariant_bases(&cells)),
        ("curve lifting", &lifting),
        ("engine properties", &|| engine_properties(&cells)),
    ];
    for (n, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed |= !o.ok;
        println!("{} criterion {} ({name}): {}", if o.ok { "PASS" } else { "FAIL" }, n + 1, o.detail.trim_end());
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

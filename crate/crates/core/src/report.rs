//! Verification runs over the case registry and their JSON reports.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cases::{self, perturbed, Cell};
use crate::curvelift::{self, HShape, LiftError, LiftStart, PlaneCurve};
use crate::expr::{Context, Domain, Verdict, ZeroTester};
use crate::invariants::{self, InvariantError, Kind, Reducer};
use crate::lie::{self, LieAlgebraSpan, LieError};
use crate::ns_system::{is_symmetry_in, solve_for_leading, Case, LambdaSign, Profile, SystemError, Variant, Zeta};
use crate::thermo::{self, StateChart, StateEntry, ThermoError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("no registry cell matches {0}")]
    NoCells(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

/// Outcome recorded for one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ProvenZero,
    NumericallyZero,
    Refuted,
    Inconclusive,
    NoState,
}

impl From<&Verdict> for Outcome {
    fn from(v: &Verdict) -> Outcome {
        match v {
            Verdict::ProvenZero => Outcome::ProvenZero,
            Verdict::NumericallyZero { .. } => Outcome::NumericallyZero,
            Verdict::Refuted { .. } => Outcome::Refuted,
            Verdict::Inconclusive { .. } => Outcome::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub case: String,
    pub kind: String,
    pub verdict: Outcome,
    pub residual: f64,
    pub runtime_ms: u64,
    /// Set on negative controls and printed errata, which must be refuted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Outcome>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        match self.expected {
            Some(want) => self.verdict == want,
            None => matches!(self.verdict, Outcome::ProvenZero | Outcome::NumericallyZero | Outcome::NoState),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(seed: u64, checks: Vec<CheckRecord>) -> Report {
        let mut summary = Summary::default();
        for c in &checks {
            if c.passed() {
                summary.pass += 1;
            } else if c.verdict == Outcome::Inconclusive {
                summary.inconclusive += 1;
            } else {
                summary.fail += 1;
            }
        }
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            checks,
            summary,
        }
    }

    pub fn merge(reports: Vec<Report>) -> Option<Report> {
        let seed = reports.first()?.seed;
        Some(Report::new(seed, reports.into_iter().flat_map(|r| r.checks).collect()))
    }

    pub fn ok(&self) -> bool {
        self.summary.fail == 0 && self.summary.inconclusive == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Which registry cells to run.
#[derive(Clone, Debug, Default)]
pub struct Filter {
    pub zeta: Option<Zeta>,
    /// The sign inside a quadratic profile is ignored; see `lambda_sign`.
    pub h: Option<Profile>,
    pub lambda_sign: Option<LambdaSign>,
}

impl Filter {
    pub fn all() -> Filter {
        Filter::default()
    }

    pub fn matches(&self, case: &Case) -> bool {
        let h_ok = match (self.h, case.h) {
            (None, _) => true,
            (Some(Profile::Quadratic(_)), Profile::Quadratic(have)) => self.lambda_sign.is_none_or(|s| s == have),
            (Some(h), have) => h == have,
        };
        h_ok && self.zeta.is_none_or(|z| z == case.zeta)
    }

    fn cells(&self) -> Result<Vec<Cell>, RunError> {
        let cells: Vec<Cell> = cases::all_cells().into_iter().filter(|c| self.matches(&c.case)).collect();
        if cells.is_empty() {
            return Err(RunError::NoCells(format!("{self:?}")));
        }
        Ok(cells)
    }
}

/// Numeric values pinned for parameters during sampling.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    pub values: Vec<(String, f64)>,
}

impl Bindings {
    pub fn pin(&mut self, name: &str, v: Option<f64>) {
        if let Some(v) = v {
            self.values.push((name.to_string(), v));
        }
    }

    /// Pins the parameters that occur in `ctx`; others are ignored.
    pub fn apply(&self, ctx: &Context) -> Context {
        let mut ctx = ctx.clone();
        let present: Vec<String> = ctx.params().map(str::to_string).collect();
        for (name, v) in &self.values {
            if present.iter().any(|p| p == name) {
                ctx.set_assumption(name, Domain::Interval { lo: *v, hi: *v });
            }
        }
        ctx
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    pub timing: bool,
    /// Include negative controls and printed errata.
    pub controls: bool,
    pub bindings: Bindings,
    /// Test function for chart admissibility, overriding the binding.
    pub function: Option<String>,
    /// Charts to use in place of the built-in library.
    pub charts: Option<Vec<StateChart>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: 0,
            timing: false,
            controls: false,
            bindings: Bindings::default(),
            function: None,
            charts: None,
        }
    }
}

struct Recorder<'a> {
    case: String,
    opts: &'a RunOptions,
    out: Vec<CheckRecord>,
}

impl<'a> Recorder<'a> {
    fn new(case: String, opts: &'a RunOptions) -> Recorder<'a> {
        Recorder {
            case,
            opts,
            out: Vec::new(),
        }
    }

    fn push(&mut self, id: String, kind: &str, verdict: Outcome, residual: f64, start: Instant, expected: Option<Outcome>) {
        let runtime_ms = if self.opts.timing { start.elapsed().as_millis() as u64 } else { 0 };
        self.out.push(CheckRecord {
            id,
            case: self.case.clone(),
            kind: kind.to_string(),
            verdict,
            residual,
            runtime_ms,
            expected,
        });
    }

    fn verdict(&mut self, id: String, kind: &str, v: &Verdict, start: Instant) {
        self.push(id, kind, v.into(), v.residual(), start, None);
    }

    fn control(&mut self, id: String, kind: &str, v: &Verdict, start: Instant) {
        self.push(id, kind, v.into(), v.residual(), start, Some(Outcome::Refuted));
    }

    /// Exact structural agreement of numerically computed quantities.
    fn agree(&mut self, id: String, kind: &str, ok: bool, start: Instant) {
        let (v, r) = if ok { (Outcome::NumericallyZero, 0.0) } else { (Outcome::Refuted, 1.0) };
        self.push(id, kind, v, r, start, None);
    }
}

fn tester(opts: &RunOptions) -> ZeroTester {
    ZeroTester::new(opts.seed)
}

fn run_cells<F>(filter: &Filter, opts: &RunOptions, job: F) -> Result<Report, RunError>
where
    F: Fn(&Cell, &RunOptions) -> Result<Vec<CheckRecord>, RunError> + Sync,
{
    let cells = filter.cells()?;
    let parts = cells.par_iter().map(|c| job(c, opts)).collect::<Result<Vec<_>, _>>()?;
    Ok(Report::new(opts.seed, parts.into_iter().flatten().collect()))
}

/// Symmetry, closure, derived series, solvability and projection checks.
pub fn run_verify(filter: &Filter, opts: &RunOptions) -> Result<Report, RunError> {
    run_cells(filter, opts, verify_cell)
}

pub fn verify_cell(cell: &Cell, opts: &RunOptions) -> Result<Vec<CheckRecord>, RunError> {
    let case = cell.case;
    let ctx = opts.bindings.apply(&case.context());
    let sys = solve_for_leading(&case, Variant::default())?;
    let t = tester(opts);
    let mut rec = Recorder::new(case.id(), opts);

    let verdicts = cell
        .generators
        .par_iter()
        .map(|g| {
            let start = Instant::now();
            is_symmetry_in(&g.field, &sys, &ctx, &t).map(|v| (g.label.clone(), v.verdict, start))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (label, v, start) in verdicts {
        rec.verdict(format!("symmetry:{label}"), "symmetry", &v, start);
    }

    let span = LieAlgebraSpan {
        generators: cell.fields(),
        ctx: ctx.clone(),
        seed: opts.seed,
    };
    let start = Instant::now();
    match span.check_closure() {
        Ok(()) => rec.agree("closure".into(), "closure", true, start),
        Err(LieError::NotClosed { residual, .. }) => rec.push("closure".into(), "closure", Outcome::Refuted, residual, start, None),
        Err(e) => return Err(e.into()),
    }
    let start = Instant::now();
    let series = span.derived_series()?;
    rec.agree("derived_series".into(), "derived_series", series == cell.derived_series, start);
    rec.agree("solvable".into(), "solvable", series.last() == Some(&0), start);

    let start = Instant::now();
    let images = span.theta_images()?;
    let sampler = span.sampler();
    rec.agree("theta_span".into(), "theta_span", lie::span_equal(&images, &cell.y_list, &sampler)?, start);
    let start = Instant::now();
    let kernel = span.kernel_theta()?;
    let image_dim = lie::rank(&sampler.matrix(&images)?);
    rec.agree("kernel_theta".into(), "kernel_theta", kernel.dim()? == span.dim()? - image_dim, start);

    let start = Instant::now();
    let fields = cell.fields();
    let mut jac = Verdict::ProvenZero;
    for i in 0..fields.len() {
        for j in (i + 1)..fields.len() {
            for k in (j + 1)..fields.len() {
                jac = jac.worst(lie::jacobi(&fields[i], &fields[j], &fields[k], &ctx, &t)?);
            }
        }
    }
    rec.verdict("jacobi".into(), "jacobi", &jac, start);

    if opts.controls {
        for (n, g) in cell.generators.iter().enumerate() {
            let start = Instant::now();
            let (x, c) = perturbed(&g.field, n);
            let v = is_symmetry_in(&x, &sys, &ctx, &t)?.verdict;
            rec.control(format!("control:{}+d_{c}", g.label), "control", &v, start);
        }
        for p in &cell.errata {
            let start = Instant::now();
            let v = is_symmetry_in(&p.field, &sys, &ctx, &t)?.verdict;
            rec.control(format!("erratum:{}", p.label), "erratum", &v, start);
        }
    }
    Ok(rec.out)
}

/// Chart checks, or the no-state reproduction where no chart exists.
pub fn run_thermo(filter: &Filter, opts: &RunOptions) -> Result<Report, RunError> {
    run_cells(filter, opts, thermo_cell)
}

pub fn thermo_cell(cell: &Cell, opts: &RunOptions) -> Result<Vec<CheckRecord>, RunError> {
    let t = tester(opts);
    let mut rec = Recorder::new(cell.case.id(), opts);
    let entries: Vec<StateEntry> = match &opts.charts {
        Some(charts) => charts.iter().cloned().map(StateEntry::Chart).collect(),
        None => thermo::state_library(&cell.case),
    };
    for entry in entries {
        let start = Instant::now();
        match entry {
            StateEntry::NoState(ns) => {
                let check = thermo::check_no_state(&ns.case, &t)?;
                let (v, r) = if check.holds() {
                    (Outcome::NoState, 0.0)
                } else {
                    (Outcome::Refuted, check.family.residual().max(check.degenerate.residual()))
                };
                rec.push("no_state".into(), "no_state", v, r, start, None);
            }
            StateEntry::Chart(mut chart) => {
                if let (Some(f), Some(b)) = (&opts.function, chart.spec.binding.as_mut()) {
                    b.function = f.clone();
                }
                let r = thermo::check_chart(&chart, &t);
                let id = chart.id().to_string();
                rec.verdict(format!("{id}:lagrangian"), "lagrangian", &r.lagrangian, start);
                rec.verdict(format!("{id}:pullback"), "pullback", &r.pullback_consistent, start);
                rec.verdict(format!("{id}:tangency"), "tangency", &r.tangency, start);
                rec.verdict(format!("{id}:admissible"), "admissibility", &r.admissibility.verdict, start);
            }
        }
    }
    Ok(rec.out)
}

/// Annihilation, invariant derivatives, ranks and pure-order counts.
pub fn run_invariants(filter: &Filter, opts: &RunOptions) -> Result<Report, RunError> {
    run_cells(filter, opts, invariants_cell)
}

pub fn invariants_cell(cell: &Cell, opts: &RunOptions) -> Result<Vec<CheckRecord>, RunError> {
    let t = tester(opts);
    let mut rec = Recorder::new(cell.case.id(), opts);
    let reducer = Reducer::new(&cell.case)?;
    let sys = reducer.system();
    for kind in [Kind::Kinematic, Kind::NavierStokes] {
        for b in invariants::bases_for(&cell.case, kind)? {
            let ctx = opts.bindings.apply(&b.ctx);
            let fields = invariants::algebra(&b, opts.seed)?;
            for (i, j) in b.invariants.iter().enumerate() {
                let start = Instant::now();
                let v = invariants::check_annihilated(j, &fields, sys, &ctx, &t)?;
                rec.verdict(format!("{}:J{}", b.id, i + 1), "annihilation", &v, start);
            }
            for (i, d) in b.derivatives.iter().enumerate() {
                let start = Instant::now();
                let v = invariants::check_invariant_derivative(d, &b.invariants, &fields, sys, &ctx, &t)?;
                rec.verdict(format!("{}:D{}", b.id, i + 1), "invariant_derivative", &v, start);
            }
            let start = Instant::now();
            let r = invariants::independence_rank(&b.invariants, 1, &reducer, &ctx, 6, opts.seed)?;
            rec.agree(format!("{}:rank", b.id), "rank", r == b.invariants.len(), start);
            if kind == Kind::Kinematic {
                for k in [1, 2] {
                    let start = Instant::now();
                    let n = invariants::pure_order_count(&b, k, &reducer, opts.seed)?;
                    rec.agree(format!("{}:pure{k}", b.id), "pure_order", n == 5, start);
                }
            }
            if opts.controls {
                for e in &b.errata {
                    let start = Instant::now();
                    let c = invariants::check_erratum(e, &fields, sys, &ctx, &t)?;
                    rec.control(format!("{}:erratum-J{}", b.id, e.index + 1), "erratum", &c.printed, start);
                    rec.verdict(format!("{}:corrected-J{}", b.id, e.index + 1), "annihilation", &c.corrected, start);
                }
            }
        }
    }
    Ok(rec.out)
}

/// Random in-domain points per relation family.
pub const LIFT_POINTS: usize = 20;
pub const LIFT_TOLERANCE: f64 = 1e-8;

fn tolerance_verdict(residual: f64, samples: usize) -> Verdict {
    if residual <= LIFT_TOLERANCE {
        Verdict::NumericallyZero {
            max_residual: residual,
            samples,
        }
    } else {
        Verdict::Refuted {
            residual,
            witness: Default::default(),
        }
    }
}

/// Lifting relations against quadrature, the printed power instance and
/// the exponential lift of the unit circle.
pub fn run_lift_checks(opts: &RunOptions) -> Result<Report, RunError> {
    let mut out = Vec::new();
    for tag in ["linear", "quadratic", "exp", "log"] {
        let mut rec = Recorder::new(format!("h={tag}"), opts);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let start = Instant::now();
        let mut worst = 0f64;
        for _ in 0..LIFT_POINTS {
            let shape = curvelift::sample_profile(tag, &mut rng).expect("known tag");
            let (a0, a) = (curvelift::sample_point(&shape, &mut rng), curvelift::sample_point(&shape, &mut rng));
            worst = worst.max(curvelift::relation_residual(&shape.relation()?, a0, a)?);
        }
        rec.verdict("relation".into(), "lift_relation", &tolerance_verdict(worst, LIFT_POINTS), start);
        out.extend(rec.out);
    }

    let mut rec = Recorder::new("h=power".into(), opts);
    let start = Instant::now();
    let (worst, n) = printed_power_instance()?;
    rec.verdict("printed_instance".into(), "lift_relation", &tolerance_verdict(worst, n), start);
    out.extend(rec.out);

    let mut rec = Recorder::new("h=exp".into(), opts);
    let start = Instant::now();
    let shape = HShape::Exp { lambda1: 1.0, lambda2: 1.0 };
    let pts = curvelift::lift_curve(&PlaneCurve::circle(1.0), &shape, LiftStart::default_for(&shape), 400)?;
    let bound = shape.relation()?.lo;
    let min = pts.iter().map(|p| p.z).fold(f64::INFINITY, f64::min);
    let descending = pts.windows(2).all(|w| w[1].z < w[0].z);
    rec.agree("circle_above_plane".into(), "lift_circle", min > bound && descending, start);
    out.extend(rec.out);
    Ok(Report::new(opts.seed, out))
}

/// Largest gap between the printed `λ₁ = 1, λ₂ = 11/3` relation and the
/// quadrature length over a grid with `(121/9) z^{16/11} <= 0.9`.
pub fn printed_power_instance() -> Result<(f64, usize), RunError> {
    let shape = HShape::Power {
        lambda1: 1.0,
        lambda2: 11.0 / 3.0,
    };
    let z_max = (0.9 * 9.0 / 121.0f64).powf(11.0 / 16.0);
    let n = 40;
    let mut worst = 0f64;
    for i in 1..=n {
        let z = z_max * i as f64 / n as f64;
        let x = 121.0 / 9.0 * z.powf(16.0 / 11.0);
        let printed = z.powf(3.0 / 11.0) * curvelift::hyp2f1(-0.5, 3.0 / 16.0, 19.0 / 16.0, x)?;
        let l = curvelift::arclength_l_of_a(&shape, z.powf(3.0 / 11.0))?;
        worst = worst.max((printed - l).abs());
    }
    Ok((worst, n))
}

/// Profile for a lift from CLI-style parameters, with defaults that fit
/// the unit circle.
pub fn lift_shape(h: Profile, lambda: Option<f64>, lambda1: Option<f64>, lambda2: Option<f64>) -> Option<HShape> {
    Some(match h {
        Profile::Const => HShape::Const { c: lambda.unwrap_or(1.0) },
        Profile::Linear => HShape::Linear { lambda: lambda.unwrap_or(0.5) },
        Profile::Quadratic(sign) => {
            let default = match sign {
                LambdaSign::Negative => -0.05,
                LambdaSign::Positive => 0.05,
            };
            HShape::Quadratic { lambda: lambda.unwrap_or(default) }
        }
        Profile::Power => HShape::Power {
            lambda1: lambda1.unwrap_or(0.001),
            lambda2: lambda2.unwrap_or(11.0 / 3.0),
        },
        Profile::Exp => HShape::Exp {
            lambda1: lambda1.unwrap_or(1.0),
            lambda2: lambda2.unwrap_or(1.0),
        },
        Profile::Log => HShape::Log,
        Profile::Any => return None,
    })
}

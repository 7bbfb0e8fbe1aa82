use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nscurve::curvelift::{self, LiftStart, PlaneCurve};
use nscurve::expr::TestFunction;
use nscurve::ns_system::{LambdaSign, Profile, Zeta};
use nscurve::report::{self, Bindings, Filter, Report, RunOptions};
use nscurve::thermo;

#[derive(Parser)]
#[command(name = "nscurve", version, about = "Verify symmetry, state and invariant tables for flow on a space curve")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symmetries, closure, derived series and thermodynamic projections.
    Verify(Common),
    /// Thermodynamic state charts.
    Thermo(Common),
    /// Differential invariant bases.
    Invariants(Common),
    /// Lift a plane curve, or check the lifting relations with --all.
    Lift(LiftArgs),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, value_parser = ["any", "linear", "power"])]
    zeta: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_parser = ["any", "const", "linear", "quadratic", "power", "exp", "log"])]
    h: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda2: Option<f64>,
    /// Test function for chart admissibility.
    #[arg(long = "F", value_parser = ["exp", "poly", "cosh"])]
    function: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run every registry cell.
    #[arg(long)]
    all: bool,
    /// Chart file replacing the built-in library (thermo only).
    #[arg(long)]
    charts: Option<PathBuf>,
    /// Record wall-clock runtimes (reports are then not reproducible).
    #[arg(long)]
    timing: bool,
    /// Also run negative controls and printed errata.
    #[arg(long)]
    controls: bool,
}

#[derive(Args)]
struct LiftArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "circle", value_parser = ["circle", "ellipse", "segment"])]
    plane: String,
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// CSV output (`tau,x,y,z,l`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

type Failure = Box<dyn std::error::Error>;

impl Common {
    fn filter(&self) -> Result<Filter, Failure> {
        if !self.all && self.zeta.is_none() && self.h.is_none() {
            return Err("select cells with --zeta/--h or pass --all".into());
        }
        let sign = self.lambda.filter(|_| self.h.as_deref() == Some("quadratic")).map(|l| {
            if l < 0.0 {
                LambdaSign::Negative
            } else {
                LambdaSign::Positive
            }
        });
        Ok(Filter {
            zeta: self.zeta.as_deref().map(Zeta::from_id).transpose()?,
            h: self.h.as_deref().map(Profile::from_id).transpose()?,
            lambda_sign: sign,
        })
    }

    fn options(&self) -> Result<RunOptions, Failure> {
        let mut bindings = Bindings::default();
        bindings.pin("beta", self.beta);
        bindings.pin("lambda", self.lambda);
        bindings.pin("lambda1", self.lambda1);
        bindings.pin("lambda2", self.lambda2);
        if let Some(f) = &self.function {
            TestFunction::named(f).ok_or_else(|| format!("unknown test function {f}"))?;
        }
        let charts = match &self.charts {
            Some(path) => Some(thermo::load_charts(&std::fs::read_to_string(path)?)?),
            None => None,
        };
        Ok(RunOptions {
            seed: self.seed,
            timing: self.timing,
            controls: self.controls,
            bindings,
            function: self.function.clone(),
            charts,
        })
    }
}

fn finish(report: Report, path: Option<&PathBuf>) -> Result<ExitCode, Failure> {
    for c in &report.checks {
        let mark = if c.passed() { "PASS" } else { "FAIL" };
        println!("{mark} {:<24} {:<36} {:?} {:.3e}", c.case, c.id, c.verdict, c.residual);
    }
    let s = report.summary;
    println!("pass {} fail {} inconclusive {}", s.pass, s.fail, s.inconclusive);
    if let Some(path) = path {
        std::fs::write(path, report.to_json() + "\n")?;
    }
    Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn lift(args: &LiftArgs) -> Result<ExitCode, Failure> {
    let c = &args.common;
    if c.all {
        return finish(report::run_lift_checks(&c.options()?)?, c.report.as_ref());
    }
    let h = Profile::from_id(c.h.as_deref().ok_or("lift needs --h or --all")?)?;
    let shape = report::lift_shape(h, c.lambda, c.lambda1, c.lambda2).ok_or("lift needs a concrete profile")?;
    let plane = PlaneCurve::by_name(&args.plane).ok_or("unknown plane curve")?;
    let samples = curvelift::lift_curve(&plane, &shape, LiftStart::default_for(&shape), args.n)?;
    match &args.out {
        Some(path) => curvelift::write_csv(BufWriter::new(File::create(path)?), &samples)?,
        None => curvelift::write_csv(io::stdout().lock(), &samples)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Verify(c) => finish(report::run_verify(&c.filter()?, &c.options()?)?, c.report.as_ref()),
        Command::Thermo(c) => finish(report::run_thermo(&c.filter()?, &c.options()?)?, c.report.as_ref()),
        Command::Invariants(c) => finish(report::run_invariants(&c.filter()?, &c.options()?)?, c.report.as_ref()),
        Command::Lift(args) => lift(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nscurve: {e}");
            ExitCode::from(2)
        }
    }
}

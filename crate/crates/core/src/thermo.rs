//! Thermodynamic states as Lagrangian surfaces in `(p, rho, s, T)`.
//!
//! A state is given by a chart `p = P(rho, s)`, `T = Theta(rho, s)` in which
//! an unspecified function `F` appears, always evaluated at one argument
//! `w(rho, s)`. The chart is Lagrangian when the structure form
//! `ds ^ dT + rho^-2 drho ^ dp` pulls back to zero, and admissible where the
//! form `kappa` restricted to it is negative definite.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cases;
use crate::expr::{
    differentiate, eval, parse, substitute, Context, Domain, Expr, FuncTable, ParseError, TestFunction, Verdict,
    ZeroTester,
};
use crate::jet::PointVectorField;
use crate::lie::{self, Sampler};
use crate::ns_system::{Case, Profile, Zeta};

/// Samples the admissibility check needs inside the region.
pub const MIN_ADMISSIBLE_SAMPLES: usize = 50;
const MAX_DRAWS_PER_SAMPLE: usize = 200;

#[derive(Debug, Error)]
pub enum ThermoError {
    #[error("chart `{chart}`, field `{field}`: {source}")]
    Parse {
        chart: String,
        field: String,
        source: ParseError,
    },
    #[error("chart file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unknown test function `{0}` (expected exp, poly or cosh)")]
    UnknownFunction(String),
    #[error("generator component `{0}` is not one of p, rho, s, T")]
    BadComponent(String),
    #[error("no symmetry table for {0}")]
    NoTable(Case),
    #[error(transparent)]
    Lie(#[from] lie::LieError),
}

/// Concrete values used to sample the admissibility region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingSpec {
    /// `exp`, `poly` (`x + x^3/3`) or `cosh`.
    pub function: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default = "default_rho_range")]
    pub rho: [f64; 2],
    #[serde(default = "default_s_range")]
    pub s: [f64; 2],
}

fn default_rho_range() -> [f64; 2] {
    [0.2, 3.0]
}

fn default_s_range() -> [f64; 2] {
    [-3.0, 3.0]
}

fn default_func() -> String {
    "F".to_string()
}

/// Declarative chart, as read from a chart file.
///
/// The sources use the expression grammar. `p` and `T` may mention the
/// placeholder `w`, which stands for `arg`; `region` entries are
/// expressions required to be positive and may mention `p` and `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub id: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub params: Vec<String>,
    /// Sampling intervals for parameters that must avoid special values.
    #[serde(default)]
    pub intervals: BTreeMap<String, [f64; 2]>,
    #[serde(default = "default_func")]
    pub func: String,
    pub arg: String,
    pub p: String,
    #[serde(rename = "T")]
    pub temp: String,
    /// Components of the symmetry the state is built from.
    pub generator: BTreeMap<String, String>,
    #[serde(default)]
    pub region: Vec<String>,
    #[serde(default)]
    pub binding: Option<BindingSpec>,
}

#[derive(Clone, Debug, Deserialize)]
struct ChartFile {
    chart: Vec<ChartSpec>,
}

/// Parse a chart file: a TOML document with one `[[chart]]` table per chart.
pub fn load_charts(text: &str) -> Result<Vec<StateChart>, ThermoError> {
    let file: ChartFile = toml::from_str(text)?;
    file.chart.iter().map(StateChart::from_spec).collect()
}

#[derive(Clone, Debug)]
pub struct StateChart {
    pub spec: ChartSpec,
    pub ctx: Context,
    pub arg: Expr,
    pub p: Expr,
    pub temp: Expr,
    pub generator: PointVectorField,
    /// Inequalities `e > 0` with `p`, `T` already replaced by the chart.
    pub region: Vec<Expr>,
}

impl StateChart {
    pub fn from_spec(spec: &ChartSpec) -> Result<StateChart, ThermoError> {
        let mut ctx = Context::new()
            .with_var("rho")
            .with_var("s")
            .with_var("p")
            .with_var("T")
            .with_func(&spec.func);
        for name in &spec.params {
            ctx.add_param(name);
        }
        for (name, [lo, hi]) in &spec.intervals {
            ctx.set_assumption(name, Domain::Interval { lo: *lo, hi: *hi });
        }
        let read = |field: &str, src: &str, ctx: &Context| {
            parse(src, ctx).map_err(|source| ThermoError::Parse {
                chart: spec.id.clone(),
                field: field.to_string(),
                source,
            })
        };
        let arg = read("arg", &spec.arg, &ctx)?;
        let with_w = ctx.clone().with_var("w");
        let mut w = BTreeMap::new();
        w.insert("w".to_string(), arg.clone());
        let p = substitute(&read("p", &spec.p, &with_w)?, &w);
        let temp = substitute(&read("T", &spec.temp, &with_w)?, &w);
        let mut on_chart = w.clone();
        on_chart.insert("p".to_string(), p.clone());
        on_chart.insert("T".to_string(), temp.clone());
        let mut pairs = Vec::new();
        for (name, src) in &spec.generator {
            if !matches!(name.as_str(), "p" | "rho" | "s" | "T") {
                return Err(ThermoError::BadComponent(name.clone()));
            }
            pairs.push((name.as_str(), read(name, src, &ctx)?));
        }
        let generator = PointVectorField::from_pairs(pairs);
        let region = spec
            .region
            .iter()
            .map(|src| Ok(substitute(&read("region", src, &with_w)?, &on_chart)))
            .collect::<Result<Vec<_>, ThermoError>>()?;
        Ok(StateChart {
            spec: spec.clone(),
            ctx,
            arg,
            p,
            temp,
            generator,
            region,
        })
    }

    pub fn id(&self) -> &str {
        &self.spec.id
    }

    /// Replace `p` and `T` by the chart.
    pub fn restrict(&self, e: &Expr) -> Expr {
        let mut b = BTreeMap::new();
        b.insert("p".to_string(), self.p.clone());
        b.insert("T".to_string(), self.temp.clone());
        substitute(e, &b)
    }
}

impl fmt::Display for StateChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p = {}, T = {}", self.p, self.temp)
    }
}

/// `dTheta/drho - rho^-2 dP/ds`, the only coefficient of the pulled back
/// structure form (up to sign).
pub fn omega_residual(chart: &StateChart) -> Expr {
    let rho = Expr::symbol("rho");
    differentiate(&chart.temp, "rho") - differentiate(&chart.p, "s") / Expr::powi(rho, 2)
}

/// Coefficient of `drho ^ ds` in the pullback of `ds ^ dT + rho^-2 drho ^ dp`,
/// computed by expanding the wedge products of the pulled back differentials.
pub fn omega_pullback(chart: &StateChart) -> Expr {
    // 1-forms as (drho, ds) coefficients
    let d = |e: &Expr| [differentiate(e, "rho"), differentiate(e, "s")];
    let wedge = |x: &[Expr; 2], y: &[Expr; 2]| x[0].clone() * y[1].clone() - x[1].clone() * y[0].clone();
    let ds = [Expr::int(0), Expr::int(1)];
    let drho = [Expr::int(1), Expr::int(0)];
    let rho = Expr::symbol("rho");
    wedge(&ds, &d(&chart.temp)) + wedge(&drho, &d(&chart.p)) / Expr::powi(rho, 2)
}

pub fn is_lagrangian(chart: &StateChart, tester: &ZeroTester) -> Verdict {
    tester.is_zero(&omega_residual(chart), &chart.ctx)
}

/// Tangency of `z` to the chart: `Z(p - P)` and `Z(T - Theta)` vanish on it.
pub fn tangency(z: &PointVectorField, chart: &StateChart, tester: &ZeroTester) -> Verdict {
    let along = |e: &Expr| {
        z.component("rho").clone() * differentiate(e, "rho") + z.component("s").clone() * differentiate(e, "s")
    };
    let e1 = chart.restrict(&(z.component("p").clone() - along(&chart.p)));
    let e2 = chart.restrict(&(z.component("T").clone() - along(&chart.temp)));
    tester.is_zero(&e1, &chart.ctx).worst(tester.is_zero(&e2, &chart.ctx))
}

/// Symmetric form `k11 drho^2 + 2 k12 drho ds + k22 ds^2`; `k12` is the
/// off-diagonal matrix entry.
#[derive(Clone, Debug)]
pub struct QuadraticForm2 {
    pub k11: Expr,
    pub k12: Expr,
    pub k22: Expr,
}

impl QuadraticForm2 {
    pub fn determinant(&self) -> Expr {
        self.k11.clone() * self.k22.clone() - Expr::powi(self.k12.clone(), 2)
    }
}

/// `kappa = d(1/T) . de - rho^-2 d(p/T) . drho` restricted to the chart,
/// with `de = Theta ds + P/rho^2 drho`.
pub fn kappa_form(chart: &StateChart) -> QuadraticForm2 {
    let rho2 = Expr::powi(Expr::symbol("rho"), 2);
    let (p, t) = (&chart.p, &chart.temp);
    let d = |e: &Expr, v: &str| differentiate(e, v);
    let k11 = -(d(p, "rho") / (rho2.clone() * t.clone()));
    let k12 = -((d(t, "rho") + d(p, "s") / rho2) / (Expr::int(2) * t.clone()));
    let k22 = -(d(t, "s") / t.clone());
    QuadraticForm2 { k11, k12, k22 }
}

/// Outcome of sampling the admissibility region.
#[derive(Clone, Debug, Serialize)]
pub struct Admissibility {
    pub verdict: Verdict,
    pub inside: usize,
    pub definite_inside: usize,
    pub outside: usize,
    pub indefinite_outside: usize,
    pub draws: usize,
}

/// Sample `(rho, s)` under the chart's binding until `n_points` fall inside
/// the printed region (plus `T > 0`), and check negative definiteness there
/// by leading minors. At least one outside sample, if any was drawn, must
/// fail to be definite.
pub fn check_admissible(chart: &StateChart, form: &QuadraticForm2, n_points: usize, seed: u64) -> Admissibility {
    let empty = |reason: String| Admissibility {
        verdict: Verdict::Inconclusive { reason },
        inside: 0,
        definite_inside: 0,
        outside: 0,
        indefinite_outside: 0,
        draws: 0,
    };
    let Some(binding) = &chart.spec.binding else {
        return empty("chart has no numeric binding".into());
    };
    let Some(func) = TestFunction::named(&binding.function) else {
        return empty(format!("unknown test function `{}`", binding.function));
    };
    let mut funcs = FuncTable::new();
    funcs.insert(chart.spec.func.clone(), func);
    let mut region = chart.region.clone();
    region.push(chart.temp.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = empty(String::new());
    let mut witness = None;
    while out.inside < n_points && out.draws < n_points * MAX_DRAWS_PER_SAMPLE {
        out.draws += 1;
        let mut values: HashMap<String, f64> = binding.params.clone().into_iter().collect();
        let r = rng.gen_range(binding.rho[0]..binding.rho[1]);
        let s = rng.gen_range(binding.s[0]..binding.s[1]);
        values.insert("rho".into(), r);
        values.insert("s".into(), s);
        let at = |e: &Expr| eval(e, &values, &funcs);
        let sample = (|| {
            let inside = region.iter().map(|e| at(e).map(|v| v > 0.0)).collect::<Result<Vec<_>, _>>()?;
            let (k11, k12, k22) = (at(&form.k11)?, at(&form.k12)?, at(&form.k22)?);
            Ok::<_, crate::expr::EvalError>((inside.iter().all(|&b| b), k11 < 0.0 && k11 * k22 - k12 * k12 > 0.0))
        })();
        let Ok((inside, definite)) = sample else { continue };
        if inside {
            out.inside += 1;
            if definite {
                out.definite_inside += 1;
            } else if witness.is_none() {
                witness = Some((r, s));
            }
        } else {
            out.outside += 1;
            if !definite {
                out.indefinite_outside += 1;
            }
        }
    }
    out.verdict = if out.inside < n_points {
        Verdict::Inconclusive {
            reason: format!("only {} of {} draws fell inside the region", out.inside, out.draws),
        }
    } else if let Some((r, s)) = witness {
        Verdict::Refuted {
            residual: 1.0 - out.definite_inside as f64 / out.inside as f64,
            witness: [("rho".to_string(), r), ("s".to_string(), s)].into_iter().collect(),
        }
    } else if out.outside > 0 && out.indefinite_outside == 0 {
        Verdict::Inconclusive {
            reason: "definite at every sample outside the region too".into(),
        }
    } else {
        Verdict::NumericallyZero {
            max_residual: 0.0,
            samples: out.inside,
        }
    };
    out
}

const LIBRARY: &str = include_str!("../charts/library.toml");

/// All built-in charts.
pub fn library() -> Vec<StateChart> {
    load_charts(LIBRARY).expect("built-in chart library parses")
}

pub fn library_chart(id: &str) -> Option<StateChart> {
    library().into_iter().find(|c| c.id() == id)
}

/// A case where no one-dimensional symmetry yields an admissible state.
#[derive(Clone, Debug)]
pub struct NoState {
    pub case: Case,
    pub reason: &'static str,
}

#[derive(Clone, Debug)]
pub enum StateEntry {
    Chart(StateChart),
    NoState(NoState),
}

/// Charts stated for a case. The logarithmic profile with power viscosity
/// shares its thermodynamic part, hence its chart, with arbitrary viscosity.
pub fn state_library(case: &Case) -> Vec<StateEntry> {
    let ids: &[&str] = match (case.zeta, case.h) {
        (Zeta::Any, Profile::Any | Profile::Quadratic(_)) | (Zeta::Power, Profile::Any) => {
            return vec![StateEntry::NoState(NoState {
                case: *case,
                reason: "the thermodynamic algebra is spanned by d_p and d_s, and kappa degenerates on every invariant chart",
            })]
        }
        (Zeta::Any, _) | (Zeta::Power, Profile::Log) => &["zeta-any"],
        (Zeta::Linear, Profile::Any | Profile::Quadratic(_)) => &["zeta-linear-1"],
        (Zeta::Linear, _) => &["zeta-linear-2"],
        (Zeta::Power, Profile::Const | Profile::Linear) => &["zeta-power-1"],
        (Zeta::Power, Profile::Quadratic(_)) => &["zeta-power-2", "zeta-power-2-half"],
        (Zeta::Power, Profile::Power) => &["zeta-power-3"],
        (Zeta::Power, Profile::Exp) => &["zeta-power-4", "zeta-power-4-third", "zeta-power-4-minus-one"],
    };
    let all = library();
    ids.iter()
        .map(|id| StateEntry::Chart(all.iter().find(|c| c.id() == *id).expect("library id").clone()))
        .collect()
}

/// General chart invariant under `gamma1 d_p + gamma2 d_s` (`gamma2 != 0`):
/// tangency forces `P = gamma1 s/gamma2 + F(rho)` and `Theta = Theta(rho)`, and
/// the Lagrangian condition then fixes `Theta = C - gamma1/(gamma2 rho)`.
pub fn translation_invariant_chart() -> StateChart {
    let spec = ChartSpec {
        id: "translation-invariant".into(),
        description: "general chart invariant under gamma1 d_p + gamma2 d_s".into(),
        params: vec!["gamma1".into(), "gamma2".into(), "C".into()],
        intervals: BTreeMap::new(),
        func: default_func(),
        arg: "rho".into(),
        p: "gamma1*s/gamma2 + F(w)".into(),
        temp: "C - gamma1/(gamma2*rho)".into(),
        generator: [("p", "gamma1"), ("s", "gamma2")]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect(),
        region: Vec::new(),
        binding: None,
    };
    StateChart::from_spec(&spec).expect("translation chart parses")
}

/// Evidence for a no-state declaration.
#[derive(Clone, Debug, Serialize)]
pub struct NoStateCheck {
    /// The case's thermodynamic algebra is exactly `<d_p, d_s>`.
    pub translations_only: bool,
    /// The invariant chart family is Lagrangian and tangent to the symmetry.
    pub family: Verdict,
    /// `kappa_22` vanishes identically on the family, so `kappa` is never definite.
    pub degenerate: Verdict,
}

impl NoStateCheck {
    pub fn holds(&self) -> bool {
        self.translations_only && self.family.is_zero() && self.degenerate.is_zero()
    }
}

pub fn check_no_state(case: &Case, tester: &ZeroTester) -> Result<NoStateCheck, ThermoError> {
    let cell = cases::cell(case).ok_or(ThermoError::NoTable(*case))?;
    let sampler = Sampler::for_context(&case.context(), tester.seed);
    let translations = [PointVectorField::partial("p"), PointVectorField::partial("s")];
    let translations_only = lie::span_equal(&cell.y_list, &translations, &sampler)?;
    let chart = translation_invariant_chart();
    let family = is_lagrangian(&chart, tester).worst(tangency(&chart.generator, &chart, tester));
    let degenerate = tester.is_zero(&kappa_form(&chart).k22, &chart.ctx);
    Ok(NoStateCheck {
        translations_only,
        family,
        degenerate,
    })
}

/// Outcome of all checks on one chart.
#[derive(Clone, Debug, Serialize)]
pub struct ChartReport {
    pub id: String,
    pub lagrangian: Verdict,
    /// `omega_residual` agrees with the wedge-product pullback up to sign.
    pub pullback_consistent: Verdict,
    pub tangency: Verdict,
    pub admissibility: Admissibility,
}

impl ChartReport {
    pub fn passed(&self) -> bool {
        self.lagrangian.is_zero()
            && self.pullback_consistent.is_zero()
            && self.tangency.is_zero()
            && self.admissibility.verdict.is_zero()
    }
}

pub fn check_chart(chart: &StateChart, tester: &ZeroTester) -> ChartReport {
    let pullback = omega_pullback(chart) + omega_residual(chart);
    ChartReport {
        id: chart.id().to_string(),
        lagrangian: is_lagrangian(chart, tester),
        pullback_consistent: tester.is_zero(&pullback, &chart.ctx),
        tangency: tangency(&chart.generator, chart, tester),
        admissibility: check_admissible(chart, &kappa_form(chart), MIN_ADMISSIBLE_SAMPLES, tester.seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple(p: &str, t: &str) -> StateChart {
        StateChart::from_spec(&ChartSpec {
            id: "simple".into(),
            description: String::new(),
            params: vec!["R".into(), "cv".into()],
            intervals: BTreeMap::new(),
            func: default_func(),
            arg: "rho".into(),
            p: p.into(),
            temp: t.into(),
            generator: BTreeMap::new(),
            region: Vec::new(),
            binding: Some(BindingSpec {
                function: "exp".into(),
                params: [("R".to_string(), 1.0), ("cv".to_string(), 1.5)].into_iter().collect(),
                rho: default_rho_range(),
                s: default_s_range(),
            }),
        })
        .unwrap()
    }

    #[test]
    fn library_loads() {
        assert_eq!(library().len(), 10);
    }

    #[test]
    fn non_lagrangian_control() {
        // p = rho, T = s pulls back to zero; swapping them does not
        let t = ZeroTester::new(1);
        assert!(is_lagrangian(&simple("rho", "s"), &t).is_zero());
        assert!(is_lagrangian(&simple("s", "rho"), &t).is_refuted());
    }

    #[test]
    fn ideal_gas_is_admissible() {
        // e = cv T with T = exp(s/cv) rho^(R/cv)
        let c = simple("R*rho*exp(s/cv)*rho^(R/cv)", "exp(s/cv)*rho^(R/cv)");
        let t = ZeroTester::new(2);
        assert!(is_lagrangian(&c, &t).is_zero());
        let a = check_admissible(&c, &kappa_form(&c), 50, 2);
        assert!(a.verdict.is_zero(), "{a:?}");
    }

    #[test]
    fn constant_temperature_degenerates() {
        let c = simple("R*rho", "cv");
        let q = kappa_form(&c);
        assert!(ZeroTester::new(3).is_zero(&q.determinant(), &c.ctx).is_zero());
    }

    #[test]
    fn generator_mismatch_is_refuted() {
        let c = library_chart("zeta-any").unwrap();
        let t = ZeroTester::new(4);
        assert!(tangency(&c.generator, &c, &t).is_zero());
        assert!(tangency(&PointVectorField::partial("p"), &c, &t).is_refuted());
    }

    #[test]
    fn concave_function_fails() {
        let mut c = library_chart("zeta-any").unwrap();
        // F = -exp makes F'' < 0 everywhere; drop the printed region to
        // sample the whole box
        c.spec.binding.as_mut().unwrap().function = "exp".into();
        c.p = -c.p.clone();
        c.temp = -c.temp.clone();
        c.region.clear();
        let a = check_admissible(&c, &kappa_form(&c), 20, 5);
        assert!(!a.verdict.is_zero());
    }
}

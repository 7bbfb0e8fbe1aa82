//! Python module `nscurve`: expressions, cases, report runs and curve lifts.

use std::collections::HashMap;
use std::fmt::Display;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use nscurve::cases;
use nscurve::curvelift::{self, LiftStart, PlaneCurve};
use nscurve::expr::{self, canonicalize, differentiate, parse, Context, Expr, FuncTable, ZeroTester};
use nscurve::jet::{Jet, PointVectorField};
use nscurve::lie::LieAlgebraSpan;
use nscurve::ns_system::{is_symmetry_in, solve_for_leading, Case, LambdaSign, Profile, Variant, Zeta};
use nscurve::report::{self, Bindings, Filter, RunOptions};
use nscurve::thermo;

fn err<E: Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A symbolic expression with the context it was parsed in.
#[pyclass(name = "Expr", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyExpr {
    inner: Expr,
    ctx: Context,
}

impl PyExpr {
    fn wrap(&self, inner: Expr) -> PyExpr {
        PyExpr {
            inner,
            ctx: self.ctx.clone(),
        }
    }
}

#[pymethods]
impl PyExpr {
    #[new]
    #[pyo3(signature = (text, vars = Vec::new(), params = Vec::new(), funcs = Vec::new()))]
    fn new(text: &str, vars: Vec<String>, params: Vec<String>, funcs: Vec<String>) -> PyResult<PyExpr> {
        let mut ctx = Context::new();
        for v in &vars {
            ctx.add_var(v);
        }
        for p in &params {
            ctx.add_param(p);
        }
        for f in &funcs {
            ctx.add_func(f);
        }
        let inner = parse(text, &ctx).map_err(err)?;
        Ok(PyExpr { inner, ctx })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.inner.to_string())
    }

    fn __eq__(&self, other: PyRef<'_, PyExpr>) -> bool {
        self.inner == other.inner
    }

    fn __add__(&self, other: PyRef<'_, PyExpr>) -> PyExpr {
        self.wrap(self.inner.clone() + other.inner.clone())
    }

    fn __sub__(&self, other: PyRef<'_, PyExpr>) -> PyExpr {
        self.wrap(self.inner.clone() - other.inner.clone())
    }

    fn __mul__(&self, other: PyRef<'_, PyExpr>) -> PyExpr {
        self.wrap(self.inner.clone() * other.inner.clone())
    }

    fn __truediv__(&self, other: PyRef<'_, PyExpr>) -> PyExpr {
        self.wrap(self.inner.clone() / other.inner.clone())
    }

    fn diff(&self, var: &str) -> PyExpr {
        self.wrap(differentiate(&self.inner, var))
    }

    /// Total derivative `D_t^nt D_a^na` on the jet space.
    #[pyo3(signature = (nt = 0, na = 0))]
    fn total(&self, nt: u32, na: u32) -> PyResult<PyExpr> {
        let jet = Jet::new(nt + na + 3);
        Ok(self.wrap(jet.total_derivative_n(&self.inner, nt, na).map_err(err)?))
    }

    fn canonical(&self) -> PyResult<PyExpr> {
        Ok(self.wrap(canonicalize(&self.inner).map_err(err)?))
    }

    /// `(verdict, residual)` of the zero test.
    #[pyo3(signature = (seed = 0))]
    fn is_zero(&self, seed: u64) -> (String, f64) {
        let v = ZeroTester::new(seed).is_zero(&self.inner, &self.ctx);
        (v.label().to_string(), v.residual())
    }

    fn evaluate(&self, values: HashMap<String, f64>) -> PyResult<f64> {
        expr::eval(&self.inner, &values, &FuncTable::new()).map_err(err)
    }

    fn free_symbols(&self) -> Vec<String> {
        self.inner.free_symbols().into_iter().collect()
    }
}

/// One cell of the symmetry tables.
#[pyclass(name = "Case", frozen)]
struct PyCase {
    inner: Case,
}

#[pymethods]
impl PyCase {
    #[new]
    fn new(zeta: &str, h: &str) -> PyResult<PyCase> {
        Ok(PyCase {
            inner: Case::parse(zeta, h).map_err(err)?,
        })
    }

    #[getter]
    fn id(&self) -> String {
        self.inner.id()
    }

    fn __repr__(&self) -> String {
        format!("Case({})", self.inner.id())
    }

    /// `(label, field)` for each printed generator.
    fn generators(&self) -> PyResult<Vec<(String, String)>> {
        let cell = cases::cell(&self.inner).ok_or_else(|| err(format!("no table for {}", self.inner)))?;
        Ok(cell.generators.iter().map(|g| (g.label.clone(), g.field.to_string())).collect())
    }

    fn derived_series(&self) -> PyResult<Vec<usize>> {
        let cell = cases::cell(&self.inner).ok_or_else(|| err(format!("no table for {}", self.inner)))?;
        LieAlgebraSpan::new(cell.fields(), &self.inner.context()).derived_series().map_err(err)
    }

    /// Symmetry test of the field with the given coefficient sources.
    #[pyo3(signature = (components, seed = 0))]
    fn is_symmetry(&self, components: HashMap<String, String>, seed: u64) -> PyResult<(String, f64)> {
        let ctx = self.inner.context();
        let mut pairs = Vec::new();
        for (name, src) in &components {
            pairs.push((name.as_str(), parse(src, &ctx).map_err(err)?));
        }
        let x = PointVectorField::from_pairs(pairs);
        let sys = solve_for_leading(&self.inner, Variant::default()).map_err(err)?;
        let v = is_symmetry_in(&x, &sys, &ctx, &ZeroTester::new(seed)).map_err(err)?.verdict;
        Ok((v.label().to_string(), v.residual()))
    }
}

fn filter(zeta: Option<&str>, h: Option<&str>, lambda: Option<f64>) -> PyResult<Filter> {
    Ok(Filter {
        zeta: zeta.map(Zeta::from_id).transpose().map_err(err)?,
        h: h.map(Profile::from_id).transpose().map_err(err)?,
        lambda_sign: lambda.filter(|_| h == Some("quadratic")).map(|l| if l < 0.0 { LambdaSign::Negative } else { LambdaSign::Positive }),
    })
}

fn options(seed: u64, controls: bool, lambda: Option<f64>) -> RunOptions {
    let mut bindings = Bindings::default();
    bindings.pin("lambda", lambda);
    RunOptions {
        seed,
        controls,
        bindings,
        ..RunOptions::default()
    }
}

/// Verification report as JSON text.
#[pyfunction]
#[pyo3(signature = (zeta = None, h = None, lambda_ = None, seed = 0, controls = false))]
fn verify(zeta: Option<&str>, h: Option<&str>, lambda_: Option<f64>, seed: u64, controls: bool) -> PyResult<String> {
    let r = report::run_verify(&filter(zeta, h, lambda_)?, &options(seed, controls, lambda_)).map_err(err)?;
    Ok(r.to_json())
}

#[pyfunction]
#[pyo3(signature = (zeta = None, h = None, lambda_ = None, seed = 0))]
fn thermo_report(zeta: Option<&str>, h: Option<&str>, lambda_: Option<f64>, seed: u64) -> PyResult<String> {
    let r = report::run_thermo(&filter(zeta, h, lambda_)?, &options(seed, false, lambda_)).map_err(err)?;
    Ok(r.to_json())
}

#[pyfunction]
#[pyo3(signature = (zeta = None, h = None, lambda_ = None, seed = 0, controls = false))]
fn invariants(zeta: Option<&str>, h: Option<&str>, lambda_: Option<f64>, seed: u64, controls: bool) -> PyResult<String> {
    let r = report::run_invariants(&filter(zeta, h, lambda_)?, &options(seed, controls, lambda_)).map_err(err)?;
    Ok(r.to_json())
}

#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn lift_checks(seed: u64) -> PyResult<String> {
    Ok(report::run_lift_checks(&options(seed, false, None)).map_err(err)?.to_json())
}

fn shape(h: &str, lambda: Option<f64>, lambda1: Option<f64>, lambda2: Option<f64>) -> PyResult<curvelift::HShape> {
    let profile = Profile::from_id(h).map_err(err)?;
    let sign_fixed = match (profile, lambda) {
        (Profile::Quadratic(_), Some(l)) if l > 0.0 => Profile::Quadratic(LambdaSign::Positive),
        (p, _) => p,
    };
    report::lift_shape(sign_fixed, lambda, lambda1, lambda2).ok_or_else(|| err("lift needs a concrete profile"))
}

/// Lifted samples `(tau, x, y, z, l)`.
#[pyfunction]
#[pyo3(signature = (h, lambda_ = None, lambda1 = None, lambda2 = None, plane = "circle", n = 400))]
fn lift(h: &str, lambda_: Option<f64>, lambda1: Option<f64>, lambda2: Option<f64>, plane: &str, n: usize) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
    let s = shape(h, lambda_, lambda1, lambda2)?;
    let curve = PlaneCurve::by_name(plane).ok_or_else(|| err(format!("unknown plane curve {plane}")))?;
    let pts = curvelift::lift_curve(&curve, &s, LiftStart::default_for(&s), n).map_err(err)?;
    Ok(pts.into_iter().map(|p| (p.tau, p.x, p.y, p.z, p.l)).collect())
}

#[pyfunction]
#[pyo3(signature = (h, a0, a, lambda_ = None, lambda1 = None, lambda2 = None))]
fn relation_residual(h: &str, a0: f64, a: f64, lambda_: Option<f64>, lambda1: Option<f64>, lambda2: Option<f64>) -> PyResult<f64> {
    let s = shape(h, lambda_, lambda1, lambda2)?;
    curvelift::relation_residual(&s.relation().map_err(err)?, a0, a).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (h, a, lambda_ = None, lambda1 = None, lambda2 = None))]
fn arclength(h: &str, a: f64, lambda_: Option<f64>, lambda1: Option<f64>, lambda2: Option<f64>) -> PyResult<f64> {
    curvelift::arclength_l_of_a(&shape(h, lambda_, lambda1, lambda2)?, a).map_err(err)
}

#[pyfunction]
fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> PyResult<f64> {
    curvelift::hyp2f1(a, b, c, x).map_err(err)
}

#[pyfunction]
fn chart_ids() -> Vec<String> {
    thermo::library().iter().map(|c| c.id().to_string()).collect()
}

/// Checks of one library chart as JSON text.
#[pyfunction]
#[pyo3(signature = (id, seed = 0))]
fn check_chart(id: &str, seed: u64) -> PyResult<String> {
    let chart = thermo::library_chart(id).ok_or_else(|| err(format!("no chart {id}")))?;
    let r = thermo::check_chart(&chart, &ZeroTester::new(seed));
    serde_json::to_string(&r).map_err(err)
}

#[pymodule]
#[pyo3(name = "nscurve")]
fn nscurve_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpr>()?;
    m.add_class::<PyCase>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(thermo_report, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(lift_checks, m)?)?;
    m.add_function(wrap_pyfunction!(lift, m)?)?;
    m.add_function(wrap_pyfunction!(relation_residual, m)?)?;
    m.add_function(wrap_pyfunction!(arclength, m)?)?;
    m.add_function(wrap_pyfunction!(hyp2f1, m)?)?;
    m.add_function(wrap_pyfunction!(chart_ids, m)?)?;
    m.add_function(wrap_pyfunction!(check_chart, m)?)?;
    Ok(())
}

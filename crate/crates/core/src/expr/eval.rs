use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;
use thiserror::Error;

use super::{Expr, Func, Node};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("symbol `{0}` has no value")]
    UnboundSymbol(String),
    #[error("function `{0}` has no numeric stand-in")]
    UnboundFunction(String),
    #[error("{0} outside its real domain")]
    Domain(String),
}

/// Concrete stand-ins for unspecified functions. Each has closed-form
/// derivatives of every order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TestFunction {
    Exp { scale: f64, shift: f64 },
    /// `x^2 + x^4`
    Quartic { scale: f64, shift: f64 },
    Cosh { scale: f64, shift: f64 },
    /// `x + x^3/3`, convex and increasing for `x > 0`
    Cubic { scale: f64, shift: f64 },
}

impl TestFunction {
    /// The standard family, rotated by `index` and offset by `salt` so that
    /// different function names receive different functions.
    pub fn family(index: usize, salt: usize) -> TestFunction {
        let scale = 1.0 + 0.37 * (salt % 5) as f64;
        let shift = 0.13 * (salt % 7) as f64;
        match (index + salt) % 3 {
            0 => TestFunction::Exp { scale, shift },
            1 => TestFunction::Quartic { scale, shift },
            _ => TestFunction::Cosh { scale, shift },
        }
    }

    /// Unscaled function by its command-line name: `exp`, `poly` or `cosh`.
    pub fn named(name: &str) -> Option<TestFunction> {
        let (scale, shift) = (1.0, 0.0);
        Some(match name {
            "exp" => TestFunction::Exp { scale, shift },
            "poly" => TestFunction::Cubic { scale, shift },
            "cosh" => TestFunction::Cosh { scale, shift },
            _ => return None,
        })
    }

    pub fn eval(&self, order: u32, x: f64) -> f64 {
        match *self {
            TestFunction::Exp { scale, shift } => scale * (x + shift).exp(),
            TestFunction::Quartic { scale, shift } => {
                let y = x + shift;
                scale
                    * match order {
                        0 => y * y + y.powi(4),
                        1 => 2.0 * y + 4.0 * y.powi(3),
                        2 => 2.0 + 12.0 * y * y,
                        3 => 24.0 * y,
                        4 => 24.0,
                        _ => 0.0,
                    }
            }
            TestFunction::Cosh { scale, shift } => {
                let y = x + shift;
                scale * if order % 2 == 0 { y.cosh() } else { y.sinh() }
            }
            TestFunction::Cubic { scale, shift } => {
                let y = x + shift;
                scale
                    * match order {
                        0 => y + y.powi(3) / 3.0,
                        1 => 1.0 + y * y,
                        2 => 2.0 * y,
                        3 => 2.0,
                        _ => 0.0,
                    }
            }
        }
    }
}

pub type FuncTable = BTreeMap<String, TestFunction>;

/// Evaluate at a point. Non-finite intermediate values are reported as
/// domain errors so that callers can resample.
pub fn eval(e: &Expr, values: &HashMap<String, f64>, funcs: &FuncTable) -> Result<f64, EvalError> {
    let mut memo = HashMap::new();
    go(e, values, funcs, &mut memo)
}

fn finite(v: f64, what: &str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Domain(what.to_string()))
    }
}

fn go(
    e: &Expr,
    values: &HashMap<String, f64>,
    funcs: &FuncTable,
    memo: &mut HashMap<Expr, f64>,
) -> Result<f64, EvalError> {
    if let Some(v) = memo.get(e) {
        return Ok(*v);
    }
    let v = match e.node() {
        Node::Const(c) => c.to_f64().unwrap_or(f64::NAN),
        Node::Symbol(s) => *values
            .get(&**s)
            .ok_or_else(|| EvalError::UnboundSymbol(s.to_string()))?,
        Node::Sum(ts) => {
            let mut acc = 0.0;
            for t in ts {
                acc += go(t, values, funcs, memo)?;
            }
            acc
        }
        Node::Product(fs) => {
            let mut acc = 1.0;
            for f in fs {
                acc *= go(f, values, funcs, memo)?;
            }
            acc
        }
        Node::Power(b, x) => {
            let bv = go(b, values, funcs, memo)?;
            match x.as_const() {
                Some(k) if k.is_integer() => {
                    if bv == 0.0 && k < &num_rational::BigRational::from_integer(0.into()) {
                        return Err(EvalError::Domain("division by zero".into()));
                    }
                    bv.powi(k.to_integer().to_i32().unwrap_or(i32::MAX))
                }
                _ => {
                    let xv = go(x, values, funcs, memo)?;
                    if bv < 0.0 {
                        return Err(EvalError::Domain("power of a negative base".into()));
                    }
                    bv.powf(xv)
                }
            }
        }
        Node::Call(f, a) => {
            let x = go(a, values, funcs, memo)?;
            match f {
                Func::Exp => x.exp(),
                Func::Ln => {
                    if x <= 0.0 {
                        return Err(EvalError::Domain("logarithm".into()));
                    }
                    x.ln()
                }
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(EvalError::Domain("square root".into()));
                    }
                    x.sqrt()
                }
                Func::Arccos | Func::Arcsin => {
                    if !(-1.0..=1.0).contains(&x) {
                        return Err(EvalError::Domain("inverse cosine or sine".into()));
                    }
                    if *f == Func::Arccos {
                        x.acos()
                    } else {
                        x.asin()
                    }
                }
                Func::Arctan => x.atan(),
            }
        }
        Node::UFunc { name, order, arg } => {
            let x = go(arg, values, funcs, memo)?;
            let tf = funcs
                .get(&**name)
                .ok_or_else(|| EvalError::UnboundFunction(name.to_string()))?;
            tf.eval(*order, x)
        }
    };
    let v = finite(v, "non-finite value")?;
    memo.insert(e.clone(), v);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{differentiate, parse, Context};

    #[test]
    fn evaluates_elementary_functions() {
        let ctx = Context::new().with_var("x");
        let e = parse("exp(x) + ln(x) - x^(1/2) + arctan(x)", &ctx).unwrap();
        let mut v = HashMap::new();
        v.insert("x".to_string(), 2.0);
        let got = eval(&e, &v, &FuncTable::new()).unwrap();
        let want = 2f64.exp() + 2f64.ln() - 2f64.sqrt() + 2f64.atan();
        assert!((got - want).abs() < 1e-12);
        v.insert("x".to_string(), -1.0);
        assert!(matches!(eval(&e, &v, &FuncTable::new()), Err(EvalError::Domain(_))));
    }

    #[test]
    fn test_functions_have_consistent_derivatives() {
        let ctx = Context::new().with_var("x").with_func("F");
        let f = parse("F(x)", &ctx).unwrap();
        let h = 1e-5;
        for index in 0..3 {
            let mut table = FuncTable::new();
            table.insert("F".into(), TestFunction::family(index, 2));
            let mut expr = f.clone();
            for _ in 0..3 {
                let d = differentiate(&expr, "x");
                let at = |x: f64, e: &Expr| {
                    let mut v = HashMap::new();
                    v.insert("x".to_string(), x);
                    eval(e, &v, &table).unwrap()
                };
                let fd = (at(0.7 + h, &expr) - at(0.7 - h, &expr)) / (2.0 * h);
                assert!((fd - at(0.7, &d)).abs() < 1e-5 * (1.0 + fd.abs()));
                expr = d;
            }
        }
    }
}

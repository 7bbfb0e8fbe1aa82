use std::collections::HashMap;

use super::{Expr, Func, Node};

/// Partial derivative with respect to the symbol `var`.
pub fn differentiate(e: &Expr, var: &str) -> Expr {
    let mut memo = HashMap::new();
    go(e, var, &mut memo)
}

pub(crate) fn derivative(e: &Expr, var: &str) -> Expr {
    differentiate(e, var)
}

fn go(e: &Expr, var: &str, memo: &mut HashMap<Expr, Expr>) -> Expr {
    if let Some(d) = memo.get(e) {
        return d.clone();
    }
    let d = if !e.contains_symbol(var) {
        Expr::zero()
    } else {
        rule(e, var, memo)
    };
    memo.insert(e.clone(), d.clone());
    d
}

fn rule(e: &Expr, var: &str, memo: &mut HashMap<Expr, Expr>) -> Expr {
    match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Symbol(s) => {
            if &**s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Sum(ts) => Expr::add(ts.iter().map(|t| go(t, var, memo))),
        Node::Product(fs) => {
            let mut terms = Vec::with_capacity(fs.len());
            for (i, f) in fs.iter().enumerate() {
                let df = go(f, var, memo);
                if df.is_zero_node() {
                    continue;
                }
                let mut factors: Vec<Expr> = fs
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, g)| g.clone())
                    .collect();
                factors.push(df);
                terms.push(Expr::mul(factors));
            }
            Expr::add(terms)
        }
        Node::Power(b, x) => {
            let db = go(b, var, memo);
            if !x.contains_symbol(var) {
                return Expr::mul([
                    x.clone(),
                    Expr::pow(b.clone(), Expr::add([x.clone(), Expr::int(-1)])),
                    db,
                ]);
            }
            let dx = go(x, var, memo);
            Expr::mul([
                e.clone(),
                Expr::add([
                    Expr::mul([dx, Expr::ln(b.clone())]),
                    Expr::mul([x.clone(), db, b.recip()]),
                ]),
            ])
        }
        Node::Call(f, a) => {
            let da = go(a, var, memo);
            let outer = match f {
                Func::Exp => e.clone(),
                Func::Ln => a.recip(),
                Func::Sin => Expr::cos(a.clone()),
                Func::Cos => Expr::sin(a.clone()).neg(),
                Func::Sqrt => Expr::mul([Expr::rational(1, 2), Expr::pow(a.clone(), Expr::rational(-1, 2))]),
                Func::Arcsin => one_minus_square_root_inverse(a),
                Func::Arccos => one_minus_square_root_inverse(a).neg(),
                Func::Arctan => Expr::add([Expr::one(), Expr::powi(a.clone(), 2)]).recip(),
            };
            Expr::mul([outer, da])
        }
        Node::UFunc { name, order, arg } => {
            let da = go(arg, var, memo);
            Expr::mul([Expr::ufunc(name, order + 1, arg.clone()), da])
        }
    }
}

fn one_minus_square_root_inverse(a: &Expr) -> Expr {
    Expr::pow(
        Expr::add([Expr::one(), Expr::powi(a.clone(), 2).neg()]),
        Expr::rational(-1, 2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{canonicalize, parse, Context};

    fn ctx() -> Context {
        Context::new().with_var("x").with_var("y").with_param("k").with_func("F")
    }

    fn check(src: &str, expected: &str) {
        let c = ctx();
        let d = differentiate(&parse(src, &c).unwrap(), "x");
        let want = parse(expected, &c).unwrap();
        assert_eq!(
            canonicalize(&(d.clone() - want)).unwrap(),
            Expr::zero(),
            "d/dx {src} gave {d}"
        );
    }

    #[test]
    fn elementary_rules() {
        check("x^3 + k*x", "3*x^2 + k");
        check("exp(k*x)", "k*exp(k*x)");
        check("ln(x^2 + 1)", "2*x/(x^2 + 1)");
        check("sin(x)*cos(x)", "cos(x)^2 - sin(x)^2");
        check("sqrt(x)", "1/(2*x^(1/2))");
        check("x^k", "k*x^(k - 1)");
        check("arctan(x)", "1/(1 + x^2)");
    }

    #[test]
    fn chain_rule_on_unspecified_functions() {
        check("F(x^2)", "2*x*F'(x^2)");
        check("F'(y)", "0");
    }

    #[test]
    fn variable_exponent() {
        check("x^x", "x^x*(ln(x) + 1)");
    }
}

//! Symbolic expressions over jet coordinates, parameters and unspecified
//! functions.
//!
//! Trees are immutable and reference counted. The smart constructors on
//! [`Expr`] perform only local clean-up (flattening, constant folding, like
//! terms, common bases); the full rational normal form lives in
//! [`canon`].

mod canon;
mod context;
mod diff;
mod eval;
mod parse;
mod zero;

pub use canon::{canonicalize, CanonError};
pub use context::{Context, Domain, SymbolRole};
pub use diff::differentiate;
pub use eval::{eval, EvalError, FuncTable, TestFunction};
pub use parse::{parse, ParseError};
pub use zero::{is_zero, Verdict, ZeroTester, DEFAULT_SAMPLES, DEFAULT_TOLERANCE};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Elementary functions with a fixed interpretation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Arccos,
    Arcsin,
    Arctan,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Arccos => "arccos",
            Func::Arcsin => "arcsin",
            Func::Arctan => "arctan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "arccos" => Func::Arccos,
            "arcsin" => Func::Arcsin,
            "arctan" => Func::Arctan,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Node {
    Const(Rational),
    Symbol(Arc<str>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Expr, Expr),
    Call(Func, Expr),
    /// Unspecified function `name` differentiated `order` times, applied to `arg`.
    UFunc {
        name: Arc<str>,
        order: u32,
        arg: Expr,
    },
}

struct Inner {
    hash: u64,
    node: Node,
}

/// Shared immutable expression node. Hashing uses a hash cached at
/// construction, so trees can be used freely as map keys.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.node == other.0.node)
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

fn node_hash(node: &Node) -> u64 {
    use std::collections::hash_map::DefaultHasher;
    let mut h = DefaultHasher::new();
    match node {
        Node::Const(c) => {
            0u8.hash(&mut h);
            c.hash(&mut h);
        }
        Node::Symbol(s) => {
            1u8.hash(&mut h);
            s.hash(&mut h);
        }
        Node::Sum(ts) => {
            2u8.hash(&mut h);
            for t in ts {
                h.write_u64(t.0.hash);
            }
        }
        Node::Product(fs) => {
            3u8.hash(&mut h);
            for t in fs {
                h.write_u64(t.0.hash);
            }
        }
        Node::Power(b, e) => {
            4u8.hash(&mut h);
            h.write_u64(b.0.hash);
            h.write_u64(e.0.hash);
        }
        Node::Call(f, a) => {
            5u8.hash(&mut h);
            f.hash(&mut h);
            h.write_u64(a.0.hash);
        }
        Node::UFunc { name, order, arg } => {
            6u8.hash(&mut h);
            name.hash(&mut h);
            order.hash(&mut h);
            h.write_u64(arg.0.hash);
        }
    }
    h.finish()
}

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

impl Expr {
    pub(crate) fn from_node(node: Node) -> Expr {
        let hash = node_hash(&node);
        Expr(Arc::new(Inner { hash, node }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn constant(c: Rational) -> Expr {
        Expr::from_node(Node::Const(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::constant(rat(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn symbol(name: &str) -> Expr {
        Expr::from_node(Node::Symbol(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self.node() {
            Node::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero_node(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    pub fn ufunc(name: &str, order: u32, arg: Expr) -> Expr {
        Expr::from_node(Node::UFunc {
            name: Arc::from(name),
            order,
            arg,
        })
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        match (f, arg.node()) {
            (Func::Exp, Node::Const(c)) if c.is_zero() => Expr::one(),
            (Func::Ln, Node::Const(c)) if c.is_one() => Expr::zero(),
            (Func::Sin, Node::Const(c)) if c.is_zero() => Expr::zero(),
            (Func::Cos, Node::Const(c)) if c.is_zero() => Expr::one(),
            (Func::Exp, Node::Call(Func::Ln, inner)) => inner.clone(),
            (Func::Ln, Node::Call(Func::Exp, inner)) => inner.clone(),
            _ => Expr::from_node(Node::Call(f, arg)),
        }
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::call(Func::Exp, arg)
    }

    pub fn ln(arg: Expr) -> Expr {
        Expr::call(Func::Ln, arg)
    }

    pub fn sin(arg: Expr) -> Expr {
        Expr::call(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Expr {
        Expr::call(Func::Cos, arg)
    }

    pub fn sqrt(arg: Expr) -> Expr {
        Expr::pow(arg, Expr::rational(1, 2))
    }

    /// Sum with flattening, constant folding and collection of like terms.
    pub fn add(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = Rational::zero();
        let mut collected: BTreeMap<Expr, Rational> = BTreeMap::new();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        stack.reverse();
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Const(c) => constant += c,
                Node::Sum(inner) => stack.extend(inner.iter().rev().cloned()),
                _ => {
                    let (c, rest) = t.split_coefficient();
                    *collected.entry(rest).or_insert_with(Rational::zero) += c;
                }
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(collected.len() + 1);
        if !constant.is_zero() {
            out.push(Expr::constant(constant));
        }
        for (rest, c) in collected {
            if c.is_zero() {
                continue;
            }
            out.push(Expr::scaled(c, rest));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Expr::from_node(Node::Sum(out))
            }
        }
    }

    /// `c * rest` without re-running the product simplifier on `rest`.
    fn scaled(c: Rational, rest: Expr) -> Expr {
        if c.is_one() {
            return rest;
        }
        if c.is_zero() {
            return Expr::zero();
        }
        let mut factors = vec![Expr::constant(c)];
        match rest.node() {
            Node::Product(fs) => factors.extend(fs.iter().cloned()),
            Node::Const(k) => return Expr::constant(k * factors[0].as_const().unwrap()),
            _ => factors.push(rest),
        }
        Expr::from_node(Node::Product(factors))
    }

    /// Split a product into its rational coefficient and the remaining factors.
    pub fn split_coefficient(&self) -> (Rational, Expr) {
        match self.node() {
            Node::Const(c) => (c.clone(), Expr::one()),
            Node::Product(fs) => match fs.first().and_then(|f| f.as_const()) {
                Some(c) => {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let rest = if rest.len() == 1 {
                        rest.into_iter().next().unwrap()
                    } else {
                        Expr::from_node(Node::Product(rest))
                    };
                    (c.clone(), rest)
                }
                None => (Rational::one(), self.clone()),
            },
            _ => (Rational::one(), self.clone()),
        }
    }

    /// Product with flattening, constant folding and merging of common bases.
    pub fn mul(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut coefficient = Rational::one();
        let mut bases: BTreeMap<Expr, Vec<Expr>> = BTreeMap::new();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Const(c) => {
                    if c.is_zero() {
                        return Expr::zero();
                    }
                    coefficient *= c;
                }
                Node::Product(inner) => stack.extend(inner.iter().cloned()),
                Node::Power(b, e) => bases.entry(b.clone()).or_default().push(e.clone()),
                _ => bases.entry(f.clone()).or_default().push(Expr::one()),
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(bases.len() + 1);
        for (base, exps) in bases {
            let e = if exps.len() == 1 {
                exps.into_iter().next().unwrap()
            } else {
                Expr::add(exps)
            };
            let p = Expr::pow(base, e);
            match p.node() {
                Node::Const(c) => coefficient *= c,
                Node::Product(inner) => {
                    for g in inner {
                        match g.as_const() {
                            Some(c) => coefficient *= c,
                            None => out.push(g.clone()),
                        }
                    }
                }
                _ => out.push(p),
            }
        }
        if coefficient.is_zero() {
            return Expr::zero();
        }
        out.sort();
        if out.is_empty() {
            return Expr::constant(coefficient);
        }
        if !coefficient.is_one() {
            out.insert(0, Expr::constant(coefficient));
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Expr::from_node(Node::Product(out))
        }
    }

    /// Power with the trivial identities applied. Nested powers are kept.
    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        if let Some(e) = exponent.as_const() {
            if e.is_zero() {
                return Expr::one();
            }
            if e.is_one() {
                return base;
            }
            if let Some(b) = base.as_const() {
                if e.is_integer() {
                    if b.is_zero() && e.is_negative() {
                        // left symbolic; canonicalize reports the division by zero
                        return Expr::from_node(Node::Power(base, exponent));
                    }
                    return Expr::constant(rational_powi(b, e.to_integer().to_i64().unwrap_or(0)));
                }
            }
        }
        if base.is_one() {
            return Expr::one();
        }
        if base.is_zero_node() {
            if let Some(e) = exponent.as_const() {
                if e.is_positive() {
                    return Expr::zero();
                }
            }
        }
        Expr::from_node(Node::Power(base, exponent))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, Expr::int(n))
    }

    pub fn neg(&self) -> Expr {
        Expr::mul([Expr::int(-1), self.clone()])
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        Expr::add([self.clone(), other.neg()])
    }

    pub fn div(&self, other: &Expr) -> Expr {
        Expr::mul([self.clone(), Expr::powi(other.clone(), -1)])
    }

    pub fn recip(&self) -> Expr {
        Expr::powi(self.clone(), -1)
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Symbol(_) => vec![],
            Node::Sum(v) | Node::Product(v) => v.iter().collect(),
            Node::Power(b, e) => vec![b, e],
            Node::Call(_, a) => vec![a],
            Node::UFunc { arg, .. } => vec![arg],
        }
    }

    /// Names of all symbols occurring anywhere in the tree.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        let mut seen = std::collections::HashSet::new();
        while let Some(e) = stack.pop() {
            if !seen.insert(Arc::as_ptr(&e.0)) {
                continue;
            }
            if let Node::Symbol(s) = e.node() {
                out.insert(s.to_string());
            }
            stack.extend(e.children());
        }
        out
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self.node() {
            Node::Symbol(s) => &**s == name,
            Node::Const(_) => false,
            _ => self.children().into_iter().any(|c| c.contains_symbol(name)),
        }
    }

    /// Names of unspecified functions in the tree.
    pub fn ufunc_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if let Node::UFunc { name, .. } = e.node() {
                out.insert(name.to_string());
            }
            stack.extend(e.children());
        }
        out
    }

    /// Rebuild the tree with `f` applied bottom-up to every node.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(&Expr) -> Option<Expr>) -> Expr {
        let rebuilt = match self.node() {
            Node::Const(_) | Node::Symbol(_) => self.clone(),
            Node::Sum(v) => Expr::add(v.iter().map(|t| t.map_bottom_up(f))),
            Node::Product(v) => Expr::mul(v.iter().map(|t| t.map_bottom_up(f))),
            Node::Power(b, e) => Expr::pow(b.map_bottom_up(f), e.map_bottom_up(f)),
            Node::Call(k, a) => Expr::call(*k, a.map_bottom_up(f)),
            Node::UFunc { name, order, arg } => Expr::ufunc(name, *order, arg.map_bottom_up(f)),
        };
        f(&rebuilt).unwrap_or(rebuilt)
    }

    /// Number of nodes, counting shared subtrees once per occurrence.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(|c| c.size()).sum::<usize>()
    }
}

/// Simultaneous substitution of symbols. Replacement expressions are not
/// themselves rewritten.
pub fn substitute(e: &Expr, bindings: &BTreeMap<String, Expr>) -> Expr {
    fn go(
        e: &Expr,
        bindings: &BTreeMap<String, Expr>,
        memo: &mut std::collections::HashMap<Expr, Expr>,
    ) -> Expr {
        if let Some(r) = memo.get(e) {
            return r.clone();
        }
        let out = match e.node() {
            Node::Const(_) => e.clone(),
            Node::Symbol(s) => bindings.get(&**s).cloned().unwrap_or_else(|| e.clone()),
            Node::Sum(v) => Expr::add(v.iter().map(|t| go(t, bindings, memo))),
            Node::Product(v) => Expr::mul(v.iter().map(|t| go(t, bindings, memo))),
            Node::Power(b, x) => Expr::pow(go(b, bindings, memo), go(x, bindings, memo)),
            Node::Call(k, a) => Expr::call(*k, go(a, bindings, memo)),
            Node::UFunc { name, order, arg } => Expr::ufunc(name, *order, go(arg, bindings, memo)),
        };
        memo.insert(e.clone(), out.clone());
        out
    }
    go(e, bindings, &mut std::collections::HashMap::new())
}

/// Replace every unspecified function `name` (all derivative orders) by a
/// concrete expression in the placeholder variable `var`.
pub fn substitute_function(e: &Expr, name: &str, var: &str, body: &Expr) -> Expr {
    let mut derivs: Vec<Expr> = vec![body.clone()];
    e.map_bottom_up(&mut |node| match node.node() {
        Node::UFunc {
            name: n,
            order,
            arg,
        } if &**n == name => {
            while derivs.len() <= *order as usize {
                let last = derivs.last().unwrap().clone();
                derivs.push(diff::derivative(&last, var));
            }
            let mut b = BTreeMap::new();
            b.insert(var.to_string(), arg.clone());
            Some(substitute(&derivs[*order as usize], &b))
        }
        _ => None,
    })
}

pub(crate) fn rational_powi(b: &Rational, n: i64) -> Rational {
    if n >= 0 {
        num_traits::pow::pow(b.clone(), n as usize)
    } else {
        num_traits::pow::pow(b.recip(), (-n) as usize)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::add([self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sub(&self, &rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::mul([self, rhs])
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::div(&self, &rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

// Rendering follows the parser's grammar so that output can be read back.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

fn render_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Const(c) => {
            if c.is_negative() {
                PREC_UNARY
            } else if c.is_integer() {
                PREC_ATOM
            } else {
                PREC_PRODUCT
            }
        }
        Node::Symbol(_) | Node::Call(..) | Node::UFunc { .. } => PREC_ATOM,
        Node::Sum(_) => PREC_SUM,
        Node::Product(_) => {
            if e.split_coefficient().0.is_negative() {
                PREC_UNARY
            } else {
                PREC_PRODUCT
            }
        }
        Node::Power(..) => PREC_POWER,
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_product(f: &mut fmt::Formatter<'_>, factors: &[Expr]) -> fmt::Result {
    let mut numer: Vec<&Expr> = Vec::new();
    let mut denom: Vec<Expr> = Vec::new();
    for g in factors {
        if let Node::Power(b, x) = g.node() {
            if let Some(k) = x.as_const() {
                if k.is_negative() {
                    denom.push(Expr::pow(b.clone(), Expr::constant(-k)));
                    continue;
                }
            }
        }
        numer.push(g);
    }
    if numer.is_empty() {
        write!(f, "1")?;
    }
    for (i, g) in numer.iter().enumerate() {
        if i > 0 {
            write!(f, "*")?;
        }
        write_wrapped(f, g, PREC_POWER)?;
    }
    for d in &denom {
        write!(f, "/")?;
        write_wrapped(f, d, PREC_POWER)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(c) => write!(f, "{}", render_rational(c)),
            Node::Symbol(s) => write!(f, "{s}"),
            Node::Sum(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    let (c, rest) = t.split_coefficient();
                    if i == 0 {
                        write_wrapped(f, t, PREC_SUM)?;
                    } else if c.is_negative() {
                        write!(f, " - ")?;
                        let positive = Expr::scaled(-c, rest);
                        write_wrapped(f, &positive, PREC_PRODUCT)?;
                    } else {
                        write!(f, " + ")?;
                        write_wrapped(f, t, PREC_PRODUCT)?;
                    }
                }
                Ok(())
            }
            Node::Product(fs) => {
                let (c, rest) = self.split_coefficient();
                if c.is_negative() {
                    write!(f, "-")?;
                    let positive = Expr::scaled(-c, rest);
                    return write_wrapped(f, &positive, PREC_POWER.min(PREC_PRODUCT));
                }
                if !c.is_one() && !c.is_integer() {
                    // numerator and denominator written out so a/b*x round-trips
                    write!(f, "{}", c.numer())?;
                    match rest.node() {
                        Node::Product(rf) => {
                            write!(f, "*")?;
                            write_product(f, rf)?;
                        }
                        _ => {
                            write!(f, "*")?;
                            write_wrapped(f, &rest, PREC_POWER)?;
                        }
                    }
                    return write!(f, "/{}", c.denom());
                }
                write_product(f, fs)
            }
            Node::Power(b, x) => {
                write_wrapped(f, b, PREC_ATOM)?;
                write!(f, "^")?;
                write_wrapped(f, x, PREC_ATOM)
            }
            Node::Call(k, a) => write!(f, "{}({a})", k.name()),
            Node::UFunc { name, order, arg } => {
                write!(f, "{name}")?;
                for _ in 0..*order {
                    write!(f, "'")?;
                }
                write!(f, "({arg})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Expr {
        Expr::symbol("x")
    }

    #[test]
    fn like_terms_collect() {
        let e = x() + x();
        assert_eq!(e, Expr::mul([Expr::int(2), x()]));
    }

    #[test]
    fn sums_flatten() {
        let e = Expr::add([x(), Expr::add([Expr::symbol("y"), Expr::int(1)]), Expr::int(2)]);
        match e.node() {
            Node::Sum(ts) => {
                assert_eq!(ts.len(), 3);
                assert!(ts.iter().all(|t| !matches!(t.node(), Node::Sum(_))));
            }
            _ => panic!("expected a sum"),
        }
    }

    #[test]
    fn common_bases_merge() {
        let g = Expr::symbol("gamma");
        let rho = Expr::symbol("rho");
        let e = Expr::pow(rho.clone(), g.clone()) * Expr::pow(rho.clone(), Expr::one() - g);
        assert_eq!(e, rho);
    }

    #[test]
    fn constants_stay_lowest_terms() {
        let c = Expr::rational(6, -4);
        let r = c.as_const().unwrap();
        assert_eq!(r, &rat(-3, 2));
        assert!(r.denom() > &BigInt::from(0));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), Expr::one());
        b.insert("y".to_string(), x());
        let e = substitute(&(x() + Expr::symbol("y")), &b);
        assert_eq!(e, Expr::one() + x());
    }

    #[test]
    fn rendering_is_readable() {
        let e = Expr::mul([Expr::symbol("rho"), x() + Expr::int(-1)]);
        assert_eq!(e.to_string(), "rho*(-1 + x)");
        let e = Expr::sub(&x(), &Expr::symbol("y"));
        assert_eq!(e.to_string(), "x - y");
        let d = Expr::div(&x(), &Expr::symbol("rho"));
        assert_eq!(d.to_string(), "x/rho");
    }
}

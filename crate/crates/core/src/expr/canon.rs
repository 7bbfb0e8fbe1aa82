//! Rational normal form.
//!
//! An expression is brought to `numerator / denominator` where both are
//! polynomials over Q in monomials of opaque atoms. Atoms are symbols, calls
//! and unspecified functions with canonical arguments, and bases carrying
//! non-integer exponents. Exponents of an atom are themselves canonical
//! expressions, so `x^a * x^b` and `x^(a+b)` meet in the same monomial.
//! `exp(z)` is stored as the atom `e` raised to `z`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{Expr, Func, Node, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("division by an expression that is identically zero")]
    DivisionByZero,
    #[error("normal form exceeds {0} terms")]
    TooLarge(usize),
}

const MAX_TERMS: usize = 40_000;
const CACHE_LIMIT: usize = 200_000;

thread_local! {
    static CACHE: RefCell<HashMap<Expr, Expr>> = RefCell::new(HashMap::new());
    static EULER: Expr = Expr::symbol("#e");
}

fn euler() -> Expr {
    EULER.with(|e| e.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Exponent {
    Rat(Rational),
    Sym(Expr),
}

impl Exponent {
    fn from_canonical(e: Expr) -> Exponent {
        match e.as_const() {
            Some(c) => Exponent::Rat(c.clone()),
            None => Exponent::Sym(e),
        }
    }

    fn to_expr(&self) -> Expr {
        match self {
            Exponent::Rat(c) => Expr::constant(c.clone()),
            Exponent::Sym(e) => e.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Exponent::Rat(c) if c.is_zero())
    }

    fn add(&self, other: &Exponent) -> Result<Exponent, CanonError> {
        match (self, other) {
            (Exponent::Rat(a), Exponent::Rat(b)) => Ok(Exponent::Rat(a + b)),
            _ => Ok(Exponent::from_canonical(canonicalize(&Expr::add([
                self.to_expr(),
                other.to_expr(),
            ]))?)),
        }
    }

    fn scale(&self, k: &Rational) -> Result<Exponent, CanonError> {
        match self {
            Exponent::Rat(a) => Ok(Exponent::Rat(a * k)),
            Exponent::Sym(e) => Ok(Exponent::from_canonical(canonicalize(&Expr::mul([
                Expr::constant(k.clone()),
                e.clone(),
            ]))?)),
        }
    }
}

type Mono = Vec<(Expr, Exponent)>;

/// Polynomial: monomial to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct Poly(BTreeMap<Mono, Rational>);

fn mono_mul(a: &Mono, b: &Mono) -> Result<(Rational, Mono), CanonError> {
    let mut out: Mono = Vec::with_capacity(a.len() + b.len());
    let mut coefficient = Rational::one();
    let (mut i, mut j) = (0, 0);
    let mut push = |key: Expr, e: Exponent, out: &mut Mono| {
        if e.is_zero() {
            return;
        }
        if let (Some(k), Exponent::Rat(r)) = (key.as_const(), &e) {
            if r.is_integer() {
                coefficient *= super::rational_powi(k, r.to_integer().to_i64().unwrap_or(0));
                return;
            }
        }
        out.push((key, e));
    };
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            push(a[i].0.clone(), a[i].1.clone(), &mut out);
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            push(b[j].0.clone(), b[j].1.clone(), &mut out);
            j += 1;
        } else {
            let e = a[i].1.add(&b[j].1)?;
            push(a[i].0.clone(), e, &mut out);
            i += 1;
            j += 1;
        }
    }
    Ok((coefficient, out))
}

fn mono_inverse(m: &Mono) -> Result<Mono, CanonError> {
    m.iter()
        .map(|(k, e)| Ok((k.clone(), e.scale(&-Rational::one())?)))
        .collect()
}

impl Poly {
    fn constant(c: Rational) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.0.insert(Vec::new(), c);
        }
        p
    }

    fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    fn monomial(m: Mono, c: Rational) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.0.insert(m, c);
        }
        p
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0.get(&Vec::new()).is_some_and(|c| c.is_one())
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::default();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    fn mul(&self, other: &Poly) -> Result<Poly, CanonError> {
        if self.0.len() * other.0.len() > MAX_TERMS * 4 {
            return Err(CanonError::TooLarge(MAX_TERMS));
        }
        let mut out = Poly::default();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                let (k, m) = mono_mul(ma, mb)?;
                out.add_term(m, ca * cb * k);
            }
        }
        if out.0.len() > MAX_TERMS {
            return Err(CanonError::TooLarge(MAX_TERMS));
        }
        Ok(out)
    }

    fn mul_mono(&self, m: &Mono) -> Result<Poly, CanonError> {
        let mut out = Poly::default();
        for (ma, ca) in &self.0 {
            let (k, p) = mono_mul(ma, m)?;
            out.add_term(p, ca * k);
        }
        Ok(out)
    }

    fn powu(&self, mut n: u64) -> Result<Poly, CanonError> {
        let mut result = Poly::one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Largest monomial dividing every term, over rational exponents only.
    fn monomial_content(&self) -> Mono {
        let mut iter = self.0.keys();
        let Some(first) = iter.next() else {
            return Vec::new();
        };
        let mut content: BTreeMap<Expr, Rational> = first
            .iter()
            .filter_map(|(k, e)| match e {
                Exponent::Rat(r) => Some((k.clone(), r.clone())),
                Exponent::Sym(_) => None,
            })
            .collect();
        for m in iter {
            let here: BTreeMap<&Expr, &Rational> = m
                .iter()
                .filter_map(|(k, e)| match e {
                    Exponent::Rat(r) => Some((k, r)),
                    Exponent::Sym(_) => None,
                })
                .collect();
            content.retain(|k, r| match here.get(k) {
                Some(s) => {
                    if *s < r {
                        *r = (*s).clone();
                    }
                    true
                }
                None => false,
            });
        }
        content
            .into_iter()
            .filter(|(_, r)| !r.is_zero())
            .map(|(k, r)| (k, Exponent::Rat(r)))
            .collect()
    }

    fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = self
            .0
            .iter()
            .map(|(m, c)| mono_to_expr(m, c))
            .collect();
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => {
                terms.sort();
                Expr::from_node(Node::Sum(terms))
            }
        }
    }

    pub(crate) fn term_exprs(&self) -> Vec<Expr> {
        self.0.iter().map(|(m, c)| mono_to_expr(m, c)).collect()
    }
}

fn factor_expr(key: &Expr, e: &Exponent) -> Expr {
    if *key == euler() {
        return Expr::exp(e.to_expr());
    }
    match e {
        Exponent::Rat(r) if r.is_one() => key.clone(),
        _ => Expr::from_node(Node::Power(key.clone(), e.to_expr())),
    }
}

fn raw_product(mut factors: Vec<Expr>, coefficient: &Rational) -> Expr {
    factors.sort();
    if !coefficient.is_one() {
        factors.insert(0, Expr::constant(coefficient.clone()));
    }
    match factors.len() {
        0 => Expr::one(),
        1 => factors.pop().unwrap(),
        _ => Expr::from_node(Node::Product(factors)),
    }
}

fn mono_to_expr(m: &Mono, c: &Rational) -> Expr {
    if m.is_empty() {
        return Expr::constant(c.clone());
    }
    let factors = m.iter().map(|(k, e)| factor_expr(k, e)).collect();
    raw_product(factors, c)
}

/// `num / den` with the denominator free of monomial content and with
/// leading coefficient one.
#[derive(Clone, Debug)]
pub(crate) struct Frac {
    pub(crate) num: Poly,
    pub(crate) den: Poly,
}

impl Frac {
    fn from_poly(p: Poly) -> Frac {
        Frac {
            num: p,
            den: Poly::one(),
        }
    }

    fn constant(c: Rational) -> Frac {
        Frac::from_poly(Poly::constant(c))
    }

    fn atom(key: Expr, e: Exponent) -> Frac {
        if e.is_zero() {
            return Frac::constant(Rational::one());
        }
        let (k, m) = mono_mul(&vec![], &vec![(key, e)]).expect("single factor");
        Frac::from_poly(Poly::monomial(m, k))
    }

    fn normalize(mut self) -> Result<Frac, CanonError> {
        if self.den.is_zero() {
            return Err(CanonError::DivisionByZero);
        }
        if has_integral_compound(&self.num) || has_integral_compound(&self.den) {
            let num = expand_compound(&self.num)?;
            let den = expand_compound(&self.den)?;
            if den.num.is_zero() {
                return Err(CanonError::DivisionByZero);
            }
            let inv = Frac { num: den.den, den: den.num }.normalize()?;
            return num.mul(&inv);
        }
        if self.num.is_zero() {
            return Ok(Frac::constant(Rational::zero()));
        }
        if self.den.is_one() {
            return Ok(self);
        }
        if self.den.0.len() == 1 {
            let (m, c) = self.den.0.iter().next().unwrap();
            let inv = mono_inverse(m)?;
            let num = self.num.mul_mono(&inv)?.scale(&c.recip());
            return Ok(Frac::from_poly(num));
        }
        let content = self.den.monomial_content();
        if !content.is_empty() {
            let inv = mono_inverse(&content)?;
            self.den = self.den.mul_mono(&inv)?;
            self.num = self.num.mul_mono(&inv)?;
        }
        let lead = self.den.0.values().next().unwrap().clone();
        if !lead.is_one() {
            let k = lead.recip();
            self.den = self.den.scale(&k);
            self.num = self.num.scale(&k);
        }
        Ok(self)
    }

    fn add(&self, other: &Frac) -> Result<Frac, CanonError> {
        if self.den == other.den {
            return Frac {
                num: self.num.add(&other.num),
                den: self.den.clone(),
            }
            .normalize();
        }
        Frac {
            num: self.num.mul(&other.den)?.add(&other.num.mul(&self.den)?),
            den: self.den.mul(&other.den)?,
        }
        .normalize()
    }

    fn mul(&self, other: &Frac) -> Result<Frac, CanonError> {
        if self.num.is_zero() || other.num.is_zero() {
            return Ok(Frac::constant(Rational::zero()));
        }
        let (n1, d1, n2, d2) = (&self.num, &self.den, &other.num, &other.den);
        if n1 == d2 && !d2.is_one() {
            return Frac { num: n2.clone(), den: d1.clone() }.normalize();
        }
        if n2 == d1 && !d1.is_one() {
            return Frac { num: n1.clone(), den: d2.clone() }.normalize();
        }
        Frac {
            num: n1.mul(n2)?,
            den: d1.mul(d2)?,
        }
        .normalize()
    }

    fn powi(&self, n: i64) -> Result<Frac, CanonError> {
        if n >= 0 {
            Frac {
                num: self.num.powu(n as u64)?,
                den: self.den.powu(n as u64)?,
            }
            .normalize()
        } else {
            if self.num.is_zero() {
                return Err(CanonError::DivisionByZero);
            }
            let m = n.unsigned_abs();
            Frac {
                num: self.den.powu(m)?,
                den: self.num.powu(m)?,
            }
            .normalize()
        }
    }

    fn to_expr(&self) -> Expr {
        let num = self.num.to_expr();
        if self.den.is_one() {
            return num;
        }
        let inv = Expr::from_node(Node::Power(self.den.to_expr(), Expr::int(-1)));
        match num.node() {
            Node::Const(c) => raw_product(vec![inv], c),
            Node::Product(_) => {
                let (c, rest) = num.split_coefficient();
                let mut factors = match rest.node() {
                    Node::Product(fs) => fs.clone(),
                    _ => vec![rest.clone()],
                };
                factors.push(inv);
                raw_product(factors, &c)
            }
            _ => raw_product(vec![num, inv], &Rational::one()),
        }
    }
}

fn is_compound_integral(key: &Expr, e: &Exponent) -> bool {
    matches!(e, Exponent::Rat(r) if r.is_integer())
        && matches!(key.node(), Node::Sum(_) | Node::Product(_) | Node::Power(..))
}

/// A compound base whose exponents summed to an integer must be expanded
/// to keep the normal form unique, e.g. `(2*g)^(1/2)` squared.
fn has_integral_compound(p: &Poly) -> bool {
    p.0.keys().any(|m| m.iter().any(|(k, e)| is_compound_integral(k, e)))
}

fn expand_compound(p: &Poly) -> Result<Frac, CanonError> {
    let mut acc = Frac::constant(Rational::zero());
    for (m, c) in &p.0 {
        let mut rest: Mono = Vec::new();
        let mut term = Frac::constant(c.clone());
        for (k, e) in m {
            if is_compound_integral(k, e) {
                let Exponent::Rat(r) = e else { unreachable!() };
                let n = r.to_integer().to_i64().unwrap_or(0);
                term = term.mul(&convert(k)?.powi(n)?)?;
            } else {
                rest.push((k.clone(), e.clone()));
            }
        }
        term = term.mul(&Frac::from_poly(Poly::monomial(rest, Rational::one())))?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

fn power_of_base(base: &Expr, e: Exponent) -> Result<Frac, CanonError> {
    let cb = canonicalize(base)?;
    if let Exponent::Rat(r) = &e {
        if r.is_integer() {
            return convert(&cb)?.powi(r.to_integer().to_i64().unwrap_or(0));
        }
    }
    if cb.is_zero_node() {
        return match &e {
            Exponent::Rat(r) if r.is_positive() => Ok(Frac::constant(Rational::zero())),
            _ => Err(CanonError::DivisionByZero),
        };
    }
    if cb.is_one() {
        return Ok(Frac::constant(Rational::one()));
    }
    if let Node::Call(Func::Exp, z) = cb.node() {
        let scaled = canonicalize(&Expr::mul([e.to_expr(), z.clone()]))?;
        return Ok(Frac::atom(euler(), Exponent::from_canonical(scaled)));
    }
    Ok(Frac::atom(cb, e))
}

fn convert(e: &Expr) -> Result<Frac, CanonError> {
    match e.node() {
        Node::Const(c) => Ok(Frac::constant(c.clone())),
        Node::Symbol(_) => Ok(Frac::atom(e.clone(), Exponent::Rat(Rational::one()))),
        Node::Sum(ts) => {
            let mut acc = Frac::constant(Rational::zero());
            for t in ts {
                acc = acc.add(&convert(t)?)?;
            }
            Ok(acc)
        }
        Node::Product(fs) => {
            let mut acc = Frac::constant(Rational::one());
            for f in fs {
                acc = acc.mul(&convert(f)?)?;
                if acc.num.is_zero() {
                    break;
                }
            }
            Ok(acc)
        }
        Node::Power(b, x) => {
            let cx = canonicalize(x)?;
            power_of_base(b, Exponent::from_canonical(cx))
        }
        Node::Call(Func::Exp, a) => {
            let ca = canonicalize(a)?;
            Ok(Frac::atom(euler(), Exponent::from_canonical(ca)))
        }
        Node::Call(Func::Sqrt, a) => power_of_base(a, Exponent::Rat(super::rat(1, 2))),
        Node::Call(f, a) => {
            let ca = canonicalize(a)?;
            let node = Expr::call(*f, ca);
            if matches!(node.node(), Node::Call(..)) {
                Ok(Frac::atom(node, Exponent::Rat(Rational::one())))
            } else {
                convert(&node)
            }
        }
        Node::UFunc { name, order, arg } => {
            let ca = canonicalize(arg)?;
            Ok(Frac::atom(
                Expr::ufunc(name, *order, ca),
                Exponent::Rat(Rational::one()),
            ))
        }
    }
}

pub(crate) fn to_frac(e: &Expr) -> Result<Frac, CanonError> {
    convert(e)
}

/// Canonical tree of `e`. Equal rational functions of the same atoms give
/// identical trees, and the operation is idempotent.
pub fn canonicalize(e: &Expr) -> Result<Expr, CanonError> {
    if matches!(e.node(), Node::Const(_) | Node::Symbol(_)) {
        return Ok(e.clone());
    }
    if let Some(hit) = CACHE.with(|c| c.borrow().get(e).cloned()) {
        return Ok(hit);
    }
    let out = convert(e)?.to_expr();
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() > CACHE_LIMIT {
            c.clear();
        }
        c.insert(e.clone(), out.clone());
        c.insert(out.clone(), out.clone());
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;

    fn s(n: &str) -> Expr {
        Expr::symbol(n)
    }

    fn c(e: &Expr) -> Expr {
        canonicalize(e).unwrap()
    }

    #[test]
    fn expands_products() {
        let (x, y) = (s("x"), s("y"));
        let lhs = Expr::powi(x.clone() + y.clone(), 2);
        let rhs = Expr::add([
            Expr::powi(x.clone(), 2),
            Expr::mul([Expr::int(2), x.clone(), y.clone()]),
            Expr::powi(y.clone(), 2),
        ]);
        assert_eq!(c(&lhs), c(&rhs));
    }

    #[test]
    fn cancels_common_fraction() {
        let x = s("x");
        let e = (x.clone() + Expr::one()) / (x.clone() + Expr::one());
        assert_eq!(c(&e), Expr::one());
        let e = (x.clone() * x.clone() - Expr::one()) / (x.clone() - Expr::one()) - x - Expr::one();
        let f = to_frac(&e).unwrap();
        assert!(f.num.is_zero());
    }

    #[test]
    fn symbolic_exponents_merge() {
        let (rho, g) = (s("rho"), s("gamma"));
        let e = Expr::mul([
            Expr::pow(rho.clone(), g.clone()),
            Expr::call(Func::Sqrt, rho.clone()),
            Expr::pow(rho.clone(), Expr::rational(1, 2) - g.clone()),
        ]);
        assert_eq!(c(&e), rho);
        let d = Expr::pow(rho.clone(), g.clone() - Expr::one()) * rho.clone()
            - Expr::pow(rho.clone(), g.clone());
        assert_eq!(c(&d), Expr::zero());
    }

    #[test]
    fn exponentials_combine() {
        let t = s("t");
        let k = s("k");
        let e = Expr::exp(k.clone() * t.clone()) * Expr::exp(-(k.clone() * t.clone()));
        assert_eq!(c(&e), Expr::one());
        let e = Expr::powi(Expr::exp(t.clone()), 2) - Expr::exp(Expr::int(2) * t);
        assert_eq!(c(&e), Expr::zero());
    }

    #[test]
    fn compound_roots_square_out() {
        let (g, l) = (s("g"), s("lambda"));
        let w = Expr::sqrt(Expr::mul([Expr::int(2), l.clone(), g.clone()]));
        let e = w.clone() * w - Expr::mul([Expr::int(2), l, g]);
        assert_eq!(c(&e), Expr::zero());
    }

    #[test]
    fn zero_division_is_an_error() {
        let x = s("x");
        let e = Expr::one() / (x.clone() - x.clone());
        assert_eq!(canonicalize(&e), Err(CanonError::DivisionByZero));
        let e = Expr::one() / (Expr::powi(x.clone() + Expr::one(), 2) - Expr::powi(x.clone(), 2) - Expr::int(2) * x - Expr::one());
        assert_eq!(canonicalize(&e), Err(CanonError::DivisionByZero));
    }

    #[test]
    fn idempotent_on_mixed_input() {
        let (x, y) = (s("x"), s("y"));
        let e = Expr::add([
            Expr::sin(x.clone() + y.clone()) / (x.clone() * y.clone() + Expr::int(3)),
            Expr::pow(x.clone(), Expr::rational(3, 2)) * Expr::ln(y.clone()),
            Expr::constant(rat(7, 3)),
        ]);
        let once = c(&e);
        assert_eq!(c(&once), once);
    }
}

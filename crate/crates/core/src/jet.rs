//! Jet-space coordinates, total derivatives and prolongation of point
//! vector fields.
//!
//! Coordinates are plain symbols: independents `t`, `a`; dependents `u`,
//! `p`, `rho`, `s`, `T`; derivatives `u_t`, `rho_ta`, `s_aa`, ... with all
//! `t`s before all `a`s.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{canonicalize, differentiate, Expr};

pub const INDEPENDENTS: [&str; 2] = ["t", "a"];
pub const DEPENDENTS: [&str; 5] = ["u", "p", "rho", "s", "T"];
/// Base coordinates in component order of a [`PointVectorField`].
pub const BASE: [&str; 7] = ["t", "a", "u", "p", "rho", "s", "T"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("total derivative of `{coord}` needs order {needed}, jet has order {max}")]
    OrderOverflow { coord: String, needed: u32, max: u32 },
    #[error("prolongation does not cover `{0}`")]
    MissingCoordinate(String),
    #[error(transparent)]
    Canon(#[from] crate::expr::CanonError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    T,
    A,
}

impl Dir {
    pub fn name(self) -> &'static str {
        match self {
            Dir::T => "t",
            Dir::A => "a",
        }
    }
}

/// A dependent variable differentiated `nt` times in `t` and `na` times in `a`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    pub dep: &'static str,
    pub nt: u32,
    pub na: u32,
}

impl Coord {
    pub fn new(dep: &str, nt: u32, na: u32) -> Option<Coord> {
        let dep = DEPENDENTS.iter().find(|d| **d == dep)?;
        Some(Coord { dep, nt, na })
    }

    pub fn parse(name: &str) -> Option<Coord> {
        let (base, suffix) = match name.split_once('_') {
            Some((b, s)) if !s.is_empty() => (b, s),
            Some(_) => return None,
            None => (name, ""),
        };
        let nt = suffix.chars().take_while(|&c| c == 't').count();
        if !suffix[nt..].chars().all(|c| c == 'a') {
            return None;
        }
        let na = suffix.len() - nt;
        Coord::new(base, nt as u32, na as u32)
    }

    pub fn order(&self) -> u32 {
        self.nt + self.na
    }

    pub fn name(&self) -> String {
        if self.order() == 0 {
            return self.dep.to_string();
        }
        format!(
            "{}_{}{}",
            self.dep,
            "t".repeat(self.nt as usize),
            "a".repeat(self.na as usize)
        )
    }

    pub fn shifted(&self, dir: Dir) -> Coord {
        match dir {
            Dir::T => Coord { nt: self.nt + 1, ..self.clone() },
            Dir::A => Coord { na: self.na + 1, ..self.clone() },
        }
    }

    pub fn symbol(&self) -> Expr {
        Expr::symbol(&self.name())
    }
}

/// Symbol for dependent `dep` with the given derivative counts.
pub fn coord(dep: &str, nt: u32, na: u32) -> Expr {
    Coord::new(dep, nt, na)
        .unwrap_or_else(|| panic!("`{dep}` is not a dependent variable"))
        .symbol()
}

/// All coordinates of order exactly `k` for one dependent.
pub fn coords_of_order(dep: &str, k: u32) -> Vec<Coord> {
    (0..=k).rev().filter_map(|nt| Coord::new(dep, nt, k - nt)).collect()
}

/// Total derivatives on a jet of bounded order.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub max_order: u32,
}

impl Jet {
    pub fn new(max_order: u32) -> Jet {
        Jet { max_order }
    }

    /// `D_dir e = ∂e/∂dir + Σ c_dir ∂e/∂c` over the coordinates in `e`.
    pub fn total_derivative(&self, e: &Expr, dir: Dir) -> Result<Expr, JetError> {
        let mut terms = vec![differentiate(e, dir.name())];
        for name in e.free_symbols() {
            let Some(c) = Coord::parse(&name) else {
                continue;
            };
            let next = c.shifted(dir);
            if next.order() > self.max_order {
                return Err(JetError::OrderOverflow {
                    coord: name,
                    needed: next.order(),
                    max: self.max_order,
                });
            }
            let d = differentiate(e, &name);
            if !d.is_zero_node() {
                terms.push(Expr::mul([next.symbol(), d]));
            }
        }
        Ok(Expr::add(terms))
    }

    pub fn d_t(&self, e: &Expr) -> Result<Expr, JetError> {
        self.total_derivative(e, Dir::T)
    }

    pub fn d_a(&self, e: &Expr) -> Result<Expr, JetError> {
        self.total_derivative(e, Dir::A)
    }

    /// Repeated total derivative `D_t^nt D_a^na e`.
    pub fn total_derivative_n(&self, e: &Expr, nt: u32, na: u32) -> Result<Expr, JetError> {
        let mut out = e.clone();
        for _ in 0..na {
            out = self.d_a(&out)?;
        }
        for _ in 0..nt {
            out = self.d_t(&out)?;
        }
        Ok(out)
    }
}

/// Vector field on the base space `(t, a, u, p, rho, s, T)` with
/// coefficients depending only on base coordinates and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct PointVectorField {
    pub components: [Expr; 7],
}

fn base_index(name: &str) -> Option<usize> {
    BASE.iter().position(|b| *b == name)
}

impl PointVectorField {
    pub fn zero() -> PointVectorField {
        PointVectorField {
            components: std::array::from_fn(|_| Expr::zero()),
        }
    }

    /// Field from `(coordinate, coefficient)` pairs; repeated coordinates add.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Expr)>) -> PointVectorField {
        let mut out = PointVectorField::zero();
        for (name, c) in pairs {
            let i = base_index(name).unwrap_or_else(|| panic!("`{name}` is not a base coordinate"));
            out.components[i] = Expr::add([out.components[i].clone(), c]);
        }
        out
    }

    /// The coordinate field `∂/∂name`.
    pub fn partial(name: &str) -> PointVectorField {
        PointVectorField::from_pairs([(name, Expr::one())])
    }

    pub fn component(&self, name: &str) -> &Expr {
        &self.components[base_index(name).expect("base coordinate")]
    }

    pub fn xi(&self, dir: Dir) -> &Expr {
        self.component(dir.name())
    }

    pub fn add(&self, other: &PointVectorField) -> PointVectorField {
        PointVectorField {
            components: std::array::from_fn(|i| {
                Expr::add([self.components[i].clone(), other.components[i].clone()])
            }),
        }
    }

    pub fn scale(&self, k: &Expr) -> PointVectorField {
        PointVectorField {
            components: std::array::from_fn(|i| Expr::mul([k.clone(), self.components[i].clone()])),
        }
    }

    pub fn canonical(&self) -> Result<PointVectorField, JetError> {
        let mut comps = Vec::with_capacity(7);
        for c in &self.components {
            comps.push(canonicalize(c)?);
        }
        Ok(PointVectorField {
            components: comps.try_into().expect("seven components"),
        })
    }

    /// `X(f) = Σ X^k ∂f/∂x^k` over base coordinates.
    pub fn apply_base(&self, f: &Expr) -> Expr {
        Expr::add(
            BASE.iter()
                .zip(&self.components)
                .filter(|(_, c)| !c.is_zero_node())
                .map(|(name, c)| Expr::mul([c.clone(), differentiate(f, name)])),
        )
    }

    /// Lie bracket `[X, Y]^i = X(Y^i) - Y(X^i)`, canonicalized.
    pub fn bracket(&self, other: &PointVectorField) -> Result<PointVectorField, JetError> {
        let mut comps = Vec::with_capacity(7);
        for i in 0..7 {
            let c = Expr::sub(
                &self.apply_base(&other.components[i]),
                &other.apply_base(&self.components[i]),
            );
            comps.push(canonicalize(&c)?);
        }
        Ok(PointVectorField {
            components: comps.try_into().expect("seven components"),
        })
    }

    pub fn is_syntactically_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero_node())
    }
}

impl fmt::Display for PointVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, c) in BASE.iter().zip(&self.components) {
            if c.is_zero_node() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "d_{name}")?;
            } else {
                write!(f, "({c})*d_{name}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Prolongation of a point field: coefficients of every jet coordinate up
/// to the given order.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub field: PointVectorField,
    pub order: u32,
    coeffs: BTreeMap<String, Expr>,
}

impl Prolongation {
    pub fn coefficient(&self, name: &str) -> Option<&Expr> {
        if let Some(i) = base_index(name) {
            return Some(&self.field.components[i]);
        }
        self.coeffs.get(name)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&String, &Expr)> {
        self.coeffs.iter()
    }

    /// `pr X (e)`; fails if `e` involves coordinates above the order.
    pub fn apply(&self, e: &Expr) -> Result<Expr, JetError> {
        let mut terms = Vec::new();
        for name in e.free_symbols() {
            let is_coordinate = base_index(&name).is_some() || Coord::parse(&name).is_some();
            if !is_coordinate {
                continue;
            }
            let c = self
                .coefficient(&name)
                .ok_or_else(|| JetError::MissingCoordinate(name.clone()))?;
            if c.is_zero_node() {
                continue;
            }
            terms.push(Expr::mul([c.clone(), differentiate(e, &name)]));
        }
        Ok(Expr::add(terms))
    }
}

/// Prolong `X` to order `order` by `φ_{J,i} = D_i φ_J - Σ_j u_{J,j} D_i ξ^j`.
pub fn prolong(x: &PointVectorField, order: u32) -> Result<Prolongation, JetError> {
    let jet = Jet::new(order.max(1));
    let dxi: Vec<[Expr; 2]> = [Dir::T, Dir::A]
        .iter()
        .map(|&j| {
            Ok([
                canonicalize(&jet.d_t(x.xi(j))?)?,
                canonicalize(&jet.d_a(x.xi(j))?)?,
            ])
        })
        .collect::<Result<_, JetError>>()?;
    let mut coeffs: BTreeMap<String, Expr> = BTreeMap::new();
    for dep in DEPENDENTS {
        let mut level: BTreeMap<(u32, u32), Expr> = BTreeMap::new();
        level.insert((0, 0), x.component(dep).clone());
        for k in 1..=order {
            for c in coords_of_order(dep, k) {
                let (from, dir) = if c.nt > 0 {
                    ((c.nt - 1, c.na), Dir::T)
                } else {
                    ((0, c.na - 1), Dir::A)
                };
                let prev = &level[&from];
                let base = Coord::new(dep, from.0, from.1).unwrap();
                let i = if dir == Dir::T { 0 } else { 1 };
                let mut terms = vec![jet.total_derivative(prev, dir)?];
                for (j, jdir) in [Dir::T, Dir::A].iter().enumerate() {
                    let d = &dxi[j][i];
                    if !d.is_zero_node() {
                        terms.push(Expr::mul([Expr::int(-1), base.shifted(*jdir).symbol(), d.clone()]));
                    }
                }
                let phi = canonicalize(&Expr::add(terms))?;
                level.insert((c.nt, c.na), phi.clone());
                coeffs.insert(c.name(), phi);
            }
        }
    }
    Ok(Prolongation {
        field: x.clone(),
        order,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Context};

    #[test]
    fn coordinate_names_round_trip() {
        for name in ["u", "u_t", "rho_ta", "s_aa", "T_ttt"] {
            assert_eq!(Coord::parse(name).unwrap().name(), name);
        }
        assert!(Coord::parse("u_at").is_none());
        assert!(Coord::parse("q_t").is_none());
    }

    #[test]
    fn total_derivative_chain_rule() {
        let ctx = Context::new();
        let jet = Jet::new(2);
        let e = parse("u*rho_a + t*a", &ctx).unwrap();
        let d = jet.d_a(&e).unwrap();
        let want = parse("u_a*rho_a + u*rho_aa + t", &ctx).unwrap();
        assert_eq!(canonicalize(&(d - want)).unwrap(), Expr::zero());
        assert!(matches!(
            jet.d_t(&parse("rho_ta", &ctx).unwrap()),
            Err(JetError::OrderOverflow { .. })
        ));
    }

    #[test]
    fn galilean_boost_prolongs() {
        // t d_a + d_u shifts u_t by -u_a and leaves u_a alone
        let x = PointVectorField::from_pairs([("a", Expr::symbol("t")), ("u", Expr::one())]);
        let pr = prolong(&x, 2).unwrap();
        assert_eq!(pr.coefficient("u_t").unwrap(), &coord("u", 0, 1).neg());
        assert_eq!(pr.coefficient("u_a").unwrap(), &Expr::zero());
        assert_eq!(pr.coefficient("rho_tt").unwrap(), &Expr::mul([Expr::int(-2), coord("rho", 1, 1)]));
    }

    #[test]
    fn scaling_prolongs() {
        let t = Expr::symbol("t");
        let x = PointVectorField::from_pairs([("t", t), ("rho", coord("rho", 0, 0).neg())]);
        let pr = prolong(&x, 1).unwrap();
        assert_eq!(
            pr.coefficient("rho_t").unwrap(),
            &Expr::mul([Expr::int(-2), coord("rho", 1, 0)])
        );
    }

    #[test]
    fn bracket_of_translation_and_scaling() {
        let x1 = PointVectorField::partial("t");
        let x6 = PointVectorField::from_pairs([("t", Expr::symbol("t")), ("a", Expr::symbol("a"))]);
        assert_eq!(x1.bracket(&x6).unwrap(), x1);
    }
}

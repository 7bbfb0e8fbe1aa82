//! The Navier–Stokes system on a curve for each viscosity model and
//! profile shape, its solved form, and the point-symmetry test.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{canonicalize, differentiate, substitute, Context, Domain, Expr, Verdict, ZeroTester};
use crate::jet::{coord, prolong, Coord, Jet, JetError, PointVectorField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("`{0}` does not enter its equation linearly")]
    NotIsolatable(String),
    #[error("unknown case identifier `{0}`")]
    UnknownCase(String),
}

impl From<crate::expr::CanonError> for SystemError {
    fn from(e: crate::expr::CanonError) -> Self {
        SystemError::Jet(JetError::Canon(e))
    }
}

/// Viscosity as a function of temperature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zeta {
    /// unspecified `zeta(T)`
    Any,
    /// `alpha*T`
    Linear,
    /// `alpha*T^beta`, `beta != 1`
    Power,
}

/// Sign regime of `lambda` for the quadratic profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSign {
    Negative,
    Positive,
}

/// Height profile `h(a)` of the curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Any,
    Const,
    /// `lambda*a`
    Linear,
    /// `lambda*a^2`
    Quadratic(LambdaSign),
    /// `lambda1*a^lambda2`, `lambda2 != 0, 1, 2`
    Power,
    /// `lambda1*exp(lambda2*a)`
    Exp,
    /// `ln(a)`
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Case {
    pub zeta: Zeta,
    pub h: Profile,
}

impl Zeta {
    pub fn id(self) -> &'static str {
        match self {
            Zeta::Any => "any",
            Zeta::Linear => "linear",
            Zeta::Power => "power",
        }
    }

    pub fn from_id(s: &str) -> Result<Zeta, SystemError> {
        Ok(match s {
            "any" => Zeta::Any,
            "linear" => Zeta::Linear,
            "power" => Zeta::Power,
            _ => return Err(SystemError::UnknownCase(s.to_string())),
        })
    }
}

impl Profile {
    pub fn id(self) -> &'static str {
        match self {
            Profile::Any => "any",
            Profile::Const => "const",
            Profile::Linear => "linear",
            Profile::Quadratic(LambdaSign::Negative) => "quadratic-neg",
            Profile::Quadratic(LambdaSign::Positive) => "quadratic-pos",
            Profile::Power => "power",
            Profile::Exp => "exp",
            Profile::Log => "log",
        }
    }

    /// Accepts the ids above; plain `quadratic` means `lambda < 0`.
    pub fn from_id(s: &str) -> Result<Profile, SystemError> {
        Ok(match s {
            "any" => Profile::Any,
            "const" => Profile::Const,
            "linear" => Profile::Linear,
            "quadratic" | "quadratic-neg" => Profile::Quadratic(LambdaSign::Negative),
            "quadratic-pos" => Profile::Quadratic(LambdaSign::Positive),
            "power" => Profile::Power,
            "exp" => Profile::Exp,
            "log" => Profile::Log,
            _ => return Err(SystemError::UnknownCase(s.to_string())),
        })
    }
}

impl Case {
    pub fn new(zeta: Zeta, h: Profile) -> Case {
        Case { zeta, h }
    }

    pub fn id(&self) -> String {
        format!("zeta={},h={}", self.zeta.id(), self.h.id())
    }

    pub fn parse(zeta: &str, h: &str) -> Result<Case, SystemError> {
        Ok(Case::new(Zeta::from_id(zeta)?, Profile::from_id(h)?))
    }

    /// Viscosity as an expression in `T`.
    pub fn zeta_expr(&self) -> Expr {
        let t = Expr::symbol("T");
        match self.zeta {
            Zeta::Any => Expr::ufunc("zeta", 0, t),
            Zeta::Linear => Expr::symbol("alpha") * t,
            Zeta::Power => Expr::symbol("alpha") * Expr::pow(t, Expr::symbol("beta")),
        }
    }

    /// `h(a)`.
    pub fn h_expr(&self) -> Expr {
        let a = Expr::symbol("a");
        let l = || Expr::symbol("lambda");
        let (l1, l2) = (Expr::symbol("lambda1"), Expr::symbol("lambda2"));
        match self.h {
            Profile::Any => Expr::ufunc("h", 0, a),
            Profile::Const => Expr::symbol("h0"),
            Profile::Linear => l() * a,
            Profile::Quadratic(_) => l() * Expr::powi(a, 2),
            Profile::Power => l1 * Expr::pow(a, l2),
            Profile::Exp => l1 * Expr::exp(l2 * a),
            Profile::Log => Expr::ln(a),
        }
    }

    pub fn h_prime(&self) -> Expr {
        match self.h {
            Profile::Any => Expr::ufunc("h", 1, Expr::symbol("a")),
            _ => differentiate(&self.h_expr(), "a"),
        }
    }

    /// Parameters, unspecified functions and sampling domains for this case.
    pub fn context(&self) -> Context {
        let mut ctx = Context::new()
            .with_param("g")
            .with_param("k")
            .assume("g", Domain::Negative)
            .assume("k", Domain::Positive);
        match self.zeta {
            Zeta::Any => ctx.add_func("zeta"),
            Zeta::Linear => {
                ctx.add_param("alpha");
                ctx.set_assumption("alpha", Domain::Positive);
            }
            Zeta::Power => {
                ctx.add_param("alpha");
                ctx.add_param("beta");
                ctx.set_assumption("alpha", Domain::Positive);
                ctx.set_assumption("beta", Domain::Interval { lo: 1.25, hi: 2.5 });
            }
        }
        match self.h {
            Profile::Any => ctx.add_func("h"),
            Profile::Const => ctx.add_param("h0"),
            Profile::Linear => ctx.add_param("lambda"),
            Profile::Quadratic(sign) => {
                ctx.add_param("lambda");
                let d = match sign {
                    LambdaSign::Negative => Domain::Negative,
                    LambdaSign::Positive => Domain::Positive,
                };
                ctx.set_assumption("lambda", d);
            }
            Profile::Power | Profile::Exp => {
                ctx.add_param("lambda1");
                ctx.add_param("lambda2");
                ctx.set_assumption("lambda2", Domain::Interval { lo: 2.25, hi: 3.5 });
                if self.h == Profile::Power {
                    ctx.set_assumption("a", Domain::Positive);
                }
            }
            Profile::Log => ctx.set_assumption("a", Domain::Positive),
        }
        ctx
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// Sign of the conduction term in the energy equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatSign {
    Plus,
    Minus,
}

/// How the viscous term of the momentum equation is written.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViscousForm {
    /// `D_a(zeta(T) u_a)`
    Divergence,
    /// `zeta(T) u_aa`
    NonDivergence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub heat: HeatSign,
    pub viscous: ViscousForm,
}

impl Default for Variant {
    fn default() -> Self {
        Variant {
            heat: HeatSign::Plus,
            viscous: ViscousForm::Divergence,
        }
    }
}

impl Variant {
    pub fn all() -> [Variant; 4] {
        [
            Variant::default(),
            Variant { heat: HeatSign::Minus, viscous: ViscousForm::Divergence },
            Variant { heat: HeatSign::Plus, viscous: ViscousForm::NonDivergence },
            Variant { heat: HeatSign::Minus, viscous: ViscousForm::NonDivergence },
        ]
    }

    pub fn id(&self) -> String {
        let heat = match self.heat {
            HeatSign::Plus => "+kT_aa",
            HeatSign::Minus => "-kT_aa",
        };
        let visc = match self.viscous {
            ViscousForm::Divergence => "divergence",
            ViscousForm::NonDivergence => "non-divergence",
        };
        format!("{heat},{visc}")
    }
}

/// Momentum, continuity and energy residuals.
pub fn build_system(case: &Case, variant: Variant) -> [Expr; 3] {
    let s = |n: &str| Expr::symbol(n);
    let (u, rho, t) = (s("u"), s("rho"), s("T"));
    let (u_a, u_t) = (coord("u", 0, 1), coord("u", 1, 0));
    let zeta = case.zeta_expr();
    let jet = Jet::new(2);
    let viscous = match variant.viscous {
        ViscousForm::Divergence => jet
            .d_a(&Expr::mul([zeta.clone(), u_a.clone()]))
            .expect("order two suffices"),
        ViscousForm::NonDivergence => Expr::mul([zeta.clone(), coord("u", 0, 2)]),
    };
    let f1 = Expr::add([
        Expr::mul([rho.clone(), Expr::add([u_t, u.clone() * u_a.clone()])]),
        coord("p", 0, 1),
        viscous.neg(),
        Expr::mul([Expr::int(-1), s("g"), case.h_prime(), rho.clone()]),
    ]);
    let f2 = Expr::add([
        coord("rho", 1, 0),
        u.clone() * coord("rho", 0, 1),
        rho.clone() * u_a.clone(),
    ]);
    let heat_sign = match variant.heat {
        HeatSign::Plus => 1,
        HeatSign::Minus => -1,
    };
    let f3 = Expr::add([
        Expr::mul([rho, t, Expr::add([coord("s", 1, 0), u * coord("s", 0, 1)])]),
        Expr::mul([zeta, Expr::powi(u_a, 2)]).neg(),
        Expr::mul([Expr::int(heat_sign), s("k"), coord("T", 0, 2)]),
    ]);
    [f1, f2, f3]
}

/// Which t-derivatives are eliminated by [`SolvedSystem::restrict`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Restriction {
    /// `u`, `rho` and `s`.
    Full,
    /// `rho` only, through the continuity equation.
    Continuity,
}

/// The system with `u_t`, `rho_t`, `s_t` isolated.
#[derive(Clone, Debug)]
pub struct SolvedSystem {
    pub residuals: [Expr; 3],
    pub case: Case,
    pub variant: Variant,
    leading: BTreeMap<&'static str, Expr>,
}

const LEADING: [(&str, usize); 3] = [("u", 0), ("rho", 1), ("s", 2)];

pub(crate) fn isolate(f: &Expr, lead: &str) -> Result<Expr, SystemError> {
    let c = differentiate(f, lead);
    if c.contains_symbol(lead) {
        return Err(SystemError::NotIsolatable(lead.to_string()));
    }
    let mut zero = BTreeMap::new();
    zero.insert(lead.to_string(), Expr::zero());
    let rest = substitute(f, &zero);
    Ok(canonicalize(&rest.neg().div(&c))?)
}

pub fn solve_for_leading(case: &Case, variant: Variant) -> Result<SolvedSystem, SystemError> {
    let residuals = build_system(case, variant);
    let mut leading = BTreeMap::new();
    for (dep, i) in LEADING {
        let name = Coord::new(dep, 1, 0).unwrap().name();
        leading.insert(dep, isolate(&residuals[i], &name)?);
    }
    Ok(SolvedSystem {
        residuals,
        case: *case,
        variant,
        leading,
    })
}

impl SolvedSystem {
    pub fn solved(&self, dep: &str) -> Option<&Expr> {
        self.leading.get(dep)
    }

    pub fn restrictor(&self, mode: Restriction) -> Restrictor<'_> {
        Restrictor {
            sys: self,
            mode,
            cache: HashMap::new(),
        }
    }

    /// Eliminate every t-derivative of `u`, `rho`, `s`.
    pub fn restrict(&self, e: &Expr) -> Result<Expr, SystemError> {
        self.restrictor(Restriction::Full).restrict(e)
    }
}

/// Substitutes solved t-derivatives, caching the replacement of each
/// coordinate.
pub struct Restrictor<'s> {
    sys: &'s SolvedSystem,
    mode: Restriction,
    cache: HashMap<Coord, Expr>,
}

impl Restrictor<'_> {
    fn eliminated(&self, c: &Coord) -> bool {
        c.nt > 0
            && match self.mode {
                Restriction::Full => matches!(c.dep, "u" | "rho" | "s"),
                Restriction::Continuity => c.dep == "rho",
            }
    }

    fn replacement(&mut self, c: &Coord) -> Result<Expr, SystemError> {
        if let Some(r) = self.cache.get(c) {
            return Ok(r.clone());
        }
        // cover whatever order the derivatives of solved forms reach
        let jet = Jet::new(c.order() + 4);
        let r = if c.nt == 1 && c.na == 0 {
            self.sys.leading[c.dep].clone()
        } else if c.na > 0 {
            let prev = self.replacement(&Coord { na: c.na - 1, ..c.clone() })?;
            let d = jet.d_a(&prev)?;
            self.restrict(&d)?
        } else {
            let prev = self.replacement(&Coord { nt: c.nt - 1, ..c.clone() })?;
            let d = jet.d_t(&prev)?;
            self.restrict(&d)?
        };
        let r = canonicalize(&r)?;
        self.cache.insert(c.clone(), r.clone());
        Ok(r)
    }

    pub fn restrict(&mut self, e: &Expr) -> Result<Expr, SystemError> {
        let mut bindings = BTreeMap::new();
        for name in e.free_symbols() {
            if let Some(c) = Coord::parse(&name) {
                if self.eliminated(&c) {
                    let r = self.replacement(&c)?;
                    bindings.insert(name, r);
                }
            }
        }
        if bindings.is_empty() {
            return Ok(e.clone());
        }
        Ok(substitute(e, &bindings))
    }
}

/// Outcome of a symmetry test with the verdict of each equation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryVerdict {
    pub verdict: Verdict,
    pub equations: [Verdict; 3],
}

/// Test `pr^(2) X (F_i) = 0` on the solution manifold for i = 1, 2, 3.
pub fn is_symmetry_in(
    x: &PointVectorField,
    sys: &SolvedSystem,
    ctx: &Context,
    tester: &ZeroTester,
) -> Result<SymmetryVerdict, SystemError> {
    let pr = prolong(x, 2)?;
    let mut restrictor = sys.restrictor(Restriction::Full);
    let mut equations = Vec::with_capacity(3);
    for f in &sys.residuals {
        let applied = pr.apply(f)?;
        let restricted = restrictor.restrict(&applied)?;
        equations.push(tester.is_zero(&restricted, ctx));
    }
    let verdict = equations
        .iter()
        .cloned()
        .fold(Verdict::ProvenZero, Verdict::worst);
    Ok(SymmetryVerdict {
        verdict,
        equations: equations.try_into().expect("three equations"),
    })
}

/// Symmetry test for the default form of the system.
pub fn is_symmetry(x: &PointVectorField, case: &Case) -> Result<SymmetryVerdict, SystemError> {
    let sys = solve_for_leading(case, Variant::default())?;
    is_symmetry_in(x, &sys, &case.context(), &ZeroTester::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{is_zero, parse};

    fn any_any() -> Case {
        Case::new(Zeta::Any, Profile::Any)
    }

    #[test]
    fn solved_forms_satisfy_the_system() {
        let case = Case::new(Zeta::Power, Profile::Exp);
        let sys = solve_for_leading(&case, Variant::default()).unwrap();
        for f in &sys.residuals {
            let r = sys.restrict(f).unwrap();
            assert_eq!(canonicalize(&r).unwrap(), Expr::zero(), "{f}");
        }
    }

    #[test]
    fn continuity_isolates_linearly() {
        let ctx = Context::new();
        let sys = solve_for_leading(&any_any(), Variant::default()).unwrap();
        let want = parse("-u*rho_a - rho*u_a", &ctx).unwrap();
        assert_eq!(
            canonicalize(&(sys.solved("rho").unwrap().clone() - want)).unwrap(),
            Expr::zero()
        );
    }

    #[test]
    fn restriction_leaves_no_eliminated_coordinates() {
        let sys = solve_for_leading(&any_any(), Variant::default()).unwrap();
        let e = parse("u_tt + rho_ta*s_tt + u_taa", &Context::new()).unwrap();
        let r = sys.restrict(&e).unwrap();
        for name in r.free_symbols() {
            if let Some(c) = Coord::parse(&name) {
                assert!(!(c.nt > 0 && matches!(c.dep, "u" | "rho" | "s")), "{name} left");
            }
        }
        let again = sys.restrict(&r).unwrap();
        assert!(is_zero(&(again - r), &any_any().context()).is_zero());
    }

    #[test]
    fn viscous_term_expands() {
        let case = Case::new(Zeta::Power, Profile::Exp);
        let [f1, ..] = build_system(&case, Variant::default());
        let ctx = case.context();
        let want = parse(
            "rho*(u_t + u*u_a) + p_a - alpha*beta*T^(beta - 1)*T_a*u_a - alpha*T^beta*u_aa - g*lambda1*lambda2*exp(lambda2*a)*rho",
            &ctx,
        )
        .unwrap();
        assert_eq!(is_zero(&(f1 - want), &ctx), Verdict::ProvenZero);
    }

    #[test]
    fn translations_are_symmetries() {
        for name in ["t", "p", "s"] {
            let v = is_symmetry(&PointVectorField::partial(name), &any_any()).unwrap();
            assert!(v.verdict.is_zero(), "d_{name}: {v:?}");
        }
    }

    #[test]
    fn stretching_a_is_not_a_symmetry() {
        let x = PointVectorField::from_pairs([("a", Expr::symbol("a"))]);
        let v = is_symmetry(&x, &any_any()).unwrap();
        assert!(v.equations[0].is_refuted(), "{v:?}");
    }
}

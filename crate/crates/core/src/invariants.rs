//! First-order differential invariants of the symmetry algebras and their
//! invariant derivatives.
//!
//! A kinematic invariant is annihilated by the prolonged kernel of the
//! thermodynamic projection; a Navier–Stokes invariant is annihilated in
//! addition by the one-dimensional symmetry `Z` of a chosen state. All
//! checks work on the continuity-restricted jet, where `rho_t` and its
//! derivatives are eliminated.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cases::{self, field};
use crate::expr::{
    differentiate, eval, parse, substitute, Context, Expr, FuncTable, ParseError, TestFunction, Verdict, ZeroTester,
};
use crate::jet::{prolong, Coord, Jet, JetError, PointVectorField};
use crate::lie::{self, LieAlgebraSpan, LieError};
use crate::ns_system::{
    build_system, isolate, solve_for_leading, Case, Profile, Restriction, SolvedSystem, SystemError,
    Variant, Zeta,
};

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("invariant `{source_text}`: {error}")]
    Parse { source_text: String, error: ParseError },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("no invariant table for {0}")]
    NoTable(Case),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Kinematic,
    NavierStokes,
}

/// `a D_t + b D_a`.
#[derive(Clone, Debug)]
pub struct InvariantDerivative {
    pub a: Expr,
    pub b: Expr,
}

#[derive(Clone, Copy)]
struct Table {
    id: &'static str,
    kind: Kind,
    applies: fn(&Case) -> bool,
    generator: &'static [(&'static str, &'static str)],
    invariants: &'static [&'static str],
    derivatives: [(&'static str, &'static str); 2],
    errata: &'static [Erratum],
}

/// A printed invariant that is not annihilated, with the nearest expression
/// that is.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Erratum {
    pub index: usize,
    pub printed: &'static str,
    pub corrected: &'static str,
    pub note: &'static str,
}

const DT: (&str, &str) = ("1", "0");
const DA: (&str, &str) = ("0", "1");
const MATERIAL: (&str, &str) = ("1", "u");

fn galilean(h: Profile) -> bool {
    matches!(h, Profile::Const | Profile::Linear)
}

const TABLES: &[Table] = &[
    Table {
        id: "kinematic-general",
        kind: Kind::Kinematic,
        applies: |c| matches!(c.h, Profile::Any | Profile::Power | Profile::Exp | Profile::Log),
        generator: &[],
        invariants: &["a", "u", "rho", "s", "u_t", "u_a", "rho_a", "s_t", "s_a"],
        derivatives: [DT, DA],
        errata: &[],
    },
    Table {
        id: "kinematic-galilean",
        kind: Kind::Kinematic,
        applies: |c| galilean(c.h),
        generator: &[],
        invariants: &["rho", "s", "u_a", "u_t + u*u_a", "rho_a", "s_a", "s_t + u*s_a"],
        derivatives: [MATERIAL, DA],
        errata: &[],
    },
    Table {
        id: "kinematic-quadratic",
        kind: Kind::Kinematic,
        applies: |c| matches!(c.h, Profile::Quadratic(_)),
        generator: &[],
        invariants: &[
            "rho",
            "s",
            "u_a",
            "u_t + u*u_a - 2*lambda*g*a",
            "rho_a",
            "s_a",
            "s_t + u*s_a",
        ],
        derivatives: [MATERIAL, DA],
        errata: &[],
    },
    Table {
        id: "ns-any-const",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Any && c.h == Profile::Const,
        generator: &[
            ("t", "xi3*t"),
            ("a", "xi3*a"),
            ("p", "xi1 - xi3*p"),
            ("rho", "-xi3*rho"),
            ("s", "xi2"),
        ],
        invariants: &[
            "s + xi2/xi3*ln(rho)",
            "u_a/rho",
            "(u_t + u*u_a)/rho",
            "rho_a/rho^2",
            "s_a/rho",
            "(s_t + u*s_a)/rho",
        ],
        derivatives: [("1/rho", "u/rho"), ("0", "1/rho")],
        errata: &[],
    },
    Table {
        id: "ns-any-linear",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Any && c.h == Profile::Linear,
        generator: &[
            ("t", "xi3*t"),
            ("a", "xi3*(lambda*g*t^2/2 + a)"),
            ("u", "xi3*lambda*g*t"),
            ("p", "xi1 - xi3*p"),
            ("rho", "-xi3*rho"),
            ("s", "xi2"),
        ],
        invariants: &[
            "s + xi2/xi3*ln(rho)",
            "u_a/rho",
            "(u_t + u*u_a - lambda*g)/rho",
            "rho_a/rho^2",
            "s_a/rho",
            "(s_t + u*s_a)/rho",
        ],
        derivatives: [("1/rho", "u/rho"), ("0", "1/rho")],
        errata: &[],
    },
    Table {
        id: "ns-any-log",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Any && c.h == Profile::Log,
        generator: LOG_GENERATOR,
        invariants: LOG_INVARIANTS,
        derivatives: [("1/rho", "0"), ("0", "1/rho")],
        errata: &[],
    },
    Table {
        id: "ns-linear-any",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Linear && c.h == Profile::Any,
        generator: &[
            ("p", "xi1 + xi3*p"),
            ("rho", "xi3*rho"),
            ("s", "xi2 - xi3*s"),
            ("T", "xi3*T"),
        ],
        invariants: &["a", "u", "(s - xi2/xi3)*rho", "u_t", "u_a", "rho_a/rho", "rho*s_t", "rho*s_a"],
        derivatives: [DT, DA],
        errata: &[],
    },
    Table {
        id: "ns-linear-const",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Linear && c.h == Profile::Const,
        generator: &[
            ("t", "xi4*t"),
            ("a", "xi4*a"),
            ("p", "xi1 + (xi3 - xi4)*p"),
            ("rho", "(xi3 - xi4)*rho"),
            ("s", "xi2 - xi3*s"),
            ("T", "xi3*T"),
        ],
        invariants: &[
            "rho/u_a*(s - xi2/xi3)",
            "u_a*rho^(xi4/(xi3 - xi4))",
            "(u_t + u*u_a)/u_a",
            "rho_a/(rho*u_a)",
            "rho*s_a/u_a^2",
            "rho*(s_t + u*s_a)/u_a^2",
        ],
        derivatives: [
            ("rho^(xi4/(xi3 - xi4))", "u*rho^(xi4/(xi3 - xi4))"),
            ("0", "rho^(xi4/(xi3 - xi4))"),
        ],
        errata: &[],
    },
    Table {
        id: "ns-linear-linear",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Linear && c.h == Profile::Linear,
        generator: &[
            ("t", "xi4*t"),
            ("a", "xi4*(lambda*g*t^2/2 + a)"),
            ("u", "xi4*lambda*g*t"),
            ("p", "xi1 + (xi3 - xi4)*p"),
            ("rho", "(xi3 - xi4)*rho"),
            ("s", "xi2 - xi3*s"),
            ("T", "xi3*T"),
        ],
        invariants: &[
            "rho/u_a*(s - xi2/xi3)",
            "u_a*rho^(xi4/(xi3 - xi4))",
            "(u_t + u*u_a - lambda*g)/u_a",
            "rho_a/(rho*u_a)",
            "rho*s_a/u_a^2",
            "rho*(s_t + u*s_a)/u_a^2",
        ],
        derivatives: [
            ("rho^(xi4/(xi3 - xi4))", "u*rho^(xi4/(xi3 - xi4))"),
            ("0", "rho^(xi4/(xi3 - xi4))"),
        ],
        errata: &[Erratum {
            index: 2,
            printed: "(u_t + u*u_a - lambda*g)/rho",
            corrected: "(u_t + u*u_a - lambda*g)/u_a",
            note: "rho scales with xi3 - xi4 while the numerator scales with -xi4; u_a balances it as in the constant profile",
        }],
    },
    Table {
        id: "ns-linear-quadratic",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Linear && matches!(c.h, Profile::Quadratic(_)),
        generator: &[
            ("p", "xi1 + xi3*p"),
            ("rho", "xi3*rho"),
            ("s", "xi2 - xi3*s"),
            ("T", "xi3*T"),
        ],
        invariants: &[
            "(s - xi2/xi3)*rho",
            "u_t + u*u_a - 2*lambda*g*a",
            "u_a",
            "rho_a/rho",
            "rho*(s_t + u*s_a)",
            "rho*s_a",
        ],
        derivatives: [MATERIAL, DA],
        errata: &[],
    },
    Table {
        id: "ns-linear-log",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Linear && c.h == Profile::Log,
        generator: &[
            ("t", "xi4*t"),
            ("a", "xi4*a"),
            ("p", "xi1 + (xi3 - xi4)*p"),
            ("rho", "(xi3 - xi4)*rho"),
            ("s", "xi2 - xi3*s"),
            ("T", "xi3*T"),
        ],
        invariants: &[
            "u",
            "rho*a^(1 - xi3/xi4)",
            "a*rho*(s - xi2/xi3)",
            "a*u_t",
            "a*u_a",
            "a*rho_a/rho",
            "a^2*rho*s_t",
            "a^2*rho*s_a",
        ],
        derivatives: [("rho^(xi4/(xi3 - xi4))", "0"), ("0", "rho^(xi4/(xi3 - xi4))")],
        errata: &[],
    },
    Table {
        id: "ns-power-const",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Power && c.h == Profile::Const,
        generator: &[
            ("t", "xi3*t"),
            ("a", "(xi3 + xi4)*a"),
            ("u", "xi4*u"),
            ("p", "xi1 - xi3*p - xi4*2*beta/(beta - 1)*p"),
            ("rho", "-xi3*rho - xi4*(4*beta - 2)/(beta - 1)*rho"),
            ("s", "xi2 + xi4*2*beta/(beta - 1)*s"),
            ("T", "-xi4*2/(beta - 1)*T"),
        ],
        invariants: &[
            "rho^3*u_a/rho_a^2*(s + xi2*(beta - 1)/(2*xi4*beta))",
            "u_a*rho^(-xi3*(beta - 1)/(xi3*(beta - 1) + 2*xi4*(2*beta - 1)))",
            "(u_t + u*u_a)*rho^(-(xi3 - xi4)*(beta - 1)/(xi3*(beta - 1) + 2*xi4*(2*beta - 1)))",
            "rho_a*(u_t + u*u_a)/(rho*u_a^2)",
            "rho^4*u_a*s_a/rho_a^3",
            "rho^3*(s_t + u*s_a)/rho_a^2",
        ],
        derivatives: [
            (
                "rho^(-xi3*(beta - 1)/(xi3*(beta - 1) + 2*xi4*(2*beta - 1)))",
                "u*rho^(-xi3*(beta - 1)/(xi3*(beta - 1) + 2*xi4*(2*beta - 1)))",
            ),
            ("0", "rho^(-(xi3 + xi4)*(beta - 1)/(xi3*(beta - 1) + 2*xi4*(2*beta - 1)))"),
        ],
        errata: &[Erratum {
            index: 2,
            printed: "(u_t + u*u_a)*rho^(-(xi3 + xi4)*(beta - 1)/(xi3*(beta - 1) + 2*xi4*(2*beta - 1)))",
            corrected: "(u_t + u*u_a)*rho^(-(xi3 - xi4)*(beta - 1)/(xi3*(beta - 1) + 2*xi4*(2*beta - 1)))",
            note: "the acceleration has weight xi4 - xi3, so the exponent needs xi3 - xi4",
        }],
    },
    Table {
        id: "ns-power-linear",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Power && c.h == Profile::Linear,
        generator: &[
            ("t", "(xi3 + xi4)*t"),
            ("a", "xi4*(lambda*g*t^2/2 + a) + 2*xi3*a"),
            ("u", "xi4*lambda*g*t + xi3*u"),
            ("p", "xi1 - xi4*p - xi3*(3*beta - 1)/(beta - 1)*p"),
            ("rho", "-xi4*rho - xi3*(5*beta - 3)/(beta - 1)*rho"),
            ("s", "xi2 + xi3*2*beta/(beta - 1)*s"),
            ("T", "-xi3*2/(beta - 1)*T"),
        ],
        invariants: &[
            "rho^3*u_a/rho_a^2*(s + xi2*(beta - 1)/(2*xi3*beta))",
            "u_a*rho^(-(xi3 + xi4)*(beta - 1)/(xi3*(5*beta - 3) + xi4*(beta - 1)))",
            "(u_t + u*u_a - lambda*g)*rho^(-xi4*(beta - 1)/(xi3*(5*beta - 3) + xi4*(beta - 1)))",
            "rho_a*(u_t + u*u_a - lambda*g)/(rho*u_a^2)",
            "rho^4*u_a*s_a/rho_a^3",
            "rho^3*(s_t + u*s_a)/rho_a^2",
        ],
        derivatives: [
            (
                "rho^(-(xi3 + xi4)*(beta - 1)/(xi3*(5*beta - 3) + xi4*(beta - 1)))",
                "u*rho^(-(xi3 + xi4)*(beta - 1)/(xi3*(5*beta - 3) + xi4*(beta - 1)))",
            ),
            ("0", "rho^(-(2*xi3 + xi4)*(beta - 1)/(xi3*(5*beta - 3) + xi4*(beta - 1)))"),
        ],
        errata: &[],
    },
    Table {
        id: "ns-power-quadratic",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Power && matches!(c.h, Profile::Quadratic(_)),
        generator: &[
            ("a", "xi3*a"),
            ("u", "xi3*u"),
            ("p", "xi1 - xi3*2*beta/(beta - 1)*p"),
            ("rho", "-xi3*(4*beta - 2)/(beta - 1)*rho"),
            ("s", "xi2 + xi3*2*beta/(beta - 1)*s"),
            ("T", "-xi3*2/(beta - 1)*T"),
        ],
        invariants: &[
            "rho^3*u_a/rho_a^2*(s + xi2*(beta - 1)/(2*xi3*beta))",
            "u_a",
            "(u_t + u*u_a - 2*lambda*g*a)*rho^((beta - 1)/(2*(2*beta - 1)))",
            "rho_a*(u_t + u*u_a - 2*lambda*g*a)/(rho*u_a^2)",
            "rho^4*u_a*s_a/rho_a^3",
            "rho^3*(s_t + u*s_a)/rho_a^2",
        ],
        derivatives: [MATERIAL, ("0", "rho^(-(beta - 1)/(2*(2*beta - 1)))")],
        errata: &[],
    },
    Table {
        id: "ns-power-quadratic-half",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Power && matches!(c.h, Profile::Quadratic(_)),
        generator: &[
            ("a", "xi3*a"),
            ("u", "xi3*u"),
            ("p", "xi1 + 2*xi3*p"),
            ("s", "xi2 - 2*xi3*s"),
            ("T", "4*xi3*T"),
        ],
        invariants: &[
            "rho",
            "(2*xi3*s - xi2)/rho_a^2",
            "u_a",
            "rho_a*(u_t + u*u_a - 2*lambda*g*a)",
            "s_a/rho_a^3",
            "(s_t + u*s_a)/rho_a^2",
        ],
        derivatives: [MATERIAL, ("0", "1/sqrt(xi2 - 2*xi3*s)")],
        errata: &[],
    },
    Table {
        id: "ns-power-power",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Power && c.h == Profile::Power,
        generator: &[
            ("t", "xi3*t"),
            ("a", "-xi3*2*a/(lambda2 - 2)"),
            ("u", "-xi3*lambda2*u/(lambda2 - 2)"),
            ("p", "xi1 + xi3*(lambda2*(beta + 1) + 2*(beta - 1))/((beta - 1)*(lambda2 - 2))*p"),
            ("rho", "xi3*(lambda2*(3*beta - 1) + 2*(beta - 1))/((beta - 1)*(lambda2 - 2))*rho"),
            ("s", "xi2 - xi3*2*beta*lambda2/((beta - 1)*(lambda2 - 2))*s"),
            ("T", "xi3*2*lambda2/((beta - 1)*(lambda2 - 2))*T"),
        ],
        invariants: &[
            "u^2*a^(-lambda2)",
            "rho*u*a^(1 + lambda2*beta/(beta - 1))",
            "a*u*rho*(s - xi2*(beta - 1)*(lambda2 - 2)/(2*lambda2*beta*xi3))",
            "a*u_t/u^2",
            "a*u_a/u",
            "a*rho_a/rho",
            "a^2*rho*s_t",
            "a^2*u*rho*s_a",
        ],
        derivatives: [
            ("rho^((lambda2 - 2)*(beta - 1)/(lambda2*(3*beta - 1) + 2*(beta - 1)))", "0"),
            ("0", "rho^(-2*(beta - 1)/(lambda2*(3*beta - 1) + 2*(beta - 1)))"),
        ],
        errata: &[],
    },
    Table {
        id: "ns-power-exp",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Power && c.h == Profile::Exp,
        generator: &[
            ("t", "xi3*t"),
            ("a", "-2*xi3/lambda2"),
            ("u", "-xi3*u"),
            ("p", "xi1 + xi3*(beta + 1)/(beta - 1)*p"),
            ("rho", "xi3*(3*beta - 1)/(beta - 1)*rho"),
            ("s", "xi2 - xi3*2*beta/(beta - 1)*s"),
            ("T", "xi3*2/(beta - 1)*T"),
        ],
        invariants: &[
            "u^2*exp(-lambda2*a)",
            "u*rho*exp(lambda2*beta*a/(beta - 1))",
            "u*rho*(s - xi2*(beta - 1)/(2*beta*xi3))",
            "u_t/u^2",
            "u_a/u",
            "rho_a/rho",
            "rho*s_t",
            "u*rho*s_a",
        ],
        derivatives: [("rho^((beta - 1)/(3*beta - 1))", "0"), DA],
        errata: &[Erratum {
            index: 2,
            printed: "a*u*rho*(s - xi2*(beta - 1)/(2*beta*xi3))",
            corrected: "u*rho*(s - xi2*(beta - 1)/(2*beta*xi3))",
            note: "Z translates a, so the factor a breaks invariance",
        }],
    },
    Table {
        id: "ns-power-exp-third",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Power && c.h == Profile::Exp,
        generator: &[
            ("t", "xi3*t"),
            ("a", "-2*xi3/lambda2"),
            ("u", "-xi3*u"),
            ("p", "xi1 - 2*xi3*p"),
            ("s", "xi2 + xi3*s"),
            ("T", "-3*xi3*T"),
        ],
        invariants: &[
            "u^2*exp(-lambda2*a)",
            "rho",
            "u*(s + xi2/xi3)",
            "u_t/u^2",
            "u_a/u",
            "rho_a",
            "s_t",
            "u*s_a",
        ],
        derivatives: [("xi3*s + xi2", "0"), DA],
        errata: &[],
    },
    Table {
        id: "ns-power-log",
        kind: Kind::NavierStokes,
        applies: |c| c.zeta == Zeta::Power && c.h == Profile::Log,
        generator: LOG_GENERATOR,
        invariants: LOG_INVARIANTS,
        derivatives: [("1/rho", "0"), ("0", "1/rho")],
        errata: &[],
    },
];

const LOG_GENERATOR: &[(&str, &str)] = &[
    ("t", "xi3*t"),
    ("a", "xi3*a"),
    ("p", "xi1 - xi3*p"),
    ("rho", "-xi3*rho"),
    ("s", "xi2"),
];

const LOG_INVARIANTS: &[&str] = &[
    "s - xi2/xi3*ln(a)",
    "u",
    "a*rho",
    "a*u_t",
    "a*u_a",
    "a^2*rho_a",
    "a*s_t",
    "a*s_a",
];

/// A printed basis of first-order invariants bound to one case.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    pub id: &'static str,
    pub kind: Kind,
    pub case: Case,
    pub ctx: Context,
    pub invariants: Vec<Expr>,
    pub derivatives: [InvariantDerivative; 2],
    /// The state symmetry `Z`, for Navier–Stokes bases.
    pub generator: Option<PointVectorField>,
    pub errata: Vec<Erratum>,
}

/// Context of a case extended by the `xi` coefficients of `Z`.
pub fn invariant_context(case: &Case) -> Context {
    let mut ctx = case.context();
    for x in ["xi1", "xi2", "xi3", "xi4"] {
        ctx.add_param(x);
    }
    ctx
}

fn read(src: &str, ctx: &Context) -> Result<Expr, InvariantError> {
    parse(src, ctx).map_err(|error| InvariantError::Parse {
        source_text: src.to_string(),
        error,
    })
}

fn build(t: &Table, case: &Case) -> Result<InvariantBasis, InvariantError> {
    let ctx = invariant_context(case);
    let invariants = t.invariants.iter().map(|s| read(s, &ctx)).collect::<Result<Vec<_>, _>>()?;
    let d = |(a, b): (&str, &str)| -> Result<InvariantDerivative, InvariantError> {
        Ok(InvariantDerivative {
            a: read(a, &ctx)?,
            b: read(b, &ctx)?,
        })
    };
    let derivatives = [d(t.derivatives[0])?, d(t.derivatives[1])?];
    let generator = (t.kind == Kind::NavierStokes).then(|| field(&ctx, t.generator));
    Ok(InvariantBasis {
        id: t.id,
        kind: t.kind,
        case: *case,
        ctx,
        invariants,
        derivatives,
        generator,
        errata: t.errata.to_vec(),
    })
}

/// Every printed basis of the given kind that applies to `case`.
pub fn bases_for(case: &Case, kind: Kind) -> Result<Vec<InvariantBasis>, InvariantError> {
    TABLES
        .iter()
        .filter(|t| t.kind == kind && (t.applies)(case))
        .map(|t| build(t, case))
        .collect()
}

/// All (basis, case) pairs of the tables over the populated cells.
pub fn all_bases() -> Result<Vec<InvariantBasis>, InvariantError> {
    let mut out = Vec::new();
    for cell in cases::all_cells() {
        for kind in [Kind::Kinematic, Kind::NavierStokes] {
            out.extend(bases_for(&cell.case, kind)?);
        }
    }
    Ok(out)
}

/// The algebra whose prolongation must annihilate the basis: the kernel of
/// the thermodynamic projection, plus `Z` for Navier–Stokes bases.
pub fn algebra(basis: &InvariantBasis, seed: u64) -> Result<Vec<PointVectorField>, InvariantError> {
    let cell = cases::cell(&basis.case).ok_or(InvariantError::NoTable(basis.case))?;
    let span = LieAlgebraSpan {
        generators: cell.fields(),
        ctx: basis.case.context(),
        seed,
    };
    let mut fields = span.kernel_theta()?.generators;
    fields.extend(basis.generator.clone());
    Ok(fields)
}

/// Highest jet order among the coordinates of `e`.
pub fn jet_order(e: &Expr) -> u32 {
    e.free_symbols()
        .iter()
        .filter_map(|n| Coord::parse(n))
        .map(|c| c.order())
        .max()
        .unwrap_or(0)
}

/// Check `pr X (J) = 0` modulo continuity for every field.
pub fn check_annihilated(
    j: &Expr,
    fields: &[PointVectorField],
    sys: &SolvedSystem,
    ctx: &Context,
    tester: &ZeroTester,
) -> Result<Verdict, InvariantError> {
    let order = jet_order(j).max(1);
    let mut restrictor = sys.restrictor(Restriction::Continuity);
    let j = restrictor.restrict(j)?;
    let mut verdict = Verdict::ProvenZero;
    for x in fields {
        let applied = prolong(x, order)?.apply(&j)?;
        verdict = verdict.worst(tester.is_zero(&restrictor.restrict(&applied)?, ctx));
    }
    Ok(verdict)
}

/// Outcome of re-checking a printed erratum against its correction.
#[derive(Debug, Clone, Serialize)]
pub struct ErratumCheck {
    pub printed: Verdict,
    pub corrected: Verdict,
}

impl ErratumCheck {
    /// The printed form fails and the corrected form holds.
    pub fn confirmed(&self) -> bool {
        matches!(self.printed, Verdict::Refuted { .. }) && self.corrected.is_zero()
    }
}

pub fn check_erratum(
    e: &Erratum,
    fields: &[PointVectorField],
    sys: &SolvedSystem,
    ctx: &Context,
    tester: &ZeroTester,
) -> Result<ErratumCheck, InvariantError> {
    Ok(ErratumCheck {
        printed: check_annihilated(&read(e.printed, ctx)?, fields, sys, ctx, tester)?,
        corrected: check_annihilated(&read(e.corrected, ctx)?, fields, sys, ctx, tester)?,
    })
}

pub fn apply_derivative(d: &InvariantDerivative, j: &Expr) -> Result<Expr, InvariantError> {
    let jet = Jet::new(jet_order(j) + 1);
    Ok(d.a.clone() * jet.d_t(j)? + d.b.clone() * jet.d_a(j)?)
}

/// The derivative maps every invariant of the basis to an invariant.
pub fn check_invariant_derivative(
    d: &InvariantDerivative,
    basis: &[Expr],
    fields: &[PointVectorField],
    sys: &SolvedSystem,
    ctx: &Context,
    tester: &ZeroTester,
) -> Result<Verdict, InvariantError> {
    let mut verdict = Verdict::ProvenZero;
    for j in basis {
        let dj = apply_derivative(d, j)?;
        verdict = verdict.worst(check_annihilated(&dj, fields, sys, ctx, tester)?);
    }
    Ok(verdict)
}

/// Coordinates left free on the system up to order `k`: continuity removes
/// every t-derivative of `rho`, and at order two the momentum and heat
/// equations remove `u_aa` and `s_aa`.
pub fn free_coordinates(k: u32) -> Vec<String> {
    let mut out = vec!["t".to_string(), "a".to_string()];
    for order in 0..=k {
        for dep in ["u", "rho", "s"] {
            for nt in (0..=order).rev() {
                let c = Coord::new(dep, nt, order - nt).expect("dependent variable");
                let eliminated = (dep == "rho" && nt > 0) || (order == 2 && nt == 0 && dep != "rho");
                if !eliminated {
                    out.push(c.name());
                }
            }
        }
    }
    out
}

/// Reference state used to close the system at order two: an ideal gas
/// with `T = exp(2s/3) rho^(2/3)`, `p = rho T`.
pub fn reference_state() -> (Expr, Expr) {
    let ctx = Context::new().with_var("rho").with_var("s");
    let t = parse("exp(2*s/3)*rho^(2/3)", &ctx).expect("state");
    (Expr::symbol("rho") * t.clone(), t)
}

/// Rewrites functions on the jet in the free coordinates of the system.
pub struct Reducer {
    sys: SolvedSystem,
    second: BTreeMap<String, Expr>,
}

impl Reducer {
    pub fn new(case: &Case) -> Result<Reducer, InvariantError> {
        let variant = Variant::default();
        let sys = solve_for_leading(case, variant)?;
        let (p, t) = reference_state();
        let jet = Jet::new(2);
        let mut state = BTreeMap::new();
        state.insert("p_a".to_string(), jet.d_a(&p)?);
        state.insert("T_a".to_string(), jet.d_a(&t)?);
        state.insert("T_aa".to_string(), jet.total_derivative_n(&t, 0, 2)?);
        state.insert("p".to_string(), p);
        state.insert("T".to_string(), t);
        let [f1, _, f3] = build_system(case, variant);
        let mut second = BTreeMap::new();
        second.insert("u_aa".to_string(), isolate(&substitute(&f1, &state), "u_aa")?);
        second.insert("s_aa".to_string(), isolate(&substitute(&f3, &state), "s_aa")?);
        Ok(Reducer { sys, second })
    }

    pub fn system(&self) -> &SolvedSystem {
        &self.sys
    }

    pub fn reduce(&self, e: &Expr) -> Result<Expr, InvariantError> {
        let e = self.sys.restrictor(Restriction::Continuity).restrict(e)?;
        Ok(substitute(&e, &self.second))
    }
}

fn sample_value(ctx: &Context, name: &str, rng: &mut ChaCha8Rng) -> f64 {
    let (lo, hi, signed) = ctx.domain(name).sampling_range();
    let v = rng.gen_range(lo..hi);
    if signed && rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

/// Largest numeric rank, over `n_points` random points, of the Jacobian of
/// `exprs` with respect to the free coordinates up to order `k`.
pub fn independence_rank(
    exprs: &[Expr],
    k: u32,
    reducer: &Reducer,
    ctx: &Context,
    n_points: usize,
    seed: u64,
) -> Result<usize, InvariantError> {
    let coords = free_coordinates(k);
    let reduced = exprs.iter().map(|e| reducer.reduce(e)).collect::<Result<Vec<_>, _>>()?;
    let jac: Vec<Vec<Expr>> = reduced
        .iter()
        .map(|e| coords.iter().map(|c| differentiate(e, c)).collect())
        .collect();
    let mut symbols: Vec<String> = reduced.iter().flat_map(|e| e.free_symbols()).collect();
    symbols.extend(coords.iter().cloned());
    symbols.sort();
    symbols.dedup();
    let mut funcs = FuncTable::new();
    for (i, f) in ctx.funcs().enumerate() {
        funcs.insert(f.to_string(), TestFunction::family(0, i));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    let mut evaluated = 0;
    for _ in 0..n_points * 20 {
        if evaluated == n_points {
            break;
        }
        let values: HashMap<String, f64> = symbols
            .iter()
            .map(|s| (s.clone(), sample_value(ctx, s, &mut rng)))
            .collect();
        let mut m = DMatrix::zeros(jac.len(), coords.len());
        let ok = jac.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, e)| match eval(e, &values, &funcs) {
                Ok(v) => {
                    m[(i, j)] = v;
                    true
                }
                Err(_) => false,
            })
        });
        if ok {
            evaluated += 1;
            best = best.max(lie::rank(&m));
        }
    }
    Ok(best)
}

/// Number of independent invariants of pure order `k` (1 or 2), generating
/// the order-two invariants by the invariant derivatives of the basis.
pub fn pure_order_count(basis: &InvariantBasis, k: u32, reducer: &Reducer, seed: u64) -> Result<usize, InvariantError> {
    let upto = |order: u32| -> Result<Vec<Expr>, InvariantError> {
        let mut v: Vec<Expr> = basis
            .invariants
            .iter()
            .filter(|j| jet_order(j) <= order)
            .cloned()
            .collect();
        if order >= 2 {
            for j in &basis.invariants {
                for d in &basis.derivatives {
                    v.push(apply_derivative(d, j)?);
                }
            }
        }
        Ok(v)
    };
    let high = independence_rank(&upto(k)?, k, reducer, &basis.ctx, 8, seed)?;
    let low = independence_rank(&upto(k - 1)?, k, reducer, &basis.ctx, 8, seed)?;
    Ok(high - low)
}

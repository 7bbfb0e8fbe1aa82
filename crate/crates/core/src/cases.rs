//! Registry of the symmetry tables: generators, thermodynamic parts and
//! derived series for each viscosity model and profile.

use crate::expr::{parse, Context, Expr};
use crate::jet::PointVectorField;
use crate::ns_system::{Case, LambdaSign, Profile, Zeta};

/// A generator with its table label.
#[derive(Clone, Debug)]
pub struct Generator {
    pub label: String,
    pub field: PointVectorField,
}

/// A vector field that is expected not to be a symmetry, with the reason.
#[derive(Clone, Debug)]
pub struct Probe {
    pub label: String,
    pub field: PointVectorField,
    pub note: &'static str,
}

/// Everything the tables state about one case.
#[derive(Clone, Debug)]
pub struct Cell {
    pub case: Case,
    pub generators: Vec<Generator>,
    /// Generators of the pure thermodynamic part.
    pub y_list: Vec<PointVectorField>,
    /// Dimensions of the derived series ending in 0.
    pub derived_series: Vec<usize>,
    /// Whether the series above is printed or only computed from the table.
    pub series_printed: bool,
    /// Printed first derived algebra, as combinations of generators.
    pub first_derived: Option<Vec<PointVectorField>>,
    /// Fields the printed text proposes that do not solve the system.
    pub errata: Vec<Probe>,
}

impl Cell {
    pub fn generator(&self, label: &str) -> &PointVectorField {
        &self
            .generators
            .iter()
            .find(|g| g.label == label)
            .unwrap_or_else(|| panic!("no generator {label} in {}", self.case))
            .field
    }

    pub fn fields(&self) -> Vec<PointVectorField> {
        self.generators.iter().map(|g| g.field.clone()).collect()
    }
}

/// Field from `(coordinate, coefficient source)` pairs.
pub fn field(ctx: &Context, pairs: &[(&str, &str)]) -> PointVectorField {
    PointVectorField::from_pairs(pairs.iter().map(|(c, src)| {
        let e = parse(src, ctx).unwrap_or_else(|e| panic!("coefficient `{src}`: {e}"));
        (*c, e)
    }))
}

struct Builder {
    ctx: Context,
    gens: Vec<Generator>,
}

impl Builder {
    fn new(case: &Case) -> Builder {
        Builder {
            ctx: case.context(),
            gens: Vec::new(),
        }
    }

    fn add(&mut self, pairs: &[(&str, &str)]) -> &mut Self {
        let label = format!("X{}", self.gens.len() + 1);
        let f = field(&self.ctx, pairs);
        self.gens.push(Generator { label, field: f });
        self
    }

    fn f(&self, pairs: &[(&str, &str)]) -> PointVectorField {
        field(&self.ctx, pairs)
    }

    /// Linear combination `Σ c_i X_i` with coefficients given as sources.
    fn combo(&self, terms: &[(&str, &str)]) -> PointVectorField {
        let mut out = PointVectorField::zero();
        for (coef, label) in terms {
            let c = parse(coef, &self.ctx).expect("coefficient");
            let g = &self.gens.iter().find(|g| g.label == *label).expect("label").field;
            out = out.add(&g.scale(&c));
        }
        out.canonical().expect("canonical combination")
    }
}

const D_T: &[(&str, &str)] = &[("t", "1")];
const D_P: &[(&str, &str)] = &[("p", "1")];
const D_S: &[(&str, &str)] = &[("s", "1")];
const D_A: &[(&str, &str)] = &[("a", "1")];
const BOOST: &[(&str, &str)] = &[("a", "t"), ("u", "1")];
const SCALE_TA: &[(&str, &str)] = &[("t", "t"), ("a", "a"), ("p", "-p"), ("rho", "-rho")];
const ACCEL: &[(&str, &str)] = &[
    ("t", "t"),
    ("a", "lambda*g*t^2/2 + a"),
    ("u", "lambda*g*t"),
    ("p", "-p"),
    ("rho", "-rho"),
];
const THERMO_S: &[(&str, &str)] = &[("p", "p"), ("rho", "rho"), ("s", "-s"), ("T", "T")];
const PRESS_DENS: &[(&str, &str)] = &[("p", "p"), ("rho", "rho")];
const POWER_AU: &[(&str, &str)] = &[
    ("a", "a"),
    ("u", "u"),
    ("p", "-2*beta/(beta - 1)*p"),
    ("rho", "-(4*beta - 2)/(beta - 1)*rho"),
    ("s", "2*beta/(beta - 1)*s"),
    ("T", "-2/(beta - 1)*T"),
];
const POWER_Y4: &[(&str, &str)] = &[("rho", "(beta - 1)*rho"), ("s", "-beta*s"), ("T", "T")];

// Boosts f(t) d_a + f'(t) d_u with f'' = 2 lambda g f.
const EXP_PLUS: &[(&str, &str)] = &[
    ("a", "exp(sqrt(2*lambda*g)*t)"),
    ("u", "sqrt(2*lambda*g)*exp(sqrt(2*lambda*g)*t)"),
];
const EXP_MINUS: &[(&str, &str)] = &[
    ("a", "exp(-sqrt(2*lambda*g)*t)"),
    ("u", "-sqrt(2*lambda*g)*exp(-sqrt(2*lambda*g)*t)"),
];
const TRIG_SIN: &[(&str, &str)] = &[
    ("a", "sin(sqrt(-2*lambda*g)*t)"),
    ("u", "sqrt(-2*lambda*g)*cos(sqrt(-2*lambda*g)*t)"),
];
const TRIG_COS: &[(&str, &str)] = &[
    ("a", "cos(sqrt(-2*lambda*g)*t)"),
    ("u", "-sqrt(-2*lambda*g)*sin(sqrt(-2*lambda*g)*t)"),
];

// The text's branch formulas, whose regimes are swapped.
const TEXT_SIN: &[(&str, &str)] = &[
    ("a", "sin(sqrt(2*lambda*g)*t)"),
    ("u", "sqrt(2*lambda*g)*cos(sqrt(2*lambda*g)*t)"),
];
const TEXT_EXP: &[(&str, &str)] = &[
    ("a", "exp(sqrt(-2*lambda*g)*t)"),
    ("u", "sqrt(-2*lambda*g)*exp(sqrt(-2*lambda*g)*t)"),
];
const ERRATUM_NOTE: &str = "boost for the opposite sign of lambda; the f''=2*lambda*g*f condition fixed by the linear-profile cell selects the other branch";

fn base_y(b: &Builder) -> Vec<PointVectorField> {
    vec![b.f(D_P), b.f(D_S)]
}

fn quadratic_errata(b: &Builder, sign: LambdaSign) -> Vec<Probe> {
    let (label, pairs) = match sign {
        LambdaSign::Negative => ("text sin boost, lambda<0", TEXT_SIN),
        LambdaSign::Positive => ("text exp boost, lambda>0", TEXT_EXP),
    };
    vec![Probe {
        label: label.to_string(),
        field: b.f(pairs),
        note: ERRATUM_NOTE,
    }]
}

fn boosts(b: &mut Builder, sign: LambdaSign) {
    match sign {
        LambdaSign::Negative => b.add(EXP_PLUS).add(EXP_MINUS),
        LambdaSign::Positive => b.add(TRIG_SIN).add(TRIG_COS),
    };
}

fn cell_zeta_any(h: Profile) -> Cell {
    let case = Case::new(Zeta::Any, h);
    let mut b = Builder::new(&case);
    b.add(D_T).add(D_P).add(D_S);
    let mut y = base_y(&b);
    let mut first_derived = None;
    let mut errata = Vec::new();
    let series = match h {
        Profile::Any => vec![3, 0],
        Profile::Const | Profile::Linear => {
            b.add(D_A).add(BOOST);
            b.add(if h == Profile::Const { SCALE_TA } else { ACCEL });
            y.push(b.f(PRESS_DENS));
            first_derived = Some(if h == Profile::Const {
                vec![b.combo(&[("1", "X1")]), b.combo(&[("1", "X2")]), b.combo(&[("1", "X4")])]
            } else {
                vec![
                    b.combo(&[("1", "X2")]),
                    b.combo(&[("1", "X4")]),
                    b.combo(&[("1", "X1"), ("lambda*g", "X5")]),
                ]
            });
            vec![6, 3, 0]
        }
        Profile::Quadratic(sign) => {
            boosts(&mut b, sign);
            first_derived = Some(vec![b.combo(&[("1", "X4")]), b.combo(&[("1", "X5")])]);
            errata = quadratic_errata(&b, sign);
            vec![5, 2, 0]
        }
        Profile::Log => {
            b.add(SCALE_TA);
            y.push(b.f(PRESS_DENS));
            first_derived = Some(vec![b.combo(&[("1", "X1")]), b.combo(&[("1", "X2")])]);
            vec![4, 2, 0]
        }
        Profile::Power | Profile::Exp => panic!("no table for {case}"),
    };
    Cell {
        series_printed: h != Profile::Any,
        case,
        generators: b.gens,
        y_list: y,
        derived_series: series,
        first_derived,
        errata,
    }
}

fn cell_zeta_linear(h: Profile) -> Cell {
    let case = Case::new(Zeta::Linear, h);
    let mut b = Builder::new(&case);
    b.add(D_T).add(D_P).add(D_S).add(THERMO_S);
    let mut y = base_y(&b);
    y.push(b.f(THERMO_S));
    let series = match h {
        Profile::Any => vec![4, 2, 0],
        Profile::Const | Profile::Linear => {
            b.add(D_A).add(BOOST);
            b.add(if h == Profile::Const { SCALE_TA } else { ACCEL });
            y.push(b.f(PRESS_DENS));
            vec![7, 4, 0]
        }
        Profile::Quadratic(sign) => {
            boosts(&mut b, sign);
            vec![6, 4, 0]
        }
        Profile::Log => {
            b.add(SCALE_TA);
            y.push(b.f(PRESS_DENS));
            vec![5, 3, 0]
        }
        Profile::Power | Profile::Exp => panic!("no table for {case}"),
    };
    let errata = match h {
        Profile::Quadratic(sign) => quadratic_errata(&b, sign),
        _ => Vec::new(),
    };
    Cell {
        case,
        generators: b.gens,
        y_list: y,
        derived_series: series,
        series_printed: false,
        first_derived: None,
        errata,
    }
}

fn cell_zeta_power(h: Profile) -> Cell {
    let case = Case::new(Zeta::Power, h);
    let mut b = Builder::new(&case);
    b.add(D_T).add(D_P).add(D_S);
    let mut y = base_y(&b);
    let mut errata = Vec::new();
    let mut first_derived = None;
    let series = match h {
        Profile::Any => vec![3, 0],
        Profile::Const => {
            b.add(D_A).add(BOOST).add(SCALE_TA).add(POWER_AU);
            y.push(b.f(PRESS_DENS));
            y.push(b.f(POWER_Y4));
            first_derived = Some(["X1", "X2", "X3", "X4", "X5"].map(|l| b.combo(&[("1", l)])).to_vec());
            vec![7, 5, 1, 0]
        }
        Profile::Linear => {
            b.add(D_A).add(BOOST);
            b.add(&[
                ("t", "t"),
                ("a", "2*a"),
                ("u", "u"),
                ("p", "-(3*beta - 1)/(beta - 1)*p"),
                ("rho", "-(5*beta - 3)/(beta - 1)*rho"),
                ("s", "2*beta/(beta - 1)*s"),
                ("T", "-2/(beta - 1)*T"),
            ]);
            b.add(ACCEL);
            y.push(b.f(PRESS_DENS));
            y.push(b.f(POWER_Y4));
            first_derived = Some(["X1", "X2", "X3", "X4", "X5"].map(|l| b.combo(&[("1", l)])).to_vec());
            vec![7, 5, 1, 0]
        }
        Profile::Quadratic(sign) => {
            boosts(&mut b, sign);
            b.add(POWER_AU);
            y.push(b.f(&[
                ("p", "beta*p"),
                ("rho", "(2*beta - 1)*rho"),
                ("s", "-beta*s"),
                ("T", "T"),
            ]));
            first_derived = Some(["X2", "X3", "X4", "X5"].map(|l| b.combo(&[("1", l)])).to_vec());
            errata = quadratic_errata(&b, sign);
            vec![6, 4, 0]
        }
        Profile::Power => {
            b.add(&[
                ("t", "t"),
                ("a", "-2*a/(lambda2 - 2)"),
                ("u", "-lambda2*u/(lambda2 - 2)"),
                ("p", "(lambda2*(beta + 1) + 2*(beta - 1))/((beta - 1)*(lambda2 - 2))*p"),
                ("rho", "(lambda2*(3*beta - 1) + 2*(beta - 1))/((beta - 1)*(lambda2 - 2))*rho"),
                ("s", "-2*beta*lambda2/((beta - 1)*(lambda2 - 2))*s"),
                ("T", "2*lambda2/((beta - 1)*(lambda2 - 2))*T"),
            ]);
            y.push(b.f(&[
                ("p", "(lambda2*(beta + 1) + 2*(beta - 1))*p"),
                ("rho", "(lambda2*(3*beta - 1) + 2*(beta - 1))*rho"),
                ("s", "-2*beta*lambda2*s"),
                ("T", "2*lambda2*T"),
            ]));
            first_derived = Some(["X1", "X2", "X3"].map(|l| b.combo(&[("1", l)])).to_vec());
            vec![4, 3, 0]
        }
        Profile::Exp => {
            b.add(&[
                ("t", "t"),
                ("a", "-2/lambda2"),
                ("u", "-u"),
                ("p", "(beta + 1)/(beta - 1)*p"),
                ("rho", "(3*beta - 1)/(beta - 1)*rho"),
                ("s", "-2*beta/(beta - 1)*s"),
                ("T", "2/(beta - 1)*T"),
            ]);
            y.push(b.f(&[
                ("p", "(beta + 1)*p"),
                ("rho", "(3*beta - 1)*rho"),
                ("s", "-2*beta*s"),
                ("T", "2*T"),
            ]));
            first_derived = Some(["X1", "X2", "X3"].map(|l| b.combo(&[("1", l)])).to_vec());
            vec![4, 3, 0]
        }
        Profile::Log => {
            b.add(SCALE_TA);
            y.push(b.f(PRESS_DENS));
            first_derived = Some(["X1", "X2"].map(|l| b.combo(&[("1", l)])).to_vec());
            vec![4, 2, 0]
        }
    };
    Cell {
        series_printed: h != Profile::Any,
        case,
        generators: b.gens,
        y_list: y,
        derived_series: series,
        first_derived,
        errata,
    }
}

/// The populated cells of the tables.
pub fn all_cells() -> Vec<Cell> {
    use LambdaSign::*;
    let mut out = Vec::new();
    for h in [
        Profile::Any,
        Profile::Const,
        Profile::Linear,
        Profile::Quadratic(Negative),
        Profile::Quadratic(Positive),
        Profile::Log,
    ] {
        out.push(cell_zeta_any(h));
    }
    for h in [
        Profile::Any,
        Profile::Const,
        Profile::Linear,
        Profile::Quadratic(Negative),
        Profile::Log,
    ] {
        out.push(cell_zeta_linear(h));
    }
    for h in [
        Profile::Any,
        Profile::Const,
        Profile::Linear,
        Profile::Quadratic(Negative),
        Profile::Quadratic(Positive),
        Profile::Power,
        Profile::Exp,
        Profile::Log,
    ] {
        out.push(cell_zeta_power(h));
    }
    out
}

/// Cell for a case, if the tables cover it.
pub fn cell(case: &Case) -> Option<Cell> {
    all_cells().into_iter().find(|c| c.case == *case)
}

/// A field plus `d_c` for a coordinate whose translation is never a
/// symmetry, so the sum cannot be one either.
pub fn perturbed(x: &PointVectorField, which: usize) -> (PointVectorField, &'static str) {
    const BREAKERS: [&str; 3] = ["u", "rho", "T"];
    let c = BREAKERS[which % BREAKERS.len()];
    (x.add(&PointVectorField::from_pairs([(c, Expr::one())])), c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nineteen_cells() {
        let cells = all_cells();
        assert_eq!(cells.len(), 19);
        for c in &cells {
            assert_eq!(c.derived_series[0], c.generators.len(), "{}", c.case);
            assert_eq!(*c.derived_series.last().unwrap(), 0);
        }
    }

    #[test]
    fn labels_follow_table_order() {
        let c = cell(&Case::new(Zeta::Any, Profile::Linear)).unwrap();
        assert_eq!(c.generator("X4"), &PointVectorField::partial("a"));
        assert!(c.generator("X6").component("a").to_string().contains("lambda"));
    }
}

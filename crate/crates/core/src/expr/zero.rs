use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::canon::{to_frac, CanonError};
use super::{eval, Context, EvalError, Expr, FuncTable, Node, TestFunction};

pub const DEFAULT_SAMPLES: usize = 25;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
const MAX_DOMAIN_FAILURES: usize = 100;

/// Outcome of a zero test.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    ProvenZero,
    NumericallyZero { max_residual: f64, samples: usize },
    Refuted { residual: f64, witness: BTreeMap<String, f64> },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::ProvenZero | Verdict::NumericallyZero { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::ProvenZero => "proven_zero",
            Verdict::NumericallyZero { .. } => "numerically_zero",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            Verdict::ProvenZero | Verdict::Inconclusive { .. } => 0.0,
            Verdict::NumericallyZero { max_residual, .. } => *max_residual,
            Verdict::Refuted { residual, .. } => *residual,
        }
    }

    fn severity(&self) -> u8 {
        match self {
            Verdict::ProvenZero => 0,
            Verdict::NumericallyZero { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
            Verdict::Refuted { .. } => 3,
        }
    }

    /// The less favourable of two verdicts, used to fold a list of checks.
    pub fn worst(self, other: Verdict) -> Verdict {
        match self.severity().cmp(&other.severity()) {
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Equal => {
                if other.residual() > self.residual() {
                    other
                } else {
                    self
                }
            }
        }
    }
}

/// Zero tester with explicit sampling parameters.
#[derive(Clone, Debug)]
pub struct ZeroTester {
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for ZeroTester {
    fn default() -> Self {
        ZeroTester::new(0)
    }
}

fn env_tolerance() -> Option<f64> {
    std::env::var("NSCURVE_TOL").ok()?.trim().parse().ok()
}

impl ZeroTester {
    /// Tester with default sample count; `NSCURVE_TOL` overrides the tolerance.
    pub fn new(seed: u64) -> ZeroTester {
        ZeroTester {
            seed,
            samples: DEFAULT_SAMPLES,
            tolerance: env_tolerance().unwrap_or(DEFAULT_TOLERANCE),
        }
    }

    pub fn is_zero(&self, e: &Expr, ctx: &Context) -> Verdict {
        match to_frac(e) {
            Ok(f) if f.num.is_zero() => Verdict::ProvenZero,
            Ok(f) => self.numeric(&f.num.term_exprs(), ctx),
            Err(CanonError::DivisionByZero) => Verdict::Inconclusive {
                reason: "expression divides by zero".into(),
            },
            Err(CanonError::TooLarge(_)) => {
                let terms = match e.node() {
                    Node::Sum(ts) => ts.clone(),
                    _ => vec![e.clone()],
                };
                self.numeric(&terms, ctx)
            }
        }
    }

    /// Evaluate `Σ terms` at random points; the residual at a point is
    /// `|Σ t| / (1 + Σ |t|)`.
    pub fn numeric(&self, terms: &[Expr], ctx: &Context) -> Verdict {
        let whole = Expr::from_node(Node::Sum(terms.to_vec()));
        let symbols: Vec<String> = whole.free_symbols().into_iter().collect();
        let functions: Vec<String> = whole.ufunc_names().into_iter().collect();
        let mut h = std::collections::hash_map::DefaultHasher::new();
        whole.hash(&mut h);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ h.finish());

        let mut max_residual: f64 = 0.0;
        let mut valid = 0usize;
        let mut failures = 0usize;
        let mut sample_index = 0usize;
        while valid < self.samples {
            let mut point: HashMap<String, f64> = HashMap::new();
            for s in &symbols {
                point.insert(s.clone(), sample(&mut rng, &ctx.domain(s)));
            }
            let mut table = FuncTable::new();
            for (salt, f) in functions.iter().enumerate() {
                table.insert(f.clone(), TestFunction::family(sample_index, salt));
            }
            sample_index += 1;
            match evaluate_terms(terms, &point, &table) {
                Ok((sum, scale)) => {
                    valid += 1;
                    let r = sum.abs() / (1.0 + scale);
                    if r > self.tolerance {
                        return Verdict::Refuted {
                            residual: r,
                            witness: point.into_iter().collect(),
                        };
                    }
                    max_residual = max_residual.max(r);
                }
                Err(EvalError::Domain(_)) => {
                    failures += 1;
                    if failures > MAX_DOMAIN_FAILURES {
                        return Verdict::Inconclusive {
                            reason: format!(
                                "only {valid} of {} sample points inside the domain",
                                self.samples
                            ),
                        };
                    }
                }
                Err(other) => {
                    return Verdict::Inconclusive {
                        reason: other.to_string(),
                    }
                }
            }
        }
        Verdict::NumericallyZero {
            max_residual,
            samples: valid,
        }
    }
}

fn evaluate_terms(
    terms: &[Expr],
    point: &HashMap<String, f64>,
    table: &FuncTable,
) -> Result<(f64, f64), EvalError> {
    let mut sum = 0.0;
    let mut scale = 0.0;
    for t in terms {
        let v = eval(t, point, table)?;
        sum += v;
        scale += v.abs();
    }
    Ok((sum, scale))
}

/// Random rational with denominator 10^6 drawn from the domain.
fn sample(rng: &mut ChaCha8Rng, domain: &super::Domain) -> f64 {
    let (lo, hi, signed) = domain.sampling_range();
    let x: f64 = rng.gen_range(lo..=hi);
    let x = (x * 1e6).round() / 1e6;
    if signed && rng.gen_bool(0.5) {
        -x
    } else {
        x
    }
}

/// Zero test with the default tester.
pub fn is_zero(e: &Expr, ctx: &Context) -> Verdict {
    ZeroTester::default().is_zero(e, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Domain};

    fn ctx() -> Context {
        Context::new()
            .with_var("x")
            .with_var("y")
            .with_func("F")
            .assume("y", Domain::Positive)
    }

    #[test]
    fn algebraic_identities_are_proven() {
        let c = ctx();
        let e = parse("(x + y)^3 - x^3 - 3*x^2*y - 3*x*y^2 - y^3", &c).unwrap();
        assert_eq!(is_zero(&e, &c), Verdict::ProvenZero);
    }

    #[test]
    fn trigonometric_identity_is_numeric() {
        let c = ctx();
        let e = parse("sin(x)^2 + cos(x)^2 - 1", &c).unwrap();
        assert!(matches!(is_zero(&e, &c), Verdict::NumericallyZero { .. }));
    }

    #[test]
    fn nonzero_is_refuted_with_witness() {
        let c = ctx();
        let e = parse("F'(x) - F(x)", &c).unwrap();
        match is_zero(&e, &c) {
            Verdict::Refuted { witness, .. } => assert!(witness.contains_key("x")),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn domain_failures_are_inconclusive() {
        let c = Context::new().with_var("x").assume("x", Domain::Interval { lo: -2.0, hi: -1.0 });
        let e = parse("ln(x) - ln(x)*1.0000001", &c).unwrap();
        assert!(matches!(is_zero(&e, &c), Verdict::Inconclusive { .. }));
    }

    #[test]
    fn worst_prefers_refutation() {
        let r = Verdict::Refuted {
            residual: 1.0,
            witness: BTreeMap::new(),
        };
        assert!(Verdict::ProvenZero.worst(r.clone()).is_refuted());
        assert!(r.worst(Verdict::Inconclusive { reason: "x".into() }).is_refuted());
    }
}

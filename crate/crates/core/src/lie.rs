//! Lie-algebra structure of spans of point vector fields.
//!
//! Linear algebra over constants is done numerically: each field is
//! evaluated at a fixed set of random base points (with parameters bound to
//! random admissible values) and the stacked component values form its
//! coordinate vector. Identities between fields (Jacobi, antisymmetry, the
//! homomorphism property) are checked symbolically with the zero tester.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{eval, Context, Expr, EvalError, FuncTable, TestFunction, Verdict, ZeroTester};
use crate::jet::{JetError, PointVectorField, BASE};

pub const RANK_TOLERANCE: f64 = 1e-8;
const DEFAULT_POINTS: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("could not evaluate fields: {0}")]
    Eval(#[from] EvalError),
    #[error("span is not closed: [{i}, {j}] leaves it with residual {residual:e}")]
    NotClosed { i: usize, j: usize, residual: f64 },
    #[error("thermodynamic coefficient `{0}` depends on t, a or u")]
    NotThermodynamic(String),
}

/// Fixed evaluation points for turning fields into vectors.
#[derive(Clone, Debug)]
pub struct Sampler {
    points: Vec<HashMap<String, f64>>,
    funcs: FuncTable,
}

fn draw(rng: &mut ChaCha8Rng, domain: &crate::expr::Domain) -> f64 {
    let (lo, hi, signed) = domain.sampling_range();
    let x: f64 = rng.gen_range(lo..=hi);
    if signed && rng.gen_bool(0.5) {
        -x
    } else {
        x
    }
}

impl Sampler {
    /// Points for the symbols declared in `ctx` plus the base coordinates.
    /// Parameters take one value shared by all points.
    pub fn new(ctx: &Context, seed: u64, count: usize) -> Sampler {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params: Vec<(String, f64)> = ctx
            .params()
            .map(|p| (p.to_string(), draw(&mut rng, &ctx.domain(p))))
            .collect();
        let points = (0..count)
            .map(|_| {
                let mut m: HashMap<String, f64> = params.iter().cloned().collect();
                for b in BASE {
                    m.insert(b.to_string(), draw(&mut rng, &ctx.domain(b)));
                }
                m
            })
            .collect();
        let funcs = ctx
            .funcs()
            .enumerate()
            .map(|(i, f)| (f.to_string(), TestFunction::family(0, i)))
            .collect();
        Sampler { points, funcs }
    }

    pub fn for_context(ctx: &Context, seed: u64) -> Sampler {
        Sampler::new(ctx, seed, DEFAULT_POINTS)
    }

    /// Stacked component values at every point.
    pub fn vector(&self, x: &PointVectorField) -> Result<DVector<f64>, LieError> {
        let mut out = Vec::with_capacity(self.points.len() * 7);
        for p in &self.points {
            for c in &x.components {
                out.push(eval(c, p, &self.funcs)?);
            }
        }
        Ok(DVector::from_vec(out))
    }

    pub fn matrix(&self, fields: &[PointVectorField]) -> Result<DMatrix<f64>, LieError> {
        let cols: Vec<DVector<f64>> = fields.iter().map(|f| self.vector(f)).collect::<Result<_, _>>()?;
        let rows = self.points.len() * 7;
        Ok(if cols.is_empty() {
            DMatrix::zeros(rows, 0)
        } else {
            DMatrix::from_columns(&cols)
        })
    }
}

/// Numerical rank with relative tolerance on the largest singular value.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > RANK_TOLERANCE * max).count()
}

/// Result of decomposing a field over a span.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Membership {
    Member { coefficients: Vec<f64>, residual: f64 },
    Refused { residual: f64 },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

/// Ordered generators of a subalgebra.
#[derive(Clone, Debug)]
pub struct LieAlgebraSpan {
    pub generators: Vec<PointVectorField>,
    pub ctx: Context,
    pub seed: u64,
}

impl LieAlgebraSpan {
    pub fn new(generators: Vec<PointVectorField>, ctx: &Context) -> LieAlgebraSpan {
        LieAlgebraSpan {
            generators,
            ctx: ctx.clone(),
            seed: 7,
        }
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::for_context(&self.ctx, self.seed)
    }

    pub fn dim(&self) -> Result<usize, LieError> {
        Ok(rank(&self.sampler().matrix(&self.generators)?))
    }

    pub fn membership(&self, x: &PointVectorField) -> Result<Membership, LieError> {
        membership_in(x, &self.generators, &self.sampler())
    }

    /// `[X_i, X_j]` in the span for all pairs.
    pub fn check_closure(&self) -> Result<(), LieError> {
        let s = self.sampler();
        for i in 0..self.generators.len() {
            for j in (i + 1)..self.generators.len() {
                let b = self.generators[i].bracket(&self.generators[j])?;
                if let Membership::Refused { residual } = membership_in(&b, &self.generators, &s)? {
                    return Err(LieError::NotClosed { i, j, residual });
                }
            }
        }
        Ok(())
    }

    /// Coefficients `c_ij^k` of `[X_i, X_j] = Σ c_ij^k X_k` for i < j.
    pub fn structure_constants(&self) -> Result<Vec<StructureEntry>, LieError> {
        let s = self.sampler();
        let mut out = Vec::new();
        for i in 0..self.generators.len() {
            for j in (i + 1)..self.generators.len() {
                let b = self.generators[i].bracket(&self.generators[j])?;
                match membership_in(&b, &self.generators, &s)? {
                    Membership::Member { coefficients, .. } => {
                        if coefficients.iter().any(|c| c.abs() > 1e-9) {
                            out.push(StructureEntry {
                                i,
                                j,
                                coefficients: coefficients
                                    .into_iter()
                                    .map(|c| if c.abs() < 1e-9 { 0.0 } else { c })
                                    .collect(),
                            });
                        }
                    }
                    Membership::Refused { residual } => {
                        return Err(LieError::NotClosed { i, j, residual })
                    }
                }
            }
        }
        Ok(out)
    }

    /// Dimensions of the derived series; the last entry is 0 for a
    /// solvable algebra, otherwise the dimension where it stabilized.
    pub fn derived_series(&self) -> Result<Vec<usize>, LieError> {
        self.check_closure()?;
        let s = self.sampler();
        let mut current = independent_subset(&self.generators, &s)?;
        let mut dims = vec![current.len()];
        while !current.is_empty() {
            let mut brackets = Vec::new();
            for i in 0..current.len() {
                for j in (i + 1)..current.len() {
                    let b = current[i].bracket(&current[j])?;
                    if !b.is_syntactically_zero() {
                        brackets.push(b);
                    }
                }
            }
            let next = independent_subset(&brackets, &s)?;
            let stalled = next.len() == current.len();
            dims.push(next.len());
            current = next;
            if stalled {
                break;
            }
        }
        Ok(dims)
    }

    pub fn is_solvable(&self) -> Result<bool, LieError> {
        Ok(self.derived_series()?.last() == Some(&0))
    }

    /// Images of the generators under the thermodynamic projection.
    pub fn theta_images(&self) -> Result<Vec<PointVectorField>, LieError> {
        self.generators.iter().map(theta).collect()
    }

    /// Combinations of generators with vanishing thermodynamic part.
    pub fn kernel_theta(&self) -> Result<LieAlgebraSpan, LieError> {
        let images = self.theta_images()?;
        let m = self.sampler().matrix(&images)?;
        let n = self.generators.len();
        let null = null_space(&m, n);
        let mut fields = Vec::new();
        for row in null {
            let mut f = PointVectorField::zero();
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    f = f.add(&self.generators[k].scale(&Expr::constant(c.clone())));
                }
            }
            fields.push(f.canonical()?);
        }
        Ok(LieAlgebraSpan {
            generators: fields,
            ctx: self.ctx.clone(),
            seed: self.seed,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureEntry {
    pub i: usize,
    pub j: usize,
    pub coefficients: Vec<f64>,
}

/// Least-squares decomposition; accepted when the relative residual is
/// below the rank tolerance.
pub fn membership_in(
    x: &PointVectorField,
    span: &[PointVectorField],
    s: &Sampler,
) -> Result<Membership, LieError> {
    let v = s.vector(x)?;
    let scale = v.norm().max(1.0);
    if span.is_empty() {
        let r = v.norm() / scale;
        return Ok(if r < RANK_TOLERANCE {
            Membership::Member { coefficients: vec![], residual: r }
        } else {
            Membership::Refused { residual: r }
        });
    }
    let m = s.matrix(span)?;
    let svd = m.clone().svd(true, true);
    let c = svd
        .solve(&v, RANK_TOLERANCE * svd.singular_values.max())
        .unwrap_or_else(|_| DVector::zeros(span.len()));
    let r = (&m * &c - &v).norm() / scale;
    Ok(if r < 1e-7 {
        Membership::Member {
            coefficients: c.iter().cloned().collect(),
            residual: r,
        }
    } else {
        Membership::Refused { residual: r }
    })
}

/// Greedy maximal linearly independent subset, in input order.
pub fn independent_subset(fields: &[PointVectorField], s: &Sampler) -> Result<Vec<PointVectorField>, LieError> {
    let mut kept: Vec<PointVectorField> = Vec::new();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for f in fields {
        let v = s.vector(f)?;
        if v.norm() == 0.0 {
            continue;
        }
        cols.push(v);
        let m = DMatrix::from_columns(&cols);
        if rank(&m) == cols.len() {
            kept.push(f.clone());
        } else {
            cols.pop();
        }
    }
    Ok(kept)
}

/// Thermodynamic projection `X ↦ X(p)∂p + X(ρ)∂ρ + X(s)∂s + X(T)∂T`.
pub fn theta(x: &PointVectorField) -> Result<PointVectorField, LieError> {
    let mut out = PointVectorField::zero();
    for name in ["p", "rho", "s", "T"] {
        let c = x.component(name);
        for bad in ["t", "a", "u"] {
            if c.contains_symbol(bad) {
                return Err(LieError::NotThermodynamic(name.to_string()));
            }
        }
        out = out.add(&PointVectorField::from_pairs([(name, c.clone())]));
    }
    Ok(out)
}

/// Whether two spans of fields coincide.
pub fn span_equal(a: &[PointVectorField], b: &[PointVectorField], s: &Sampler) -> Result<bool, LieError> {
    let ra = rank(&s.matrix(a)?);
    let rb = rank(&s.matrix(b)?);
    let both: Vec<PointVectorField> = a.iter().chain(b).cloned().collect();
    let rab = rank(&s.matrix(&both)?);
    Ok(ra == rb && rb == rab)
}

fn snap(x: f64) -> BigRational {
    // small denominators first; fall back to a fine grid
    for d in 1..=64i64 {
        let n = (x * d as f64).round();
        if (n / d as f64 - x).abs() < 1e-9 {
            return BigRational::new(BigInt::from(n as i64), BigInt::from(d));
        }
    }
    let d = 1_000_000i64;
    BigRational::new(BigInt::from((x * d as f64).round() as i64), BigInt::from(d))
}

/// Rational row-reduced basis of the null space of `m` (n columns).
fn null_space(m: &DMatrix<f64>, n: usize) -> Vec<Vec<BigRational>> {
    if n == 0 {
        return vec![];
    }
    let r = rank(m);
    if r == n {
        return vec![];
    }
    // right singular vectors for the smallest singular values
    let mut padded = DMatrix::zeros(m.nrows().max(n), n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].partial_cmp(&svd.singular_values[j]).unwrap());
    let k = n - r;
    let mut basis = DMatrix::zeros(k, n);
    for (row, &i) in order.iter().take(k).enumerate() {
        basis.set_row(row, &vt.row(i));
    }
    rref(&mut basis);
    (0..k)
        .map(|i| (0..n).map(|j| snap(basis[(i, j)])).collect())
        .collect()
}

fn rref(m: &mut DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let mut lead = 0;
    for r in 0..rows {
        if lead >= cols {
            return;
        }
        let mut best;
        loop {
            best = (r..rows)
                .max_by(|&a, &b| m[(a, lead)].abs().partial_cmp(&m[(b, lead)].abs()).unwrap())
                .unwrap_or(r);
            if m[(best, lead)].abs() > 1e-10 {
                break;
            }
            lead += 1;
            if lead >= cols {
                return;
            }
        }
        m.swap_rows(r, best);
        let p = m[(r, lead)];
        for c in 0..cols {
            m[(r, c)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, lead)];
                for c in 0..cols {
                    m[(i, c)] -= f * m[(r, c)];
                }
            }
        }
        lead += 1;
    }
}

/// Cyclic sum `[X,[Y,Z]] + [Y,[Z,X]] + [Z,[X,Y]]` tested for zero.
pub fn jacobi(
    x: &PointVectorField,
    y: &PointVectorField,
    z: &PointVectorField,
    ctx: &Context,
    tester: &ZeroTester,
) -> Result<Verdict, LieError> {
    let a = x.bracket(&y.bracket(z)?)?;
    let b = y.bracket(&z.bracket(x)?)?;
    let c = z.bracket(&x.bracket(y)?)?;
    Ok(fields_zero(&a.add(&b).add(&c), ctx, tester))
}

/// `[X,Y] + [Y,X]` tested for zero.
pub fn antisymmetry(x: &PointVectorField, y: &PointVectorField, ctx: &Context, tester: &ZeroTester) -> Result<Verdict, LieError> {
    let s = x.bracket(y)?.add(&y.bracket(x)?);
    Ok(fields_zero(&s, ctx, tester))
}

/// `θ[X,Y] - [θX, θY]` tested for zero.
pub fn theta_homomorphism(
    x: &PointVectorField,
    y: &PointVectorField,
    ctx: &Context,
    tester: &ZeroTester,
) -> Result<Verdict, LieError> {
    let lhs = theta(&x.bracket(y)?)?;
    let rhs = theta(x)?.bracket(&theta(y)?)?;
    Ok(fields_zero(&lhs.add(&rhs.scale(&Expr::int(-1))), ctx, tester))
}

/// Worst verdict over the components of a field.
pub fn fields_zero(f: &PointVectorField, ctx: &Context, tester: &ZeroTester) -> Verdict {
    f.components
        .iter()
        .map(|c| tester.is_zero(c, ctx))
        .fold(Verdict::ProvenZero, Verdict::worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::{cell, field};
    use crate::ns_system::{Case, Profile, Zeta};

    fn span_of(case: Case) -> LieAlgebraSpan {
        let c = cell(&case).unwrap();
        LieAlgebraSpan::new(c.fields(), &case.context())
    }

    #[test]
    fn brackets_of_the_constant_profile() {
        let c = cell(&Case::new(Zeta::Any, Profile::Const)).unwrap();
        let (x1, x4, x5, x6) = (c.generator("X1"), c.generator("X4"), c.generator("X5"), c.generator("X6"));
        assert_eq!(x4.bracket(x6).unwrap(), *x4);
        assert_eq!(x1.bracket(x5).unwrap(), *x4);
        assert!(x1.bracket(&PointVectorField::partial("a")).unwrap().is_syntactically_zero());
    }

    #[test]
    fn derived_series_matches_tables() {
        assert_eq!(span_of(Case::new(Zeta::Any, Profile::Const)).derived_series().unwrap(), vec![6, 3, 0]);
        assert_eq!(span_of(Case::new(Zeta::Power, Profile::Const)).derived_series().unwrap(), vec![7, 5, 1, 0]);
    }

    #[test]
    fn membership_refuses_quadratic_coefficient() {
        let ctx = Context::new();
        let span = LieAlgebraSpan::new(
            vec![field(&ctx, &[("a", "1")]), field(&ctx, &[("a", "a")])],
            &ctx,
        );
        assert!(!span.membership(&field(&ctx, &[("a", "a^2")])).unwrap().is_member());
        match span.membership(&field(&ctx, &[("a", "3 - 2*a")])).unwrap() {
            Membership::Member { coefficients, .. } => {
                assert!((coefficients[0] - 3.0).abs() < 1e-9 && (coefficients[1] + 2.0).abs() < 1e-9)
            }
            m => panic!("{m:?}"),
        }
    }

    #[test]
    fn kernel_of_theta() {
        let k = span_of(Case::new(Zeta::Any, Profile::Const)).kernel_theta().unwrap();
        assert_eq!(k.generators.len(), 3);
        let k = span_of(Case::new(Zeta::Any, Profile::Any)).kernel_theta().unwrap();
        assert_eq!(k.generators, vec![PointVectorField::partial("t")]);
    }

    #[test]
    fn theta_rejects_base_dependence() {
        let ctx = Context::new();
        assert!(theta(&field(&ctx, &[("p", "t*p")])).is_err());
    }

    #[test]
    fn span_equality() {
        let ctx = Context::new();
        let s = Sampler::for_context(&ctx, 1);
        let y1 = field(&ctx, &[("p", "1")]);
        let y2 = field(&ctx, &[("s", "1")]);
        assert!(span_equal(&[y1.clone()], &[y1.scale(&Expr::int(2))], &s).unwrap());
        assert!(!span_equal(&[y1.clone()], &[y1, y2], &s).unwrap());
    }
}

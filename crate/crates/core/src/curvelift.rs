//! Lifting plane curves into space curves with a prescribed height profile.
//!
//! A naturally parameterized space curve with height `z = h(a)` has a plane
//! projection of length `l(a) = ∫ √(1 − h′²)`. For each profile family the
//! two are tied by a closed relation `G(z) = ±c·l + C`, which this module
//! evaluates and checks against quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("|h'| = {slope} > 1 at a = {at}: no natural parameterization")]
    Slope { at: f64, slope: f64 },
    #[error("z = {z} is outside the branch ({lo}, {hi})")]
    Branch { z: f64, lo: f64, hi: f64 },
    #[error("hypergeometric argument {0} outside |x| < 1")]
    SeriesDomain(f64),
    #[error("hypergeometric series did not converge at x = {0}")]
    SeriesDiverges(f64),
    #[error("no closed relation for {0}")]
    NoRelation(HShape),
    #[error("degenerate profile: {0}")]
    Degenerate(String),
    #[error("target {target} is outside the relation range [{lo}, {hi}]")]
    Unbracketed { target: f64, lo: f64, hi: f64 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Height profiles that occur in the symmetry classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum HShape {
    Const { c: f64 },
    Linear { lambda: f64 },
    Quadratic { lambda: f64 },
    Power { lambda1: f64, lambda2: f64 },
    Exp { lambda1: f64, lambda2: f64 },
    Log,
}

impl fmt::Display for HShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HShape::Const { c } => write!(f, "h = {c}"),
            HShape::Linear { lambda } => write!(f, "h = {lambda}*a"),
            HShape::Quadratic { lambda } => write!(f, "h = {lambda}*a^2"),
            HShape::Power { lambda1, lambda2 } => write!(f, "h = {lambda1}*a^{lambda2}"),
            HShape::Exp { lambda1, lambda2 } => write!(f, "h = {lambda1}*exp({lambda2}*a)"),
            HShape::Log => write!(f, "h = ln(a)"),
        }
    }
}

impl HShape {
    pub fn tag(&self) -> &'static str {
        match self {
            HShape::Const { .. } => "const",
            HShape::Linear { .. } => "linear",
            HShape::Quadratic { .. } => "quadratic",
            HShape::Power { .. } => "power",
            HShape::Exp { .. } => "exp",
            HShape::Log => "log",
        }
    }

    pub fn h(&self, a: f64) -> f64 {
        match *self {
            HShape::Const { c } => c,
            HShape::Linear { lambda } => lambda * a,
            HShape::Quadratic { lambda } => lambda * a * a,
            HShape::Power { lambda1, lambda2 } => lambda1 * a.powf(lambda2),
            HShape::Exp { lambda1, lambda2 } => lambda1 * (lambda2 * a).exp(),
            HShape::Log => a.ln(),
        }
    }

    pub fn dh(&self, a: f64) -> f64 {
        match *self {
            HShape::Const { .. } => 0.0,
            HShape::Linear { lambda } => lambda,
            HShape::Quadratic { lambda } => 2.0 * lambda * a,
            HShape::Power { lambda1, lambda2 } => lambda1 * lambda2 * a.powf(lambda2 - 1.0),
            HShape::Exp { lambda1, lambda2 } => lambda1 * lambda2 * (lambda2 * a).exp(),
            HShape::Log => 1.0 / a,
        }
    }

    /// Base point of the arclength `l`: 0, or 1 for the logarithm.
    pub fn base(&self) -> f64 {
        match self {
            HShape::Log => 1.0,
            _ => 0.0,
        }
    }

    /// Interval of `a` on which `|h′| ≤ 1`.
    pub fn a_domain(&self) -> (f64, f64) {
        match *self {
            HShape::Const { .. } | HShape::Linear { .. } => (0.0, f64::INFINITY),
            HShape::Quadratic { lambda } => (0.0, 1.0 / (2.0 * lambda.abs())),
            HShape::Power { lambda1, lambda2 } => {
                let edge = (1.0 / (lambda1 * lambda2).abs()).powf(1.0 / (lambda2 - 1.0));
                if lambda2 > 1.0 {
                    (0.0, edge)
                } else {
                    (edge, f64::INFINITY)
                }
            }
            HShape::Exp { lambda1, lambda2 } => {
                let edge = (1.0 / (lambda1 * lambda2).abs()).ln() / lambda2;
                if lambda2 > 0.0 {
                    (f64::NEG_INFINITY, edge)
                } else {
                    (edge, f64::INFINITY)
                }
            }
            HShape::Log => (1.0, f64::INFINITY),
        }
    }

    fn speed(&self, a: f64) -> Result<f64, LiftError> {
        let s = self.dh(a);
        let r = 1.0 - s * s;
        if r < -1e-12 {
            return Err(LiftError::Slope { at: a, slope: s.abs() });
        }
        Ok(r.max(0.0).sqrt())
    }

    /// The closed relation, when one is known.
    pub fn relation(&self) -> Result<LiftRelation, LiftError> {
        let (c, sign, lo, hi) = match *self {
            HShape::Const { .. } => return Err(LiftError::NoRelation(*self)),
            HShape::Linear { lambda } => {
                if lambda.abs() >= 1.0 || lambda == 0.0 {
                    return Err(LiftError::Degenerate(format!("|lambda| = {} must lie in (0, 1)", lambda.abs())));
                }
                (lambda.abs() / (1.0 - lambda * lambda).sqrt(), lambda.signum(), f64::NEG_INFINITY, f64::INFINITY)
            }
            HShape::Quadratic { lambda } => {
                let edge = 1.0 / (4.0 * lambda);
                (4.0 * lambda.abs(), 1.0, edge.min(0.0), edge.max(0.0))
            }
            HShape::Power { lambda1, lambda2 } => {
                if lambda2 <= 1.0 {
                    return Err(LiftError::NoRelation(*self));
                }
                // Stay where the series converges quickly.
                let a_hi = (SERIES_LIMIT / (lambda1 * lambda2).powi(2)).powf(1.0 / (2.0 * (lambda2 - 1.0)));
                let z_hi = self.h(a_hi);
                (1.0, 1.0, z_hi.min(0.0), z_hi.max(0.0))
            }
            HShape::Exp { lambda1, lambda2 } => {
                let edge = 1.0 / lambda2.abs();
                let (lo, hi) = if lambda1 > 0.0 { (0.0, edge) } else { (-edge, 0.0) };
                (lambda2.abs(), lambda2.signum(), lo, hi)
            }
            HShape::Log => (1.0, 1.0, 0.0, f64::INFINITY),
        };
        Ok(LiftRelation {
            shape: *self,
            c,
            sign,
            lo,
            hi,
        })
    }
}

const SERIES_LIMIT: f64 = 0.9;

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Random profile of the family `tag` (linear, quadratic, exp, log) with
/// parameters of either sign away from degenerate values.
pub fn sample_profile(tag: &str, rng: &mut ChaCha8Rng) -> Option<HShape> {
    Some(match tag {
        "linear" => HShape::Linear { lambda: signed(rng, 0.05, 0.95) },
        "quadratic" => HShape::Quadratic { lambda: signed(rng, 0.2, 2.0) },
        "exp" => HShape::Exp {
            lambda1: signed(rng, 0.2, 2.0),
            lambda2: signed(rng, 0.2, 2.0),
        },
        "log" => HShape::Log,
        _ => return None,
    })
}

/// Random `a` with `|h'| <= 1`, within a few length scales of the edge.
pub fn sample_point(shape: &HShape, rng: &mut ChaCha8Rng) -> f64 {
    let (lo, hi) = shape.a_domain();
    match *shape {
        HShape::Exp { lambda2, .. } => {
            let width = 3.0 / lambda2.abs();
            if lo.is_finite() {
                rng.gen_range(lo..lo + width)
            } else {
                rng.gen_range(hi - width..hi)
            }
        }
        _ if hi.is_finite() => rng.gen_range(lo..hi),
        _ => rng.gen_range(lo..lo + 5.0),
    }
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, LiftError>
where
    F: Fn(f64) -> Result<f64, LiftError>,
{
    if a == b {
        return Ok(0.0);
    }
    let (fa, fb) = (f(a)?, f(b)?);
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> Result<f64, LiftError>
where
    F: Fn(f64) -> Result<f64, LiftError>,
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Plane-projection length between `a0` and `a`.
pub fn arclength_between(shape: &HShape, a0: f64, a: f64) -> Result<f64, LiftError> {
    simpson(&|t| shape.speed(t), a0, a, 1e-10)
}

/// `l(a)` measured from the profile's base point.
pub fn arclength_l_of_a(shape: &HShape, a: f64) -> Result<f64, LiftError> {
    arclength_between(shape, shape.base(), a)
}

/// Gauss hypergeometric series `₂F₁(a, b; c; x)` for `|x| < 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64, LiftError> {
    if x.abs() >= 1.0 {
        return Err(LiftError::SeriesDomain(x));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..100_000 {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if term == 0.0 || term.abs() <= 1e-12 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(LiftError::SeriesDiverges(x))
}

/// A closed relation `G(z) = sign·c·l + C` on the branch `lo < z < hi`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LiftRelation {
    pub shape: HShape,
    pub c: f64,
    pub sign: f64,
    pub lo: f64,
    pub hi: f64,
}

impl LiftRelation {
    pub fn contains(&self, z: f64) -> bool {
        let slack = |b: f64| 1e-12 * (1.0 + b.abs());
        z >= self.lo - slack(self.lo) && z <= self.hi + slack(self.hi)
    }

    /// The left side `G(z)`.
    pub fn g(&self, z: f64) -> Result<f64, LiftError> {
        if !self.contains(z) {
            return Err(LiftError::Branch { z, lo: self.lo, hi: self.hi });
        }
        Ok(match self.shape {
            HShape::Linear { .. } => z,
            HShape::Quadratic { lambda } => {
                let w = (4.0 * lambda * z).clamp(0.0, 1.0);
                (w * (1.0 - w)).sqrt() - w.sqrt().acos()
            }
            HShape::Power { lambda1, lambda2 } => {
                let a = (z / lambda1).powf(1.0 / lambda2);
                let b = 1.0 / (2.0 * (lambda2 - 1.0));
                let x = (lambda1 * lambda2).powi(2) * a.powf(2.0 * (lambda2 - 1.0));
                a * hyp2f1(-0.5, b, 1.0 + b, x)?
            }
            HShape::Exp { lambda2, .. } => {
                let r = (1.0 - (lambda2 * z).powi(2)).max(0.0).sqrt();
                r - 0.5 * ((1.0 + r) / (1.0 - r)).ln()
            }
            HShape::Log => {
                let r = (2.0 * z).exp_m1().max(0.0).sqrt();
                r - r.atan()
            }
            HShape::Const { .. } => unreachable!("constant profile has no relation"),
        })
    }

    /// Solve `G(z) = target` on the branch by bisection.
    pub fn solve(&self, target: f64) -> Result<f64, LiftError> {
        let (mut lo, mut hi) = (self.lo, self.hi);
        if hi.is_infinite() {
            hi = lo.max(0.0) + 1.0;
            while self.g(hi)? < target {
                hi = 2.0 * hi + 1.0;
                if hi > 1e6 {
                    return Err(LiftError::Unbracketed { target, lo: self.g(lo)?, hi: f64::INFINITY });
                }
            }
        }
        if lo.is_infinite() {
            lo = hi.min(0.0) - 1.0;
            while self.g(lo)? > target {
                lo = 2.0 * lo - 1.0;
                if lo < -1e6 {
                    return Err(LiftError::Unbracketed { target, lo: f64::NEG_INFINITY, hi: self.g(hi)? });
                }
            }
        }
        let (glo, ghi) = (self.g(lo)?, self.g(hi)?);
        let increasing = ghi >= glo;
        let (gmin, gmax) = if increasing { (glo, ghi) } else { (ghi, glo) };
        if target < gmin - 1e-12 || target > gmax + 1e-12 {
            return Err(LiftError::Unbracketed { target, lo: gmin, hi: gmax });
        }
        while hi - lo > 1e-10 * (1.0 + lo.abs().max(hi.abs())) {
            let m = 0.5 * (lo + hi);
            if (self.g(m)? < target) == increasing {
                lo = m;
            } else {
                hi = m;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// `|[G(h(a)) − G(h(a0))] − sign·c·[l(a) − l(a0)]|`.
pub fn relation_residual(rel: &LiftRelation, a0: f64, a: f64) -> Result<f64, LiftError> {
    let dg = rel.g(rel.shape.h(a))? - rel.g(rel.shape.h(a0))?;
    let dl = arclength_between(&rel.shape, a0, a)?;
    Ok((dg - rel.sign * rel.c * dl).abs())
}

/// A parametric plane curve with its velocity.
pub struct PlaneCurve {
    pub name: String,
    pub point: Box<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
    pub velocity: Box<dyn Fn(f64) -> (f64, f64) + Send + Sync>,
    pub t0: f64,
    pub t1: f64,
}

impl fmt::Debug for PlaneCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneCurve({}, [{}, {}])", self.name, self.t0, self.t1)
    }
}

impl PlaneCurve {
    pub fn circle(r: f64) -> PlaneCurve {
        PlaneCurve {
            name: "circle".into(),
            point: Box::new(move |t| (r * t.cos(), r * t.sin())),
            velocity: Box::new(move |t| (-r * t.sin(), r * t.cos())),
            t0: 0.0,
            t1: 2.0 * PI,
        }
    }

    pub fn ellipse(a: f64, b: f64) -> PlaneCurve {
        PlaneCurve {
            name: "ellipse".into(),
            point: Box::new(move |t| (a * t.cos(), b * t.sin())),
            velocity: Box::new(move |t| (-a * t.sin(), b * t.cos())),
            t0: 0.0,
            t1: 2.0 * PI,
        }
    }

    pub fn segment(len: f64) -> PlaneCurve {
        PlaneCurve {
            name: "segment".into(),
            point: Box::new(|t| (t, 0.0)),
            velocity: Box::new(|_| (1.0, 0.0)),
            t0: 0.0,
            t1: len,
        }
    }

    pub fn by_name(name: &str) -> Option<PlaneCurve> {
        match name {
            "circle" => Some(Self::circle(1.0)),
            "ellipse" => Some(Self::ellipse(1.0, 0.5)),
            "segment" => Some(Self::segment(1.0)),
            _ => None,
        }
    }

    /// Largest central-difference error of the velocity sampler over `n` points.
    pub fn derivative_error(&self, n: usize) -> f64 {
        let h = 1e-5;
        (0..n)
            .map(|i| {
                let t = self.t0 + (self.t1 - self.t0) * (i as f64 + 0.5) / n as f64;
                let (xp, yp) = (self.point)(t + h);
                let (xm, ym) = (self.point)(t - h);
                let (vx, vy) = (self.velocity)(t);
                ((xp - xm) / (2.0 * h) - vx).abs().max(((yp - ym) / (2.0 * h) - vy).abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn length(&self, t0: f64, t1: f64) -> Result<f64, LiftError> {
        simpson(
            &|t| {
                let (vx, vy) = (self.velocity)(t);
                Ok(vx.hypot(vy))
            },
            t0,
            t1,
            1e-10,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftSample {
    pub tau: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub l: f64,
}

/// Where the lift starts and which way along the profile it runs.
#[derive(Debug, Clone, Copy)]
pub struct LiftStart {
    pub z0: f64,
    /// `+1` moves with increasing `a`, `-1` against it.
    pub direction: f64,
}

impl LiftStart {
    /// The base point, except for the exponential profile, which starts at
    /// the edge `|λ₂ z| = 1` and runs down toward the plane.
    pub fn default_for(shape: &HShape) -> LiftStart {
        match *shape {
            HShape::Exp { lambda1, lambda2 } => LiftStart {
                z0: lambda1.signum() / lambda2.abs(),
                direction: -lambda2.signum(),
            },
            _ => LiftStart {
                z0: shape.h(shape.base()),
                direction: 1.0,
            },
        }
    }
}

/// Sample the lifted curve at `n` evenly spaced parameters.
pub fn lift_curve(plane: &PlaneCurve, shape: &HShape, start: LiftStart, n: usize) -> Result<Vec<LiftSample>, LiftError> {
    let taus: Vec<f64> = (0..n)
        .map(|i| {
            if n <= 1 {
                plane.t0
            } else {
                plane.t0 + (plane.t1 - plane.t0) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let pieces = taus
        .windows(2)
        .map(|w| plane.length(w[0], w[1]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut ls = Vec::with_capacity(n);
    let mut acc = 0.0;
    for i in 0..taus.len() {
        if i > 0 {
            acc += pieces[i - 1];
        }
        ls.push(acc);
    }
    let rel = match shape.relation() {
        Ok(r) => Some(r),
        Err(LiftError::NoRelation(_)) => None,
        Err(e) => return Err(e),
    };
    let g0 = match &rel {
        Some(r) => r.g(start.z0)?,
        None => 0.0,
    };
    let a0 = match shape {
        HShape::Power { lambda1, lambda2 } => (start.z0 / lambda1).powf(1.0 / lambda2),
        _ => shape.base(),
    };
    taus.par_iter()
        .zip(ls.par_iter())
        .map(|(&tau, &l)| {
            let (x, y) = (plane.point)(tau);
            let z = match (&rel, shape) {
                (Some(r), _) => r.solve(g0 + start.direction * r.sign * r.c * l)?,
                (None, HShape::Const { .. }) => start.z0,
                (None, _) => shape.h(a_at_length(shape, a0, start.direction * l)?),
            };
            Ok(LiftSample { tau, x, y, z, l })
        })
        .collect()
}

/// Solve `l(a) - l(a0) = target` for `a` by bisection over the domain.
fn a_at_length(shape: &HShape, a0: f64, target: f64) -> Result<f64, LiftError> {
    let (dlo, dhi) = shape.a_domain();
    let (mut lo, mut hi) = if target >= 0.0 { (a0, dhi) } else { (dlo, a0) };
    if hi.is_infinite() {
        hi = lo + 1.0;
        while arclength_between(shape, a0, hi)? < target {
            hi = a0 + 2.0 * (hi - a0);
        }
    }
    if lo.is_infinite() {
        lo = hi - 1.0;
        while arclength_between(shape, a0, lo)? > target {
            lo = a0 - 2.0 * (a0 - lo);
        }
    }
    let (llo, lhi) = (arclength_between(shape, a0, lo)?, arclength_between(shape, a0, hi)?);
    if target < llo - 1e-12 || target > lhi + 1e-12 {
        return Err(LiftError::Unbracketed { target, lo: llo, hi: lhi });
    }
    while hi - lo > 1e-10 * (1.0 + lo.abs().max(hi.abs())) {
        let m = 0.5 * (lo + hi);
        if arclength_between(shape, a0, m)? < target {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Write samples as `tau,x,y,z,l` CSV.
pub fn write_csv<W: Write>(out: W, samples: &[LiftSample]) -> Result<(), LiftError> {
    let mut w = csv::Writer::from_writer(out);
    for s in samples {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_identity() {
        let x = 0.5;
        let v = hyp2f1(1.0, 1.0, 2.0, x).unwrap();
        assert!((v - (-(1.0 - x as f64).ln() / x)).abs() < 1e-12);
        assert_eq!(hyp2f1(0.3, 0.7, 1.1, 0.0).unwrap(), 1.0);
        assert!(hyp2f1(1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn log_length_closed_form() {
        let l = arclength_l_of_a(&HShape::Log, 2.0).unwrap();
        assert!((l - (3f64.sqrt() - 3f64.sqrt().atan())).abs() < 1e-9);
    }

    #[test]
    fn steep_profile_rejected() {
        let s = HShape::Linear { lambda: 2.0 };
        assert!(matches!(arclength_l_of_a(&s, 1.0), Err(LiftError::Slope { .. })));
    }
}

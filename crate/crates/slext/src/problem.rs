//! Problem setup: coefficients, intervals and endpoint seeds.
//!
//! A `Problem` is the triple (p, q, r) on an interval (a, b) together with a
//! principal/nonprincipal solution pair of `tau u = 0` at each endpoint,
//! normalized so that `W(nonprincipal, principal) = 1` with
//! `W(f, g) = f g^[1] - f^[1] g`. Seeds are closed-form and take the
//! *distance to their endpoint* as argument, which keeps them accurate at
//! distances far below floating-point resolution of `a + t`.
//!
//! Sign conventions. At the left endpoint the principal seed grows into the
//! interval (`u_a = x - a` for the free problem). At the right endpoint the
//! principal seed is oriented so that regular problems recover classical
//! values: `g~(b) = g(b)` and `g~'(b) = (p g')(b)`, which forces
//! `u_b = x - b` rather than `b - x`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Endpoint {
    Left,
    Right,
}

impl Endpoint {
    pub fn name(self) -> &'static str {
        match self {
            Endpoint::Left => "left",
            Endpoint::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EndpointKind {
    Regular,
    /// Singular but in the limit-circle, nonoscillatory regime.
    LimitCircleNonOsc,
    Unknown,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Interval> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::BadInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

/// A scalar coefficient function of x.
#[derive(Clone)]
pub struct Coeff(Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl Coeff {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Coeff {
        Coeff(Arc::new(f))
    }

    pub fn constant(c: f64) -> Coeff {
        Coeff(Arc::new(move |_| c))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coeff(..)")
    }
}

#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub p: Coeff,
    pub q: Coeff,
    pub r: Coeff,
}

/// Closed-form solution germ near one endpoint. The argument is the distance
/// `t > 0` to that endpoint; the return value is `(y, p y')` with the
/// derivative taken in the x direction regardless of which endpoint.
#[derive(Clone)]
pub struct SeedFn(Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>);

impl SeedFn {
    pub fn new(f: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static) -> SeedFn {
        SeedFn(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, t: f64) -> (f64, f64) {
        (self.0)(t)
    }

    /// Identity of the underlying closure, not value equality.
    pub fn same_fn(&self, other: &SeedFn) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl fmt::Debug for SeedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeedFn(..)")
    }
}

#[derive(Debug, Clone)]
pub struct EndpointSeed {
    pub kind: EndpointKind,
    pub principal: SeedFn,
    pub nonprincipal: SeedFn,
    /// Distance from the endpoint at which numerical integration hands over
    /// to the closed form. Zero for regular endpoints.
    pub offset: f64,
    /// Distance up to which the seed pair solves `tau y = 0` exactly, not
    /// just asymptotically. Solution coefficients against the seed basis are
    /// then constant on `(0, germ_width)` and may be read off far from the
    /// endpoint, where the basis is well conditioned. Zero disables this.
    pub germ_width: f64,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub label: String,
    pub interval: Interval,
    pub coeffs: CoefficientSet,
    pub seed_a: EndpointSeed,
    pub seed_b: EndpointSeed,
    /// Interior points where a coefficient loses smoothness; integration
    /// steps never straddle these.
    pub breakpoints: Vec<f64>,
}

impl Problem {
    pub fn a(&self) -> f64 {
        self.interval.a
    }

    pub fn b(&self) -> f64 {
        self.interval.b
    }

    pub fn len(&self) -> f64 {
        self.interval.len()
    }

    #[inline]
    pub fn p(&self, x: f64) -> f64 {
        self.coeffs.p.eval(x)
    }

    #[inline]
    pub fn q(&self, x: f64) -> f64 {
        self.coeffs.q.eval(x)
    }

    #[inline]
    pub fn r(&self, x: f64) -> f64 {
        self.coeffs.r.eval(x)
    }

    pub fn seed(&self, end: Endpoint) -> &EndpointSeed {
        match end {
            Endpoint::Left => &self.seed_a,
            Endpoint::Right => &self.seed_b,
        }
    }

    /// Endpoint coordinate of the given side.
    pub fn end_x(&self, end: Endpoint) -> f64 {
        match end {
            Endpoint::Left => self.interval.a,
            Endpoint::Right => self.interval.b,
        }
    }

    /// First x at which the integrator runs, offset inward on singular sides.
    pub fn inner_x(&self, end: Endpoint) -> f64 {
        match end {
            Endpoint::Left => self.interval.a + self.seed_a.offset,
            Endpoint::Right => self.interval.b - self.seed_b.offset,
        }
    }
}

/// Validates coefficients and seed normalization and assembles a `Problem`.
///
/// `p` and `r` must be positive on the interior; the seed pair at each
/// endpoint must satisfy `|W(nonprincipal, principal) - 1| <= wronskian_tol`
/// at the seed offset (at the endpoint itself when it is regular).
pub fn make_problem(
    label: impl Into<String>,
    interval: Interval,
    coeffs: CoefficientSet,
    seed_a: EndpointSeed,
    seed_b: EndpointSeed,
) -> Result<Problem> {
    let problem = Problem {
        label: label.into(),
        interval,
        coeffs,
        seed_a,
        seed_b,
        breakpoints: Vec::new(),
    };
    validate(&problem)?;
    Ok(problem)
}

fn seed_wronskian(seed: &EndpointSeed, t: f64) -> f64 {
    let (u, u1) = seed.principal.eval(t);
    let (v, v1) = seed.nonprincipal.eval(t);
    v * u1 - v1 * u
}

fn validate(problem: &Problem) -> Result<()> {
    let a = problem.a();
    let len = problem.len();
    for k in 1..=9 {
        let x = a + len * (k as f64) / 10.0;
        for (name, c) in [("p", &problem.coeffs.p), ("r", &problem.coeffs.r)] {
            let v = c.eval(x);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveCoefficient { name, value: v, x });
            }
        }
        if !problem.q(x).is_finite() {
            return Err(Error::NonPositiveCoefficient { name: "q", value: problem.q(x), x });
        }
    }
    let tol = 1e-6;
    for (side, seed) in [("left", &problem.seed_a), ("right", &problem.seed_b)] {
        let probes: &[f64] = if seed.kind == EndpointKind::Regular {
            &[0.0]
        } else {
            &[1.0, 0.25, 0.0625]
        };
        for &s in probes {
            let t = if seed.kind == EndpointKind::Regular { 0.0 } else { seed.offset * s };
            let defect = (seed_wronskian(seed, t) - 1.0).abs();
            if !(defect <= tol) {
                return Err(Error::WronskianNotNormalized { side, defect });
            }
        }
        // A declared germ width promises the closed forms stay exact
        // solutions out to that distance; their Wronskian must then still be
        // normalized there, not just near the endpoint.
        if seed.germ_width > 0.0 {
            for s in [1.0, 0.37] {
                let defect = (seed_wronskian(seed, seed.germ_width * s) - 1.0).abs();
                if !(defect <= tol) {
                    return Err(Error::WronskianNotNormalized { side, defect });
                }
            }
        }
        if seed.kind != EndpointKind::Regular && !(seed.offset > 0.0) {
            return Err(Error::ProblemFile(format!(
                "singular {side} endpoint needs a positive seed offset"
            )));
        }
    }
    Ok(())
}

// Handover distance as a fraction of the interval length. Deep enough that
// the O(z^2 t^4) residual of z-corrected germ seeding stays below 1e-9 for
// |z| up to a few hundred, shallow enough that the integrator never sees
// extreme state scales (the nonprincipal germ grows like t^{gamma - 1/2}).
const SEED_OFFSET_FRACTION: f64 = 1e-4;

fn bessel_left_seeds(gamma: f64) -> (SeedFn, SeedFn) {
    if gamma == 0.0 {
        let principal = SeedFn::new(|t: f64| (t.sqrt(), 0.5 / t.sqrt()));
        let nonprincipal = SeedFn::new(|t: f64| {
            let l = -t.ln();
            (t.sqrt() * l, 0.5 / t.sqrt() * l - 1.0 / t.sqrt())
        });
        (principal, nonprincipal)
    } else {
        let g = gamma;
        let principal = SeedFn::new(move |t: f64| {
            (t.powf(0.5 + g), (0.5 + g) * t.powf(g - 0.5))
        });
        let nonprincipal = SeedFn::new(move |t: f64| {
            let c = 1.0 / (2.0 * g);
            (c * t.powf(0.5 - g), c * (0.5 - g) * t.powf(-0.5 - g))
        });
        (principal, nonprincipal)
    }
}

fn bessel_right_seeds(gamma: f64) -> (SeedFn, SeedFn) {
    // Mirror image of the left seeds with the principal sign flipped, which
    // keeps W(nonprincipal, principal) = +1 in the x orientation.
    if gamma == 0.0 {
        let principal = SeedFn::new(|t: f64| (-t.sqrt(), 0.5 / t.sqrt()));
        let nonprincipal = SeedFn::new(|t: f64| {
            let l = -t.ln();
            (t.sqrt() * l, -(0.5 / t.sqrt() * l) + 1.0 / t.sqrt())
        });
        (principal, nonprincipal)
    } else {
        let g = gamma;
        let principal = SeedFn::new(move |t: f64| {
            (-t.powf(0.5 + g), (0.5 + g) * t.powf(g - 0.5))
        });
        let nonprincipal = SeedFn::new(move |t: f64| {
            let c = 1.0 / (2.0 * g);
            (c * t.powf(0.5 - g), -c * (0.5 - g) * t.powf(-0.5 - g))
        });
        (principal, nonprincipal)
    }
}

/// Classical seeds at a regular endpoint of a constant-coefficient problem,
/// exact for all t. `sign` is +1 at the left endpoint, -1 at the right.
pub(crate) fn regular_seeds(p0: f64, q0: f64, sign: f64) -> (SeedFn, SeedFn) {
    let k = q0 / p0;
    let principal = SeedFn::new(move |t: f64| {
        let s = sign * t;
        if k == 0.0 {
            (s / p0, 1.0)
        } else if k > 0.0 {
            let w = k.sqrt();
            ((w * s).sinh() / (p0 * w), (w * s).cosh())
        } else {
            let w = (-k).sqrt();
            ((w * s).sin() / (p0 * w), (w * s).cos())
        }
    });
    let nonprincipal = SeedFn::new(move |t: f64| {
        let s = sign * t;
        if k == 0.0 {
            (1.0, 0.0)
        } else if k > 0.0 {
            let w = k.sqrt();
            ((w * s).cosh(), p0 * w * (w * s).sinh())
        } else {
            let w = (-k).sqrt();
            ((w * s).cos(), -p0 * w * (w * s).sin())
        }
    });
    (principal, nonprincipal)
}

/// `-(p0 u')' + q0 u = lambda r0 u` on the given interval, both endpoints
/// regular with classical boundary values.
pub fn builtin_regular(interval: Interval, p0: f64, q0: f64, r0: f64) -> Result<Problem> {
    if !(p0 > 0.0 && r0 > 0.0) {
        return Err(Error::NonPositiveCoefficient {
            name: if p0 > 0.0 { "r" } else { "p" },
            value: if p0 > 0.0 { r0 } else { p0 },
            x: interval.a,
        });
    }
    let (pa, na) = regular_seeds(p0, q0, 1.0);
    let (pb, nb) = regular_seeds(p0, q0, -1.0);
    make_problem(
        format!("regular({p0},{q0},{r0}) on ({},{})", interval.a, interval.b),
        interval,
        CoefficientSet {
            p: Coeff::constant(p0),
            q: Coeff::constant(q0),
            r: Coeff::constant(r0),
        },
        EndpointSeed {
            kind: EndpointKind::Regular,
            principal: pa,
            nonprincipal: na,
            offset: 0.0,
            germ_width: interval.len(),
        },
        EndpointSeed {
            kind: EndpointKind::Regular,
            principal: pb,
            nonprincipal: nb,
            offset: 0.0,
            germ_width: interval.len(),
        },
    )
}

/// Bessel-type problem `q(x) = (gamma^2 - 1/4) / (x - a)^2`, singular at the
/// left endpoint for gamma != 1/2, regular at the right endpoint.
pub fn builtin_bessel(gamma: f64, a: f64, d: f64) -> Result<Problem> {
    check_gamma(gamma)?;
    let interval = Interval::new(a, d)?;
    if gamma == 0.5 {
        let mut p = builtin_regular(interval, 1.0, 0.0, 1.0)?;
        p.label = format!("bessel(gamma=0.5) on ({a},{d})");
        return Ok(p);
    }
    let c = gamma * gamma - 0.25;
    let q = Coeff::new(move |x: f64| c / ((x - a) * (x - a)));
    let (pa, na) = bessel_left_seeds(gamma);
    let (pb, nb) = regular_seeds(1.0, 0.0, -1.0);
    make_problem(
        format!("bessel(gamma={gamma}) on ({a},{d})"),
        interval,
        CoefficientSet { p: Coeff::constant(1.0), q, r: Coeff::constant(1.0) },
        EndpointSeed {
            kind: EndpointKind::LimitCircleNonOsc,
            principal: pa,
            nonprincipal: na,
            offset: SEED_OFFSET_FRACTION * (d - a),
            germ_width: d - a,
        },
        EndpointSeed {
            kind: EndpointKind::Regular,
            principal: pb,
            nonprincipal: nb,
            offset: 0.0,
            germ_width: 0.0,
        },
    )
}

/// Bessel-type potential against the distance to *both* endpoints,
/// `q(x) = (gamma^2 - 1/4) / min(x-a, b-x)^2`. Reflection symmetric about
/// the midpoint; both endpoints singular for gamma != 1/2.
pub fn builtin_symmetric_bessel(gamma: f64, a: f64, b: f64) -> Result<Problem> {
    check_gamma(gamma)?;
    let interval = Interval::new(a, b)?;
    if gamma == 0.5 {
        let mut p = builtin_regular(interval, 1.0, 0.0, 1.0)?;
        p.label = format!("symmetric_bessel(gamma=0.5) on ({a},{b})");
        return Ok(p);
    }
    let c = gamma * gamma - 0.25;
    let q = Coeff::new(move |x: f64| {
        let d = (x - a).min(b - x);
        c / (d * d)
    });
    let (pa, na) = bessel_left_seeds(gamma);
    let (pb, nb) = bessel_right_seeds(gamma);
    let offset = SEED_OFFSET_FRACTION * (b - a);
    let mut problem = make_problem(
        format!("symmetric_bessel(gamma={gamma}) on ({a},{b})"),
        interval,
        CoefficientSet { p: Coeff::constant(1.0), q, r: Coeff::constant(1.0) },
        EndpointSeed {
            kind: EndpointKind::LimitCircleNonOsc,
            principal: pa,
            nonprincipal: na,
            offset,
            germ_width: 0.5 * (b - a),
        },
        EndpointSeed {
            kind: EndpointKind::LimitCircleNonOsc,
            principal: pb,
            nonprincipal: nb,
            offset,
            germ_width: 0.5 * (b - a),
        },
    )?;
    problem.breakpoints = vec![interval.midpoint()];
    Ok(problem)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(())
}

/// Probe-based endpoint diagnosis. Regular means the coefficients extend
/// continuously with p, r > 0. Limit circle (nonoscillatory) is accepted
/// when both seeds are square integrable against r near the endpoint and
/// neither changes sign there. Everything else is `Unknown`.
pub fn classify_endpoint(problem: &Problem, end: Endpoint) -> EndpointKind {
    let len = problem.len();
    let x_end = problem.end_x(end);
    let dir = match end {
        Endpoint::Left => 1.0,
        Endpoint::Right => -1.0,
    };

    // Continuity probe for the coefficients.
    let mut regular = true;
    let mut prev: Option<[f64; 3]> = None;
    for k in 2..=8 {
        let t = len * 10f64.powi(-k);
        let x = x_end + dir * t;
        let vals = [problem.p(x), problem.q(x), problem.r(x)];
        if vals.iter().any(|v| !v.is_finite() || v.abs() > 1e8) || vals[0] <= 0.0 || vals[2] <= 0.0
        {
            regular = false;
            break;
        }
        if let Some(pv) = prev {
            let drift = (0..3).map(|i| (vals[i] - pv[i]).abs()).fold(0.0, f64::max);
            let scale = 1.0 + vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if k == 8 && drift > 1e-4 * scale {
                regular = false;
            }
        }
        prev = Some(vals);
    }
    if regular {
        return EndpointKind::Regular;
    }

    // Square integrability of both seeds against r, by geometric tail sums,
    // plus a sign-change scan.
    let seed = problem.seed(end);
    let w0 = if seed.offset > 0.0 { seed.offset } else { 1e-6 * len };
    for f in [&seed.principal, &seed.nonprincipal] {
        let mut upper = w0;
        let mut last = f64::INFINITY;
        let mut decays = true;
        let mut sign: Option<bool> = None;
        for _ in 0..60 {
            let lower = 0.5 * upper;
            // midpoint box sum is enough to detect divergence
            let tm = 0.5 * (lower + upper);
            let (y, _) = f.eval(tm);
            if let Some(s) = sign {
                if s != (y > 0.0) && y != 0.0 {
                    return EndpointKind::Unknown;
                }
            } else if y != 0.0 {
                sign = Some(y > 0.0);
            }
            let r = problem.r(x_end + dir * tm);
            let piece = y * y * r * (upper - lower);
            if piece > last * 0.999 && piece > 1e-14 {
                decays = false;
                break;
            }
            last = piece;
            upper = lower;
        }
        if !decays {
            return EndpointKind::Unknown;
        }
    }
    EndpointKind::LimitCircleNonOsc
}

#[derive(Debug, Deserialize)]
struct ProblemFileDe {
    #[serde(default)]
    label: Option<String>,
    family: String,
    interval: Interval,
    #[serde(default)]
    gamma: Option<f64>,
    #[serde(default)]
    p0: Option<f64>,
    #[serde(default)]
    q0: Option<f64>,
    #[serde(default)]
    r0: Option<f64>,
    #[serde(default)]
    coefficients: Option<CoeffStrings>,
}

#[derive(Debug, Deserialize)]
struct CoeffStrings {
    p: String,
    q: String,
    r: String,
}

/// Load a problem description from JSON.
///
/// Families: `bessel`, `symmetric_bessel` (fields `gamma`, `interval`),
/// `regular` (`p0`, `q0`, `r0`), and `custom` with coefficient expressions
/// in x. Custom coefficients must extend continuously to both endpoints;
/// singular custom problems would need closed-form seeds that a text file
/// cannot carry.
pub fn problem_from_json(src: &str) -> Result<Problem> {
    let de: ProblemFileDe =
        serde_json::from_str(src).map_err(|e| Error::ProblemFile(e.to_string()))?;
    let interval = Interval::new(de.interval.a, de.interval.b)?;
    let mut problem = match de.family.as_str() {
        "bessel" => {
            let gamma = de
                .gamma
                .ok_or_else(|| Error::ProblemFile("family 'bessel' needs gamma".into()))?;
            builtin_bessel(gamma, interval.a, interval.b)?
        }
        "symmetric_bessel" => {
            let gamma = de.gamma.ok_or_else(|| {
                Error::ProblemFile("family 'symmetric_bessel' needs gamma".into())
            })?;
            builtin_symmetric_bessel(gamma, interval.a, interval.b)?
        }
        "regular" => builtin_regular(
            interval,
            de.p0.unwrap_or(1.0),
            de.q0.unwrap_or(0.0),
            de.r0.unwrap_or(1.0),
        )?,
        "custom" => {
            let cs = de.coefficients.ok_or_else(|| {
                Error::ProblemFile("family 'custom' needs a coefficients block".into())
            })?;
            custom_problem(interval, &cs)?
        }
        other => {
            return Err(Error::ProblemFile(format!("unknown family '{other}'")));
        }
    };
    if let Some(label) = de.label {
        problem.label = label;
    }
    Ok(problem)
}

pub fn problem_from_path(path: impl AsRef<Path>) -> Result<Problem> {
    let src = std::fs::read_to_string(path)?;
    problem_from_json(&src)
}

fn custom_problem(interval: Interval, cs: &CoeffStrings) -> Result<Problem> {
    let p = Expr::parse(&cs.p)?;
    let q = Expr::parse(&cs.q)?;
    let r = Expr::parse(&cs.r)?;
    let coeffs = CoefficientSet {
        p: Coeff::new(move |x| p.eval(x)),
        q: Coeff::new(move |x| q.eval(x)),
        r: Coeff::new(move |x| r.eval(x)),
    };

    // Endpoint values by extrapolating the probe sequence; custom problems
    // must be regular at both ends.
    let len = interval.len();
    let mut seeds = Vec::new();
    for (x_end, dir, side) in [(interval.a, 1.0, "left"), (interval.b, -1.0, "right")] {
        let t = len * 1e-9;
        let x = x_end + dir * t;
        let (pv, qv, rv) = (coeffs.p.eval(x), coeffs.q.eval(x), coeffs.r.eval(x));
        let x2 = x_end + dir * t * 10.0;
        let drift = (coeffs.p.eval(x2) - pv).abs().max((coeffs.q.eval(x2) - qv).abs());
        if !(pv.is_finite() && qv.is_finite() && rv.is_finite())
            || pv <= 0.0
            || rv <= 0.0
            || drift > 1e-3 * (1.0 + pv.abs() + qv.abs())
        {
            return Err(Error::ProblemFile(format!(
                "custom coefficients do not extend regularly to the {side} endpoint"
            )));
        }
        let (principal, nonprincipal) = regular_seeds(pv, qv, dir);
        seeds.push(EndpointSeed {
            kind: EndpointKind::Regular,
            principal,
            nonprincipal,
            offset: 0.0,
            germ_width: 0.0,
        });
    }
    let seed_b = seeds.pop().expect("two seeds");
    let seed_a = seeds.pop().expect("two seeds");
    make_problem(
        format!("custom on ({},{})", interval.a, interval.b),
        interval,
        coeffs,
        seed_a,
        seed_b,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn free_problem_seed_values() {
        let p = builtin_regular(Interval::new(0.0, 1.0).unwrap(), 1.0, 0.0, 1.0).unwrap();
        let (u, u1) = p.seed_a.principal.eval(0.3);
        assert_relative_eq!(u, 0.3, max_relative = 1e-15);
        assert_relative_eq!(u1, 1.0, max_relative = 1e-15);
        let (v, v1) = p.seed_a.nonprincipal.eval(0.3);
        assert_eq!((v, v1), (1.0, 0.0));
        // principal at the right endpoint is x - b
        let (ub, ub1) = p.seed_b.principal.eval(0.4);
        assert_relative_eq!(ub, -0.4, max_relative = 1e-15);
        assert_relative_eq!(ub1, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn bessel_builtin_matches_closed_forms() {
        let p = builtin_bessel(0.3, 0.0, 1.0).unwrap();
        let (u, _) = p.seed_a.principal.eval(0.7);
        assert_relative_eq!(u, 0.7f64.powf(0.8), max_relative = 1e-12);
        let (v, _) = p.seed_a.nonprincipal.eval(0.5);
        assert_relative_eq!(v, 0.5f64.powf(0.2) / 0.6, max_relative = 1e-12);
        assert_relative_eq!(p.q(0.5), (0.09 - 0.25) / 0.25, max_relative = 1e-12);
    }

    #[test]
    fn gamma_half_is_the_free_problem() {
        let p = builtin_bessel(0.5, 0.0, 2.0).unwrap();
        assert_eq!(p.q(0.3), 0.0);
        assert_eq!(p.seed_a.kind, EndpointKind::Regular);
        let (u, u1) = p.seed_a.principal.eval(1.3);
        assert_relative_eq!(u, 1.3, max_relative = 1e-15);
        assert_relative_eq!(u1, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn gamma_zero_seeds() {
        let p = builtin_bessel(0.0, 0.0, 1.0).unwrap();
        let (u, u1) = p.seed_a.principal.eval(0.25);
        assert_relative_eq!(u, 0.5, max_relative = 1e-15);
        assert_relative_eq!(u1, 1.0, max_relative = 1e-15);
        let (v, _) = p.seed_a.nonprincipal.eval(0.25);
        assert_relative_eq!(v, 0.5 * (4.0f64).ln(), max_relative = 1e-14);
    }

    #[test]
    fn seed_wronskians_are_one() {
        for gamma in [0.0, 0.25, 0.3, 0.5, 0.7, 0.9] {
            let p = builtin_symmetric_bessel(gamma, 0.0, 2.0).unwrap();
            for seed in [&p.seed_a, &p.seed_b] {
                for t in [1e-9, 1e-6, 1e-3, 0.2] {
                    assert_relative_eq!(seed_wronskian(seed, t), 1.0, max_relative = 1e-11);
                }
            }
        }
    }

    #[test]
    fn symmetric_bessel_potential_is_mirrored() {
        let p = builtin_symmetric_bessel(0.3, -1.0, 3.0).unwrap();
        for t in [0.1, 0.5, 1.3, 1.9] {
            assert_relative_eq!(p.q(-1.0 + t), p.q(3.0 - t), max_relative = 1e-13);
        }
        assert_eq!(p.breakpoints, vec![1.0]);
    }

    #[test]
    fn classify_endpoints() {
        let b = builtin_bessel(0.3, 0.0, 1.0).unwrap();
        assert_eq!(classify_endpoint(&b, Endpoint::Left), EndpointKind::LimitCircleNonOsc);
        assert_eq!(classify_endpoint(&b, Endpoint::Right), EndpointKind::Regular);

        let r = builtin_regular(Interval::new(0.0, 1.0).unwrap(), 2.0, 1.0, 1.0).unwrap();
        assert_eq!(classify_endpoint(&r, Endpoint::Left), EndpointKind::Regular);
    }

    #[test]
    fn limit_point_seed_is_flagged_unknown() {
        // gamma = 1.5 is outside the limit-circle range; its would-be
        // nonprincipal solution fails square integrability.
        let interval = Interval::new(0.0, 1.0).unwrap();
        let q = Coeff::new(|x: f64| (1.5 * 1.5 - 0.25) / (x * x));
        let principal = SeedFn::new(|t: f64| (t.powf(2.0), 2.0 * t));
        let nonprincipal = SeedFn::new(|t: f64| (t.powf(-1.0) / 3.0, -t.powf(-2.0) / 3.0));
        let problem = make_problem(
            "forced gamma=1.5",
            interval,
            CoefficientSet { p: Coeff::constant(1.0), q, r: Coeff::constant(1.0) },
            EndpointSeed {
                kind: EndpointKind::LimitCircleNonOsc,
                principal,
                nonprincipal,
                offset: 1e-6,
                germ_width: 1.0,
            },
            {
                let (pb, nb) = regular_seeds(1.0, 0.0, -1.0);
                EndpointSeed {
                    kind: EndpointKind::Regular,
                    principal: pb,
                    nonprincipal: nb,
                    offset: 0.0,
                    germ_width: 0.0,
                }
            },
        )
        .unwrap();
        assert_eq!(classify_endpoint(&problem, Endpoint::Left), EndpointKind::Unknown);
    }

    #[test]
    fn wronskian_validation_rejects_bad_seeds() {
        let interval = Interval::new(0.0, 1.0).unwrap();
        let (pa, _) = regular_seeds(1.0, 0.0, 1.0);
        let bad = SeedFn::new(|_t| (2.0, 0.0)); // W = 2
        let (pb, nb) = regular_seeds(1.0, 0.0, -1.0);
        let err = make_problem(
            "bad",
            interval,
            CoefficientSet {
                p: Coeff::constant(1.0),
                q: Coeff::constant(0.0),
                r: Coeff::constant(1.0),
            },
            EndpointSeed {
                kind: EndpointKind::Regular,
                principal: pa,
                nonprincipal: bad,
                offset: 0.0,
                germ_width: 0.0,
            },
            EndpointSeed {
                kind: EndpointKind::Regular,
                principal: pb,
                nonprincipal: nb,
                offset: 0.0,
                germ_width: 0.0,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::WronskianNotNormalized { .. }));
    }

    #[test]
    fn negative_coefficient_rejected() {
        assert!(builtin_regular(Interval::new(0.0, 1.0).unwrap(), -1.0, 0.0, 1.0).is_err());
        assert!(builtin_bessel(1.2, 0.0, 1.0).is_err());
    }

    #[test]
    fn problem_file_roundtrip() {
        let src = r#"{
            "label": "demo",
            "family": "bessel",
            "interval": {"a": 0.0, "b": 2.0},
            "gamma": 0.3
        }"#;
        let p = problem_from_json(src).unwrap();
        assert_eq!(p.label, "demo");
        assert_relative_eq!(p.q(1.0), (0.09 - 0.25) / 1.0, max_relative = 1e-14);

        let custom = r#"{
            "family": "custom",
            "interval": {"a": 0.5, "b": 1.5},
            "coefficients": {"p": "1", "q": "x^2 - 1", "r": "1 + x/10"}
        }"#;
        let c = problem_from_json(custom).unwrap();
        assert_relative_eq!(c.q(1.0), 0.0, epsilon = 1e-14);
        assert_eq!(c.seed_a.kind, EndpointKind::Regular);

        let singular_custom = r#"{
            "family": "custom",
            "interval": {"a": 0.0, "b": 1.0},
            "coefficients": {"p": "1", "q": "1/x^2", "r": "1"}
        }"#;
        assert!(problem_from_json(singular_custom).is_err());

        assert!(problem_from_json("{not json").is_err());
        assert!(problem_from_json(r#"{"family":"nope","interval":{"a":0,"b":1}}"#).is_err());
    }
}

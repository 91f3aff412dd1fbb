//! Generalized boundary values and the scalar data that parameterizes all
//! nonnegative extensions.
//!
//! Solutions are represented by `Sol`: dense integrator output on the inner
//! span [a+delta, b-delta] plus a germ combination `c_p u + c_n uhat` on each
//! tail, where (u, uhat) are the endpoint seeds. For lambda = 0 the tail
//! representation is exact; for other spectral parameters it is the leading
//! order near the endpoint.
//!
//! Extraction never reads germ coefficients at the handover distance. The
//! germ basis degenerates like t^{-2 gamma} as t -> 0, so the subdominant
//! coefficient of a state known to relative accuracy eps carries an absolute
//! error ~ eps t^{-2 gamma}; at the handover that wipes out most of the
//! digits. Instead:
//!
//! * lambda = 0 (possibly forced): the germ coefficients are constant in t
//!   wherever the seeds solve `tau y = 0` exactly, so they are read at the
//!   matching distance `t_ex` (a fixed fraction of the interval, capped by
//!   the declared `germ_width`), where the basis is well conditioned. A
//!   forcing term w adds `W(f,g)' = -r f w` evolution integrals evaluated in
//!   closed form from the germ moments (`extract_z0`).
//! * lambda = z != 0: a fundamental pair carrying boundary values (1,0) and
//!   (0,1) is carried across the singular layer in the coefficient frame of
//!   the exact germs (variation of constants), where relative error control
//!   is meaningful, then handed to the raw integrator at the matching point;
//!   constant Wronskians against the pair recover the boundary values of any
//!   solution (`layer_pair_z`, `matched_bv`).
//!
//! At a regular endpoint the matching distance is zero and the values reduce
//! to the classical `g(d)` and `(p g')(d)`.

use std::sync::Arc;

use serde::Serialize;

use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::odecore::{
    adaptive_quad, integrate, integrate_tau, integrate_tau_forced, tail_quad, wronskian,
    DenseOutput, OdeOpts, QuadOpts, QuadResult,
};
use crate::problem::{Endpoint, Problem, SeedFn};

/// Germ pair (principal, nonprincipal) at distance t from an endpoint,
/// x-oriented quasi-derivatives.
pub fn germ(problem: &Problem, end: Endpoint, t: f64) -> ((f64, f64), (f64, f64)) {
    let seed = problem.seed(end);
    (seed.principal.eval(t), seed.nonprincipal.eval(t))
}

/// Coefficients (c_p, c_n) of `y = c_p u + c_n uhat` in the germ basis at
/// distance t, from Wronskians and W(uhat, u) = 1.
pub fn germ_coeffs(problem: &Problem, end: Endpoint, t: f64, y: (f64, f64)) -> (f64, f64) {
    let (u, n) = germ(problem, end, t);
    (wronskian(n, y), -wronskian(u, y))
}

/// Germ combination on one tail.
#[derive(Clone)]
pub struct Tail {
    pub end: Endpoint,
    x_end: f64,
    pub width: f64,
    pub c_p: f64,
    pub c_n: f64,
    principal: SeedFn,
    nonprincipal: SeedFn,
}

impl Tail {
    pub fn eval_dist(&self, t: f64) -> (f64, f64) {
        let (u, u1) = self.principal.eval(t);
        let (n, n1) = self.nonprincipal.eval(t);
        (self.c_p * u + self.c_n * n, self.c_p * u1 + self.c_n * n1)
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let t = match self.end {
            Endpoint::Left => x - self.x_end,
            Endpoint::Right => self.x_end - x,
        };
        self.eval_dist(t.max(0.0))
    }
}

/// A solution of `tau y = z y` over the whole interval.
#[derive(Clone)]
pub struct Sol {
    pub z: f64,
    pieces: Vec<(f64, Arc<DenseOutput<2>>)>,
    /// Pieces cover disjoint spans instead of forming a linear combination.
    piecewise: bool,
    pub tail_a: Tail,
    pub tail_b: Tail,
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
}

impl Sol {
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let slack = 1e-12 * (self.b - self.a);
        if x < self.a - slack || x > self.b + slack {
            return Err(Error::OutOfRange { x, lo: self.a, hi: self.b });
        }
        if x < self.lo && self.tail_a.width > 0.0 {
            return Ok(self.tail_a.eval(x));
        }
        if x > self.hi && self.tail_b.width > 0.0 {
            return Ok(self.tail_b.eval(x));
        }
        let x = x.clamp(self.lo, self.hi);
        if self.piecewise {
            for (c, d) in &self.pieces {
                let (lo, hi) = d.range();
                if x >= lo - slack && x <= hi + slack {
                    let y = d.eval(x)?;
                    return Ok((c * y[0], c * y[1]));
                }
            }
            Err(Error::OutOfRange { x, lo: self.lo, hi: self.hi })
        } else {
            let mut acc = (0.0, 0.0);
            for (c, d) in &self.pieces {
                let y = d.eval(x)?;
                acc.0 += c * y[0];
                acc.1 += c * y[1];
            }
            Ok(acc)
        }
    }

    pub fn tail(&self, end: Endpoint) -> &Tail {
        match end {
            Endpoint::Left => &self.tail_a,
            Endpoint::Right => &self.tail_b,
        }
    }

    /// Linear combination of two solutions with equal z over one problem.
    pub fn combine(c1: f64, s1: &Sol, c2: f64, s2: &Sol) -> Sol {
        assert_eq!(s1.z, s2.z, "combining solutions of different z");
        assert!(!s1.piecewise && !s2.piecewise);
        // tails are merged coefficientwise, which needs a shared handover
        debug_assert!((s1.lo - s2.lo).abs() <= 1e-9 * (s1.b - s1.a));
        debug_assert!((s1.hi - s2.hi).abs() <= 1e-9 * (s1.b - s1.a));
        let mut pieces = Vec::new();
        for (c, d) in &s1.pieces {
            pieces.push((c1 * c, d.clone()));
        }
        for (c, d) in &s2.pieces {
            pieces.push((c2 * c, d.clone()));
        }
        let tail = |t1: &Tail, t2: &Tail| Tail {
            c_p: c1 * t1.c_p + c2 * t2.c_p,
            c_n: c1 * t1.c_n + c2 * t2.c_n,
            ..t1.clone()
        };
        Sol {
            z: s1.z,
            pieces,
            piecewise: false,
            tail_a: tail(&s1.tail_a, &s2.tail_a),
            tail_b: tail(&s1.tail_b, &s2.tail_b),
            lo: s1.lo.max(s2.lo),
            hi: s1.hi.min(s2.hi),
            a: s1.a,
            b: s1.b,
        }
    }
}

/// Wronskian of two solutions at x. Constant in x when the z's agree.
pub fn wronskian_of(f: &Sol, g: &Sol, x: f64) -> Result<f64> {
    Ok(wronskian(f.eval(x)?, g.eval(x)?))
}

/// Per-endpoint extraction data. `width` is the seed handover distance and
/// `t_ex >= width` the matching distance where germ coefficients are read.
/// Moments `i_* = int_0^width r (germ)(germ) dt` feed the O(z) correction of
/// germ seeds; `m_*` are the same integrals out to `t_ex` and feed forcing
/// corrections at the matching point; `v_*` are the same integrals out to
/// the far smaller `w_voc`, where the variation-of-constants crossing of the
/// singular layer starts.
#[derive(Debug, Clone, Serialize)]
pub struct SideCtx {
    pub end: Endpoint,
    pub x_h: f64,
    pub width: f64,
    /// Matching abscissa, `t_ex` inward of the endpoint.
    pub x_m: f64,
    pub t_ex: f64,
    pub i_pp: f64,
    pub i_pn: f64,
    pub i_nn: f64,
    pub m_pp: f64,
    pub m_pn: f64,
    pub m_nn: f64,
    pub w_voc: f64,
    pub v_pp: f64,
    pub v_pn: f64,
    pub v_nn: f64,
}

fn moment_opts() -> QuadOpts {
    // moments are tiny in absolute terms; only relative accuracy matters
    QuadOpts { abs_tol: 1e-300, rel_tol: 1e-13, max_panels: 4096 }
}

/// Distance from `end` at which germ coefficients are matched: a quarter of
/// the interval, capped by the declared germ validity, never below the
/// handover. Zero at regular endpoints.
pub fn match_distance(problem: &Problem, end: Endpoint) -> f64 {
    let seed = problem.seed(end);
    if seed.offset == 0.0 {
        0.0
    } else {
        (0.25 * problem.len()).min(seed.germ_width).max(seed.offset)
    }
}

fn germ_moments(problem: &Problem, end: Endpoint, w: f64) -> Result<(f64, f64, f64)> {
    if w == 0.0 {
        return Ok((0.0, 0.0, 0.0));
    }
    let seed = problem.seed(end);
    let x_end = problem.end_x(end);
    let dir = if end == Endpoint::Left { 1.0 } else { -1.0 };
    let r = problem.coeffs.r.clone();
    let up = seed.principal.clone();
    let un = seed.nonprincipal.clone();
    let opts = moment_opts();
    let rx = move |t: f64| r.eval(x_end + dir * t);
    let r2 = rx.clone();
    let r3 = rx.clone();
    let (u1, n1) = (up.clone(), un.clone());
    let i_pp = tail_quad(&move |t: f64| rx(t) * up.eval(t).0 * up.eval(t).0, w, &opts)?.0;
    let i_pn = tail_quad(&move |t: f64| r2(t) * u1.eval(t).0 * un.eval(t).0, w, &opts)?.0;
    let n2 = n1.clone();
    let i_nn = tail_quad(&move |t: f64| r3(t) * n1.eval(t).0 * n2.eval(t).0, w, &opts)?.0;
    Ok((i_pp, i_pn, i_nn))
}

/// Variation-of-constants start width as a fraction of the handover width.
/// Deep enough that the dropped second-order z term of the start coefficients
/// is below 1e-13 for |z| in the scan range, shallow enough that the
/// integrable singularity of the coefficient equations stays mild.
const VOC_START_FRACTION: f64 = 1e-3;

pub fn side_ctx(problem: &Problem, end: Endpoint) -> Result<SideCtx> {
    let seed = problem.seed(end);
    let width = seed.offset;
    let x_end = problem.end_x(end);
    let dir = if end == Endpoint::Left { 1.0 } else { -1.0 };
    let t_ex = match_distance(problem, end);
    let (i_pp, i_pn, i_nn) = germ_moments(problem, end, width)?;
    let (m_pp, m_pn, m_nn) = if t_ex == width {
        (i_pp, i_pn, i_nn)
    } else {
        germ_moments(problem, end, t_ex)?
    };
    let w_voc = VOC_START_FRACTION * width;
    let (v_pp, v_pn, v_nn) = germ_moments(problem, end, w_voc)?;
    Ok(SideCtx {
        end,
        x_h: problem.inner_x(end),
        width,
        x_m: x_end + dir * t_ex,
        t_ex,
        i_pp,
        i_pn,
        i_nn,
        m_pp,
        m_pn,
        m_nn,
        w_voc,
        v_pp,
        v_pn,
        v_nn,
    })
}

/// Boundary pair (g~, g~') at `side.end` for g solving `tau g = w` at
/// lambda = 0. `y_m` is the state at the matching point `side.x_m`;
/// `jw = (int r u w dt, int r uhat w dt)` over [0, t_ex] in the distance
/// coordinate (zero for homogeneous g). The lambda = 0 germ coefficients are
/// constant in t, so reading them at `t_ex` is exact; the forcing only
/// enters through the Wronskian evolution `W(f,g)' = -r f w`.
pub fn extract_z0(
    problem: &Problem,
    side: &SideCtx,
    y_m: (f64, f64),
    jw: (f64, f64),
) -> (f64, f64) {
    let (c_p, c_n) = germ_coeffs(problem, side.end, side.t_ex, y_m);
    match side.end {
        Endpoint::Left => (c_n - jw.0, c_p + jw.1),
        Endpoint::Right => (c_n + jw.0, c_p - jw.1),
    }
}

/// Germ coefficients of a homogeneous lambda = 0 solution against
/// `problem`'s seeds. When those are the very germs the solution's tail was
/// built on, the stored coefficients are returned as is; otherwise they are
/// read from the state at the matching point, where the germ basis is well
/// conditioned regardless of which coefficient dominates near the endpoint.
fn coeffs_at_match(problem: &Problem, side: &SideCtx, g: &Sol) -> Result<(f64, f64)> {
    let seed = problem.seed(side.end);
    let tail = g.tail(side.end);
    if seed.principal.same_fn(&tail.principal) && seed.nonprincipal.same_fn(&tail.nonprincipal) {
        return Ok((tail.c_p, tail.c_n));
    }
    Ok(germ_coeffs(problem, side.end, side.t_ex, g.eval(side.x_m)?))
}

/// z-corrected germ seed states at the handover of `side`. `theta` carries
/// boundary values (1, 0) at the endpoint and `phi` carries (0, 1), both
/// exact to O(z^2 width^4): by variation of constants around the lambda = 0
/// germs, the first-order term is the germ pair weighted by the tail
/// moments. Returns (theta, phi, w_norm) with `w_norm = W(theta, phi)`, the
/// normalization matching Wronskians are divided by.
pub fn germ_pair_z(problem: &Problem, side: &SideCtx, z: f64) -> ((f64, f64), (f64, f64), f64) {
    let (u, n) = germ(problem, side.end, side.width);
    let s = if side.end == Endpoint::Left { z } else { -z };
    let phi = (
        u.0 + s * (n.0 * side.i_pp - u.0 * side.i_pn),
        u.1 + s * (n.1 * side.i_pp - u.1 * side.i_pn),
    );
    let theta = (
        n.0 + s * (n.0 * side.i_pn - u.0 * side.i_nn),
        n.1 + s * (n.1 * side.i_pn - u.1 * side.i_nn),
    );
    let w_norm = wronskian(theta, phi);
    (theta, phi, w_norm)
}

/// Fundamental pair with boundary values (1, 0) and (0, 1) at `side.end`,
/// carried to the matching point `side.x_m`: the two x-oriented states there
/// and their Wronskian `w = W(theta, phi)`.
///
/// For z = 0 and at regular endpoints the germ pair is exact at the matching
/// distance. Otherwise the pair crosses the singular layer in the
/// coefficient frame of the exact z = 0 germs: writing y = c_u u + c_n uhat
/// under the variation-of-constants constraint, `c_u' = -z r uhat y` and
/// `c_n' = z r u y` in x orientation. The coefficients are smooth and O(1),
/// so relative error control never touches the extreme state scales of the
/// raw frame. Start values at `w_voc` are the first-order moment
/// corrections; the dropped second-order term is negligible at that depth.
pub fn layer_pair_z(
    problem: &Problem,
    side: &SideCtx,
    z: f64,
    cfg: &NumericsConfig,
) -> Result<((f64, f64), (f64, f64), f64)> {
    if side.t_ex == 0.0 || z == 0.0 {
        let (u, n) = germ(problem, side.end, side.t_ex);
        return Ok((n, u, wronskian(n, u)));
    }
    let s = if side.end == Endpoint::Left { z } else { -z };
    // coefficient order: [c_u, c_n] for theta, then for phi
    let c0 = [
        -s * side.v_nn,
        1.0 + s * side.v_pn,
        1.0 - s * side.v_pn,
        s * side.v_pp,
    ];
    let seed = problem.seed(side.end);
    let up = seed.principal.clone();
    let un = seed.nonprincipal.clone();
    let r = problem.coeffs.r.clone();
    let x_end = problem.end_x(side.end);
    let dirx = if side.end == Endpoint::Left { 1.0 } else { -1.0 };
    let f = move |t: f64, c: &[f64; 4]| {
        let u0 = up.eval(t).0;
        let n0 = un.eval(t).0;
        let k = s * r.eval(x_end + dirx * t);
        let y_t = c[0] * u0 + c[1] * n0;
        let y_p = c[2] * u0 + c[3] * n0;
        [-k * n0 * y_t, k * u0 * y_t, -k * n0 * y_p, k * u0 * y_p]
    };
    let opts = OdeOpts {
        rtol: cfg.ode_rtol,
        atol: cfg.ode_atol,
        max_steps: 200_000,
        // the t frame sees no interior x breakpoints: t_ex stays within the
        // quarter of the interval nearest this endpoint
        breakpoints: Vec::new(),
        normalize: true,
    };
    let c = integrate(&f, side.w_voc, side.t_ex, c0, &opts)?.end_state();
    let (ug, ng) = germ(problem, side.end, side.t_ex);
    let theta = (c[0] * ug.0 + c[1] * ng.0, c[0] * ug.1 + c[1] * ng.1);
    let phi = (c[2] * ug.0 + c[3] * ng.0, c[2] * ug.1 + c[3] * ng.1);
    Ok((theta, phi, wronskian(theta, phi)))
}

/// Boundary pair at `side.end` for g solving `tau g = z g` by matching:
/// g = g~ theta + g~' phi exactly, and since theta, phi and g solve the same
/// equation the coefficient Wronskians are constant, so they are evaluated
/// at the matching point where all states are O(1).
pub fn matched_bv(
    problem: &Problem,
    side: &SideCtx,
    z: f64,
    g: &Sol,
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    let (y_t, y_p, w_norm) = layer_pair_z(problem, side, z, cfg)?;
    let y_g = g.eval(side.x_m)?;
    Ok((-wronskian(y_p, y_g) / w_norm, wronskian(y_t, y_g) / w_norm))
}

/// Settling diagnostic: the extraction Wronskians re-evaluated through the
/// tail representation at a geometric sequence of distances. For a correct
/// tail the sequence is constant; a drifting sequence signals that the dense
/// solution does not match its germ combination.
pub fn settling_defect(problem: &Problem, end: Endpoint, tail: &Tail) -> f64 {
    if tail.width == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    let base = -tail.c_n; // W(u, g) in exact arithmetic
    for k in 0..=8 {
        let t = tail.width * 0.5f64.powi(k);
        let (ug, _) = germ(problem, end, t);
        let w = wronskian(ug, tail.eval_dist(t));
        worst = worst.max((w - base).abs() / (1.0 + base.abs()));
    }
    worst
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryQuadruple {
    pub g_a: f64,
    pub gp_a: f64,
    pub g_b: f64,
    pub gp_b: f64,
}

/// Generalized boundary values of a solution at both endpoints:
/// `g~(a) = -W(u_a, g)(a)`, `g~'(a) = W(uhat_a, g)(a)`, mirrored at b.
pub fn generalized_boundary_values(
    problem: &Problem,
    g: &Sol,
    cfg: &NumericsConfig,
) -> Result<BoundaryQuadruple> {
    let sa = side_ctx(problem, Endpoint::Left)?;
    let sb = side_ctx(problem, Endpoint::Right)?;
    boundary_values_with(problem, g, &sa, &sb, cfg)
}

pub fn boundary_values_with(
    problem: &Problem,
    g: &Sol,
    sa: &SideCtx,
    sb: &SideCtx,
    cfg: &NumericsConfig,
) -> Result<BoundaryQuadruple> {
    for (end, tail) in [(Endpoint::Left, &g.tail_a), (Endpoint::Right, &g.tail_b)] {
        let defect = settling_defect(problem, end, tail);
        if defect > cfg.boundary_settle_tol {
            return Err(Error::ExtrapolationDivergence { side: end.name(), delta: defect });
        }
    }
    if g.z == 0.0 {
        let (ca_p, ca_n) = coeffs_at_match(problem, sa, g)?;
        let (cb_p, cb_n) = coeffs_at_match(problem, sb, g)?;
        Ok(BoundaryQuadruple { g_a: ca_n, gp_a: ca_p, g_b: cb_n, gp_b: cb_p })
    } else {
        let (g_a, gp_a) = matched_bv(problem, sa, g.z, g, cfg)?;
        let (g_b, gp_b) = matched_bv(problem, sb, g.z, g, cfg)?;
        Ok(BoundaryQuadruple { g_a, gp_a, g_b, gp_b })
    }
}

fn make_tail(problem: &Problem, end: Endpoint, width: f64) -> Tail {
    let seed = problem.seed(end);
    Tail {
        end,
        x_end: problem.end_x(end),
        width,
        c_p: 0.0,
        c_n: 0.0,
        principal: seed.principal.clone(),
        nonprincipal: seed.nonprincipal.clone(),
    }
}

/// Abscissa where integration runs start and stop at `end`. For lambda = 0
/// the germs are exact out to the matching distance, so the dense piece only
/// spans between the two matching points; states deep in the singular region
/// grow like t^(-1/2-gamma) and local integration errors committed there
/// persist after the decay, so they are never touched. Nonzero z runs extend
/// to the handover, where the z-corrected seeds live.
pub fn run_edge(problem: &Problem, end: Endpoint, z: f64) -> f64 {
    let t = if z == 0.0 { match_distance(problem, end) } else { problem.seed(end).offset };
    match end {
        Endpoint::Left => problem.a() + t,
        Endpoint::Right => problem.b() - t,
    }
}

/// Wrap dense pieces into a `Sol`. Tails pick up exactly where the dense
/// span ends, and both germ coefficients are read from the edge states; on a
/// seeded side the edge state is the untouched initial value, so the stored
/// coefficients reproduce the seed exactly.
fn finish_sol(
    problem: &Problem,
    z: f64,
    pieces: Vec<(f64, Arc<DenseOutput<2>>)>,
    piecewise: bool,
) -> Result<Sol> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, d) in &pieces {
        let (l, h) = d.range();
        lo = lo.min(l);
        hi = hi.max(h);
    }
    let width_a = (lo - problem.a()).max(0.0);
    let width_b = (problem.b() - hi).max(0.0);
    let mut sol = Sol {
        z,
        pieces,
        piecewise,
        tail_a: make_tail(problem, Endpoint::Left, width_a),
        tail_b: make_tail(problem, Endpoint::Right, width_b),
        lo,
        hi,
        a: problem.a(),
        b: problem.b(),
    };
    for (end, t_edge, x_edge) in
        [(Endpoint::Left, width_a, lo), (Endpoint::Right, width_b, hi)]
    {
        let (c_p, c_n) = germ_coeffs(problem, end, t_edge, sol.eval(x_edge)?);
        let tail = match end {
            Endpoint::Left => &mut sol.tail_a,
            Endpoint::Right => &mut sol.tail_b,
        };
        tail.c_p = c_p;
        tail.c_n = c_n;
    }
    Ok(sol)
}

/// Solution of `tau y = z y` fixed by a state at an interior point, extended
/// over the whole interval.
pub fn solution_from_state(
    problem: &Problem,
    z: f64,
    x_start: f64,
    state: (f64, f64),
    cfg: &NumericsConfig,
) -> Result<Sol> {
    let lo = run_edge(problem, Endpoint::Left, z);
    let hi = run_edge(problem, Endpoint::Right, z);
    let near = 1e-12 * problem.len();
    if (x_start - lo).abs() <= near {
        let d = integrate_tau(problem, z, lo, hi, state, cfg)?;
        finish_sol(problem, z, vec![(1.0, Arc::new(d))], false)
    } else if (x_start - hi).abs() <= near {
        let d = integrate_tau(problem, z, hi, lo, state, cfg)?;
        finish_sol(problem, z, vec![(1.0, Arc::new(d))], false)
    } else {
        let dl = integrate_tau(problem, z, x_start, lo, state, cfg)?;
        let dr = integrate_tau(problem, z, x_start, hi, state, cfg)?;
        finish_sol(problem, z, vec![(1.0, Arc::new(dl)), (1.0, Arc::new(dr))], true)
    }
}

/// Extend the principal seed at `end` across the interval. The germ is the
/// lambda = 0 germ; nonzero z is supported for interior continuation but the
/// tail representation is then leading-order only.
pub fn principal_solution(
    problem: &Problem,
    end: Endpoint,
    z: f64,
    cfg: &NumericsConfig,
) -> Result<Sol> {
    let seed = problem.seed(end);
    let t0 = if z == 0.0 { match_distance(problem, end) } else { seed.offset };
    solution_from_state(problem, z, run_edge(problem, end, z), seed.principal.eval(t0), cfg)
}

/// Extend the nonprincipal seed at `end` across the interval (z = 0).
pub fn nonprincipal_solution(problem: &Problem, end: Endpoint, cfg: &NumericsConfig) -> Result<Sol> {
    let seed = problem.seed(end);
    let t0 = match_distance(problem, end);
    solution_from_state(problem, 0.0, run_edge(problem, end, 0.0), seed.nonprincipal.eval(t0), cfg)
}

/// Build a nonprincipal partner of a nonvanishing principal solution u by
/// `uhat(x) = u(x) int_x^{c_ref} dt / (p u^2)`; satisfies W(uhat, u) = 1.
/// Works from either endpoint; u must not vanish between that endpoint's
/// handover and c_ref.
pub fn nonprincipal_from_principal(
    problem: &Problem,
    u: &Sol,
    end: Endpoint,
    c_ref: f64,
    cfg: &NumericsConfig,
) -> Result<Sol> {
    let x_h = problem.inner_x(end);
    let (lo, hi) = if x_h <= c_ref { (x_h, c_ref) } else { (c_ref, x_h) };
    // open at the endpoint side: principal solutions vanish there by design
    let mut prev: Option<f64> = None;
    for k in 1..=400 {
        let x = lo + (hi - lo) * k as f64 / 400.0;
        let v = u.eval(x)?.0;
        if v == 0.0 {
            return Err(Error::VanishingPrincipal);
        }
        if let Some(pv) = prev {
            if pv.signum() != v.signum() {
                return Err(Error::VanishingPrincipal);
            }
        }
        prev = Some(v);
    }
    let u_ref = u.eval(c_ref)?.0;
    solution_from_state(problem, u.z, c_ref, (0.0, -1.0 / u_ref), cfg)
}

/// `int_a^b f g r` with closed-form germ products over the singular tails.
pub fn l2r_inner(problem: &Problem, f: &Sol, g: &Sol, cfg: &NumericsConfig) -> Result<QuadResult> {
    let lo = f.lo.max(g.lo);
    let hi = f.hi.min(g.hi);
    let opts = QuadOpts {
        abs_tol: cfg.quad_abs_tol,
        rel_tol: cfg.quad_rel_tol,
        max_panels: 4096,
    };
    let mid = {
        let integrand = |x: f64| {
            let fv = f.eval(x).expect("within dense span").0;
            let gv = g.eval(x).expect("within dense span").0;
            fv * gv * problem.r(x)
        };
        adaptive_quad(&integrand, lo, hi, &problem.breakpoints, &opts)?
    };
    let mut value = mid.0;
    let mut err = mid.1;
    for end in [Endpoint::Left, Endpoint::Right] {
        let (ft, gt) = (f.tail(end), g.tail(end));
        if ft.width == 0.0 {
            continue;
        }
        let x_end = problem.end_x(end);
        let dir = if end == Endpoint::Left { 1.0 } else { -1.0 };
        let r = problem.coeffs.r.clone();
        let (ftc, gtc) = (ft.clone(), gt.clone());
        let tail_int = tail_quad(
            &move |t: f64| r.eval(x_end + dir * t) * ftc.eval_dist(t).0 * gtc.eval_dist(t).0,
            ft.width,
            &QuadOpts { abs_tol: 1e-300, rel_tol: 1e-12, max_panels: 4096 },
        )?;
        value += tail_int.0;
        err += tail_int.1;
    }
    Ok((value, err))
}

/// vhat_a = uhat_a - (<uhat_a, u_a> / ||u_a||^2) u_a, the nonprincipal
/// solution orthogonal to u_a.
pub fn distinguished_nonprincipal(problem: &Problem, cfg: &NumericsConfig) -> Result<Sol> {
    let u = principal_solution(problem, Endpoint::Left, 0.0, cfg)?;
    let uhat = nonprincipal_solution(problem, Endpoint::Left, cfg)?;
    let n_u = l2r_inner(problem, &u, &u, cfg)?.0;
    let c = l2r_inner(problem, &uhat, &u, cfg)?.0;
    let vhat = Sol::combine(1.0, &uhat, -c / n_u, &u);
    let ortho = l2r_inner(problem, &vhat, &u, cfg)?.0;
    let n_uhat = l2r_inner(problem, &uhat, &uhat, cfg)?.0;
    let bound = 1e-9 * (n_uhat.sqrt() * n_u.sqrt());
    if ortho.abs() > bound.max(1e-13) {
        return Err(Error::PathDisagreement(format!(
            "distinguished nonprincipal lost orthogonality: <vhat,u> = {ortho:.3e}"
        )));
    }
    Ok(vhat)
}

/// The seven scalars parameterizing all nonnegative extensions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DataPack {
    /// u~_a(0,b)
    pub u_b: f64,
    /// u~_a'(0,b)
    pub up_b: f64,
    /// v~_a(0,b) of the distinguished nonprincipal vhat_a
    pub v_b: f64,
    /// v~_a'(0,b)
    pub vp_b: f64,
    /// v~_a'(0,a) = -<uhat_a,u_a>/||u_a||^2
    pub vp_a: f64,
    pub norm2_u: f64,
    pub norm2_v: f64,
}

/// DataPack plus the solutions and side contexts it was assembled from, for
/// downstream reuse.
pub struct PackBundle {
    pub pack: DataPack,
    pub u: Sol,
    pub u_hat: Sol,
    pub v_hat: Sol,
    pub side_a: SideCtx,
    pub side_b: SideCtx,
    /// Boundary data of uhat_a at b, for the eta construction.
    pub uhat_b: f64,
    pub uhatp_b: f64,
    pub norm2_uhat: f64,
}

pub fn extension_bundle(problem: &Problem, cfg: &NumericsConfig) -> Result<PackBundle> {
    let cfg = &cfg.tightened();
    let side_a = side_ctx(problem, Endpoint::Left)?;
    let side_b = side_ctx(problem, Endpoint::Right)?;
    let u = principal_solution(problem, Endpoint::Left, 0.0, cfg)?;
    let uhat = nonprincipal_solution(problem, Endpoint::Left, cfg)?;
    let norm2_u = l2r_inner(problem, &u, &u, cfg)?.0;
    let c = l2r_inner(problem, &uhat, &u, cfg)?.0;
    let norm2_uhat = l2r_inner(problem, &uhat, &uhat, cfg)?.0;
    let vp_a = -c / norm2_u;
    let v_hat = Sol::combine(1.0, &uhat, vp_a, &u);
    let norm2_v = l2r_inner(problem, &v_hat, &v_hat, cfg)?.0;

    let (up_b, u_b) = coeffs_at_match(problem, &side_b, &u)?;
    let (vp_b, v_b) = coeffs_at_match(problem, &side_b, &v_hat)?;
    let (uhatp_b, uhat_b) = coeffs_at_match(problem, &side_b, &uhat)?;

    if u_b.abs() < 1e-12 {
        return Err(Error::ZeroFriedrichsEigenvalue);
    }
    let pack = DataPack { u_b, up_b, v_b, vp_b, vp_a, norm2_u, norm2_v };
    Ok(PackBundle {
        pack,
        u,
        u_hat: uhat,
        v_hat,
        side_a,
        side_b,
        uhat_b,
        uhatp_b,
        norm2_uhat,
    })
}

pub fn extension_data_pack(problem: &Problem, cfg: &NumericsConfig) -> Result<DataPack> {
    Ok(extension_bundle(problem, cfg)?.pack)
}

#[derive(Clone)]
pub struct EtaSolution {
    pub sol: Sol,
    pub norm2: f64,
    pub eta_a: f64,
    pub etap_a: f64,
}

/// eta_{beta'} = uhat_a - C u_a with C chosen so eta satisfies the separated
/// condition with angle beta' at b; eta~(a) = 1, eta~'(a) = -C.
pub fn eta_beta(problem: &Problem, beta_p: f64, cfg: &NumericsConfig) -> Result<EtaSolution> {
    let bundle = extension_bundle(problem, cfg)?;
    eta_from_bundle(&bundle, beta_p, problem, cfg)
}

pub fn eta_from_bundle(
    bundle: &PackBundle,
    beta_p: f64,
    problem: &Problem,
    cfg: &NumericsConfig,
) -> Result<EtaSolution> {
    check_angle("beta'", beta_p)?;
    let (cb, sb) = (beta_p.cos(), beta_p.sin());
    let denom = cb * bundle.pack.u_b - sb * bundle.pack.up_b;
    let scale = bundle.pack.u_b.abs().max(bundle.pack.up_b.abs());
    if denom.abs() < 1e-12 * scale.max(1.0) {
        return Err(Error::DenominatorZero("separated extension has 0 as an eigenvalue"));
    }
    let c = (cb * bundle.uhat_b - sb * bundle.uhatp_b) / denom;
    let sol = Sol::combine(1.0, &bundle.u_hat, -c, &bundle.u);
    let norm2 = l2r_inner(problem, &sol, &sol, cfg)?.0;
    Ok(EtaSolution { sol, norm2, eta_a: 1.0, etap_a: -c })
}

pub(crate) fn check_angle(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0 && value <= std::f64::consts::PI) {
        return Err(Error::BadAngle { name, value, expected: "(0, pi]" });
    }
    Ok(())
}

/// Independent consistency check of the pack through the Friedrichs inverse:
/// xi = T_F^{-1} u_a and xihat = T_F^{-1} vhat_a are built by variation of
/// constants and their boundary derivatives compared against the closed
/// forms. Returns the four residuals, all of which should vanish.
pub fn xi_boundary_check(problem: &Problem, cfg: &NumericsConfig) -> Result<[f64; 4]> {
    let cfg = &cfg.tightened();
    let bundle = extension_bundle(problem, cfg)?;
    let pack = &bundle.pack;
    let xi = friedrichs_inverse(problem, &bundle, &bundle.u, cfg)?;
    let xihat = friedrichs_inverse(problem, &bundle, &bundle.v_hat, cfg)?;
    Ok([
        (xi.0 + (pack.v_b / pack.u_b) * pack.norm2_u).abs(),
        (xi.1 + pack.norm2_u / pack.u_b).abs(),
        (xihat.0 - pack.norm2_v).abs(),
        xihat.1.abs(),
    ])
}

/// Solve T_F xi = w for w a lambda = 0 solution; returns (xi~'(a), xi~'(b)).
/// xi~(a) = xi~(b) = 0 by construction.
fn friedrichs_inverse(
    problem: &Problem,
    bundle: &PackBundle,
    w: &Sol,
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    let sa = &bundle.side_a;
    let sb = &bundle.side_b;
    // particular solution xi_p = uhat int_a^x u w r - u int_a^x uhat w r;
    // its state at the left matching point follows from the germ moments,
    // since w equals its tail combination exactly out to t_ex at lambda = 0
    let wa = &w.tail_a;
    let j_u_a = wa.c_p * sa.m_pp + wa.c_n * sa.m_pn; // int_a^{x_m} r u w
    let j_n_a = wa.c_p * sa.m_pn + wa.c_n * sa.m_nn;
    let (ug, ng) = germ(problem, Endpoint::Left, sa.t_ex);
    let xi_m = (ng.0 * j_u_a - ug.0 * j_n_a, ng.1 * j_u_a - ug.1 * j_n_a);
    let wc = w.clone();
    let dense = integrate_tau_forced(
        problem,
        0.0,
        sa.x_m,
        sb.x_m,
        xi_m,
        move |x| wc.eval(x).expect("forcing within span").0,
        cfg,
    )?;
    let end = dense.end_state();
    // forcing integrals over [x_m, b) from w's right-tail coefficients
    let wb = &w.tail_b;
    let j_u_b = wb.c_p * sb.m_pp + wb.c_n * sb.m_pn;
    let j_n_b = wb.c_p * sb.m_pn + wb.c_n * sb.m_nn;
    let (xi_p_b, xi_pp_b) = extract_z0(problem, sb, (end[0], end[1]), (j_u_b, j_n_b));
    // xi = xi_p + alpha u_a kills the b-side boundary value; by construction
    // xi_p~(a) = 0, so xi~'(a) = alpha and xi~'(b) follows from u's data
    let (u_b_val, up_b_val) = extract_z0(problem, sb, bundle.u.eval(sb.x_m)?, (0.0, 0.0));
    let alpha = -xi_p_b / u_b_val;
    Ok((alpha, xi_pp_b + alpha * up_b_val))
}

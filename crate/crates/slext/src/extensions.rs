//! Boundary-condition specifications and the classification of nonnegative
//! self-adjoint extensions.
//!
//! Every self-adjoint extension of the minimal operator is fixed by either a
//! pair of angles (separated conditions at the two endpoints) or a phase and
//! an SL(2, R) matrix coupling the endpoint data. The nonnegative ones form
//! a three-parameter family indexed by a nonnegative auxiliary form B on the
//! kernel of the adjoint: a 2x2 matrix `(b11, b12, b22)` when the kernel is
//! two dimensional, a scalar `kappa` plus a direction parameter `c` when it
//! is one dimensional, and nothing at all for the Friedrichs extension.
//! This module maps auxiliary data to boundary conditions, inverts that map
//! to test a given condition for nonnegativity, and implements the partial
//! order between extensions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::{
    check_angle, extension_bundle, generalized_boundary_values, l2r_inner, nonprincipal_solution,
    principal_solution, DataPack,
};
use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::problem::{Endpoint, Problem};

/// Relative slack for the closed-form admissibility inequalities. Inversion
/// of the classification formulas is exact arithmetic on measured boundary
/// data, so only rounding of that data needs absorbing.
const ADMIT_SLACK: f64 = 1e-9;

/// A self-adjoint boundary condition.
///
/// `Separated` imposes `cos(alpha) g~(a) + sin(alpha) g~'(a) = 0` and
/// `cos(beta) g~(b) - sin(beta) g~'(b) = 0`; `alpha = pi` means `g~(a) = 0`
/// (the Dirichlet-type condition) and likewise at `b`. `Coupled` imposes
/// `(g~(b), g~'(b)) = e^{i eta} R (g~(a), g~'(a))` with `R` real of
/// determinant one and `eta` in `[0, pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ExtensionSpec {
    Separated {
        alpha: f64,
        beta: f64,
    },
    Coupled {
        eta: f64,
        #[serde(rename = "R")]
        r: [[f64; 2]; 2],
    },
}

impl ExtensionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ExtensionSpec::Separated { alpha, beta } => {
                check_angle("alpha", *alpha)?;
                check_angle("beta", *beta)
            }
            ExtensionSpec::Coupled { eta, r } => {
                if !(0.0..PI).contains(eta) {
                    return Err(Error::BadAngle { name: "eta", value: *eta, expected: "[0, pi)" });
                }
                let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
                if (det - 1.0).abs() > 1e-9 {
                    return Err(Error::DetNotOne(det));
                }
                Ok(())
            }
        }
    }

    pub fn from_json(text: &str) -> Result<ExtensionSpec> {
        let spec: ExtensionSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// The Friedrichs extension: `g~(a) = g~(b) = 0`.
pub fn friedrichs_spec() -> ExtensionSpec {
    ExtensionSpec::Separated { alpha: PI, beta: PI }
}

/// Auxiliary form on a two dimensional kernel. `b12` may be complex in the
/// library; the resulting coupled condition then carries a nonzero phase.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AuxB2 {
    pub b11: f64,
    pub b12: Complex64,
    pub b22: f64,
}

impl AuxB2 {
    pub fn real(b11: f64, b12: f64, b22: f64) -> AuxB2 {
        AuxB2 { b11, b12: Complex64::new(b12, 0.0), b22 }
    }

    /// Nonnegativity of the form against the kernel geometry:
    /// `b11 b22 ||u||^2 - |b12|^2 ||vhat||^2 >= 0` with `b11, b22 >= 0`.
    pub fn check(&self, pack: &DataPack) -> Result<()> {
        if self.b11 < 0.0 || self.b22 < 0.0 {
            return Err(Error::NonnegativityViolated(format!(
                "diagonal entries must be nonnegative, got b11 = {}, b22 = {}",
                self.b11, self.b22
            )));
        }
        let lhs = self.b11 * self.b22 * pack.norm2_u - self.b12.norm_sqr() * pack.norm2_v;
        let scale = (self.b11 * self.b22 * pack.norm2_u).abs()
            + (self.b12.norm_sqr() * pack.norm2_v).abs();
        if lhs < -ADMIT_SLACK * scale.max(1.0) {
            return Err(Error::NonnegativityViolated(format!(
                "b11 b22 ||u||^2 - |b12|^2 ||vhat||^2 = {lhs:.6e} < 0"
            )));
        }
        Ok(())
    }
}

/// Direction parameter of the one dimensional kernel family: the kernel line
/// is spanned by `vhat_a + c u_a`, or by `u_a` alone for `c = Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CValue {
    Finite(Complex64),
    Infinity,
}

impl CValue {
    pub fn real(c: f64) -> CValue {
        CValue::Finite(Complex64::new(c, 0.0))
    }
}

/// Auxiliary data on a one dimensional kernel: multiplication by `kappa`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AuxB1 {
    pub kappa: f64,
    pub c: CValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PartialOrderResult {
    LessOrEqual,
    GreaterOrEqual,
    Equal,
    Incomparable,
}

/// Inverse cotangent on the branch (0, pi). The endpoint value pi is never
/// produced here; Dirichlet-type conditions arise only from explicit logic.
pub(crate) fn acot(x: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 - x.atan()
}

/// Boundary matrix of the Krein-von Neumann extension,
/// `R_K = [[uhat~_a(0,b), u~_a(0,b)], [uhat~_a'(0,b), u~_a'(0,b)]]`,
/// so that its kernel is exactly span{u_a, uhat_a}.
pub fn krein_matrix(problem: &Problem, cfg: &NumericsConfig) -> Result<[[f64; 2]; 2]> {
    let bundle = extension_bundle(problem, cfg)?;
    let r = [
        [bundle.uhat_b, bundle.pack.u_b],
        [bundle.uhatp_b, bundle.pack.up_b],
    ];
    let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    if (det - 1.0).abs() > 1e-9 {
        return Err(Error::DetNotOne(det));
    }
    Ok(r)
}

pub fn krein_spec(problem: &Problem, cfg: &NumericsConfig) -> Result<ExtensionSpec> {
    Ok(ExtensionSpec::Coupled { eta: 0.0, r: krein_matrix(problem, cfg)? })
}

/// Classification for a two dimensional kernel: the boundary condition of
/// the extension determined by the auxiliary form `b`.
///
/// The condition is separated exactly when `b12` matches the separation
/// value `(b11 (v_b/u_b) ||u||^2 - 1) / ||vhat||^2` (necessarily real); the
/// angles then follow from the closed forms. Otherwise the condition couples
/// the endpoints through a matrix assembled from the same data; a complex
/// `b12` surfaces as the phase `eta`.
pub fn classify_dim2(pack: &DataPack, b: &AuxB2) -> Result<ExtensionSpec> {
    classify_dim2_with_warnings(pack, b).map(|(spec, _)| spec)
}

/// As [`classify_dim2`], also reporting near-threshold warnings (a `b12`
/// within a factor 1000 of the separation tolerance still classifies as
/// coupled, but the matrix entries are then numerically delicate).
pub fn classify_dim2_with_warnings(
    pack: &DataPack,
    b: &AuxB2,
) -> Result<(ExtensionSpec, Vec<String>)> {
    b.check(pack)?;
    let (u_b, up_b, v_b, vp_b, vp_a) = (pack.u_b, pack.up_b, pack.v_b, pack.vp_b, pack.vp_a);
    let (n_u, n_v) = (pack.norm2_u, pack.norm2_v);
    let rho = v_b / u_b;
    let mut warnings = Vec::new();

    let b12_sep = (b.b11 * rho * n_u - 1.0) / n_v;
    let sep_scale = b12_sep.abs().max(b.b12.norm()).max(1.0);
    let sep_gap = (b.b12 - b12_sep).norm();
    if sep_gap <= 1e-9 * sep_scale {
        let cot_a = b.b11 * rho * rho * n_u - b.b22 * n_v - vp_a - rho;
        let cot_b = (up_b - b.b11 * n_u / u_b) / u_b;
        return Ok((ExtensionSpec::Separated { alpha: acot(cot_a), beta: acot(cot_b) }, warnings));
    }
    if sep_gap <= 1e-6 * sep_scale {
        warnings.push(format!(
            "b12 is within {:.1e} of the separation value {b12_sep:.12e}; treating as coupled",
            sep_gap / sep_scale
        ));
    }

    // denominator of the coupled map; zero only at the separation value
    let d = Complex64::new(1.0 - b.b11 * rho * n_u, 0.0) + b.b12 * n_v;
    let e = 1.0 / d;
    let h = (b.b22 * u_b - b.b12.conj() * v_b) * n_v + u_b * vp_a;
    let q = up_b - b.b11 * n_u / u_b;
    let m11 = v_b - h * e;
    let m12 = u_b * e;
    let m21 = vp_b - b.b12.conj() * n_v / u_b - (q / u_b) * h * e;
    let m22 = q * e;

    // factor the common phase out of M = e^{i eta} R; u_b is real, so the
    // phase of M12 is the phase of E
    let mut eta = m12.arg();
    if eta < 0.0 {
        eta += PI;
    }
    if (eta - PI).abs() < 1e-12 {
        eta = 0.0;
    }
    let rot = Complex64::from_polar(1.0, -eta);
    let m = [[m11 * rot, m12 * rot], [m21 * rot, m22 * rot]];
    let scale = m.iter().flatten().map(|z| z.norm()).fold(1.0f64, f64::max);
    let worst_im = m.iter().flatten().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    if worst_im > 1e-8 * scale {
        return Err(Error::PathDisagreement(format!(
            "coupled reduction left an imaginary residue {worst_im:.3e} (scale {scale:.3e})"
        )));
    }
    let r = [[m[0][0].re, m[0][1].re], [m[1][0].re, m[1][1].re]];
    let det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    if (det - 1.0).abs() > 1e-9 * scale.powi(2).max(1.0) {
        return Err(Error::DetNotOne(det));
    }
    Ok((ExtensionSpec::Coupled { eta, r }, warnings))
}

/// Classification for a one dimensional kernel spanned by `vhat_a + c u_a`
/// (`c = Infinity` for `u_a` alone) with auxiliary scalar `kappa >= 0`.
pub fn classify_dim1(pack: &DataPack, b: &AuxB1) -> Result<ExtensionSpec> {
    if b.kappa < 0.0 {
        return Err(Error::NonnegativityViolated(format!("kappa = {} < 0", b.kappa)));
    }
    let (u_b, up_b, v_b, vp_b, vp_a) = (pack.u_b, pack.up_b, pack.v_b, pack.vp_b, pack.vp_a);
    let (n_u, n_v) = (pack.norm2_u, pack.norm2_v);
    let rho = v_b / u_b;
    match b.c {
        CValue::Infinity => {
            let cot_b = (up_b - b.kappa * n_u / u_b) / u_b;
            Ok(ExtensionSpec::Separated { alpha: PI, beta: acot(cot_b) })
        }
        CValue::Finite(c) => {
            if c.im != 0.0 {
                return Err(Error::NonRealCoupling);
            }
            let c = c.re;
            let c_f = -rho;
            if (c - c_f).abs() <= 1e-9 * (1.0 + c_f.abs()) {
                let cot_a = rho - vp_a - b.kappa * (n_v + rho * rho * n_u);
                return Ok(ExtensionSpec::Separated { alpha: acot(cot_a), beta: PI });
            }
            let r11 = v_b + c * u_b;
            let r22 = 1.0 / r11;
            let r21 = vp_b + c * up_b
                - b.kappa * c * n_u / u_b
                - r22 * (b.kappa * (n_v - c * rho * n_u) + c + vp_a);
            Ok(ExtensionSpec::Coupled { eta: 0.0, r: [[r11, 0.0], [r21, r22]] })
        }
    }
}

/// Admissible left angles for a fixed separated condition `beta_p` at `b`:
/// alpha in `[alpha_min, pi]` keeps the extension nonnegative, with equality
/// producing 0 as an eigenvalue. `uhat_b, uhatp_b` are the boundary values
/// of the nonprincipal solution `uhat_a` at `b`.
pub fn nonneg_range_fixed_beta(
    pack: &DataPack,
    beta_p: f64,
    uhat_b: f64,
    uhatp_b: f64,
) -> Result<f64> {
    fixed_beta_alpha(pack, beta_p, uhat_b, uhatp_b, 0.0, 0.0)
}

/// The angle `alpha(B)` of the extension of the fixed-`beta_p` minimal
/// operator determined by the scalar auxiliary parameter `B >= 0`;
/// `eta_norm2` is the squared norm of the kernel element normalized to
/// `eta~(a) = 1` (irrelevant for `B = 0`). Monotone increasing in `B`,
/// reaching `pi` (Friedrichs) in the limit.
pub fn fixed_beta_alpha(
    pack: &DataPack,
    beta_p: f64,
    uhat_b: f64,
    uhatp_b: f64,
    b_param: f64,
    eta_norm2: f64,
) -> Result<f64> {
    check_angle("beta'", beta_p)?;
    if b_param < 0.0 {
        return Err(Error::NonnegativityViolated(format!("B = {b_param} < 0")));
    }
    let (cb, sb) = (beta_p.cos(), beta_p.sin());
    let den = cb * pack.u_b - sb * pack.up_b;
    let num = cb * uhat_b - sb * uhatp_b;
    let scale = pack.u_b.abs().max(pack.up_b.abs()).max(1.0);
    if den.abs() < 1e-12 * scale {
        return Err(Error::DenominatorZero(
            "the fixed condition at b has 0 as an eigenvalue of its Friedrichs extension",
        ));
    }
    Ok(acot(num / den - b_param * eta_norm2))
}

/// Boundary data of the principal and nonprincipal solutions seeded at `b`,
/// read at `a`, together with their Gram data. This is the input of the
/// route to the admissible range that never references `a`-seeded solutions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BSideData {
    /// u~_b(0,a)
    pub u_a: f64,
    /// u~_b'(0,a)
    pub up_a: f64,
    /// uhat~_b(0,a)
    pub uhat_a: f64,
    /// uhat~_b'(0,a)
    pub uhatp_a: f64,
    pub norm2_u: f64,
    pub norm2_uhat: f64,
    pub cross: f64,
}

impl BSideData {
    /// Squared norm of `eta = sin(beta') uhat_b + cos(beta') u_b`.
    pub fn eta_norm2(&self, beta_p: f64) -> f64 {
        let (cb, sb) = (beta_p.cos(), beta_p.sin());
        sb * sb * self.norm2_uhat + 2.0 * sb * cb * self.cross + cb * cb * self.norm2_u
    }
}

pub fn b_side_data(problem: &Problem, cfg: &NumericsConfig) -> Result<BSideData> {
    let cfg = &cfg.tightened();
    let u = principal_solution(problem, Endpoint::Right, 0.0, cfg)?;
    let uhat = nonprincipal_solution(problem, Endpoint::Right, cfg)?;
    let qu = generalized_boundary_values(problem, &u, cfg)?;
    let qh = generalized_boundary_values(problem, &uhat, cfg)?;
    Ok(BSideData {
        u_a: qu.g_a,
        up_a: qu.gp_a,
        uhat_a: qh.g_a,
        uhatp_a: qh.gp_a,
        norm2_u: l2r_inner(problem, &u, &u, cfg)?.0,
        norm2_uhat: l2r_inner(problem, &uhat, &uhat, cfg)?.0,
        cross: l2r_inner(problem, &uhat, &u, cfg)?.0,
    })
}

/// The same angle `alpha(B)` computed from `b`-seeded data only. Agrees with
/// [`fixed_beta_alpha`] identically; the two routes cross-validate the
/// boundary machinery at both endpoints.
pub fn nonneg_range_fixed_beta_alt(bd: &BSideData, beta_p: f64, b_param: f64) -> Result<f64> {
    check_angle("beta'", beta_p)?;
    if b_param < 0.0 {
        return Err(Error::NonnegativityViolated(format!("B = {b_param} < 0")));
    }
    let (cb, sb) = (beta_p.cos(), beta_p.sin());
    let den = cb * bd.u_a + sb * bd.uhat_a;
    let scale = bd.u_a.abs().max(bd.uhat_a.abs()).max(1.0);
    if den.abs() < 1e-12 * scale {
        return Err(Error::DenominatorZero(
            "the kernel element of the fixed condition vanishes at a",
        ));
    }
    let num = cb * bd.up_a + sb * bd.uhatp_a;
    Ok(acot(-num / den - b_param * bd.eta_norm2(beta_p) / (den * den)))
}

/// Order two separated nonnegative extensions by angle comparison. The
/// floors are the admissible-range lower endpoints at the respective other
/// side (`alpha_floor` for `beta = pi`, `beta_floor` for `alpha = pi`);
/// angles below their floor are rejected as not nonnegative.
pub fn compare_separated(
    s1: &ExtensionSpec,
    s2: &ExtensionSpec,
    alpha_floor: f64,
    beta_floor: f64,
) -> Result<PartialOrderResult> {
    let pull = |s: &ExtensionSpec| -> Result<(f64, f64)> {
        match s {
            ExtensionSpec::Separated { alpha, beta } => {
                check_angle("alpha", *alpha)?;
                check_angle("beta", *beta)?;
                if *alpha < alpha_floor - 1e-12 || *beta < beta_floor - 1e-12 {
                    return Err(Error::NotNonnegative(format!(
                        "angles ({alpha}, {beta}) lie below the floors ({alpha_floor}, {beta_floor})"
                    )));
                }
                Ok((*alpha, *beta))
            }
            ExtensionSpec::Coupled { .. } => Err(Error::NotNonnegative(
                "angle comparison applies to separated conditions only".into(),
            )),
        }
    };
    let (a1, b1) = pull(s1)?;
    let (a2, b2) = pull(s2)?;
    Ok(if a1 == a2 && b1 == b2 {
        PartialOrderResult::Equal
    } else if a1 <= a2 && b1 <= b2 {
        PartialOrderResult::LessOrEqual
    } else if a1 >= a2 && b1 >= b2 {
        PartialOrderResult::GreaterOrEqual
    } else {
        PartialOrderResult::Incomparable
    })
}

/// Order two extensions of a two dimensional kernel by their auxiliary
/// forms: `T_B <= T_Bh` iff `Bh - B` is itself an admissible nonnegative
/// increment.
pub fn compare_dim2(b: &AuxB2, bh: &AuxB2, pack: &DataPack) -> Result<PartialOrderResult> {
    b.check(pack)?;
    bh.check(pack)?;
    let le = |lo: &AuxB2, hi: &AuxB2| -> bool {
        let d11 = hi.b11 - lo.b11;
        let d22 = hi.b22 - lo.b22;
        let d12 = hi.b12 - lo.b12;
        let scale = (d11.abs() * d22.abs() * pack.norm2_u + d12.norm_sqr() * pack.norm2_v).max(1e-300);
        d11 >= 0.0
            && d22 >= 0.0
            && d11 * d22 * pack.norm2_u - d12.norm_sqr() * pack.norm2_v >= -ADMIT_SLACK * scale
    };
    let fwd = le(b, bh);
    let bwd = le(bh, b);
    Ok(match (fwd, bwd) {
        (true, true) => PartialOrderResult::Equal,
        (true, false) => PartialOrderResult::LessOrEqual,
        (false, true) => PartialOrderResult::GreaterOrEqual,
        (false, false) => PartialOrderResult::Incomparable,
    })
}

/// Auxiliary parameters recovered by inverting the classification, when the
/// spec lies in the image of a kernel family.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum Witness {
    Friedrichs,
    Dim2 { b11: f64, b12: Complex64, b22: f64 },
    Dim1 { kappa: f64, c: CValue },
}

#[derive(Debug, Clone, Serialize)]
pub struct NonnegReport {
    pub nonnegative: bool,
    /// Lowest eigenvalue found by the spectral route.
    pub lambda_min: f64,
    /// Verdict of the closed-form route; `None` when that route does not
    /// apply (phases whose auxiliary data would be non-real).
    pub algebraic: Option<bool>,
    /// Parameters realizing the spec inside the nonnegative family.
    pub witness: Option<Witness>,
}

fn near(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()))
}

/// Closed-form nonnegativity: invert the classification maps and test the
/// recovered auxiliary parameters for admissibility. Returns `None` when the
/// spec is outside the scope of the real-parameter inversion.
fn algebraic_nonneg(pack: &DataPack, spec: &ExtensionSpec) -> Option<(bool, Option<Witness>)> {
    let (u_b, up_b, v_b, vp_b, vp_a) = (pack.u_b, pack.up_b, pack.v_b, pack.vp_b, pack.vp_a);
    let (n_u, n_v) = (pack.norm2_u, pack.norm2_v);
    let rho = v_b / u_b;
    let admissible2 = |b11: f64, b12: Complex64, b22: f64| -> bool {
        let s11 = 1.0 + b11.abs();
        let s22 = 1.0 + b22.abs();
        let quad = b11 * b22 * n_u - b12.norm_sqr() * n_v;
        let qs = (b11.abs() * b22.abs() * n_u + b12.norm_sqr() * n_v).max(1.0);
        b11 >= -ADMIT_SLACK * s11 && b22 >= -ADMIT_SLACK * s22 && quad >= -ADMIT_SLACK * qs
    };
    match spec {
        ExtensionSpec::Separated { alpha, beta } => {
            let da = near(*alpha, PI, 1e-12);
            let db = near(*beta, PI, 1e-12);
            if da && db {
                return Some((true, Some(Witness::Friedrichs)));
            }
            if da {
                // kernel span{u_a}: kappa from the beta condition
                let kappa = (up_b - u_b / beta.tan()) * u_b / n_u;
                let ok = kappa >= -ADMIT_SLACK * (1.0 + kappa.abs());
                return Some((ok, ok.then_some(Witness::Dim1 { kappa: kappa.max(0.0), c: CValue::Infinity })));
            }
            if db {
                // kernel span{vhat_a + c_F u_a}: kappa from the alpha condition
                let kappa = (rho - vp_a - 1.0 / alpha.tan()) / (n_v + rho * rho * n_u);
                let ok = kappa >= -ADMIT_SLACK * (1.0 + kappa.abs());
                let c = CValue::real(-rho);
                return Some((ok, ok.then_some(Witness::Dim1 { kappa: kappa.max(0.0), c })));
            }
            // full two dimensional kernel
            let b11 = (up_b - u_b / beta.tan()) * u_b / n_u;
            let b12 = Complex64::new((b11 * rho * n_u - 1.0) / n_v, 0.0);
            let b22 = (b11 * rho * rho * n_u - vp_a - rho - 1.0 / alpha.tan()) / n_v;
            let ok = admissible2(b11, b12, b22);
            Some((ok, ok.then_some(Witness::Dim2 { b11, b12, b22 })))
        }
        ExtensionSpec::Coupled { eta, r } => {
            let phase = Complex64::from_polar(1.0, *eta);
            if r[0][1] != 0.0 {
                // invert the dim 2 map entry by entry
                let b11 = (up_b - r[1][1] * u_b / r[0][1]) * u_b / n_u;
                let d = phase.conj() * u_b / r[0][1];
                let b12 = (d - 1.0 + b11 * rho * n_u) / n_v;
                let h = (v_b - phase * r[0][0]) * u_b / (phase * r[0][1]);
                let b22c = (h - u_b * vp_a + b12.conj() * v_b * n_v) / (n_v * u_b);
                let bscale = 1.0 + b22c.norm();
                if b22c.im.abs() > 1e-8 * bscale {
                    // not in the image of the nonnegative family
                    return Some((false, None));
                }
                let b22 = b22c.re;
                let ok = admissible2(b11, b12, b22);
                return Some((ok, ok.then_some(Witness::Dim2 { b11, b12, b22 })));
            }
            if *eta != 0.0 {
                // R12 = 0 with a phase needs a non-real direction parameter
                return None;
            }
            // dim 1 family with R12 = 0
            let c = (r[0][0] - v_b) / u_b;
            let r22 = r[1][1];
            let kfree = vp_b + c * up_b - r22 * (c + vp_a);
            let kden = c * n_u / u_b + r22 * (n_v - c * rho * n_u);
            if kden.abs() < 1e-12 * (1.0 + kfree.abs()) {
                return None;
            }
            let kappa = (kfree - r[1][0]) / kden;
            let ok = kappa >= -ADMIT_SLACK * (1.0 + kappa.abs());
            Some((ok, ok.then_some(Witness::Dim1 { kappa: kappa.max(0.0), c: CValue::real(c) })))
        }
    }
}

/// Decide nonnegativity of the extension `spec` on `problem` by two
/// independent routes: inversion of the classification formulas and the sign
/// of the lowest eigenvalue. A clear disagreement is an error, never a
/// silent preference.
pub fn is_nonnegative(
    problem: &Problem,
    spec: &ExtensionSpec,
    cfg: &NumericsConfig,
) -> Result<NonnegReport> {
    spec.validate()?;
    let pack = crate::boundary::extension_data_pack(problem, cfg)?;
    let alg = algebraic_nonneg(&pack, spec);
    let lambda_min = crate::spectra::lowest_eigenvalue(problem, spec, cfg)?;
    let scale = (PI / problem.len()).powi(2);
    let spectral = lambda_min >= -1e-9 * scale.max(1.0);
    if let Some((alg_verdict, _)) = &alg {
        if *alg_verdict != spectral && lambda_min.abs() > 1e-6 * scale.max(1.0) {
            return Err(Error::PathDisagreement(format!(
                "algebraic verdict {alg_verdict} vs lowest eigenvalue {lambda_min:.6e}"
            )));
        }
    }
    let (algebraic, witness) = match alg {
        Some((v, w)) => (Some(v), w),
        None => (None, None),
    };
    Ok(NonnegReport { nonnegative: spectral, lambda_min, algebraic, witness })
}

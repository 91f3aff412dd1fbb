//! Numerical kernels: an adaptive Runge-Kutta integrator with dense output
//! and adaptive Gauss-Kronrod quadrature with endpoint-graded tails.
//!
//! The state vector of `tau y = z y` is always `(y, y^[1])` with
//! `y^[1] = p y'`, so the first-order system never divides by p twice and
//! the Wronskian of two states is the plain 2x2 determinant.

mod quad;
mod rk;

pub use quad::{adaptive_quad, tail_quad, QuadOpts};
pub use rk::{integrate, DenseOutput, OdeOpts};

use crate::config::NumericsConfig;
use crate::error::Result;
use crate::problem::Problem;

/// Wronskian `W(f, g) = f g^[1] - f^[1] g` of two states.
#[inline]
pub fn wronskian(f: (f64, f64), g: (f64, f64)) -> f64 {
    f.0 * g.1 - f.1 * g.0
}

/// Quadrature value together with its error estimate.
pub type QuadResult = (f64, f64);

pub fn ode_opts(problem: &Problem, cfg: &NumericsConfig) -> OdeOpts {
    OdeOpts {
        rtol: cfg.ode_rtol,
        atol: cfg.ode_atol,
        max_steps: 200_000,
        breakpoints: problem.breakpoints.clone(),
        normalize: true,
    }
}

pub fn quad_opts(cfg: &NumericsConfig) -> QuadOpts {
    QuadOpts {
        abs_tol: cfg.quad_abs_tol,
        rel_tol: cfg.quad_rel_tol,
        max_panels: 4096,
    }
}

/// Integrate `tau y = z y` between two interior points. `y0` is `(y, y^[1])`
/// at `x0`; integration may run in either direction.
pub fn integrate_tau(
    problem: &Problem,
    z: f64,
    x0: f64,
    x1: f64,
    y0: (f64, f64),
    cfg: &NumericsConfig,
) -> Result<DenseOutput<2>> {
    let p = problem.coeffs.p.clone();
    let q = problem.coeffs.q.clone();
    let r = problem.coeffs.r.clone();
    let f = move |x: f64, y: &[f64; 2]| [y[1] / p.eval(x), (q.eval(x) - z * r.eval(x)) * y[0]];
    integrate(&f, x0, x1, [y0.0, y0.1], &ode_opts(problem, cfg))
}

/// Integrate the inhomogeneous equation `tau y = z y + w`, i.e.
/// `(y^[1])' = (q - z r) y - r w`. Unlike the homogeneous flow the initial
/// vector is not rescaled (and may be zero).
pub fn integrate_tau_forced(
    problem: &Problem,
    z: f64,
    x0: f64,
    x1: f64,
    y0: (f64, f64),
    w: impl Fn(f64) -> f64 + 'static,
    cfg: &NumericsConfig,
) -> Result<DenseOutput<2>> {
    let p = problem.coeffs.p.clone();
    let q = problem.coeffs.q.clone();
    let r = problem.coeffs.r.clone();
    let f = move |x: f64, y: &[f64; 2]| {
        let rv = r.eval(x);
        [y[1] / p.eval(x), (q.eval(x) - z * rv) * y[0] - rv * w(x)]
    };
    let mut opts = ode_opts(problem, cfg);
    opts.normalize = false;
    integrate(&f, x0, x1, [y0.0, y0.1], &opts)
}

/// Same flow augmented with the z-derivative of the solution:
/// state `(y, y^[1], dy/dz, dy^[1]/dz)`. The derivative pair satisfies the
/// inhomogeneous variational equation with forcing `-r y`.
pub fn integrate_tau_dz(
    problem: &Problem,
    z: f64,
    x0: f64,
    x1: f64,
    y0: [f64; 4],
    cfg: &NumericsConfig,
) -> Result<DenseOutput<4>> {
    let p = problem.coeffs.p.clone();
    let q = problem.coeffs.q.clone();
    let r = problem.coeffs.r.clone();
    let f = move |x: f64, y: &[f64; 4]| {
        let pv = p.eval(x);
        let qz = q.eval(x) - z * r.eval(x);
        [y[1] / pv, qz * y[0], y[3] / pv, qz * y[2] - r.eval(x) * y[0]]
    };
    integrate(&f, x0, x1, y0, &ode_opts(problem, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{builtin_bessel, builtin_regular, builtin_symmetric_bessel, Interval};
    use approx::assert_relative_eq;

    fn free() -> Problem {
        builtin_regular(Interval::new(0.0, 1.0).unwrap(), 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn straight_line() {
        let cfg = NumericsConfig::default();
        let d = integrate_tau(&free(), 0.0, 0.0, 1.0, (0.0, 1.0), &cfg).unwrap();
        let y = d.eval(0.3).unwrap();
        assert_relative_eq!(y[0], 0.3, max_relative = 1e-12);
        assert_relative_eq!(y[1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn sine_at_pi_squared() {
        let cfg = NumericsConfig::default();
        let z = std::f64::consts::PI.powi(2);
        let d = integrate_tau(&free(), z, 0.0, 1.0, (0.0, 1.0), &cfg).unwrap();
        // solution is sin(pi x)/pi
        let mid = d.eval(0.5).unwrap();
        assert_relative_eq!(mid[0], 1.0 / std::f64::consts::PI, max_relative = 1e-9);
        let end = d.end_state();
        assert!(end[0].abs() < 1e-9, "sin(pi) = {}", end[0]);
        assert_relative_eq!(end[1], -1.0, max_relative = 1e-9);
    }

    #[test]
    fn backward_integration() {
        let cfg = NumericsConfig::default();
        let d = integrate_tau(&free(), 4.0, 1.0, 0.0, (0.0, 1.0), &cfg).unwrap();
        // solution with y(1)=0, y^[1](1)=1 is sin(2(x-1))/2
        let y = d.eval(0.25).unwrap();
        assert_relative_eq!(y[0], (2.0f64 * (0.25 - 1.0)).sin() / 2.0, max_relative = 1e-9);
    }

    #[test]
    fn bessel_principal_propagates() {
        let cfg = NumericsConfig::default();
        let p = builtin_bessel(0.3, 0.0, 1.0).unwrap();
        let x0 = p.inner_x(crate::problem::Endpoint::Left);
        let y0 = p.seed_a.principal.eval(x0);
        let d = integrate_tau(&p, 0.0, x0, 0.9, y0, &cfg).unwrap();
        let y = d.eval(0.7).unwrap();
        assert_relative_eq!(y[0], 0.7f64.powf(0.8), max_relative = 5e-9);
        assert_relative_eq!(y[1], 0.8 * 0.7f64.powf(-0.2), max_relative = 5e-9);
    }

    #[test]
    fn wronskian_is_constant() {
        let cfg = NumericsConfig::default();
        let p = free();
        let z = 2.5;
        let d1 = integrate_tau(&p, z, 0.0, 1.0, (0.0, 1.0), &cfg).unwrap();
        let d2 = integrate_tau(&p, z, 0.0, 1.0, (1.0, 0.0), &cfg).unwrap();
        let mut w0 = None;
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            let a = d1.eval(x).unwrap();
            let b = d2.eval(x).unwrap();
            let w = wronskian((a[0], a[1]), (b[0], b[1]));
            match w0 {
                None => w0 = Some(w),
                Some(w0) => assert_relative_eq!(w, w0, max_relative = 1e-10),
            }
        }
    }

    #[test]
    fn tolerance_ladder() {
        // loosening the tolerance by 1e4 must cost accuracy accordingly
        let z = std::f64::consts::PI.powi(2);
        let p = free();
        let exact = 1.0 / std::f64::consts::PI;
        let err_at = |rtol: f64| {
            let cfg = NumericsConfig { ode_rtol: rtol, ode_atol: rtol * 1e-2, ..Default::default() };
            let d = integrate_tau(&p, z, 0.0, 1.0, (0.0, 1.0), &cfg).unwrap();
            (d.eval(0.5).unwrap()[0] - exact).abs()
        };
        let loose = err_at(1e-5);
        let tight = err_at(1e-9);
        assert!(tight < 1e-9, "tight error {tight}");
        assert!(loose > tight * 30.0 || loose < 1e-12, "loose {loose}, tight {tight}");
    }

    #[test]
    fn breakpoints_do_not_degrade_accuracy() {
        // symmetric Bessel q has a kink at the midpoint; end values from the
        // split integration must match a manual two-leg run to full accuracy
        let cfg = NumericsConfig::default();
        let p = builtin_symmetric_bessel(0.3, 0.0, 2.0).unwrap();
        let d = integrate_tau(&p, 1.0, 0.5, 1.5, (1.0, 0.3), &cfg).unwrap();
        let l1 = integrate_tau(&p, 1.0, 0.5, 1.0, (1.0, 0.3), &cfg).unwrap();
        let e1 = l1.end_state();
        let l2 = integrate_tau(&p, 1.0, 1.0, 1.5, (e1[0], e1[1]), &cfg).unwrap();
        let want = l2.end_state();
        let got = d.end_state();
        assert_relative_eq!(got[0], want[0], max_relative = 1e-10);
        assert_relative_eq!(got[1], want[1], max_relative = 1e-10);
    }

    #[test]
    fn z_derivative_matches_finite_difference() {
        let cfg = NumericsConfig::default();
        let p = free();
        let z = 3.0;
        let d = integrate_tau_dz(&p, z, 0.0, 1.0, [0.0, 1.0, 0.0, 0.0], &cfg).unwrap();
        let end = d.end_state();
        let h = 1e-6;
        let hi = integrate_tau(&p, z + h, 0.0, 1.0, (0.0, 1.0), &cfg).unwrap().end_state();
        let lo = integrate_tau(&p, z - h, 0.0, 1.0, (0.0, 1.0), &cfg).unwrap().end_state();
        assert_relative_eq!(end[2], (hi[0] - lo[0]) / (2.0 * h), max_relative = 1e-6);
        assert_relative_eq!(end[3], (hi[1] - lo[1]) / (2.0 * h), max_relative = 1e-6);
    }
}

//! Bessel functions of the first kind, their zeros, and the closed-form
//! spectral data of the symmetric Bessel problem.
//!
//! The potential `(gamma^2 - 1/4) / d(x)^2` with `d` the distance to the
//! boundary is solvable on each half interval: the Friedrichs eigenvalues
//! come from zeros of `J_gamma`, the mixed Dirichlet-Neumann eigenvalues
//! from zeros of
//!
//!   G_gamma(y) = y^{-gamma} [ (1 - 2 gamma) J_gamma(y) + 2 y J_{gamma-1}(y) ],
//!
//! whose first positive zero is Lamb's constant. The sharp constant of the
//! associated Hardy-type integral inequality is `4 lambda_{gamma,1}^2 /
//! (b-a)^2`, and a Rayleigh-quotient sampler verifies the inequality on
//! random trial functions.
//!
//! Everything here is self-contained: power series below the switchover,
//! Hankel asymptotics beyond, no external special-function dependencies.

use std::f64::consts::PI;

use serde::Serialize;

use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::odecore::{adaptive_quad, quad_opts};
use crate::problem::Interval;
use crate::spectra::{EigEntry, Spectrum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lanczos approximation (g = 7, 9 terms), full double accuracy for
/// positive arguments; negative non-integer arguments go through the
/// reflection formula.
fn gamma_fn(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_fn(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = G[0];
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    let t = x + 7.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Ascending series, accurate for moderate argument. Terms are generated by
/// recurrence and summed until they fall below 1e-17 of the sum.
fn bessel_series(nu: f64, y: f64) -> f64 {
    if y == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let q = 0.25 * y * y;
    let mut term = (0.5 * y).powf(nu) / gamma_fn(nu + 1.0);
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel large-argument expansion. The modulus/phase series are summed to
/// their smallest term; beyond the switchover that term is far below the
/// target accuracy.
fn bessel_asymptotic(nu: f64, y: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let chi = y - (0.5 * nu + 0.25) * PI;
    let (mut p, mut q) = (1.0, 0.0);
    let mut c = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..=40usize {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        c *= (mu - odd * odd) / (8.0 * kf * y);
        if c.abs() >= prev {
            break;
        }
        prev = c.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * c;
        } else {
            p += sign * c;
        }
        if c.abs() < 1e-18 {
            break;
        }
    }
    (2.0 / (PI * y)).sqrt() * (chi.cos() * p - chi.sin() * q)
}

/// Where the series hands over to the asymptotic expansion. Both sides meet
/// their worst accuracy here (series cancellation vs. smallest asymptotic
/// term), each still near 1e-12 absolute.
const SERIES_CUTOFF: f64 = 12.0;

/// Bessel function of the first kind of real order `nu > -1` (plus the
/// integer reflection `J_{-1} = -J_1`), for `y >= 0`. Orders below -1 and
/// negative arguments are unsupported and return NaN.
pub fn bessel_j(nu: f64, y: f64) -> f64 {
    if nu == -1.0 {
        return -bessel_j(1.0, y);
    }
    if !(nu > -1.0) || !(y >= 0.0) {
        return f64::NAN;
    }
    if y <= SERIES_CUTOFF {
        bessel_series(nu, y)
    } else {
        bessel_asymptotic(nu, y)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(())
}

/// k-th positive zero of `J_gamma`, `k >= 1`. A McMahon-type initial guess
/// brackets the zero within half a period on each side; bisection refines to
/// relative 1e-13.
pub fn bessel_j_zero(gamma: f64, k: usize) -> Result<f64> {
    check_gamma(gamma)?;
    if k == 0 {
        return Err(Error::SpecialFunction("zero index must be at least 1".into()));
    }
    let guess = (k as f64 + 0.5 * gamma - 0.25) * PI;
    bisect_zero(|y| bessel_j(gamma, y), guess - 0.5 * PI, guess + 0.5 * PI)
}

fn bisect_zero(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (fl, fh) = (f(lo), f(hi));
    if fl == 0.0 {
        return Ok(lo);
    }
    if fh == 0.0 {
        return Ok(hi);
    }
    if fl.signum() == fh.signum() {
        return Err(Error::SpecialFunction(format!(
            "no sign change on the zero bracket [{lo:.6}, {hi:.6}]"
        )));
    }
    let neg_left = fl < 0.0;
    while hi - lo > 1e-13 * hi.abs().max(1.0) {
        let m = 0.5 * (lo + hi);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == neg_left {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The function whose positive zeros are the mixed Dirichlet-Neumann
/// eigenvalue parameters:
///
///   G_gamma(y) = y^{-gamma} [ (1 - 2 gamma) J_gamma(y) + 2 y J_{gamma-1}(y) ].
pub fn lamb_g(gamma: f64, y: f64) -> f64 {
    let j_prev = if gamma == 0.0 { -bessel_j(1.0, y) } else { bessel_j(gamma - 1.0, y) };
    y.powf(-gamma) * ((1.0 - 2.0 * gamma) * bessel_j(gamma, y) + 2.0 * y * j_prev)
}

/// Equivalent derivative form `y^{-gamma} (J_gamma + 2 y J_gamma')`, with
/// the derivative taken through the symmetric difference of neighbor orders.
/// Agreement with [`lamb_g`] exercises the recurrence nontrivially.
pub fn lamb_g_alt(gamma: f64, y: f64) -> f64 {
    let j_prev = if gamma == 0.0 { -bessel_j(1.0, y) } else { bessel_j(gamma - 1.0, y) };
    let deriv = 0.5 * (j_prev - bessel_j(gamma + 1.0, y));
    y.powf(-gamma) * (bessel_j(gamma, y) + 2.0 * y * deriv)
}

/// One positive zero of `G_gamma`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LambZero {
    pub gamma: f64,
    pub k: usize,
    pub value: f64,
    /// |G_gamma| at the accepted zero relative to the size of its two terms.
    pub residual: f64,
}

/// k-th positive zero of `G_gamma` (`k = 1` is Lamb's constant). `G` starts
/// positive at the origin for every admissible gamma and its zeros are
/// separated by more than the scan step, so counting sign changes on a fixed
/// grid is reliable.
pub fn lamb_zero(gamma: f64, k: usize) -> Result<LambZero> {
    check_gamma(gamma)?;
    if k == 0 {
        return Err(Error::SpecialFunction("zero index must be at least 1".into()));
    }
    let step = 0.1;
    let cap = (k as f64 + 2.0) * PI;
    let mut found = 0usize;
    let mut y = 0.05;
    let mut g_prev = lamb_g(gamma, y);
    let value = loop {
        let y_next = y + step;
        if y_next > cap {
            return Err(Error::SpecialFunction(format!(
                "ran past y = {cap:.2} without finding zero {k} of G_{gamma}"
            )));
        }
        let g_next = lamb_g(gamma, y_next);
        if g_next == 0.0 {
            found += 1;
            if found == k {
                break y_next;
            }
        } else if g_prev.signum() != g_next.signum() {
            found += 1;
            if found == k {
                break bisect_zero(|t| lamb_g(gamma, t), y, y_next)?;
            }
        }
        y = y_next;
        g_prev = g_next;
    };
    // scale against the oscillation envelope of the two terms, not their
    // pointwise values: at gamma = 1/2 the surviving term is proportional
    // to G itself and would make the quotient meaningless
    let envelope = (2.0 / (PI * value)).sqrt();
    let scale =
        value.powf(-gamma) * ((1.0 - 2.0 * gamma).abs() + 2.0 * value) * envelope;
    let residual = lamb_g(gamma, value).abs() / scale.max(f64::MIN_POSITIVE);
    Ok(LambZero { gamma, k, value, residual })
}

/// Friedrichs spectrum of the symmetric Bessel problem on `(a, b)` in closed
/// form: the union of `4 j_{gamma,k}^2 / (b-a)^2` (Friedrichs half-interval
/// eigenvalues) and `4 lambda_{gamma,k}^2 / (b-a)^2` (mixed
/// Dirichlet-Neumann ones), `k <= k_max`. The two families interlace
/// strictly, so every entry is simple.
pub fn symmetric_bessel_friedrichs_spectrum(
    gamma: f64,
    a: f64,
    b: f64,
    k_max: usize,
) -> Result<Spectrum> {
    let interval = Interval::new(a, b)?;
    let s = 4.0 / (interval.len() * interval.len());
    let mut entries = Vec::with_capacity(2 * k_max);
    for k in 1..=k_max {
        let j = bessel_j_zero(gamma, k)?;
        let envelope = (2.0 / (PI * j)).sqrt();
        entries.push(EigEntry {
            eigenvalue: s * j * j,
            multiplicity: 1,
            residual: bessel_j(gamma, j).abs() / envelope,
        });
        let l = lamb_zero(gamma, k)?;
        entries.push(EigEntry {
            eigenvalue: s * l.value * l.value,
            multiplicity: 1,
            residual: l.residual,
        });
    }
    entries.sort_by(|x, y| x.eigenvalue.total_cmp(&y.eigenvalue));
    let hi = entries.last().map(|e| e.eigenvalue).unwrap_or(0.0);
    Ok(Spectrum { eigenvalues: entries, scan_window: (0.0, hi) })
}

/// Sharp constant of the Hardy-type inequality on `(a, b)`:
///
///   int |f'|^2 >= (1/4 - gamma^2) int d^{-2} |f|^2 + C int |f|^2
///
/// for f in H^1_0, with `C = 4 lambda_{gamma,1}^2 / (b-a)^2`, the bottom of
/// the mixed Dirichlet-Neumann half-interval spectrum.
pub fn hardy_constant(gamma: f64, a: f64, b: f64) -> Result<f64> {
    let interval = Interval::new(a, b)?;
    let l1 = lamb_zero(gamma, 1)?.value;
    Ok(4.0 * l1 * l1 / (interval.len() * interval.len()))
}

/// Margin of the inequality for the sine sum with the given coefficients,
/// `f = sum_k c_k sin(k pi (x-a)/(b-a))`, against an arbitrary constant:
/// returns `(Q, scale)` with
///
///   Q = int |f'|^2 - (1/4 - gamma^2) int d^{-2} |f|^2 - constant int |f|^2
///
/// and scale the sum of the three term magnitudes. The Dirichlet and norm
/// integrals are exact (orthogonality); the singular middle term is
/// quadrature with a knot at the midpoint kink of d.
pub fn rayleigh_margin(
    gamma: f64,
    a: f64,
    b: f64,
    coeffs: &[f64],
    constant: f64,
    cfg: &NumericsConfig,
) -> Result<(f64, f64)> {
    check_gamma(gamma)?;
    let interval = Interval::new(a, b)?;
    let len = interval.len();
    let mut norm2 = 0.0;
    let mut dirichlet = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        let w = (i + 1) as f64 * PI / len;
        norm2 += 0.5 * len * c * c;
        dirichlet += 0.5 * len * c * c * w * w;
    }
    let w = 0.25 - gamma * gamma;
    let hardy_term = if w == 0.0 {
        0.0
    } else {
        let f = |x: f64| -> f64 {
            let mut s = 0.0;
            for (i, c) in coeffs.iter().enumerate() {
                s += c * ((i + 1) as f64 * PI * (x - a) / len).sin();
            }
            s
        };
        // bounded at the endpoints: f vanishes linearly where d does
        let g = |x: f64| {
            let v = f(x) / (x - a).min(b - x);
            v * v
        };
        adaptive_quad(&g, a, b, &[interval.midpoint()], &quad_opts(cfg))?.0
    };
    let margin = dirichlet - w * hardy_term - constant * norm2;
    let scale = dirichlet.abs() + (w * hardy_term).abs() + (constant * norm2).abs();
    Ok((margin, scale.max(f64::MIN_POSITIVE)))
}

#[derive(Debug, Clone, Serialize)]
pub struct RayleighReport {
    pub gamma: f64,
    pub constant: f64,
    pub trials: usize,
    /// Smallest margin seen, relative to its term scale.
    pub worst_margin: f64,
}

/// Draws `trial_count` random sine sums (12 modes, coefficients uniform in
/// [-1, 1], deterministic in `seed`) and checks the inequality with the
/// sharp constant on each. Any margin below `-1e-9 scale` aborts with the
/// offending coefficients.
pub fn rayleigh_verify(
    gamma: f64,
    a: f64,
    b: f64,
    trial_count: usize,
    seed: u64,
    cfg: &NumericsConfig,
) -> Result<RayleighReport> {
    let constant = hardy_constant(gamma, a, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..trial_count {
        let coeffs: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let (margin, scale) = rayleigh_margin(gamma, a, b, &coeffs, constant, cfg)?;
        worst = worst.min(margin / scale);
        if margin < -1e-9 * scale {
            return Err(Error::InequalityViolated(format!(
                "margin {margin:.3e} at scale {scale:.3e} for coefficients {coeffs:?}"
            )));
        }
    }
    if trial_count == 0 {
        worst = 0.0;
    }
    Ok(RayleighReport { gamma, constant, trials: trial_count, worst_margin: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::{friedrichs_spec, ExtensionSpec};
    use crate::problem::builtin_bessel;
    use crate::spectra::{eigenvalues, lowest_eigenvalue};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn half_order_closed_forms() {
        // J_{1/2} = sqrt(2/(pi y)) sin y, J_{-1/2} = sqrt(2/(pi y)) cos y,
        // exercised on both sides of the series/asymptotic switchover
        for y in [0.3, 1.0, 2.0, 7.0, 11.9, 12.1, 40.0, 180.0] {
            let env = (2.0 / (PI * y)).sqrt();
            assert_relative_eq!(bessel_j(0.5, y), env * y.sin(), epsilon = 1e-12, max_relative = 1e-11);
            assert_relative_eq!(bessel_j(-0.5, y), env * y.cos(), epsilon = 1e-12, max_relative = 1e-11);
        }
        assert_eq!(bessel_j(0.0, 0.0), 1.0);
        assert_eq!(bessel_j(0.7, 0.0), 0.0);
        assert!(bessel_j(-1.5, 1.0).is_nan());
    }

    #[test]
    fn recurrence_holds_across_orders_and_arguments() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let g: f64 = rng.gen_range(0.05..0.95);
            let y: f64 = rng.gen_range(0.5..60.0);
            let lhs = bessel_j(g - 1.0, y) + bessel_j(g + 1.0, y);
            let rhs = 2.0 * g / y * bessel_j(g, y);
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            assert!(
                (lhs - rhs).abs() <= 1e-11 * scale,
                "recurrence defect {:.2e} at nu = {g}, y = {y}",
                (lhs - rhs).abs()
            );
        }
    }

    #[test]
    fn bessel_zeros() {
        for k in 1..=10 {
            assert_relative_eq!(bessel_j_zero(0.5, k).unwrap(), k as f64 * PI, max_relative = 1e-12);
        }
        let j01 = bessel_j_zero(0.0, 1).unwrap();
        assert!(j01 > 2.40 && j01 < 2.41);
        assert_relative_eq!(j01, 2.404825557695773, max_relative = 1e-11);
        assert_relative_eq!(bessel_j_zero(0.3, 1).unwrap(), 2.8540972243766844, max_relative = 1e-11);
        assert_relative_eq!(bessel_j_zero(0.3, 2).unwrap(), 5.9822213218635112, max_relative = 1e-11);
        for g in [0.0, 0.3, 0.7] {
            let mut prev = 0.0;
            for k in 1..=8 {
                let j = bessel_j_zero(g, k).unwrap();
                assert!(j > prev);
                prev = j;
            }
        }
        assert!(bessel_j_zero(1.0, 1).is_err());
        assert!(bessel_j_zero(0.3, 0).is_err());
    }

    #[test]
    fn lamb_function_forms_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let g: f64 = rng.gen_range(0.0..0.95);
            let y: f64 = rng.gen_range(0.3..25.0);
            let (v1, v2) = (lamb_g(g, y), lamb_g_alt(g, y));
            let scale = 1.0 + v1.abs().max(v2.abs());
            assert!((v1 - v2).abs() <= 1e-11 * scale, "forms differ at gamma = {g}, y = {y}");
        }
        // gamma = 0 reduces through J_{-1} = -J_1
        assert_relative_eq!(
            lamb_g(0.0, 0.9),
            bessel_j(0.0, 0.9) - 1.8 * bessel_j(1.0, 0.9),
            max_relative = 1e-13
        );
    }

    #[test]
    fn lamb_zeros() {
        // gamma = 1/2: G is proportional to y^{1/2} cos y
        for k in 1..=6 {
            let z = lamb_zero(0.5, k).unwrap();
            assert_relative_eq!(z.value, (2.0 * k as f64 - 1.0) * FRAC_PI_2, max_relative = 1e-9);
            assert!(z.residual <= 1e-10);
        }
        assert!(lamb_g(0.0, 0.9) > 0.0 && lamb_g(0.0, 1.0) < 0.0);
        assert_relative_eq!(lamb_g(0.0, 0.9), 0.07681461518069456, max_relative = 1e-11);
        assert_relative_eq!(lamb_g(0.0, 1.0), -0.11490348493190048, max_relative = 1e-11);
        let l01 = lamb_zero(0.0, 1).unwrap();
        assert!(l01.value > 0.9 && l01.value < 1.0);
        assert_relative_eq!(l01.value, 0.9407705639497374, max_relative = 1e-10);
        assert_relative_eq!(lamb_zero(0.0, 2).unwrap().value, 3.9593711850125742, max_relative = 1e-10);
        assert_relative_eq!(lamb_zero(0.3, 1).unwrap().value, 1.3248928167306772, max_relative = 1e-10);
        assert_relative_eq!(lamb_zero(0.7, 1).unwrap().value, 1.8115741447543714, max_relative = 1e-10);
        // below the first J zero, increasing in k
        for g in [0.0, 0.25, 0.5, 0.75] {
            let l1 = lamb_zero(g, 1).unwrap().value;
            assert!(l1 < bessel_j_zero(g, 1).unwrap());
            let mut prev = 0.0;
            for k in 1..=5 {
                let z = lamb_zero(g, k).unwrap();
                assert!(z.value > prev);
                assert!(z.residual <= 1e-10);
                prev = z.value;
            }
        }
    }

    #[test]
    fn friedrichs_spectrum_closed_forms() {
        // gamma = 1/2 on (0, 2): the Dirichlet Laplacian ladder (m pi / 2)^2
        let sp = symmetric_bessel_friedrichs_spectrum(0.5, 0.0, 2.0, 4).unwrap();
        let flat = sp.flat();
        assert_eq!(flat.len(), 8);
        for (m, v) in flat.iter().enumerate() {
            let want = ((m + 1) as f64 * FRAC_PI_2).powi(2);
            assert_relative_eq!(*v, want, max_relative = 1e-10);
        }
        // gamma = 0 on (0, 2): the bottom is Lamb's constant squared
        let sp = symmetric_bessel_friedrichs_spectrum(0.0, 0.0, 2.0, 3).unwrap();
        assert_relative_eq!(sp.flat()[0], 0.8850492539943069, max_relative = 1e-10);
        // halving the interval scales everything by 4
        let wide = symmetric_bessel_friedrichs_spectrum(0.3, 0.0, 2.0, 3).unwrap();
        let narrow = symmetric_bessel_friedrichs_spectrum(0.3, 0.0, 1.0, 3).unwrap();
        for (w, n) in wide.flat().iter().zip(narrow.flat()) {
            assert_relative_eq!(4.0 * w, n, max_relative = 1e-12);
        }
    }

    #[test]
    fn hardy_constants() {
        assert_relative_eq!(hardy_constant(0.5, 0.0, 1.0).unwrap(), PI * PI, max_relative = 1e-10);
        assert_relative_eq!(
            hardy_constant(0.5, 0.0, 2.0).unwrap(),
            PI * PI / 4.0,
            max_relative = 1e-10
        );
        assert_relative_eq!(hardy_constant(0.0, 0.0, 2.0).unwrap(), 0.8850492539943069, max_relative = 1e-10);
        assert_relative_eq!(hardy_constant(0.25, 0.0, 2.0).unwrap(), 1.593604260449358, max_relative = 1e-10);
        assert_relative_eq!(hardy_constant(0.75, 0.0, 2.0).unwrap(), 3.5011456924862754, max_relative = 1e-10);
    }

    #[test]
    fn closed_form_spectra_match_the_integrator() {
        // the central cross-check: Lamb zeros against the mixed
        // Dirichlet-Neumann bottom of the half-interval problem, J zeros
        // against its Friedrichs ladder
        let cfg = NumericsConfig::default();
        let dn = ExtensionSpec::Separated { alpha: PI, beta: FRAC_PI_2 };
        for g in [0.0, 0.3, 0.5, 0.7] {
            let half = builtin_bessel(g, 0.0, 1.0).unwrap();
            let want = hardy_constant(g, 0.0, 2.0).unwrap();
            let got = lowest_eigenvalue(&half, &dn, &cfg).unwrap();
            assert!(
                (got - want).abs() <= 1e-7 * (1.0 + want.abs()),
                "gamma = {g}: lamb bottom {want} vs integrator {got}"
            );
        }
        let half = builtin_bessel(0.3, 0.0, 1.0).unwrap();
        let j1 = bessel_j_zero(0.3, 1).unwrap();
        let j2 = bessel_j_zero(0.3, 2).unwrap();
        let got = eigenvalues(&half, &friedrichs_spec(), 1.0, j2 * j2 + 4.0, 2, &cfg)
            .unwrap()
            .flat();
        assert_eq!(got.len(), 2);
        assert!((got[0] - j1 * j1).abs() <= 1e-7 * (1.0 + j1 * j1));
        assert!((got[1] - j2 * j2).abs() <= 1e-7 * (1.0 + j2 * j2));
    }

    #[test]
    fn rayleigh_quotient_respects_the_inequality() {
        let cfg = NumericsConfig::default();
        // gamma = 1/2 is the Poincare case; the first mode attains equality
        let c = hardy_constant(0.5, 0.0, 1.0).unwrap();
        let (margin, scale) = rayleigh_margin(0.5, 0.0, 1.0, &[1.0], c, &cfg).unwrap();
        assert!(margin.abs() <= 1e-9 * scale);
        // and witnesses sharpness: one percent more is violated by that mode
        let (margin, scale) = rayleigh_margin(0.5, 0.0, 1.0, &[1.0], 1.01 * c, &cfg).unwrap();
        assert!(margin < -1e-4 * scale);

        let report = rayleigh_verify(0.0, 0.0, 2.0, 200, 42, &cfg).unwrap();
        assert_eq!(report.trials, 200);
        assert!(report.worst_margin >= -1e-9);
        let report = rayleigh_verify(0.3, 0.0, 2.0, 50, 7, &cfg).unwrap();
        assert!(report.worst_margin >= -1e-9);
    }
}

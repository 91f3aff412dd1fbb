//! Built-in verification suite. Every check recomputes something the solver
//! produces from an independent side: a closed form, a factorization
//! identity, a brute-force determinant scan, or an inequality sampled on
//! random trial functions. The pass thresholds are fixed constants here; the
//! numerics config only controls the solver accuracy feeding the checks, so
//! a corrupted tolerance override makes checks fail rather than pass softer.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bessel::{hardy_constant, lamb_zero, rayleigh_margin, rayleigh_verify};
use crate::boundary::{
    extension_bundle, generalized_boundary_values, nonprincipal_solution, principal_solution,
    wronskian_of, xi_boundary_check, Sol,
};
use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::extensions::{
    b_side_data, classify_dim2, compare_dim2, krein_matrix, nonneg_range_fixed_beta,
    nonneg_range_fixed_beta_alt, AuxB2, ExtensionSpec, PartialOrderResult,
};
use crate::problem::{
    builtin_bessel, builtin_regular, builtin_symmetric_bessel, Endpoint, Interval, Problem, SeedFn,
};
use crate::spectra::{char_cache, eigenvalues, fundamental_system_cached, lowest_eigenvalue};
use crate::symmetric::{decompose, decompose_separated, factorization_residual, half_problem,
    two_interval_decompose, OuterBc};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const CHECK_COUNT: usize = 11;

pub fn check_name(id: usize) -> &'static str {
    match id {
        1 => "closed-form regular spectrum",
        2 => "symmetric separated union",
        3 => "symmetric coupled union",
        4 => "krein extension",
        5 => "admissible range floor",
        6 => "extension ordering",
        7 => "characteristic factorization",
        8 => "lamb zeros",
        9 => "hardy inequality",
        10 => "two-interval interface",
        11 => "boundary identities",
        _ => "unknown",
    }
}

/// Run one check; failures land in the outcome, never panic.
pub fn run_check(id: usize, cfg: &NumericsConfig, fast: bool) -> CheckOutcome {
    let start = Instant::now();
    let result = match id {
        1 => c01_closed_form_spectrum(cfg),
        2 => c02_symmetric_separated_union(cfg),
        3 => c03_symmetric_coupled_union(cfg),
        4 => c04_krein_extension(cfg),
        5 => c05_range_floor(cfg),
        6 => c06_extension_ordering(cfg),
        7 => c07_factorization(cfg),
        8 => c08_lamb_zeros(cfg),
        9 => c09_hardy_inequality(cfg, fast),
        10 => c10_two_interval(cfg),
        11 => c11_boundary_identities(cfg),
        _ => Err(Error::CheckFailed(format!("no check with id {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(detail) => CheckOutcome { id, name: check_name(id), passed: true, detail, seconds },
        Err(e) => CheckOutcome {
            id,
            name: check_name(id),
            passed: false,
            detail: e.to_string(),
            seconds,
        },
    }
}

pub fn run_all(cfg: &NumericsConfig, fast: bool) -> Vec<CheckOutcome> {
    (1..=CHECK_COUNT).map(|id| run_check(id, cfg, fast)).collect()
}

fn fail(msg: String) -> Error {
    Error::CheckFailed(msg)
}

fn free_problem(a: f64, b: f64) -> Result<Problem> {
    builtin_regular(Interval::new(a, b)?, 1.0, 0.0, 1.0)
}

/// Free problem on (0, 1): Dirichlet-Dirichlet eigenvalues (k pi)^2 and
/// Dirichlet-Neumann ((2k-1) pi/2)^2, ten of each, relative 1e-8.
fn c01_closed_form_spectrum(cfg: &NumericsConfig) -> Result<String> {
    let start = Instant::now();
    let p = free_problem(0.0, 1.0)?;
    let mut worst = 0.0f64;
    let cases: [(f64, Box<dyn Fn(usize) -> f64>); 2] = [
        (PI, Box::new(|k| ((k + 1) as f64 * PI).powi(2))),
        (FRAC_PI_2, Box::new(|k| ((2 * k + 1) as f64 * FRAC_PI_2).powi(2))),
    ];
    for (beta, exact) in &cases {
        let hi = exact(9) + exact(0);
        let spec = ExtensionSpec::Separated { alpha: PI, beta: *beta };
        let flat = eigenvalues(&p, &spec, 0.5, hi, 10, cfg)?.flat();
        if flat.len() != 10 {
            return Err(fail(format!("expected 10 eigenvalues at beta = {beta}, got {}", flat.len())));
        }
        for (k, got) in flat.iter().enumerate() {
            let want = exact(k);
            let rel = (got - want).abs() / want;
            if rel > 1e-8 {
                return Err(fail(format!(
                    "eigenvalue {k} at beta = {beta}: got {got:.12e} want {want:.12e} (rel {rel:.2e} > 1e-8)"
                )));
            }
            worst = worst.max(rel);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 5.0 {
        return Err(fail(format!("runtime {secs:.1}s exceeds the 5s budget")));
    }
    Ok(format!("20 eigenvalues within rel {worst:.2e} of closed forms (budget 1e-8) in {secs:.2}s"))
}

/// First eight eigenvalues of the fully symmetric separated extension equal
/// the merged Dirichlet/Neumann half-interval spectra, per eigenvalue 1e-7.
fn c02_symmetric_separated_union(cfg: &NumericsConfig) -> Result<String> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for gamma in [0.0, 0.3, 0.5, 0.7] {
        let full = builtin_symmetric_bessel(gamma, 0.0, 2.0)?;
        let half = half_problem(&full, cfg)?;
        for alpha in [PI, FRAC_PI_2, 2.0] {
            let d = decompose_separated(alpha)?;
            let lo_d = lowest_eigenvalue(&half, &d.dirichlet_spec, cfg)?;
            let lo_n = lowest_eigenvalue(&half, &d.neumann_spec, cfg)?;
            let z_lo = (lo_d.min(lo_n) - 5.0).min(-5.0);
            let mut merged = eigenvalues(&half, &d.dirichlet_spec, z_lo, 260.0, 12, cfg)?.flat();
            merged.extend(eigenvalues(&half, &d.neumann_spec, z_lo, 260.0, 12, cfg)?.flat());
            merged.sort_by(f64::total_cmp);
            if merged.len() < 8 {
                return Err(fail(format!(
                    "gamma = {gamma}, alpha = {alpha}: only {} half eigenvalues below 260",
                    merged.len()
                )));
            }
            merged.truncate(8);
            let spec = ExtensionSpec::Separated { alpha, beta: alpha };
            let flat = eigenvalues(&full, &spec, z_lo, merged[7] + 1.0, 8, cfg)?.flat();
            if flat.len() < 8 {
                return Err(fail(format!(
                    "gamma = {gamma}, alpha = {alpha}: full problem returned {} of 8 eigenvalues",
                    flat.len()
                )));
            }
            for (f, m) in flat.iter().zip(&merged) {
                let d = (f - m).abs();
                if d > 1e-7 {
                    return Err(fail(format!(
                        "gamma = {gamma}, alpha = {alpha}: full {f:.10e} vs merged halves {m:.10e} (|d| = {d:.2e} > 1e-7)"
                    )));
                }
                worst = worst.max(d);
            }
            cases += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(fail(format!("runtime {secs:.1}s exceeds the 60s budget")));
    }
    Ok(format!("{cases} cases; worst per-eigenvalue distance {worst:.2e} (budget 1e-7) in {secs:.1}s"))
}

/// Periodic and antiperiodic couplings on the free symmetric problem:
/// spectra match both the closed forms and the merged decomposed halves.
fn c03_symmetric_coupled_union(cfg: &NumericsConfig) -> Result<String> {
    let full = builtin_symmetric_bessel(0.5, 0.0, 2.0)?;
    let half = half_problem(&full, cfg)?;
    let mut worst = 0.0f64;

    let kpi2 = |k: usize| (k as f64 * PI).powi(2);
    let hodd = |k: usize| ((2 * k + 1) as f64 * FRAC_PI_2).powi(2);
    let periodic_exact = vec![0.0, kpi2(1), kpi2(1), kpi2(2), kpi2(2), kpi2(3), kpi2(3)];
    let antiperiodic_exact = vec![hodd(0), hodd(0), hodd(1), hodd(1), hodd(2), hodd(2)];

    let cases: [(&str, [[f64; 2]; 2], &[f64]); 2] = [
        ("periodic", [[1.0, 0.0], [0.0, 1.0]], &periodic_exact),
        ("antiperiodic", [[-1.0, 0.0], [0.0, -1.0]], &antiperiodic_exact),
    ];
    for (label, r, exact) in cases {
        let spec = ExtensionSpec::Coupled { eta: 0.0, r };
        let n = exact.len();
        let hi = exact[n - 1] + 2.0;
        let sp = eigenvalues(&full, &spec, -2.0, hi, n, cfg)?;
        let flat = sp.flat();
        if flat.len() != n {
            return Err(fail(format!("{label}: expected {n} eigenvalues, got {}", flat.len())));
        }
        for e in &sp.eigenvalues {
            let expect_double = e.eigenvalue > 1.0;
            if expect_double && e.multiplicity != 2 {
                return Err(fail(format!(
                    "{label}: eigenvalue {:.6e} has multiplicity {} instead of 2",
                    e.eigenvalue, e.multiplicity
                )));
            }
        }
        let d = decompose(&spec)?;
        let mut merged = eigenvalues(&half, &d.dirichlet_spec, -2.0, hi, n, cfg)?.flat();
        merged.extend(eigenvalues(&half, &d.neumann_spec, -2.0, hi, n, cfg)?.flat());
        merged.sort_by(f64::total_cmp);
        merged.truncate(n);
        for ((f, x), m) in flat.iter().zip(exact).zip(&merged) {
            let dx = (f - x).abs().max((f - m).abs());
            if dx > 1e-7 {
                return Err(fail(format!(
                    "{label}: full {f:.10e}, closed form {x:.10e}, merged halves {m:.10e} (worst |d| = {dx:.2e} > 1e-7)"
                )));
            }
            worst = worst.max(dx);
        }
    }
    Ok(format!(
        "periodic and antiperiodic spectra match closed forms and merged halves within {worst:.2e} (budget 1e-7)"
    ))
}

/// The Krein extension of the free problem: its boundary matrix in closed
/// form, a double eigenvalue at zero, and agreement with the zero-parameter
/// classification.
fn c04_krein_extension(cfg: &NumericsConfig) -> Result<String> {
    let p = free_problem(0.0, 1.0)?;
    let rk = krein_matrix(&p, cfg)?;
    let want = [[1.0, 1.0], [0.0, 1.0]];
    for i in 0..2 {
        for j in 0..2 {
            if (rk[i][j] - want[i][j]).abs() > 1e-9 {
                return Err(fail(format!(
                    "krein matrix entry ({i},{j}) = {:.12e}, want {} (budget 1e-9)",
                    rk[i][j], want[i][j]
                )));
            }
        }
    }
    let spec = ExtensionSpec::Coupled { eta: 0.0, r: rk };
    let sp = eigenvalues(&p, &spec, -1.0, 30.0, 2, cfg)?;
    let e0 = sp
        .eigenvalues
        .first()
        .ok_or_else(|| fail("no eigenvalue found near zero".into()))?;
    if e0.eigenvalue.abs() > 1e-7 {
        return Err(fail(format!("bottom eigenvalue {:.3e} is not 0 within 1e-7", e0.eigenvalue)));
    }
    if e0.multiplicity != 2 {
        return Err(fail(format!("zero eigenvalue has multiplicity {}, want 2", e0.multiplicity)));
    }
    if e0.residual > 1e-8 {
        return Err(fail(format!("zero eigenvalue residual {:.3e} > 1e-8", e0.residual)));
    }
    let pack = crate::boundary::extension_data_pack(&p, cfg)?;
    let classified = classify_dim2(&pack, &AuxB2::real(0.0, 0.0, 0.0))?;
    match classified {
        ExtensionSpec::Coupled { eta, r } => {
            if eta.abs() > 1e-12 {
                return Err(fail(format!("B = 0 classification produced phase {eta}")));
            }
            for i in 0..2 {
                for j in 0..2 {
                    if (r[i][j] - rk[i][j]).abs() > 1e-9 {
                        return Err(fail(format!(
                            "B = 0 classification entry ({i},{j}) = {:.12e} differs from the boundary-matrix route {:.12e}",
                            r[i][j], rk[i][j]
                        )));
                    }
                }
            }
        }
        other => {
            return Err(fail(format!("B = 0 classification is not coupled: {other:?}")));
        }
    }
    Ok(format!(
        "R_K = [[1,1],[0,1]] within 1e-9; z = 0 double (residual {:.1e}); B = 0 classification agrees",
        e0.residual
    ))
}

/// Floor of the admissible left angle for a fixed right condition, by two
/// independent routes, with the zero eigenvalue at the floor itself.
fn c05_range_floor(cfg: &NumericsConfig) -> Result<String> {
    let p = free_problem(0.0, 1.0)?;
    let bundle = extension_bundle(&p, cfg)?;
    let a1 = nonneg_range_fixed_beta(&bundle.pack, PI, bundle.uhat_b, bundle.uhatp_b)?;
    if (a1 - PI / 4.0).abs() > 1e-9 {
        return Err(fail(format!("alpha floor {a1:.12} differs from pi/4 by more than 1e-9")));
    }
    let bd = b_side_data(&p, cfg)?;
    let a2 = nonneg_range_fixed_beta_alt(&bd, PI, 0.0)?;
    if (a1 - a2).abs() > 1e-8 {
        return Err(fail(format!("routes disagree: {a1:.12} vs {a2:.12} (budget 1e-8)")));
    }
    let at_floor =
        lowest_eigenvalue(&p, &ExtensionSpec::Separated { alpha: a1, beta: PI }, cfg)?;
    if at_floor.abs() > 1e-7 {
        return Err(fail(format!("lambda_min at the floor is {at_floor:.3e}, not 0 within 1e-7")));
    }
    let above =
        lowest_eigenvalue(&p, &ExtensionSpec::Separated { alpha: a1 + 0.1, beta: PI }, cfg)?;
    if above <= 0.0 {
        return Err(fail(format!("lambda_min just above the floor is {above:.3e}, not positive")));
    }
    let neumann = nonneg_range_fixed_beta(&bundle.pack, FRAC_PI_2, bundle.uhat_b, bundle.uhatp_b)?;
    if (neumann - FRAC_PI_2).abs() > 1e-9 {
        return Err(fail(format!("beta' = pi/2 floor {neumann:.12} is not pi/2")));
    }
    Ok(format!(
        "floor pi/4 (routes differ by {:.1e}); lambda_min = {:.1e} at the floor, {:.3e} above it",
        (a1 - a2).abs(),
        at_floor,
        above
    ))
}

/// Monotonicity of the bottom eigenvalue in the boundary angle, and
/// agreement of the two dimensional form order with spectral order.
fn c06_extension_ordering(cfg: &NumericsConfig) -> Result<String> {
    let p = free_problem(0.0, 1.0)?;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..5 {
        let alpha = PI / 4.0 + (PI - PI / 4.0) * i as f64 / 4.0;
        let lam = lowest_eigenvalue(&p, &ExtensionSpec::Separated { alpha, beta: PI }, cfg)?;
        if lam < prev - 1e-9 * (1.0 + prev.abs()) {
            return Err(fail(format!(
                "lambda_min decreased along alpha: {prev:.10e} -> {lam:.10e} at alpha = {alpha:.6}"
            )));
        }
        prev = lam;
    }

    let pack = crate::boundary::extension_data_pack(&p, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let draw = |rng: &mut ChaCha8Rng| -> AuxB2 {
        let b11: f64 = rng.gen_range(0.0..2.0);
        let b22: f64 = rng.gen_range(0.0..2.0);
        let t: f64 = rng.gen_range(-0.9..0.9);
        let b12 = t * (b11 * b22 * pack.norm2_u / pack.norm2_v).sqrt();
        AuxB2::real(b11, b12, b22)
    };
    let mut comparable = 0usize;
    let mut incomparable = 0usize;
    for pair in 0..10 {
        let b = draw(&mut rng);
        let bh = if pair < 5 {
            // force an ordered pair: add an admissible increment
            let d = draw(&mut rng);
            AuxB2::real(b.b11 + d.b11, (b.b12 + d.b12).re, b.b22 + d.b22)
        } else {
            draw(&mut rng)
        };
        let verdict = compare_dim2(&b, &bh, &pack)?;
        let lam = lowest_eigenvalue(&p, &classify_dim2(&pack, &b)?, cfg)?;
        let lam_h = lowest_eigenvalue(&p, &classify_dim2(&pack, &bh)?, cfg)?;
        let slack = 1e-9 * (1.0 + lam.abs().max(lam_h.abs()));
        let ok = match verdict {
            PartialOrderResult::LessOrEqual => lam <= lam_h + slack,
            PartialOrderResult::GreaterOrEqual => lam_h <= lam + slack,
            PartialOrderResult::Equal => (lam - lam_h).abs() <= slack,
            PartialOrderResult::Incomparable => {
                incomparable += 1;
                true
            }
        };
        if !matches!(verdict, PartialOrderResult::Incomparable) {
            comparable += 1;
        }
        if !ok {
            return Err(fail(format!(
                "pair {pair}: verdict {verdict:?} contradicts lambda_min {lam:.10e} vs {lam_h:.10e}"
            )));
        }
    }
    if comparable < 5 {
        return Err(fail(format!("only {comparable} of 10 pairs were comparable; ordered pairs missing")));
    }
    Ok(format!(
        "lambda_min nondecreasing over 5 angles; {comparable} comparable and {incomparable} incomparable pairs consistent"
    ))
}

/// The full characteristic function factors into the two half-interval ones,
/// for separated, antiperiodic, and genuinely rotated couplings.
fn c07_factorization(cfg: &NumericsConfig) -> Result<String> {
    let p = builtin_symmetric_bessel(0.3, 0.0, 2.0)?;
    let specs = [
        ExtensionSpec::Separated { alpha: PI, beta: PI },
        ExtensionSpec::Separated { alpha: FRAC_PI_2, beta: FRAC_PI_2 },
        ExtensionSpec::Separated { alpha: 2.2, beta: 2.2 },
        ExtensionSpec::Coupled { eta: 0.0, r: [[-1.0, 0.0], [0.0, -1.0]] },
        ExtensionSpec::Coupled { eta: 0.0, r: [[0.6, 0.8], [-0.8, 0.6]] },
    ];
    let mut worst = 0.0f64;
    for spec in &specs {
        for j in 0..25 {
            let z = -5.0 + 65.0 * j as f64 / 24.0;
            let r = factorization_residual(&p, spec, z, cfg)?;
            if r > 1e-8 {
                return Err(fail(format!(
                    "factorization residual {r:.2e} > 1e-8 at z = {z:.3} for {spec:?}"
                )));
            }
            worst = worst.max(r);
        }
    }
    Ok(format!("125 grid points across 5 couplings; worst residual {worst:.2e} (budget 1e-8)"))
}

/// Lamb zeros: half-odd closed form, and the bottom of the mixed
/// Dirichlet-Neumann half-interval spectrum across gamma.
fn c08_lamb_zeros(cfg: &NumericsConfig) -> Result<String> {
    for k in 1..=5usize {
        let z = lamb_zero(0.5, k)?.value;
        let want = (2 * k - 1) as f64 * FRAC_PI_2;
        if (z - want).abs() > 1e-9 * want {
            return Err(fail(format!(
                "lamb zero {k} at gamma = 1/2: {z:.12} vs {want:.12} (rel budget 1e-9)"
            )));
        }
    }
    let dn = ExtensionSpec::Separated { alpha: PI, beta: FRAC_PI_2 };
    let mut worst = 0.0f64;
    for gamma in [0.0, 0.3, 0.7] {
        let want = hardy_constant(gamma, 0.0, 2.0)?;
        let half = builtin_bessel(gamma, 0.0, 1.0)?;
        let got = lowest_eigenvalue(&half, &dn, cfg)?;
        let d = (got - want).abs();
        if d > 1e-7 * (1.0 + want.abs()) {
            return Err(fail(format!(
                "gamma = {gamma}: 4 lambda_1^2/(b-a)^2 = {want:.10e} vs spectral bottom {got:.10e}"
            )));
        }
        worst = worst.max(d);
    }
    Ok(format!(
        "five half-odd zeros exact to 1e-9; spectral bottoms match within {worst:.2e} for three gammas"
    ))
}

/// Hardy-type inequality with the sharp constant: random trials stay
/// nonnegative, the first mode attains the bound at gamma = 1/2, and a one
/// percent inflation is violated.
fn c09_hardy_inequality(cfg: &NumericsConfig, fast: bool) -> Result<String> {
    let trials = if fast { 20 } else { 200 };
    let mut worst = f64::INFINITY;
    for gamma in [0.0, 0.5] {
        let report = rayleigh_verify(gamma, 0.0, 2.0, trials, 42, cfg)?;
        worst = worst.min(report.worst_margin);
    }
    let c = hardy_constant(0.5, 0.0, 1.0)?;
    let (margin, scale) = rayleigh_margin(0.5, 0.0, 1.0, &[1.0], c, cfg)?;
    if margin.abs() > 1e-9 * scale {
        return Err(fail(format!(
            "first mode misses equality at the sharp constant: margin {margin:.3e} at scale {scale:.3e}"
        )));
    }
    let (violated, vscale) = rayleigh_margin(0.5, 0.0, 1.0, &[1.0], 1.01 * c, cfg)?;
    if violated >= -1e-9 * vscale {
        return Err(fail(format!(
            "inflating the constant by 1% still leaves margin {violated:.3e}; the constant is not sharp"
        )));
    }
    Ok(format!(
        "{trials} trials per gamma nonnegative (worst relative margin {worst:.1e}); equality at the first mode; +1% violated (margin {violated:.2e})"
    ))
}

/// Two-interval conditions across an interior singular point: decomposed
/// pieces against a brute-force interface determinant scan.
fn c10_two_interval(cfg: &NumericsConfig) -> Result<String> {
    let half = builtin_bessel(0.3, 0.0, 1.0)?;
    let cache = char_cache(&half)?;
    let (lo, hi) = (-2.0, 60.0);
    let mut total = 0usize;
    let mut worst = 0.0f64;
    for r0 in [
        [[1.0, 0.0], [0.0, 1.0]],
        [[-1.0, 0.0], [0.0, -1.0]],
        [[0.0, 1.0], [-1.0, 0.0]],
    ] {
        let d = two_interval_decompose(&half, r0, OuterBc::Fixed(PI))?;
        let mut pieces = eigenvalues(&half, &d.odd_spec, lo, hi, 16, cfg)?.flat();
        pieces.extend(eigenvalues(&half, &d.even_spec, lo, hi, 16, cfg)?.flat());
        pieces.sort_by(f64::total_cmp);

        // independent route: the solution fixed by the Dirichlet outer
        // condition has interface data (A, B) = (-phi~(b), theta~(b)) on the
        // right copy and (A, -B) on the left; compatibility with r0 is
        //   M(z) = R21 A^2 - 2 R11 A B + R12 B^2 = 0
        let m = |z: f64| -> Result<f64> {
            let fd = fundamental_system_cached(&half, &cache, z, cfg)?;
            let (a, b) = (-fd.phi_b, fd.theta_b);
            Ok(r0[1][0] * a * a - 2.0 * r0[0][0] * a * b + r0[0][1] * b * b)
        };
        let n = 310;
        let mut roots = Vec::new();
        let mut prev = (lo, m(lo)?);
        for i in 1..=n {
            let z = lo + (hi - lo) * i as f64 / n as f64;
            let g = m(z)?;
            if g != 0.0 && prev.1 != 0.0 && g.signum() != prev.1.signum() {
                let (mut zl, mut zr) = (prev.0, z);
                let gl = prev.1;
                for _ in 0..80 {
                    let zm = 0.5 * (zl + zr);
                    let gm = m(zm)?;
                    if gm == 0.0 {
                        zl = zm;
                        zr = zm;
                        break;
                    }
                    if gm.signum() == gl.signum() {
                        zl = zm;
                    } else {
                        zr = zm;
                    }
                }
                roots.push(0.5 * (zl + zr));
            }
            prev = (z, g);
        }
        if roots.len() != pieces.len() {
            return Err(fail(format!(
                "r0 = {r0:?}: determinant scan found {} roots but the pieces have {} eigenvalues",
                roots.len(),
                pieces.len()
            )));
        }
        for (x, y) in pieces.iter().zip(&roots) {
            let dx = (x - y).abs();
            if dx > 1e-6 * (1.0 + x.abs()) {
                return Err(fail(format!(
                    "r0 = {r0:?}: piece eigenvalue {x:.10e} vs determinant root {y:.10e} (budget 1e-6)"
                )));
            }
            worst = worst.max(dx);
        }
        total += roots.len();
    }
    Ok(format!(
        "3 interface couplings, {total} eigenvalues matched against determinant roots within {worst:.2e} (budget 1e-6)"
    ))
}

/// Boundary-data infrastructure: the bilinear boundary form reproduces the
/// Wronskian at both ends, the boundary values transform correctly under a
/// change of nonprincipal gauge, and the Friedrichs-inverse residuals vanish.
fn c11_boundary_identities(cfg: &NumericsConfig) -> Result<String> {
    let tight = cfg.tightened();
    let problems = [free_problem(0.0, 1.0)?, builtin_bessel(0.3, 0.0, 1.0)?];
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut worst = 0.0f64;
    for p in &problems {
        let u = principal_solution(p, Endpoint::Left, 0.0, &tight)?;
        let uhat = nonprincipal_solution(p, Endpoint::Left, &tight)?;
        for _ in 0..4 {
            let (a1, a2, b1, b2) = (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let g = Sol::combine(a1, &u, a2, &uhat);
            let h = Sol::combine(b1, &u, b2, &uhat);
            let qg = generalized_boundary_values(p, &g, &tight)?;
            let qh = generalized_boundary_values(p, &h, &tight)?;
            let w = wronskian_of(&g, &h, p.interval.midpoint())?;
            for lhs in [
                qg.g_a * qh.gp_a - qg.gp_a * qh.g_a,
                qg.g_b * qh.gp_b - qg.gp_b * qh.g_b,
            ] {
                let r = (lhs - w).abs() / (1.0 + w.abs());
                if r > 1e-8 {
                    return Err(fail(format!(
                        "boundary form vs wronskian: residual {r:.2e} > 1e-8 on {}",
                        p.label
                    )));
                }
                worst = worst.max(r);
            }
        }
    }

    // gauge change uhat -> uhat + C u: g~(a) fixed, g~'(a) -> g~'(a) - C g~(a)
    for p in &problems {
        let u = principal_solution(p, Endpoint::Left, 0.0, &tight)?;
        let uhat = nonprincipal_solution(p, Endpoint::Left, &tight)?;
        let g = Sol::combine(0.7, &u, 1.3, &uhat);
        let q0 = generalized_boundary_values(p, &g, &tight)?;
        for cc in [1.0, -1.0, 2.5] {
            let mut gauged = p.clone();
            let pr = gauged.seed_a.principal.clone();
            let np = gauged.seed_a.nonprincipal.clone();
            gauged.seed_a.nonprincipal = SeedFn::new(move |t| {
                let (uv, u1) = pr.eval(t);
                let (nv, n1) = np.eval(t);
                (nv + cc * uv, n1 + cc * u1)
            });
            let q = generalized_boundary_values(&gauged, &g, &tight)?;
            for (got, want) in [
                (q.g_a, q0.g_a),
                (q.gp_a, q0.gp_a - cc * q0.g_a),
                (q.g_b, q0.g_b),
                (q.gp_b, q0.gp_b),
            ] {
                let r = (got - want).abs() / (1.0 + want.abs());
                if r > 1e-8 {
                    return Err(fail(format!(
                        "gauge covariance residual {r:.2e} > 1e-8 on {} at C = {cc}",
                        p.label
                    )));
                }
                worst = worst.max(r);
            }
        }
    }

    for p in &problems {
        for (i, v) in xi_boundary_check(p, cfg)?.iter().enumerate() {
            if *v > 1e-8 {
                return Err(fail(format!(
                    "friedrichs-inverse residual {i} is {v:.2e} > 1e-8 on {}",
                    p.label
                )));
            }
            worst = worst.max(*v);
        }
    }
    Ok(format!("wronskian, gauge, and inverse residuals all within {worst:.2e} (budget 1e-8)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_stable() {
        for id in 1..=CHECK_COUNT {
            assert_ne!(check_name(id), "unknown");
        }
        assert_eq!(check_name(0), "unknown");
    }

    #[test]
    fn corrupted_tolerance_fails_a_check() {
        // a coarse solver cannot hit the pinned thresholds
        let coarse = NumericsConfig::with_base_tol(1e-1);
        let out = run_check(1, &coarse, true);
        assert!(!out.passed, "coarse config unexpectedly passed: {}", out.detail);
        assert!(!out.detail.is_empty());
    }
}

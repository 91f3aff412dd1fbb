/// Shared numerical knobs. One instance is threaded through every pipeline
/// so that a single `--tol` flag can tighten or relax the whole stack
/// coherently.
#[derive(Debug, Clone)]
pub struct NumericsConfig {
    /// Relative tolerance of the adaptive Runge-Kutta integrator.
    pub ode_rtol: f64,
    /// Absolute tolerance of the integrator. Initial data is rescaled to
    /// unit size internally, so this acts near the solution scale.
    pub ode_atol: f64,
    /// Absolute target for inner products and other quadratures.
    pub quad_abs_tol: f64,
    /// Relative target for quadratures with large values.
    pub quad_rel_tol: f64,
    /// Settling threshold for boundary-value limits taken along the
    /// geometric sequence x_k = endpoint +/- offset * 2^-k.
    pub boundary_settle_tol: f64,
    /// Maximum k in that sequence.
    pub boundary_max_halvings: usize,
    /// Acceptable defect |W(nonprincipal, principal) - 1| of endpoint seeds.
    pub wronskian_tol: f64,
    /// Relative accuracy of eigenvalue root finding.
    pub root_rel_tol: f64,
    /// A local minimum of |F| below this fraction of the local scale is
    /// investigated as a double root.
    pub double_root_detect: f64,
    /// Residual bound |F(lambda)| <= residual_tol * local scale for an
    /// accepted eigenvalue.
    pub residual_tol: f64,
    /// The scan step starts at pi^2/(b-a)^2 divided by this.
    pub scan_step_divisor: f64,
    /// How many times the scanner may halve its whole grid when a refined
    /// pass disagrees with the coarse one.
    pub max_scan_refinements: usize,
    /// Probe count for reflection-symmetry checks.
    pub symmetry_probes: usize,
    /// Tolerance of the symmetry and reflection-invariance checks.
    pub symmetry_tol: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            ode_rtol: 1e-10,
            ode_atol: 1e-12,
            quad_abs_tol: 1e-10,
            quad_rel_tol: 1e-12,
            boundary_settle_tol: 1e-9,
            boundary_max_halvings: 20,
            wronskian_tol: 1e-6,
            root_rel_tol: 1e-10,
            double_root_detect: 1e-6,
            residual_tol: 1e-8,
            scan_step_divisor: 8.0,
            max_scan_refinements: 4,
            symmetry_probes: 64,
            symmetry_tol: 1e-10,
        }
    }
}

impl NumericsConfig {
    /// Copy with the ODE tolerances two orders tighter. Structural
    /// quantities (boundary data, norms) carry pinned accuracy targets that
    /// exceed what the default local tolerance leaves after propagation
    /// across a singular region, so their pipelines tighten internally.
    pub fn tightened(&self) -> Self {
        NumericsConfig {
            ode_rtol: (self.ode_rtol * 1e-2).max(5e-13),
            ode_atol: (self.ode_atol * 1e-2).max(1e-15),
            ..self.clone()
        }
    }

    /// Scale the main tolerances by the given factor relative to defaults.
    /// `--tol 1e-8` on the CLI lands here.
    pub fn with_base_tol(tol: f64) -> Self {
        let d = NumericsConfig::default();
        let f = tol / d.ode_rtol;
        NumericsConfig {
            ode_rtol: tol,
            ode_atol: d.ode_atol * f,
            quad_abs_tol: d.quad_abs_tol * f,
            quad_rel_tol: d.quad_rel_tol * f,
            ..d
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes across the crate. Numeric failures (step underflow, scans
/// that cannot certify their output) are kept apart from caller errors
/// (invalid specs, malformed problem files) so the CLI can map them to
/// distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient {name} must be positive on the interior, got {value} at x = {x}")]
    NonPositiveCoefficient { name: &'static str, value: f64, x: f64 },

    #[error("endpoint seeds are not Wronskian-normalized at {side}: |W - 1| = {defect:.3e}")]
    WronskianNotNormalized { side: &'static str, defect: f64 },

    #[error("interval is empty or not finite: ({a}, {b})")]
    BadInterval { a: f64, b: f64 },

    #[error("gamma must lie in [0, 1), got {0}")]
    GammaOutOfRange(f64),

    #[error("problem file: {0}")]
    ProblemFile(String),

    #[error("expression: {0}")]
    Expr(String),

    #[error("integration step underflow at x = {x} (step {h:.3e})")]
    StepUnderflow { x: f64, h: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("quadrature did not converge: error estimate {estimate:.3e} > {tol:.3e}")]
    QuadratureNoConvergence { estimate: f64, tol: f64 },

    #[error("boundary limit failed to settle at {side} (last delta {delta:.3e}); the function may not lie in the maximal domain")]
    ExtrapolationDivergence { side: &'static str, delta: f64 },

    #[error("principal solution vanishes inside the window, cannot build a nonprincipal companion")]
    VanishingPrincipal,

    #[error("evaluation point {x} outside the valid range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("boundary parameter {name} = {value} outside {expected}")]
    BadAngle { name: &'static str, value: f64, expected: &'static str },

    #[error("coupled boundary matrix must have det R = 1, got {0}")]
    DetNotOne(f64),

    #[error("auxiliary parameters violate the nonnegativity condition: {0}")]
    NonnegativityViolated(String),

    #[error("denominator vanishes in {0}; the construction is not defined for this data")]
    DenominatorZero(&'static str),

    #[error("non-real coupling parameter c is not supported here (only the boundary-condition route handles it)")]
    NonRealCoupling,

    #[error("the Friedrichs solution has a zero at the opposite endpoint; data pack is not defined")]
    ZeroFriedrichsEigenvalue,

    #[error("eigenvalue scan kept finding new roots after refinement; window or step cannot be trusted")]
    ScanTooCoarse,

    #[error("eigenvalue scan exhausted its search range without the requested bracket")]
    ScanExhausted,

    #[error("root at z = {z} kept residual {residual:.3e} after polishing; integration accuracy does not support it")]
    ResidualTooLarge { z: f64, residual: f64 },

    #[error("algebraic and spectral nonnegativity checks disagree: {0}")]
    PathDisagreement(String),

    #[error("problem is not reflection symmetric: {0}")]
    NotSymmetric(String),

    #[error("extension spec is not reflection invariant: {0}")]
    NotReflectionInvariant(String),

    #[error("spec is not nonnegative: {0}")]
    NotNonnegative(String),

    #[error("fully coupled conditions across both interior and outer endpoints are not supported")]
    UnsupportedCoupling,

    #[error("Rayleigh quotient trial violates the inequality: {0}")]
    InequalityViolated(String),

    #[error("special function: {0}")]
    SpecialFunction(String),

    #[error("verification check failed: {0}")]
    CheckFailed(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the variant, for CLI diagnostics and
    /// the C interface.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPositiveCoefficient { .. } => "NonPositiveCoefficient",
            Error::WronskianNotNormalized { .. } => "WronskianNotNormalized",
            Error::BadInterval { .. } => "BadInterval",
            Error::GammaOutOfRange(_) => "GammaOutOfRange",
            Error::ProblemFile(_) => "ProblemFile",
            Error::Expr(_) => "Expr",
            Error::StepUnderflow { .. } => "StepUnderflow",
            Error::TooManySteps(_) => "TooManySteps",
            Error::QuadratureNoConvergence { .. } => "QuadratureNoConvergence",
            Error::ExtrapolationDivergence { .. } => "ExtrapolationDivergence",
            Error::VanishingPrincipal => "VanishingPrincipal",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::BadAngle { .. } => "BadAngle",
            Error::DetNotOne(_) => "DetNotOne",
            Error::NonnegativityViolated(_) => "NonnegativityViolated",
            Error::DenominatorZero(_) => "DenominatorZero",
            Error::NonRealCoupling => "NonRealCoupling",
            Error::ZeroFriedrichsEigenvalue => "ZeroFriedrichsEigenvalue",
            Error::ScanTooCoarse => "ScanTooCoarse",
            Error::ScanExhausted => "ScanExhausted",
            Error::ResidualTooLarge { .. } => "ResidualTooLarge",
            Error::PathDisagreement(_) => "PathDisagreement",
            Error::NotSymmetric(_) => "NotSymmetric",
            Error::NotReflectionInvariant(_) => "NotReflectionInvariant",
            Error::NotNonnegative(_) => "NotNonnegative",
            Error::UnsupportedCoupling => "UnsupportedCoupling",
            Error::InequalityViolated(_) => "InequalityViolated",
            Error::SpecialFunction(_) => "SpecialFunction",
            Error::CheckFailed(_) => "CheckFailed",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    /// True for errors caused by caller input (bad specs, malformed files,
    /// out-of-domain parameters) as opposed to numerical failures.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveCoefficient { .. }
                | Error::WronskianNotNormalized { .. }
                | Error::BadInterval { .. }
                | Error::GammaOutOfRange(_)
                | Error::ProblemFile(_)
                | Error::Expr(_)
                | Error::OutOfRange { .. }
                | Error::BadAngle { .. }
                | Error::DetNotOne(_)
                | Error::NonRealCoupling
                | Error::NotSymmetric(_)
                | Error::NotReflectionInvariant(_)
                | Error::NotNonnegative(_)
                | Error::UnsupportedCoupling
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// [`Error::is_numerical_failure`] separates numerics diagnostics (bugs or
/// tolerance trouble) from usage problems such as a bad spec file.
#[derive(Debug, Error)]
pub enum Error {
    #[error("singular Moebius denominator |1 - conj(lambda) z| = {modulus:e}")]
    Singularity { modulus: f64 },
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("degree {degree} exceeds the configured maximum {max}")]
    Capacity { degree: usize, max: usize },
    #[error("root iteration did not converge after {sweeps} sweeps")]
    Convergence { sweeps: usize, best: Vec<Complex64> },
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error(
        "Bochner count mismatch: expected {expected} critical points in the disk, found {found}"
    )]
    Bochner { expected: usize, found: usize },
    #[error("near-critical abort at t = {t}: |B'| = {derivative:e}")]
    NearCritical { t: f64, derivative: f64 },
    #[error("step underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("ambiguous endpoint assignment: {0}")]
    Ambiguity(String),
    #[error("collision clustering did not separate: {0}")]
    Refinement(String),
    #[error("basepoint rejected: {0}")]
    Basepoint(String),
    #[error("monodromy action is not transitive: orbit of 0 has size {orbit} of {degree}")]
    NonTransitive { orbit: usize, degree: usize },
    #[error("gluing graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("degenerate sequence: points {0} and {1} coincide")]
    DegenerateSequence(usize, usize),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("candidate pool exhausted after selecting {found} of {wanted} points")]
    Exhausted { found: usize, wanted: usize },
    #[error("stage {stage} failed at gate {gate} after scanning {scanned} candidates")]
    StageFailure {
        stage: usize,
        gate: String,
        scanned: usize,
    },
    #[error("product is not symmetric under the given map: {0}")]
    NotSymmetric(String),
    #[error("forfeited quadrature weight {forfeited:e} exceeds {bound:e}")]
    Coverage { forfeited: f64, bound: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short name of the violated gate, used in failure reports.
    pub fn gate(&self) -> &'static str {
        match self {
            Error::Singularity { .. } => "singularity",
            Error::Parameter(_) => "parameter",
            Error::Capacity { .. } => "capacity",
            Error::Convergence { .. } => "convergence",
            Error::Consistency(_) => "consistency",
            Error::Bochner { .. } => "bochner",
            Error::NearCritical { .. } => "near_critical",
            Error::StepUnderflow { .. } => "step_underflow",
            Error::Ambiguity(_) => "ambiguity",
            Error::Refinement(_) => "refinement",
            Error::Basepoint(_) => "basepoint",
            Error::NonTransitive { .. } => "transitivity",
            Error::Disconnected { .. } => "gluing_connectivity",
            Error::DegenerateSequence(..) => "degenerate_sequence",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::Exhausted { .. } => "pool_exhausted",
            Error::StageFailure { .. } => "stage",
            Error::NotSymmetric(_) => "not_symmetric",
            Error::Coverage { .. } => "coverage",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// True for diagnostics that signal a numerical failure (CLI exit code 2).
    pub fn is_numerical_failure(&self) -> bool {
        !matches!(
            self,
            Error::Parameter(_)
                | Error::Capacity { .. }
                | Error::InvalidSpec(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::DegenerateSequence(..)
        )
    }
}

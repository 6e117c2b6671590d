//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors raised by constructors, decompositions and verification routines.
///
/// Numerical routines signal hypothesis violations instead of returning
/// garbage; the variant names what failed so callers (and the CLI) can map
/// it to a structured reason.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (defect {defect:.3e})")]
    NotSymmetric { defect: f64 },

    #[error("inner product is degenerate (eigenvalue {value:.3e} below tolerance)")]
    DegenerateMetric { value: f64 },

    #[error("subspace contains no null vector (induced form is definite)")]
    NoNullVector,

    #[error("decomposition invariants not met within tolerance (defect {defect:.3e})")]
    IllConditioned { defect: f64 },

    #[error("bilinear form is not flat (defect {defect:.3e} > tol {tol:.3e})")]
    NotFlat { defect: f64, tol: f64 },

    #[error("complex structure invalid: {reason} (defect {defect:.3e})")]
    BadComplexStructure { reason: &'static str, defect: f64 },

    #[error("shape identity violated (defect {defect:.3e})")]
    ShapeIdViolation { defect: f64 },

    #[error("form span is not degenerate")]
    NotDegenerate,

    #[error("span of the form is degenerate")]
    DegenerateSpan,

    #[error("plane span{{v,w}} is not Lorentzian")]
    PlaneNotLorentzian,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("no zero-product pair found within tolerance (best residual {best:.3e})")]
    SearchFailed { best: f64 },

    #[error("recursive descent failed: {0}")]
    RecursionFailed(String),

    #[error("element does not have corank 2 (kernel dimension {got}, expected {expected})")]
    BadCorank { got: usize, expected: usize },

    #[error("curvature constraint violated: sum of reciprocal curvatures is {sum:.6} instead of -1")]
    CurvatureConstraintViolated { sum: f64 },

    #[error("parameters outside chart domain: {0}")]
    ChartDomainError(String),

    #[error("normal bundle is not flat (commutator norm {defect:.3e})")]
    NotFlatNormalBundle { defect: f64 },

    #[error("no unit normal with identity shape operator (residual {residual:.3e})")]
    NoUmbilicalNormal { residual: f64 },

    #[error("reference point coincides with the evaluated point")]
    ReferencePointCoincides,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag used in CLI reports.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::DegenerateMetric { .. } => "DegenerateMetric",
            Error::NoNullVector => "NoNullVector",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::NotFlat { .. } => "NotFlat",
            Error::BadComplexStructure { .. } => "BadComplexStructure",
            Error::ShapeIdViolation { .. } => "ShapeIdViolation",
            Error::NotDegenerate => "NotDegenerate",
            Error::DegenerateSpan => "DegenerateSpan",
            Error::PlaneNotLorentzian => "PlaneNotLorentzian",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::SearchFailed { .. } => "SearchFailed",
            Error::RecursionFailed(_) => "RecursionFailed",
            Error::BadCorank { .. } => "BadCorank",
            Error::CurvatureConstraintViolated { .. } => "CurvatureConstraintViolated",
            Error::ChartDomainError(_) => "ChartDomainError",
            Error::NotFlatNormalBundle { .. } => "NotFlatNormalBundle",
            Error::NoUmbilicalNormal { .. } => "NoUmbilicalNormal",
            Error::ReferencePointCoincides => "ReferencePointCoincides",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }
}

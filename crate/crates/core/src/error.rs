//! Error type shared by every module of the crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    // construction / validation
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vertex index {index} out of range (n = {count})")]
    VertexOutOfRange { index: usize, count: usize },
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("edge ({0}, {1}) has zero length")]
    ZeroLengthEdge(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("expected {expected} marked pairs, found {found}")]
    WrongPairCount { expected: usize, found: usize },
    #[error("marked pairs do not form a basis (|det| = {det:e}, threshold {threshold:e})")]
    MarkedPairsNotBasis { det: f64, threshold: f64 },
    #[error("lattice matrix is singular (|det| = {0:e})")]
    SingularLattice(f64),
    #[error("duplicate edge orbit ({u}, {v}, {shift:?})")]
    DuplicateOrbit { u: usize, v: usize, shift: Vec<i64> },
    #[error("matrix is singular")]
    SingularMatrix,

    // rigidity
    #[error("placement does not affinely span R^{0}")]
    DegeneratePlacement(usize),
    #[error("numerical rank is ambiguous: singular value {sigma:e} within 10x of threshold {threshold:e}")]
    RankToleranceAmbiguous { sigma: f64, threshold: f64 },

    // quotient
    #[error("marked pairs induce contradictory translations at vertex {0}")]
    InconsistentIdentification(usize),

    // auxetics
    #[error("deformation space has no degrees of freedom")]
    NoDegreesOfFreedom,
    #[error("search budget exhausted: best lambda_min {best_lambda_min:e}, grid oracle found {oracle_lambda_min:e}")]
    BudgetExhausted {
        best_coefficients: Vec<f64>,
        best_lambda_min: f64,
        oracle_lambda_min: f64,
    },
    #[error("deformation is missing a lattice velocity")]
    MissingLatticeVelocity,

    // constructors
    #[error("scaffold is not minimally rigid")]
    NonRigidScaffold,
    #[error("degenerate hinge: {0}")]
    DegenerateHinge(String),
    #[error("attachment is redundant: edge constraints are no longer independent")]
    RedundantAttachment,
    #[error("points do not span a simplex")]
    DegenerateSimplex,
    #[error("position is ill-conditioned (condition number {0:e})")]
    IllConditionedPosition(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    // path tracing
    #[error("tracing requires exactly one degree of freedom, found {0}")]
    NotOneDof(usize),
    #[error("singular configuration at tau = {0}")]
    SingularConfiguration(f64),
    #[error("corrector diverged at tau = {0}")]
    CorrectorDivergence(f64),
    #[error("initial tangent is not auxetic")]
    NotAuxeticAtStart,
    #[error("tau = {0} lies outside the traced range")]
    OutsidePath(f64),

    // io
    #[error("schema error at {path}: {message}")]
    SchemaError { path: String, message: String },
    #[error("unsupported document version {0}")]
    VersionUnsupported(u64),
    #[error("unsupported dimension {0} for export")]
    UnsupportedDimension(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RankToleranceAmbiguous { .. }
                | Error::SingularConfiguration(_)
                | Error::CorrectorDivergence(_)
                | Error::BudgetExhausted { .. }
        )
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaError {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

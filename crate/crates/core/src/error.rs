use thiserror::Error;

/// Errors raised across the crate.
///
/// Domain violations inside extended-real arithmetic are encoded as `+inf`
/// values, not errors; these variants cover precondition failures and
/// results the caller has to act on.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown kernel kind `{0}`")]
    UnknownKernel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {point:?} is outside the interior of the domain")]
    OutsideInterior { point: Vec<f64> },

    #[error("dual point {point:?} is outside the interior of the conjugate domain")]
    OutsideConjugateInterior { point: Vec<f64> },

    #[error("hessian unavailable at {point:?}")]
    HessianUnavailable { point: Vec<f64> },

    #[error("kernel is not very strictly convex on the requested region")]
    NotVeryStrictlyConvex,

    #[error("the right prox requires a kernel with dom = R^m (kernel `{0}`)")]
    RightProxRequiresFullDomain(String),

    #[error("search region is empty: the objective is +inf on every grid point")]
    EmptySearchRegion,

    #[error("not prox-bounded at lambda = {lambda}: objective reached {value:e}")]
    NotProxBounded { lambda: f64, value: f64 },

    #[error("grid oracle supports 1 or 2 search dimensions, got {0}")]
    UnsupportedDimension(usize),

    #[error("left/right translation mismatch: direct {direct:e} vs translated {translated:e}")]
    TranslationMismatch { direct: f64, translated: f64 },

    #[error("polynomial degree {0} is not supported (only 2, 3, 4)")]
    UnsupportedDegree(usize),

    #[error("prox is multivalued at {point:?}: {minimizers:?}")]
    MultivaluedProx {
        point: Vec<f64>,
        minimizers: Vec<Vec<f64>>,
    },

    #[error("ball of radius {eps} around {center:?} leaves the admissible region")]
    BallOutsideRegion { center: Vec<f64>, eps: f64 },

    #[error("{0} is not a subgradient at the reference point")]
    NotASubgradient(String),

    #[error("no subgradients were sampled inside the attentive band")]
    DegenerateAttentiveBand,

    #[error("gradient oracle missing for component {0}")]
    MissingGradient(usize),

    #[error("subgradient oracle missing for `{0}`")]
    MissingSubgradient(String),

    #[error("lambda = {lambda} is not below the prox-boundedness threshold estimate {threshold}")]
    AboveThreshold { lambda: f64, threshold: f64 },

    #[error("subproblem unbounded at iteration {iteration}: {reason}")]
    SubproblemUnbounded { iteration: usize, reason: String },

    #[error("infeasible initialization: {0}")]
    InfeasibleInit(String),

    #[error("unsupported problem configuration: {0}")]
    Unsupported(String),

    #[error("prox is multivalued at iteration {iteration}, point {point:?}")]
    MultivaluedAtIteration { iteration: usize, point: Vec<f64> },

    #[error("inner solver failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

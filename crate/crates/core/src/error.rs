//! Error type shared by all toolkit modules.

use thiserror::Error;

/// Everything that can go wrong across the model-surface kernel, the space
/// backends, the comparison layer and the globalization engine.
#[derive(Debug, Clone, Error)]
pub enum GeomError {
    /// An argument fell outside the domain of a model-surface operation
    /// (e.g. a side longer than the spherical diameter).
    #[error("domain error: {0}")]
    Domain(String),

    /// The given side lengths are not realizable as a triangle in the model
    /// surface of the requested curvature.
    #[error("invalid side triple: {0}")]
    InvalidTriple(String),

    /// A scalar parameter was outside its allowed range.
    #[error("parameter out of range: {0}")]
    Range(String),

    /// A point reference does not belong to the space it was used with.
    #[error("unknown point for this space")]
    UnknownPoint,

    /// No path exists between the requested points.
    #[error("space is disconnected between the requested points")]
    Disconnected,

    /// A geodesic of zero length was used where a direction is needed.
    #[error("degenerate geodesic (zero length)")]
    DegenerateGeodesic,

    /// The point is not strictly interior to the geodesic it should split.
    #[error("point is not strictly interior to the geodesic")]
    NotInterior,

    /// A ball contained too few usable points to sample from.
    #[error("ball contains no usable sample points")]
    EmptyBall,

    /// The excess function never dipped below the tolerance along the side:
    /// either the triangle is good or the badness is below what `m` samples
    /// can resolve.
    #[error("no negative excess along the side (min {min_excess:.3e} at m={m} samples)")]
    NoNegativeExcess { min_excess: f64, m: usize },

    /// An iterative procedure ran out of its iteration budget.
    #[error("iteration budget exceeded after {0} iterations")]
    IterationBudget(usize),

    /// A scale-dependent procedure hit the backend resolution floor.
    #[error("resolution floor reached: {0}")]
    ResolutionFloor(String),

    /// No bad witness triangle was found near the base point.
    #[error("no bad witness triangle found near the base point")]
    WitnessNotFound,

    /// For k > 0 the triangle is too close to the model diameter for the
    /// distance-bound slack policy to stay sound.
    #[error("triangle out of admissible regime for k > 0: {0}")]
    OutOfRegime(String),

    /// Input file or grammar could not be parsed.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    /// Graph edges must carry strictly positive weights.
    #[error("edge weight must be strictly positive: {0}")]
    NonPositiveWeight(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

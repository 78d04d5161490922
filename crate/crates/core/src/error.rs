use thiserror::Error;

/// Errors raised by the geometric and billiard operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("homogeneous triple vanishes or is not finite")]
    ZeroVector,
    #[error("points are projectively equal")]
    CoincidentPoints,
    #[error("lines are projectively equal")]
    CoincidentLines,
    #[error("line is the infinity line of the chart")]
    LineAtInfinity,
    #[error("mirror line is isotropic")]
    IsotropicMirror,
    #[error("symmetry is undefined for the infinity line")]
    InfinityMirror,
    #[error("point is not incident to the line")]
    PointNotIncident,
    #[error("mirror direction is an isotropic point (eps is 0 or infinity)")]
    IsotropicEps,
    #[error("point does not lie on the conic")]
    PointNotOnConic,
    #[error("conic is degenerate")]
    DegenerateConic,
    #[error("conics are projectively equal")]
    IdenticalConics,
    #[error("conics are not confocal")]
    NotConfocal,
    #[error("family parameter {0} outside the admissible range")]
    LambdaOutOfRange(f64),
    #[error("degenerate seed: {0}")]
    DegenerateSeed(&'static str),
    #[error("invalid scene specification: {0}")]
    InvalidSpec(String),
    #[error("segment AB enters the small disk")]
    SegmentCrossesSmallDisk,
    #[error("structural classification and reflectivity scan disagree: {0}")]
    Inconsistent(String),
    #[error("scene is not a type-3 billiard")]
    NotType3,
    #[error("line is not a shared isotropic tangent of both mirrors")]
    LineNotSharedTangent,
    #[error("newton diagram input is degenerate")]
    DegenerateInput,
    #[error("germs are not tangent at a common point")]
    NonTangentGerms,
    #[error("Puiseaux exponent must exceed 1, got {0}")]
    InvalidExponent(String),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("curve is not an algebraic non-linear curve")]
    NonAlgebraicInput,
    #[error("vertex lies on the mirror line")]
    VertexOnMirrorLine,
    #[error("scene is not 4-reflective")]
    SceneNotReflective,
    #[error("mirror is not real")]
    NotReal,
}

pub type Result<T> = std::result::Result<T, GeomError>;

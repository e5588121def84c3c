use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("evaluation-domain error: {0}")]
    EvaluationDomain(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error("unsupported Eisenstein weight {0}; expected 2, 4 or 6")]
    UnsupportedWeight(u32),
    #[error("depth of the zero form is undefined")]
    UndefinedDepth,
    #[error("form is not homogeneous")]
    NotHomogeneous,
    #[error("expected a modular (depth 0) form, found depth {0}")]
    NotModular(u32),
    #[error("invalid form: {0}")]
    Invalid(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("invalid graded ring: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemigroupError {
    #[error("degenerate lattice: generators span rank {0} < 2")]
    DegenerateLattice(usize),
    #[error("nonconvex sector: generators span an angle greater than pi")]
    NonconvexSector,
    #[error("half-plane sector: the two bounding rays are opposite, no basis of extremal generators")]
    HalfPlaneSector,
    #[error("inconclusive: membership search exceeded its budget of {0} states")]
    Inconclusive(usize),
    #[error("invalid jump rule: {0}")]
    InvalidRule(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not stationary within the stage cap of {0}")]
    NotStationary(usize),
}

/// Crate-wide error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

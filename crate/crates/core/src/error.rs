use thiserror::Error;

use crate::general_position::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("plane normal is the zero vector")]
    DegeneratePlane,
    #[error("plane is parallel to the z-axis")]
    VerticalPlane,
}

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("scene invariant violated: {0}")]
    Invariant(String),
    #[error("region {region}: facet {facet} is vertical")]
    VerticalFacet { region: usize, facet: usize },
    #[error("perturbation failed after {attempts} attempts")]
    PerturbationFailed { attempts: usize },
    #[error("perturbation magnitude must be positive")]
    NonPositiveMagnitude,
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum VdError {
    #[error("degenerate cell: {0}")]
    DegenerateCell(String),
    #[error("region boundary does not cross the prism interior")]
    NoCrossing,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("scene is not in general position ({} violations)", .0.len())]
    GeneralPosition(Vec<Violation>),
    #[error("point lies outside the bounding box")]
    OutOfBounds,
    #[error(transparent)]
    Vd(#[from] VdError),
}

#[derive(Debug, Error)]
pub enum CuttingError {
    #[error("parameter r must satisfy 1 < r <= n (r = {r}, n = {n})")]
    InvalidR { r: usize, n: usize },
    #[error("no valid cutting after {attempts} samples; the sampling constant is too small")]
    RetryBudgetExceeded { attempts: usize },
    #[error(transparent)]
    Build(#[from] BuildError),
}

#[derive(Debug, Error)]
pub enum EnclosureError {
    #[error("index needs at least two regions (got {0})")]
    TooFewRegions(usize),
    #[error("copy {copy} exceeded its size cap after {attempts} rebuilds")]
    RebuildBudgetExceeded { copy: usize, attempts: usize },
    #[error("query point lies outside the bounding box")]
    OutOfBounds,
    #[error("index file: {0}")]
    Io(String),
    #[error(transparent)]
    Build(#[from] BuildError),
}

#[derive(Debug, Error)]
pub enum EnvelopeError {
    #[error("need at least one function")]
    Empty,
    #[error("functions mix linear and paraboloid families")]
    MixedFamilies,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("prism is labeled {expected}, not {got}")]
    LabelMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Vd(#[from] VdError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle limited to {limit} regions (got {n})")]
    TooLarge { n: usize, limit: usize },
    #[error("inclusion-exclusion exceeded {0} nonempty terms")]
    TooManyTerms(usize),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

/// Umbrella error for the command-line front end and the benchmark driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Vd(#[from] VdError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Cutting(#[from] CuttingError),
    #[error(transparent)]
    Enclosure(#[from] EnclosureError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Other(String),
}

use thiserror::Error;

use crate::system::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid tropical value `{0}`")]
pub struct ParseValueError(pub String);

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("invalid signed system: {0}")]
    Invalid(ValidationReport),
    #[error("point has empty support")]
    EmptySupport,
    #[error("point has {got} coordinates, system has {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
}

#[derive(Debug, Error)]
pub enum CovectorError {
    #[error("covector graph is disconnected")]
    Disconnected,
    #[error("anchor coordinate {0} is isolated")]
    IsolatedAnchor(usize),
    #[error("graph fails the covector axioms: {0}")]
    Axioms(String),
    #[error("edge ({coord},{apex}) is not a finite entry")]
    InfiniteEdge { coord: usize, apex: usize },
}

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("scripted choices exhausted at a decision with eligible apexes {eligible:?}")]
    Exhausted { eligible: Vec<usize> },
    #[error("scripted apex {choice} is not eligible; eligible apexes are {eligible:?}")]
    Ineligible { choice: usize, eligible: Vec<usize> },
    #[error("{0} scripted choices left unused")]
    Leftover(usize),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("system is not trimmed: row {0} has more than one negative entry")]
    Untrimmed(usize),
    #[error("invalid delta order: {0}")]
    DeltaOrder(String),
    #[error("iteration cap {cap} exceeded in the phase of coordinate {delta}")]
    IterationCap { delta: usize, cap: usize },
    #[error("no basic apex of shape {0} in the basis")]
    MissingShape(usize),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Covector(#[from] CovectorError),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Error)]
pub enum StmError {
    #[error("invalid triangulation: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("no Cramer covector for basis {basis:?} on coordinates {coords:?}")]
    CramerNotFound { basis: Vec<usize>, coords: Vec<usize> },
    #[error("several Cramer covectors for basis {basis:?} on coordinates {coords:?}")]
    CramerAmbiguous { basis: Vec<usize>, coords: Vec<usize> },
    #[error("pivot result is not a basic covector")]
    NotBasic,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("edge exchange failed: {0}")]
    Walk(String),
    #[error("matrix is not generic")]
    NonGeneric,
    #[error("matrix must be finite, full and trimmed")]
    NotFullTrimmed,
    #[error("exhaustive search is limited to d*n <= 24, got {0}")]
    TooLarge(usize),
    #[error(transparent)]
    Script(#[from] ScriptError),
}

#[derive(Debug, Error)]
pub enum ConvertError {
    #[error("duplicate arcs between `{0}` and `{1}`")]
    DuplicatePair(String, String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node name `{0}`")]
    DuplicateNode(String),
    #[error("arc `{0}` -> `{1}` does not alternate between the two players")]
    NotBipartite(String, String),
    #[error("the game has no nodes")]
    EmptyGame,
    #[error("apex node `{0}` has no arcs, giving an all-infinite row")]
    EmptyRow(String),
    #[error("waiting condition {0} has an empty set X")]
    EmptyWait(usize),
    #[error("waiting condition {0} has X and J overlapping")]
    OverlappingWait(usize),
    #[error("missing weight for arc `{0}` -> `{1}`")]
    MissingWeight(String, String),
    #[error(transparent)]
    System(#[from] SystemError),
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("strategy count {0} exceeds the cap")]
    ScaleCap(u128),
    #[error("brute force needs integer entries")]
    NonInteger,
    #[error("brute force supports at most 4 coordinates, got {0}")]
    TooManyCoordinates(usize),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Value(#[from] ParseValueError),
    #[error("malformed input: {0}")]
    Shape(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

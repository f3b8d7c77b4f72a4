use thiserror::Error;

/// Errors raised while building matrices or computing measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("label `{0}` is not part of the declared label universe")]
    UnknownLabel(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("at least two classes are required, found {0}")]
    TooFewClasses(usize),
    #[error("expected {expected} cells, found {found}")]
    CellCount { expected: usize, found: usize },
    #[error("cell ({row}, {col}) is negative or not finite: {value}")]
    InvalidCell { row: usize, col: usize, value: f64 },
    #[error("matrix has zero total mass")]
    ZeroMass,
    #[error("class index {index} out of range for {k} classes")]
    ClassIndex { index: usize, k: usize },
    #[error("dimension mismatch: expected {expected}x{expected}, found {found}x{found}")]
    Dimension { expected: usize, found: usize },
    #[error("weight matrix has no positive weight")]
    NoPositiveWeight,
    #[error("measure undefined for class {class}: {cause}")]
    UndefinedConstituent { class: usize, cause: &'static str },
    #[error("chance agreement saturated (P_e = 1)")]
    ChanceSaturated,
    #[error("invalid class priors: {0}")]
    InvalidPriors(String),
    #[error("{measure} requires a 2x2 matrix, found {k}x{k}")]
    RequiresBinary { measure: &'static str, k: usize },
    #[error("GTI requires at least three classes")]
    GtiTooFewClasses,
    #[error("GTI undefined on perfect classification")]
    GtiPerfect,
    #[error("quasi-independence fit degenerate for class {0}")]
    GtiDegenerate(String),
    #[error("GTI fit did not converge after {iterations} iterations (residual {residual:e})")]
    GtiNotConverged { iterations: usize, residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("need at least {needed} rankable classifiers, found {found}")]
    TooFewClassifiers { needed: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

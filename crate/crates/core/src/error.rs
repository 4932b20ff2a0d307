use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("edge {u}-{v} has weight {weight}, expected a positive integer")]
    NonIntegerWeight { u: String, v: String, weight: f64 },
    #[error("intrinsic distance {intrinsic} < ambient distance {ambient} for pair ({a}, {b})")]
    MetricContradiction {
        a: String,
        b: String,
        intrinsic: f64,
        ambient: f64,
    },
    #[error("enumeration needs {needed} items, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("face index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("filtration is not monotone: face {face:?} enters after coface {coface:?}")]
    NonMonotoneFiltration {
        face: Vec<usize>,
        coface: Vec<usize>,
    },
    #[error("cochains live at different scales ({0} vs {1})")]
    ScaleMismatch(f64, f64),
    #[error("cochain of degree {0} is not a cocycle")]
    NotACocycle(usize),
    #[error("coefficient ring mismatch")]
    RingMismatch,
    #[error("separation guard violated: sep {sep} <= 2 * delta {delta}")]
    GuardViolated { sep: f64, delta: f64 },
    #[error("cocycle condition fails on triangle {0:?}")]
    CocycleViolation([usize; 3]),
    #[error("operation requires k = 2, got k = {0}")]
    NotK2(usize),
    #[error("integral lift has odd coboundary on simplex {0:?}")]
    OddCoboundary(Vec<usize>),
    #[error("tolerance must be positive and finite, got {0}")]
    ToleranceInvalid(f64),
    #[error("k = {k} exceeds the number of points {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("subset does not inherit the ambient metric: pair ({0}, {1})")]
    NotInherited(String, String),
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("unknown point identifier {0:?}")]
    UnknownPoint(String),
    #[error("integer overflow during exact elimination")]
    Overflow,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMetric(_) => "InvalidMetric",
            Error::InvalidGraph(_) => "InvalidGraph",
            Error::NonIntegerWeight { .. } => "NonIntegerWeight",
            Error::MetricContradiction { .. } => "MetricContradiction",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NonMonotoneFiltration { .. } => "NonMonotoneFiltration",
            Error::ScaleMismatch(..) => "ScaleMismatch",
            Error::NotACocycle(_) => "NotACocycle",
            Error::RingMismatch => "RingMismatch",
            Error::GuardViolated { .. } => "GuardViolated",
            Error::CocycleViolation(_) => "CocycleViolation",
            Error::NotK2(_) => "NotK2",
            Error::OddCoboundary(_) => "OddCoboundary",
            Error::ToleranceInvalid(_) => "ToleranceInvalid",
            Error::KTooLarge { .. } => "KTooLarge",
            Error::NotInherited(..) => "NotInherited",
            Error::InvalidPermutation(_) => "InvalidPermutation",
            Error::UnknownPoint(_) => "UnknownPoint",
            Error::Overflow => "Overflow",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

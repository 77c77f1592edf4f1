use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element with trace {trace} is not hyperbolic")]
    NotHyperbolic { trace: i64 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("determinant is {0}, expected 1")]
    BadDeterminant(i128),

    #[error("format error: {0}")]
    Format(String),

    #[error("cache context mismatch: {0}")]
    ContextMismatch(String),

    #[error("coefficient bound |a_{n}| <= 2n violated (a_{n} = {value})")]
    BoundViolation { n: usize, value: i64 },

    #[error("need {needed} coefficients, expansion has {available}")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("no pair of hyperbolic elements with hyperbolic commutator in pool")]
    NoSuitablePair,

    #[error("symbol values do not span a rank-2 lattice: {0}")]
    DegenerateLattice(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing symbol for coset {0:?}")]
    MissingSymbols([i64; 4]),

    #[error("enumeration complete to T = {have}, need {need}")]
    IncompleteEnumeration { have: f64, need: f64 },

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("coverage mismatch: {0}")]
    Coverage(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

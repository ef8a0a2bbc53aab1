use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("duplicate key: {0}")]
    DuplicateKey(String),

    #[error("unknown age group {0:?}")]
    UnknownAgeGroup(String),

    #[error("indicator {key:?} not found{}", suggest(.suggestions))]
    NotFound {
        key: String,
        suggestions: Vec<String>,
    },

    #[error("insufficient overlap: {actual} common years, {required} required")]
    InsufficientOverlap { actual: usize, required: usize },

    #[error("insufficient data: {actual} observations, {required} required")]
    InsufficientData { actual: usize, required: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("non-contiguous years: gap after {after}")]
    NonContiguous { after: i32 },

    #[error("singular design: estimated rank {rank} of {columns} columns")]
    SingularDesign { rank: usize, columns: usize },

    #[error("age band {0:?} missing")]
    MissingBand(String),

    #[error("no disability weight for condition {condition:?} in band {band:?}")]
    MissingWeight { condition: String, band: String },

    #[error("standard-population weights sum to {0}, expected 1")]
    Normalization(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("expected a {expected} matrix, found {found}")]
    WrongMethod { expected: String, found: String },
}

fn suggest(s: &[String]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!("; nearest matches: {}", s.join(", "))
    }
}

impl Error {
    pub(crate) fn parse(line: usize, column: Option<usize>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }
}

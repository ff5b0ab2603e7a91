use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-positive share price {value} on {date}")]
    NonPositivePrice { date: NaiveDate, value: f64 },
    #[error("series too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("dates must be strictly increasing (offending date {date})")]
    UnorderedDates { date: NaiveDate },
    #[error("ask below bid on {date}")]
    CrossedQuote { date: NaiveDate },
    #[error("series share no common dates")]
    EmptyOverlap,
    #[error("target maturity {target} outside bracket [{below}, {above}]")]
    TargetOutsideBracket { below: f64, above: f64, target: f64 },
    #[error("no usable bond quote for the five-year point")]
    NoYieldQuote,
    #[error("zero variance in {0}")]
    ZeroVariance(String),
    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),
    #[error("non-positive long-run variance estimate")]
    NonPositiveLongRunVariance,
    #[error("insufficient sample: need {needed} rows, got {got}")]
    InsufficientSample { needed: usize, got: usize },
    #[error("design matrix is rank deficient")]
    RankDeficientDesign,
    #[error("fits do not share a common specification")]
    HeterogeneousSpecs,
    #[error("empty input list")]
    EmptyList,
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("variable {0} not present")]
    UnknownVariable(String),
    #[error("residual covariance is singular")]
    SingularCovariance,
    #[error("mismatched shapes: {0}")]
    MismatchedShapes(String),
    #[error("market capitalisation must be positive")]
    NonPositiveCap,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("tenor times payment frequency is not a whole number of periods")]
    NonIntegralPeriodCount,
    #[error("periods paid {paid} outside 0..={total}")]
    PeriodsOutOfRange { paid: usize, total: usize },
    #[error("invalid contract: {0}")]
    InvalidContract(String),
    #[error("process is not stable (spectral radius {radius})")]
    UnstableProcess { radius: f64 },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn parse(line: u64, column: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column: column.into(),
            message: message.into(),
        }
    }

    /// True for input-format failures, as opposed to statistical ones.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Json(_) | Error::Csv(_))
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("feature `{feature}` has fewer than two distinct values")]
    SingleValuedFeature { feature: String },

    #[error("feature `{feature}`: value `{value}` does not conform to its kind{}", row_suffix(*.row))]
    TypeMismatch {
        feature: String,
        row: Option<usize>,
        value: String,
    },

    #[error("feature `{feature}`: level `{label}` is not among the declared ordered levels")]
    UnknownLevel { feature: String, label: String },

    #[error("missing value for feature `{feature}` at row {row}")]
    MissingValue { row: usize, feature: String },

    #[error("header mismatch: expected {expected:?}, found {found:?}")]
    HeaderMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("subset on feature `{feature}` has zero size")]
    EmptySubset { feature: String },

    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(f64),

    #[error("gap piece does not touch the boundary of the subset")]
    GapNotBoundary,

    #[error("gap is not strictly contained in the subset")]
    GapNotContained,

    #[error("feature `{feature}` has zero observed range")]
    ZeroRange { feature: String },

    #[error("neighbor rank m={m} must satisfy 1 <= m < n={n}")]
    MTooLarge { m: usize, n: usize },

    #[error("isolation-forest subsample {subsample} must satisfy 2 <= subsample <= n={n}")]
    SubsampleTooSmall { subsample: usize, n: usize },

    #[error("{n} rows is below the {required} rows needed to grow a partition")]
    TooFewRows { n: usize, required: usize },

    #[error("feature `{feature}` is not a categorical feature with at least two observed levels")]
    NotCategorical { feature: String },

    #[error("feature `{feature}` cannot be used as a plot axis")]
    NonRenderableFeature { feature: String },

    #[error("model and data disagree: {0}")]
    ModelDataMismatch(String),

    #[error("negative input {0}")]
    NegativeInput(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn row_suffix(row: Option<usize>) -> String {
    match row {
        Some(r) => format!(" at row {r}"),
        None => String::new(),
    }
}

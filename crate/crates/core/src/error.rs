use thiserror::Error;

/// Errors produced by lattice, fitting, solver, and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsplittable axis {axis}: rectangle {rect} has side length 1 there")]
    UnsplittableAxis { rect: String, axis: usize },

    #[error("invalid cut {cut} on axis {axis} of rectangle {rect}")]
    InvalidCut { rect: String, axis: usize, cut: usize },

    #[error("not a partition: {0}")]
    NotAPartition(String),

    #[error("not a member of the {family} family: {detail}")]
    WrongFamily { family: &'static str, detail: String },

    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),

    #[error("order too large: need length > order, got length {n} and order {r}")]
    OrderTooLarge { n: usize, r: usize },

    #[error("enumeration refused: {cells} cells exceeds the {guard}-cell guard")]
    EnumerationGuard { cells: usize, guard: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("scenario {scenario} (n = {n}, rep = {rep}): {source}")]
    Scenario {
        scenario: String,
        n: usize,
        rep: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

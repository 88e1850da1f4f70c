use thiserror::Error;

/// Errors raised by the arithmetic, character and verification layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("cannot parse rational literal {0:?} (expected \"a/b\" or \"a\")")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("outside disc of convergence: {0}")]
    OutsideDisc(String),

    #[error("q not in p-adic convergence disc: need v_{p}(q - 1) >= 1, got q = {q}")]
    QOutsideDisc { p: u64, q: String },

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error(
        "unsupported embedding: character of order {order} has no canonical image in Z_{p} \
         (order must divide {})",
        p - 1
    )]
    UnsupportedEmbedding { order: u64, p: u64 },

    #[error("p-adic operands live in different contexts")]
    ContextMismatch,

    #[error("usage error: {0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by the query rather than by the arithmetic.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Usage(_)
                | Error::Parse(_)
                | Error::QOutsideDisc { .. }
                | Error::UnsupportedEmbedding { .. }
                | Error::Domain(_)
                | Error::ZeroDenominator
                | Error::OutsideDisc(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

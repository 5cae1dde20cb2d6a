use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("factoring budget exhausted on {value}; supply a factor cache entry")]
    FactoringTimeout { value: String },

    #[error("order {order} exceeds the limit {limit} for {feature}")]
    OrderTooLarge {
        order: String,
        limit: String,
        feature: &'static str,
    },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("no discrete-log table for this field")]
    NoLogTable,

    #[error("operation undefined at the zero element")]
    ZeroElement,

    #[error("{d} does not divide the unit group order {order}")]
    NotADivisor { d: u64, order: u64 },

    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error("no primitive element found after {draws} draws")]
    NotFound { draws: u64 },

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("interval precision exhausted at {bits} bits")]
    PrecisionExhausted { bits: u32 },

    #[error("factor cache {source_name}, line {line}: {message}")]
    Cache {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Crate-wide error type.

/// Errors produced by grid construction, kernel evaluation, reconstruction,
/// sampling, file I/O and the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Grid extents or cell counts violate the `CylGrid` invariants.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// An argument is outside its documented domain (exponents, quadrature
    /// orders, regularization lengths, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Evaluation was requested at a point where the quantity is singular
    /// or outside the supported region.
    #[error("out of domain: {0}")]
    OutOfDomain(String),

    /// Two inputs that must be index- or grid-aligned are not.
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    /// A CSV file failed to parse; `line` is the 1-based line number of the
    /// offending row.
    #[error("csv error at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A simulation produced a non-finite diagnostic; the message carries a
    /// dump of the state at the failing step.
    #[error("simulation diverged: {0}")]
    Diverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;

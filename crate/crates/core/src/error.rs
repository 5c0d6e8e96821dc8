use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed text input; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A value violates the invariants of its type.
    #[error("invalid {what}: {msg}")]
    Invalid { what: &'static str, msg: String },

    /// An operation argument is outside its documented domain.
    #[error("parameter out of range: {0}")]
    Domain(String),

    /// A search or enumeration would exceed its configured size cap.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// The density gate of a reduction step failed.
    #[error("density below 2γ: v = {density}, 2γ = {threshold}")]
    DensityBelowThreshold { density: String, threshold: String },

    /// A step of the compression procedure could not be carried out with the configured constants.
    #[error("hypothesis unmet under configured constants: {0}")]
    HypothesisUnmet(String),

    /// A criss-crossed tuple of size k+1 was found, so the family shatters it.
    #[error("VC-dimension exceeds k: columns {columns:?} are shattered")]
    VcExceedsK { columns: Vec<usize> },

    /// A runtime-checked inequality did not hold.
    #[error("postcondition violated: {0}")]
    PostconditionViolated(String),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, msg: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            msg: msg.into(),
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

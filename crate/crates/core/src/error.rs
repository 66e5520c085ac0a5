use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    /// A configuration or argument value is outside its permitted range.
    #[error("invalid value for `{field}`: {value} (expected {bound})")]
    OutOfRange {
        field: &'static str,
        value: String,
        bound: &'static str,
    },
    #[error("network has no nodes")]
    EmptyNetwork,
    #[error("all nodes are dead; no round can be executed")]
    AllDead,
    #[error("node {0} cannot head a cluster: it does not exist or is dead")]
    InvalidHead(usize),
    #[error("trace contains no rounds")]
    EmptyTrace,
    #[error("cannot aggregate traces produced by different configurations")]
    MixedConfigs,
    #[error("no traces to aggregate")]
    NoTraces,
}

impl SimError {
    pub(crate) fn out_of_range(field: &'static str, value: impl ToString, bound: &'static str) -> Self {
        SimError::OutOfRange {
            field,
            value: value.to_string(),
            bound,
        }
    }
}

/// Accepts finite values strictly above zero; rejects NaN.
pub(crate) fn require_positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SimError::out_of_range(field, v, "> 0"))
    }
}

pub type Result<T> = std::result::Result<T, SimError>;

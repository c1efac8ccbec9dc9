use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice rule: {0}")]
    InvalidRule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("enumeration of {count} candidates exceeds the budget of {cap}")]
    EnumerationBudget { count: u128, cap: u64 },

    #[error("truncation budget exceeded: {terms} terms needed to reach tail {tol:e}, cap is {max_terms}")]
    TruncationBudget { terms: u64, max_terms: u64, tol: f64 },

    #[error("accuracy target {target:e} not met (panel-doubling estimate {estimate:e})")]
    AccuracyTarget { estimate: f64, target: f64 },

    #[error("too few usable records for a slope fit ({usable} < 4)")]
    TooFewRecords { usable: usize },
}

impl Error {
    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_computation(&self) -> bool {
        matches!(
            self,
            Error::TruncationBudget { .. } | Error::AccuracyTarget { .. } | Error::TooFewRecords { .. }
        )
    }
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{field}` is not finite ({value})")]
    NonFinite { field: &'static str, value: f64 },
    #[error("parameter `{field}` must be non-negative, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("beta must lie in [0, 1], got {0}")]
    BetaOutOfRange(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("degenerate game: {0} is zero")]
    DegenerateGame(&'static str),
    #[error("no interior equilibrium: p* = {p_star}, q* = {q_star}")]
    NoInteriorEquilibrium { p_star: f64, q_star: f64 },
    #[error("`{name}` must be a probability in [0, 1], got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("Beta shape parameters must be positive and finite, got ({a}, {b})")]
    InvalidBetaShape { a: f64, b: f64 },
    #[error("range for `{field}` is invalid: [{lo}, {hi}]")]
    InvalidRange {
        field: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("range for `{0}` admits a zero equilibrium denominator")]
    DegenerateRange(&'static str),
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("adv_min must lie in [0, 1], got {0}")]
    InvalidAdvantageFloor(f64),
    #[error("fixed beta must lie in [0, 1], got {0}")]
    InvalidFixedBeta(f64),
    #[error("cannot summarize an empty record list")]
    EmptyRecords,
    #[error("failed to build worker pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64, GameError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(GameError::ProbabilityOutOfRange { name, value })
    }
}

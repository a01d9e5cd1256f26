use thiserror::Error;

use crate::lp::LpStatus;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("node index {0} is out of range")]
    NodeIndex(usize),
    #[error("component index {0} is out of range")]
    ComponentIndex(usize),
    #[error("invalid detection model: {}", .0.join("; "))]
    InvalidModel(Vec<String>),
    #[error("invalid budget: {0}")]
    Budget(String),
    #[error("empty strategy")]
    EmptyStrategy,
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("strategy side mismatch: expected {expected} strategy, got {found}")]
    SideMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("attack plan in support is empty; detection rate undefined")]
    EmptyAttackPlan,
    #[error("not a set cover: component `{0}` is unmonitored")]
    NotACover(String),
    #[error("cover and packing sizes must be positive: {0}")]
    CoverSize(String),
    #[error("target detection rate must lie in [0, 1], got {0}")]
    InvalidAlpha(String),
    #[error("instance too large for enumeration: {0}")]
    InstanceTooLarge(String),
    #[error("LP solve ended with status {0:?}")]
    Lp(LpStatus),
    #[error("LP dimension mismatch: {0}")]
    LpDimension(String),
    #[error(
        "column generation stopped after {iterations} iterations without convergence \
         (best rate {best_rate}, relative loss bound {loss_bound})"
    )]
    IterationCap {
        iterations: usize,
        best_rate: f64,
        loss_bound: f64,
    },
    #[error("invalid marginal target: {0}")]
    InvalidTarget(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid generator config: {0}")]
    GenConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Input problems (bad files, bad parameters) as opposed to solver failures.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Lp(_) | Error::IterationCap { .. } | Error::Numerical(_) | Error::InstanceTooLarge(_)
        )
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("goal coincides with robot position")]
    CoincidentGoal,
    #[error("unknown robot id {0}")]
    UnknownRobot(usize),
    #[error("robot {0} is not alive")]
    DeadRobot(usize),
    #[error("index {index} out of range for {len} candidates")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty candidate list")]
    EmptyCandidates,
    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: String, reason: String },
    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

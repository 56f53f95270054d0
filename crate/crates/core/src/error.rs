use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field of view: {0} degrees (must be in (0, 180))")]
    InvalidFov(f64),
    #[error("camera {0}: no border ray reaches the ground within max range")]
    DegenerateFov(String),
    #[error("ray points at or above the horizon")]
    SkywardRay,
    #[error("ground intersection lies behind the camera")]
    BehindCamera,
    #[error("no route between {from} and {to}")]
    Unreachable { from: String, to: String },
    #[error("too few samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("text is empty after normalization")]
    EmptyText,
    #[error("signatures are not comparable (length, seed or shingle size differ)")]
    IncompatibleSignatures,
    #[error("embedding is not unit-normalized")]
    NotNormalized,
    #[error("no waypoint within {radius} m of ({x:.1}, {y:.1})")]
    NoStartWaypoint { x: f64, y: f64, radius: f64 },
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("speed must be strictly positive")]
    ZeroSpeed,
    #[error("invalid reasoner query: {0}")]
    InvalidQuery(String),
    #[error("cannot place {requested} cameras without overlapping fields of view (placed {placed})")]
    OverlapUnavoidable { requested: usize, placed: usize },
    #[error("route inconsistent with the road graph: {0}")]
    RouteInconsistent(String),
    #[error("remote reasoner: {0}")]
    Remote(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Whether the error is the caller's fault (bad config or input file)
    /// rather than a failure while running.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::InvalidMap(_)
                | Error::InvalidFov(_)
                | Error::InvalidQuery(_)
                | Error::RouteInconsistent(_)
                | Error::Parse { .. }
                | Error::Json(_)
                | Error::Csv(_)
                | Error::IncompatibleSignatures
        )
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

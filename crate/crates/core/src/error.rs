use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("invalid rate demands: {0}")]
    Demands(String),

    #[error("infeasible group: needs at least {required} W, has {available} W")]
    Infeasible { required: f64, available: f64 },

    #[error("cell power vector is not a fixed point: residual {residual} exceeds {tolerance}")]
    InconsistentFixedPoint { residual: f64, tolerance: f64 },

    #[error("outside the objective domain: {0}")]
    Domain(String),

    #[error("empty feasible region for cell {cell}: {family} constraints violated ({detail})")]
    SubproblemInfeasible {
        cell: usize,
        family: &'static str,
        detail: String,
    },

    #[error("infeasible initial point: {0}")]
    InitialPoint(String),

    #[error("oracle refused the instance: {0}")]
    OracleLimit(String),

    #[error("no feasible grid point at resolution {0}")]
    NoneFound(f64),

    #[error(
        "finite-difference step too small: asymmetry {asymmetry:.3e}, retry with a larger step"
    )]
    StepTooSmall { asymmetry: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

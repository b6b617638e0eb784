use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid needs at least {min} cells, got {got}")]
    TooFewCells { got: usize, min: usize },

    #[error("perturbation fraction {0} outside [0, 0.45]")]
    PerturbFraction(f64),

    #[error("invalid grid faces: {0}")]
    InvalidFaces(String),

    #[error("a grid family needs at least 2 levels, got {0}")]
    TooFewLevels(usize),

    #[error("advection speed must be positive and finite, got {0}")]
    AdvectionSpeed(f64),

    #[error("time step must be positive and finite, got {0}")]
    TimeStep(f64),

    #[error("final time {t_final} is not an integer multiple of dt = {dt} (ratio {ratio})")]
    NonDivisibleFinalTime { t_final: f64, dt: f64, ratio: f64 },

    #[error("field is at t = {field} but errors were requested at t = {requested}")]
    TimeMismatch { field: f64, requested: f64 },

    #[error("observed order needs positive errors and ratio > 1 (coarse {coarse}, fine {fine}, ratio {ratio})")]
    OrderInput { coarse: f64, fine: f64, ratio: f64 },

    #[error("consecutive levels must double the cell count: {coarse} -> {fine}")]
    NotDoubling { coarse: usize, fine: usize },

    #[error("field has {values} values but the grid has {cells} cells")]
    FieldLength { values: usize, cells: usize },

    #[error("singular pivot at row {0} in banded solve")]
    SingularSystem(usize),

    #[error("invalid model parameter: {0}")]
    ModelParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("level {level} ({n_cells} cells): {source}")]
    Level {
        level: usize,
        n_cells: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by the experiment description rather than by
    /// the computation.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_)
            | Error::UnknownPreset(_)
            | Error::TooFewCells { .. }
            | Error::PerturbFraction(_)
            | Error::TooFewLevels(_)
            | Error::AdvectionSpeed(_)
            | Error::TimeStep(_)
            | Error::NonDivisibleFinalTime { .. }
            | Error::ModelParameter(_) => true,
            Error::Level { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

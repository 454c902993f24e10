use std::path::PathBuf;

/// Errors of the simulation, IO and driver layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] lpdecay_core::Error),
    #[error("CFL violated at t = {t}: dt = {dt} exceeds {limit} (max |u| = {umax})")]
    CflViolation { t: f64, dt: f64, limit: f64, umax: f64 },
    #[error("blowup detected at t = {t}: ||u|| grew by a factor {ratio}")]
    BlowupDetected { t: f64, ratio: f64 },
    #[error("invalid initial data: {0}")]
    InitialData(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("malformed field file: {0}")]
    Format(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: &std::path::Path) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: &std::path::Path) -> Result<T> {
        self.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

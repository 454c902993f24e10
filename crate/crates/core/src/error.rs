use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A radial integral failed its convergence check, usually because the
    /// low-frequency tail does not converge for the requested weight.
    #[error("quadrature did not converge: {0}")]
    QuadratureDivergence(String),

    #[error("frequency radius {rho} is below the grid resolution {min}")]
    MassUnresolvable { rho: f64, min: f64 },

    #[error("dyadic block {j} cannot be resolved (needs 2^j >= {min})")]
    WindowUnresolvable { j: i32, min: f64 },

    #[error("profile exponent kappa = {kappa} gives infinite energy in dimension {dim}")]
    InfiniteEnergy { kappa: f64, dim: usize },

    #[error("fitting window covers {decades:.3} decades, at least {required} required")]
    WindowTooShort { decades: f64, required: f64 },

    #[error("time {t} is beyond the grid validity horizon {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Observation direction parallel to the laser axis: `n x n_L = 0` and
    /// the polarization basis is undefined there.
    #[error("degenerate observation direction (parallel to the laser axis)")]
    DegenerateDirection,

    #[error("chi grid must be strictly ascending")]
    GridNotAscending,

    /// The velocity vanished, so its direction is undefined.
    #[error("zero velocity: beta direction undefined at chi = {chi}")]
    ZeroVelocity { chi: f64 },

    /// The Runge-Kutta oracle violated the plane-wave light-front invariant,
    /// which signals a step size too large for the configured pulse.
    #[error("ode oracle failure: light-front invariant drifted by {drift:.3e} (limit {limit:.1e})")]
    OracleDrift { drift: f64, limit: f64 },

    #[error("all-zero map column: ridge undefined")]
    AllZeroColumn,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

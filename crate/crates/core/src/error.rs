use thiserror::Error;

/// Errors raised by the wave-model computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("phase speed is singular at omega = {omega} (wavenumber {wavenumber:e})")]
    SingularPhaseSpeed { omega: f64, wavenumber: f64 },

    #[error("power law has no phase-speed singularity: {0}")]
    NoSingularity(String),

    #[error("Green function is singular at zero distance")]
    ZeroDistance,

    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    NonConvergentQuadrature { a: f64, b: f64 },

    #[error("bisection failed: {0}")]
    Bisection(String),

    #[error("delta = {0} outside (0, 1)")]
    DeltaOutOfRange(f64),

    #[error("the integrand never reaches the tail cut: {0}")]
    UnboundedSupport(String),

    #[error("spectrum is not Hermitian (deviation {deviation:e})")]
    NonHermitian { deviation: f64 },

    #[error("signal window too short: requested cut at t = {cut} precedes t0 = {t0}")]
    WindowTooShort { cut: f64, t0: f64 },

    #[error("forcing spectrum not negligible at the grid edge (ratio {ratio:e})")]
    ForcingBandExceedsGrid { ratio: f64 },

    #[error("finite-difference step h = {h} too large for r = {r}")]
    StepTooLarge { h: f64, r: f64 },

    #[error("preset I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error("preset JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the iterative numerics (quadrature, bisection),
    /// as opposed to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergentQuadrature { .. }
                | Error::Bisection(_)
                | Error::UnboundedSupport(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the kernel library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero divisor: cannot invert an octonion of zero norm")]
    ZeroDivisor,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge within m_cap = {m_cap} (last term bound {tail:e})")]
    SeriesNonConvergence { m_cap: usize, tail: f64 },

    #[error("quadrature did not stabilise: estimated error {est_error:e} > tol {tol:e} after {refinements} refinements")]
    QuadratureNonConvergence {
        est_error: f64,
        tol: f64,
        refinements: usize,
    },

    #[error("imaginary residue {0:e} exceeds the allowed bound")]
    ImaginaryResidue(f64),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

use thiserror::Error;

/// Errors raised by kernel construction, special functions and verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {re}{im:+}i is outside the annulus or within the boundary margin")]
    Domain { re: f64, im: f64 },

    #[error("pole of the Gamma function at {0}")]
    Pole(f64),

    #[error("level m = {m} is not admissible for B = {b}")]
    InadmissibleLevel { m: usize, b: f64 },

    #[error("series did not converge: {0}")]
    Convergence(String),

    #[error("unsupported evaluation path: {0}")]
    UnsupportedPath(String),

    #[error("imaginary residue {residue:e} exceeds tolerance in a real-valued evaluation")]
    ImaginaryResidue { residue: f64 },

    #[error("stencil at distance {distance:e} from the boundary needs at least {required:e}")]
    BoundaryProximity { distance: f64, required: f64 },

    #[error("quadrature failed to self-converge: delta {delta:e}")]
    Quadrature { delta: f64 },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

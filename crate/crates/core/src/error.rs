use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial has degree 0; an ODE needs order n >= 1")]
    DegreeZero,

    #[error("root iteration did not converge after {attempts} attempts")]
    NonConvergence { attempts: usize },

    #[error("partial fractions are ill-conditioned (recombination error {error:.3e})")]
    IllConditioned { error: f64 },

    #[error("{root} is not a root: deflation remainder {remainder:.3e} exceeds {bound:.3e}")]
    NotARoot {
        root: Complex64,
        remainder: f64,
        bound: f64,
    },

    #[error("function is not integrable on the real line: {0}")]
    NotIntegrable(String),

    #[error("closed-form Fourier transform needs half-line supports, found {0}")]
    UnsupportedSupport(String),

    #[error("non-finite sample at t = {t}")]
    NonFinite { t: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(
        "characteristic polynomial is not hyperbolic: root {witness} has |Re| = {:.3e}; \
         the kernel norm grows like 1/|Re z| and is infinite on the imaginary axis",
        witness.re.abs()
    )]
    NotHyperbolic { witness: Complex64 },

    #[error("candidate is too rough: derivative of order {order} jumps by {size:.3e} at t = {location}")]
    ExcessJumps {
        order: usize,
        location: f64,
        size: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    /// Process exit status for this error class: 2 for a non-hyperbolic
    /// operator, 4 for a candidate that is too rough, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotHyperbolic { .. } => 2,
            Error::ExcessJumps { .. } => 4,
            _ => 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_error_class_has_an_exit_code() {
        let i = Complex64::new(0.0, 1.0);
        let cases = [
            (Error::DegreeZero, 1),
            (Error::NonConvergence { attempts: 8 }, 1),
            (Error::IllConditioned { error: 1.0 }, 1),
            (Error::NotARoot { root: i, remainder: 1.0, bound: 0.0 }, 1),
            (Error::NotIntegrable("pos with Re z >= 0".into()), 1),
            (Error::UnsupportedSupport("interval".into()), 1),
            (Error::NonFinite { t: 0.0 }, 1),
            (Error::GridMismatch(String::new()), 1),
            (Error::InvalidGrid(String::new()), 1),
            (Error::NotHyperbolic { witness: i }, 2),
            (Error::ExcessJumps { order: 0, location: 0.0, size: 1.0 }, 4),
            (Error::Parse(String::new()), 1),
            (Error::Config(String::new()), 1),
            (Error::Io(std::io::Error::other("x")), 1),
        ];
        for (e, code) in cases {
            assert_eq!(e.exit_code(), code, "{e}");
        }
    }
}

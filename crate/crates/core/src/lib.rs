//! Hyers-Ulam stability in L1 for linear ODEs with constant coefficients.
//!
//! Exponential-polynomial functions are handled in closed form ([`expfun`]),
//! with an FFT-based oracle ([`fourier`]) for cross-checks and for sampled
//! data. [`greens`] builds the integrable Green's kernel of a hyperbolic
//! operator and its norm `M`; [`hyersulam`] solves, measures residuals and
//! checks `||y - y_a||_1 <= M eps`.

pub mod cli;
pub mod error;
pub mod expfun;
pub mod fourier;
pub mod greens;
pub mod hyersulam;
pub mod poly;
pub mod quadrature;

pub use error::{Error, Result};

//! Periodic Gaussian-type tight wavelet frames built from the UEP masks
//! `nu^{a,j}`, their Breitenberger uncertainty constants, and frame
//! decompositions of trigonometric polynomials.
//!
//! Every periodic function is carried as a window of Fourier coefficients
//! ([`FourierSeq`]). Coefficients that would underflow are evaluated in the
//! log domain and rescaled before any sum is formed.

pub mod error;
pub mod frame;
pub mod localization;
pub mod oracle;
pub mod seq;
pub mod sum;
pub mod transform;

pub use error::{Error, Result};
pub use frame::{FrameParams, Kind, Phi0Mode, UepReport};
pub use localization::{AsymParams, Regime, ScaledReal, UcRecord, UcReport};
pub use oracle::{Moment, ThetaParams};
pub use seq::{FourierSeq, GridSignal};
pub use transform::{FrameDecomposition, LevelCoeffs, ParsevalDefect};

/// Formats a float with 9 significant digits.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.8e}")
}

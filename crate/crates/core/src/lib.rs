//! Polar code construction with the Gaussian approximation, rate-compatible
//! shortening (polarization-driven, column-weight and bit-reversed tail
//! patterns), successive-cancellation decoding, spectrum-distance analysis
//! and a reproducible BPSK/AWGN Monte Carlo harness.
//!
//! Channel indices exposed by this crate are 1-based, in the bit-reversed
//! ("public") order used throughout; vectors indexed by channel are 0-based.

pub mod channel;
pub mod cli;
pub mod codec;
pub mod error;
pub mod ga;
pub mod shortening;
pub mod spectrum;

pub use error::{Error, Result};

/// Toolkit version recorded in output provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

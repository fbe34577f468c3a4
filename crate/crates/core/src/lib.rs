//! Converse bounds for finite-state joint source-channel coding of
//! individual sequences, with side information at the decoder.
//!
//! The crate is organised bottom-up:
//!
//! - [`symbols`], [`pmf`], [`empirical`], [`distortion`]: finite alphabets,
//!   sequences, empirical ℓ-block statistics and information measures.
//! - [`channels`]: discrete memoryless channels, cost-constrained capacity,
//!   the sphere-packing exponent and causal-state (Shannon strategy) capacity.
//! - [`ratedist`]: ordinary, conditional, Wyner-Ziv and common-reconstruction
//!   rate-distortion functions, with brute-force grid oracles.
//! - [`lzmaxent`]: LZ78 / joint incremental parsing, conditional LZ
//!   complexity and the maximum-entropy pair Φ/Ψ.
//! - [`bounds`]: the expected-distortion and excess-distortion lower bounds.
//! - [`simfsm`]: periodic finite-state encoders/decoders and Monte-Carlo
//!   simulation over sampled channels.
//!
//! All information quantities are in bits.

pub mod bounds;
pub mod channels;
pub mod distortion;
pub mod empirical;
mod error;
pub mod lzmaxent;
pub mod pmf;
pub mod ratedist;
pub mod serde_ext;
pub mod simfsm;
pub mod symbols;

pub use error::{Error, Result};

pub use channels::{CostFunction, Dmc, StateChannel};
pub use distortion::{average_distortion, DistortionMeasure};
pub use empirical::{block_empirical, joint_block_empirical, BlockEmpirical};
pub use pmf::{FinitePmf, JointPmf};
pub use symbols::{Alphabet, SymbolSequence};

/// Tolerance used when validating that probabilities sum to one.
pub const PMF_TOLERANCE: f64 = 1e-12;

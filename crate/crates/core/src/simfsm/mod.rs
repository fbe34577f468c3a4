//! Periodic finite-state encoders and decoders driven over sampled
//! memoryless channels, with Monte-Carlo estimates of the expected
//! distortion and the excess-distortion probability.
//!
//! Time is 1-based: symbol `i` is processed in phase `i mod ℓ`, so the
//! first symbol uses table 1 (table 0 when `ℓ = 1`).

mod fsm;
mod sim;

pub use fsm::{baseline_uncoded, phase, run_decoder, run_encoder, DecoderSpec, EncoderSpec, SymbolMaps};
pub use sim::{
    monte_carlo_distortion, monte_carlo_excess, sample_channel, wilson_interval, DistortionEstimate, ExcessEstimate,
    SimConfig,
};

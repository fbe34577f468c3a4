//! Lower bounds on the distortion of periodic finite-state joint
//! source-channel codes, and related error exponents.

mod excess;
mod expected;
mod marton;
mod report;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use excess::{excess_distortion_bound, excess_exponent_corollary, wz_excess_bound, ExcessBound, WzExcessConfig};
pub use expected::expected_distortion_bound;
pub use marton::{jscc_exponent_upper, marton_exponent, marton_exponent_with, JsccExponent, JsccPoint, MartonConfig, MartonExponent};
pub use report::{BoundReport, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Keep the `s_e α^ℓ log γ / √n` redundancy term.
    FiniteN,
    /// Drop every term vanishing as `n → ∞`.
    Asymptotic,
}

/// Period `ℓ`, delay `d`, encoder/decoder state counts and sequence length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub block_len: usize,
    pub delay: usize,
    pub enc_states: usize,
    pub dec_states: usize,
    pub n: u64,
    pub mode: Mode,
}

impl SystemParams {
    pub fn new(block_len: usize, delay: usize, enc_states: usize, dec_states: usize, n: u64, mode: Mode) -> Result<Self> {
        let p = Self {
            block_len,
            delay,
            enc_states,
            dec_states,
            n,
            mode,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_len == 0 {
            return Err(Error::param("block length must be at least 1"));
        }
        if self.enc_states == 0 || self.dec_states == 0 {
            return Err(Error::param("state counts must be at least 1"));
        }
        if self.n < self.block_len as u64 {
            return Err(Error::param(format!(
                "sequence length {} is shorter than the period {}",
                self.n, self.block_len
            )));
        }
        Ok(())
    }

    /// `log₂ s_d / ℓ`.
    pub fn decoder_excess(&self) -> f64 {
        (self.dec_states as f64).log2() / self.block_len as f64
    }
}

/// `Δ₁ = s_e α^ℓ log₂ γ / √n`; zero in asymptotic mode.
pub fn redundancy_delta1(params: &SystemParams, alpha: usize, gamma: usize) -> Result<f64> {
    params.validate()?;
    if params.mode == Mode::Asymptotic {
        return Ok(0.0);
    }
    if alpha == 0 || gamma == 0 {
        return Err(Error::param("alphabet sizes must be at least 1"));
    }
    let power = u32::try_from(params.block_len)
        .ok()
        .and_then(|l| (alpha as u64).checked_pow(l))
        .and_then(|p| p.checked_mul(params.enc_states as u64))
        .filter(|&p| p < (1u64 << 53))
        .ok_or_else(|| {
            Error::ResourceCap(format!(
                "s_e * {alpha}^{} overflows; use asymptotic mode for this period",
                params.block_len
            ))
        })?;
    Ok(power as f64 * (gamma as f64).log2() / (params.n as f64).sqrt())
}

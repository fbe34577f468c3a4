mod bounds;
mod info;
mod simulate;
mod sweep;

use anyhow::{anyhow, Result};
use clap::{Args, ValueEnum};
use fsbound::bounds::{Mode, SystemParams};
use fsbound::{block_empirical, BlockEmpirical, FinitePmf, SymbolSequence};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

pub use bounds::{bound_excess, bound_expected, BoundExcessArgs, BoundExpectedArgs};
pub use info::{
    capacity, causal_capacity, lz, rdf, wz_rdf, CapacityArgs, CausalCapacityArgs, LzArgs, RdfArgs, WzRdfArgs,
};
pub use simulate::{simulate, SimulateArgs};
pub use sweep::{sweep, SweepArgs};

use crate::inputs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    /// Drop every vanishing term, including Δ₁.
    Asymptotic,
    /// Keep Δ₁ = s_e α^ℓ log₂γ / √n.
    FiniteN,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Asymptotic => Mode::Asymptotic,
            ModeArg::FiniteN => Mode::FiniteN,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MachineArgs {
    /// Period ℓ of the encoder and decoder.
    #[arg(long, default_value_t = 1)]
    pub block_len: usize,
    /// Decoding delay d.
    #[arg(long, default_value_t = 0)]
    pub delay: usize,
    #[arg(long, default_value_t = 1)]
    pub enc_states: usize,
    #[arg(long, default_value_t = 1)]
    pub dec_states: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Asymptotic)]
    pub mode: ModeArg,
}

impl MachineArgs {
    fn params(&self, n: u64) -> Result<SystemParams> {
        Ok(SystemParams::new(
            self.block_len,
            self.delay,
            self.enc_states,
            self.dec_states,
            n,
            self.mode.into(),
        )?)
    }
}

/// A source given either as a sequence file or as an explicit PMF.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SourceArgs {
    /// Sequence file (digits, or comma-separated integers).
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Source PMF, e.g. `0.3,0.7` (single-letter).
    #[arg(long)]
    pub source_pmf: Option<String>,
    /// Source alphabet size (default: largest symbol + 1).
    #[arg(long)]
    pub alphabet: Option<usize>,
}

pub(crate) enum Source {
    Sequence(SymbolSequence),
    Pmf(FinitePmf),
}

impl SourceArgs {
    fn load(&self) -> Result<Source> {
        match (&self.source, &self.source_pmf) {
            (Some(p), None) => Ok(Source::Sequence(inputs::sequence(p, self.alphabet)?)),
            (None, Some(s)) => Ok(Source::Pmf(inputs::pmf(s)?)),
            _ => Err(anyhow!("give exactly one of --source and --source-pmf")),
        }
    }

    fn sequence(&self) -> Result<SymbolSequence> {
        match self.load()? {
            Source::Sequence(s) => Ok(s),
            Source::Pmf(_) => Err(anyhow!("this command needs a --source sequence file")),
        }
    }

    /// ℓ-block PMF and alphabet size.
    fn blocks(&self, block_len: usize) -> Result<(FinitePmf, usize, Option<BlockEmpirical>)> {
        match self.load()? {
            Source::Sequence(s) => {
                let e = block_empirical(&s, block_len)?;
                Ok((e.pmf.clone(), s.alphabet_size(), Some(e)))
            }
            Source::Pmf(p) if block_len == 1 => {
                let a = p.len();
                Ok((p, a, None))
            }
            Source::Pmf(_) => Err(anyhow!("--source-pmf is single-letter; use --source for ℓ > 1")),
        }
    }
}

pub(crate) fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| anyhow!("missing required option {flag}"))
}

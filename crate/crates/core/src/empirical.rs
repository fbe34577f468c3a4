//! Empirical statistics of non-overlapping ℓ-blocks.
//!
//! An ℓ-block `(s_1, …, s_ℓ)` over an alphabet of size α is encoded as the
//! superalphabet index `Σ_k s_k α^(ℓ-k)` (first symbol most significant).
//! When ℓ does not divide the sequence length the trailing remainder is
//! dropped and its length is recorded.

use serde::{Deserialize, Serialize};

use crate::pmf::{FinitePmf, JointPmf};
use crate::symbols::{checked_power, SymbolSequence};
use crate::{Error, Result};

/// Largest ℓ-block superalphabet we are willing to tabulate.
pub const MAX_SUPERALPHABET: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEmpirical {
    pub pmf: FinitePmf,
    pub block_len: usize,
    pub alphabet_size: usize,
    /// Number of complete blocks counted.
    pub blocks: usize,
    /// Trailing symbols that did not fill a block.
    pub truncated: usize,
}

impl BlockEmpirical {
    pub fn superalphabet_size(&self) -> usize {
        self.pmf.len()
    }
}

pub fn block_index(block: &[usize], alphabet_size: usize) -> usize {
    block.iter().fold(0, |acc, &s| acc * alphabet_size + s)
}

/// Inverse of [`block_index`].
pub fn block_symbols(mut index: usize, alphabet_size: usize, block_len: usize) -> Vec<usize> {
    let mut out = vec![0; block_len];
    for slot in out.iter_mut().rev() {
        *slot = index % alphabet_size;
        index /= alphabet_size;
    }
    out
}

pub(crate) fn superalphabet(alphabet_size: usize, block_len: usize) -> Result<usize> {
    let m = checked_power(alphabet_size, block_len, "block superalphabet")?;
    if m > MAX_SUPERALPHABET {
        return Err(Error::ResourceCap(format!(
            "block superalphabet {alphabet_size}^{block_len} = {m} exceeds {MAX_SUPERALPHABET}"
        )));
    }
    Ok(m)
}

/// Empirical PMF of the non-overlapping ℓ-blocks of `seq`.
pub fn block_empirical(seq: &SymbolSequence, block_len: usize) -> Result<BlockEmpirical> {
    if block_len == 0 {
        return Err(Error::param("block length must be at least 1"));
    }
    if seq.len() < block_len {
        return Err(Error::EmptyInput(format!(
            "sequence of length {} has no complete block of length {block_len}",
            seq.len()
        )));
    }
    let alpha = seq.alphabet_size();
    let m = superalphabet(alpha, block_len)?;
    let blocks = seq.len() / block_len;
    let mut counts = vec![0usize; m];
    for chunk in seq.symbols().chunks_exact(block_len) {
        counts[block_index(chunk, alpha)] += 1;
    }
    let probs = counts.iter().map(|&c| c as f64 / blocks as f64).collect();
    Ok(BlockEmpirical {
        pmf: FinitePmf::new(probs)?,
        block_len,
        alphabet_size: alpha,
        blocks,
        truncated: seq.len() % block_len,
    })
}

/// Joint empirical PMF of aligned ℓ-blocks of several sequences. Component
/// `k` of the result ranges over the ℓ-block superalphabet of `seqs[k]`.
pub fn joint_block_empirical(seqs: &[&SymbolSequence], block_len: usize) -> Result<JointPmf> {
    let first = seqs
        .first()
        .ok_or_else(|| Error::EmptyInput("no sequences given".into()))?;
    if block_len == 0 {
        return Err(Error::param("block length must be at least 1"));
    }
    for s in seqs {
        if s.len() != first.len() {
            return Err(Error::LengthMismatch {
                what: "aligned sequences",
                left: first.len(),
                right: s.len(),
            });
        }
    }
    if first.len() < block_len {
        return Err(Error::EmptyInput(format!(
            "sequences of length {} have no complete block of length {block_len}",
            first.len()
        )));
    }
    let dims = seqs
        .iter()
        .map(|s| superalphabet(s.alphabet_size(), block_len))
        .collect::<Result<Vec<_>>>()?;
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&t| t <= MAX_SUPERALPHABET)
        .ok_or_else(|| Error::ResourceCap("joint block alphabet too large".into()))?;
    let blocks = first.len() / block_len;
    let mut counts = vec![0usize; total];
    for b in 0..blocks {
        let range = b * block_len..(b + 1) * block_len;
        let idx = seqs.iter().zip(&dims).fold(0usize, |acc, (s, &d)| {
            acc * d + block_index(&s.symbols()[range.clone()], s.alphabet_size())
        });
        counts[idx] += 1;
    }
    let probs = counts.iter().map(|&c| c as f64 / blocks as f64).collect();
    JointPmf::new(dims, probs)
}

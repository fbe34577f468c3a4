//! Finite alphabets and symbol sequences.
//!
//! Symbols are dense indices `0..size`; human-readable labels only matter at
//! the I/O boundary.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest alphabet accepted for a single sequence component.
pub const MAX_ALPHABET: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::param("alphabet size must be at least 1"));
        }
        if size > MAX_ALPHABET {
            return Err(Error::ResourceCap(format!(
                "alphabet size {size} exceeds {MAX_ALPHABET}"
            )));
        }
        Ok(Self { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut a = Self::new(labels.len())?;
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::param(format!("duplicate alphabet label {l:?}")));
            }
        }
        a.labels = Some(labels);
        Ok(a)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }
}

/// A deterministic finite-alphabet sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolSequence {
    alphabet: Alphabet,
    symbols: Vec<usize>,
}

impl SymbolSequence {
    pub fn new(alphabet: Alphabet, symbols: Vec<usize>) -> Result<Self> {
        let size = alphabet.size();
        if let Some(&bad) = symbols.iter().find(|&&s| s >= size) {
            return Err(Error::SymbolOutOfRange { symbol: bad, size });
        }
        Ok(Self { alphabet, symbols })
    }

    /// Builds a sequence over an unlabeled alphabet of the given size.
    pub fn from_indices(size: usize, symbols: Vec<usize>) -> Result<Self> {
        Self::new(Alphabet::new(size)?, symbols)
    }

    /// Parses a string of ASCII digits, e.g. `"010011"`.
    pub fn from_digits(size: usize, digits: &str) -> Result<Self> {
        let symbols = digits
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::param(format!("not a digit: {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(size, symbols)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.size()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<usize> {
        self.symbols.get(i).copied()
    }
}

/// `base^exp` with overflow reported as a resource-cap error.
pub(crate) fn checked_power(base: usize, exp: usize, what: &str) -> Result<usize> {
    u32::try_from(exp)
        .ok()
        .and_then(|e| base.checked_pow(e))
        .ok_or_else(|| Error::ResourceCap(format!("{what}: {base}^{exp} overflows")))
}

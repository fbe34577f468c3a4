use serde::{Deserialize, Serialize};

use crate::empirical::{block_symbols, superalphabet, MAX_SUPERALPHABET};
use crate::symbols::SymbolSequence;
use crate::{Error, Result};

/// Single-letter distortion table `ρ(u, v)` with cached maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistortionTable", into = "DistortionTable")]
pub struct DistortionMeasure {
    sources: usize,
    reconstructions: usize,
    table: Vec<f64>,
    max: f64,
}

#[derive(Serialize, Deserialize)]
struct DistortionTable {
    rows: Vec<Vec<f64>>,
}

impl TryFrom<DistortionTable> for DistortionMeasure {
    type Error = Error;
    fn try_from(t: DistortionTable) -> Result<Self> {
        DistortionMeasure::new(t.rows)
    }
}

impl From<DistortionMeasure> for DistortionTable {
    fn from(d: DistortionMeasure) -> Self {
        DistortionTable { rows: d.rows() }
    }
}

impl DistortionMeasure {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let sources = rows.len();
        let reconstructions = rows.first().map_or(0, Vec::len);
        if sources == 0 || reconstructions == 0 {
            return Err(Error::param("distortion table must be nonempty"));
        }
        if rows.iter().any(|r| r.len() != reconstructions) {
            return Err(Error::shape("distortion table rows have different lengths"));
        }
        let table: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_flat(sources, reconstructions, table)
    }

    pub fn from_flat(sources: usize, reconstructions: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != sources * reconstructions {
            return Err(Error::shape("distortion table size mismatch"));
        }
        if table.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::param("distortions must be finite and nonnegative"));
        }
        let max = table.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            sources,
            reconstructions,
            table,
            max,
        })
    }

    pub fn hamming(size: usize) -> Result<Self> {
        let rows = (0..size)
            .map(|u| (0..size).map(|v| if u == v { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(rows)
    }

    pub fn sources(&self) -> usize {
        self.sources
    }

    pub fn reconstructions(&self) -> usize {
        self.reconstructions
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.table[u * self.reconstructions + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.table[u * self.reconstructions..(u + 1) * self.reconstructions]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.sources).map(|u| self.row(u).to_vec()).collect()
    }

    /// `ρ_max`.
    pub fn max(&self) -> f64 {
        self.max
    }

    /// Additive extension to ℓ-blocks: `ρ(u^ℓ, v^ℓ) = Σ_i ρ(u_i, v_i)`.
    pub fn block(&self, block_len: usize) -> Result<Self> {
        if block_len == 1 {
            return Ok(self.clone());
        }
        let a = superalphabet(self.sources, block_len)?;
        let b = superalphabet(self.reconstructions, block_len)?;
        if a.checked_mul(b).map_or(true, |t| t > MAX_SUPERALPHABET) {
            return Err(Error::ResourceCap(format!(
                "block distortion table {a}x{b} is too large"
            )));
        }
        let us: Vec<Vec<usize>> = (0..a).map(|i| block_symbols(i, self.sources, block_len)).collect();
        let vs: Vec<Vec<usize>> = (0..b)
            .map(|i| block_symbols(i, self.reconstructions, block_len))
            .collect();
        let mut table = Vec::with_capacity(a * b);
        for u in &us {
            for v in &vs {
                table.push(u.iter().zip(v).map(|(&x, &y)| self.get(x, y)).sum());
            }
        }
        Self::from_flat(a, b, table)
    }
}

/// `(1/n) Σ_i ρ(u_i, v_i)`.
pub fn average_distortion(u: &SymbolSequence, v: &SymbolSequence, rho: &DistortionMeasure) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            what: "source and reconstruction",
            left: u.len(),
            right: v.len(),
        });
    }
    if u.is_empty() {
        return Err(Error::EmptyInput("empty sequences".into()));
    }
    if u.alphabet_size() > rho.sources() || v.alphabet_size() > rho.reconstructions() {
        return Err(Error::shape("sequence alphabets exceed the distortion table"));
    }
    let total: f64 = u
        .symbols()
        .iter()
        .zip(v.symbols())
        .map(|(&a, &b)| rho.get(a, b))
        .sum();
    Ok(total / u.len() as f64)
}

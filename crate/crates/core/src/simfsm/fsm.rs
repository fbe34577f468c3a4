use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::symbols::SymbolSequence;
use crate::{Error, Result};

/// Phase of the 1-based time index `i`: `t = i mod ℓ`.
pub fn phase(i: usize, period: usize) -> usize {
    i % period
}

fn check_table(name: &str, table: &[Vec<Vec<usize>>], period: usize, rows: usize, cols: usize, range: usize) -> Result<()> {
    if table.len() != period {
        return Err(Error::shape(format!("{name} has {} phases, period is {period}", table.len())));
    }
    for (t, phase) in table.iter().enumerate() {
        if phase.len() != rows || phase.iter().any(|r| r.len() != cols) {
            return Err(Error::shape(format!("{name}[{t}] is not a {rows}×{cols} table")));
        }
        if let Some(&bad) = phase.iter().flatten().find(|&&v| v >= range) {
            return Err(Error::SymbolOutOfRange { symbol: bad, size: range });
        }
    }
    Ok(())
}

fn check_input(seq: &SymbolSequence, size: usize, what: &str) -> Result<()> {
    if seq.alphabet_size() != size {
        return Err(Error::shape(format!(
            "{what} alphabet has {} symbols, machine expects {size}",
            seq.alphabet_size()
        )));
    }
    Ok(())
}

/// Periodically time-varying finite-state encoder
/// `x_i = f_t(u_i, z_i)`, `z_{i+1} = g_t(u_i, z_i)`.
///
/// Tables are indexed `[phase][u][state]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderSpec {
    pub period: usize,
    pub states: usize,
    pub source_size: usize,
    pub input_size: usize,
    pub output: Vec<Vec<Vec<usize>>>,
    pub next: Vec<Vec<Vec<usize>>>,
    #[serde(default)]
    pub initial: usize,
}

impl EncoderSpec {
    pub fn validate(&self) -> Result<()> {
        if self.period == 0 || self.states == 0 || self.source_size == 0 || self.input_size == 0 {
            return Err(Error::param("period, state count and alphabets must be at least 1"));
        }
        if self.initial >= self.states {
            return Err(Error::param("initial state out of range"));
        }
        check_table("output", &self.output, self.period, self.source_size, self.states, self.input_size)?;
        check_table("next", &self.next, self.period, self.source_size, self.states, self.states)
    }

    /// Uniformly random tables.
    pub fn random<R: Rng>(rng: &mut R, period: usize, states: usize, source_size: usize, input_size: usize) -> Result<Self> {
        let mut table = |range: usize| -> Vec<Vec<Vec<usize>>> {
            (0..period)
                .map(|_| (0..source_size).map(|_| (0..states).map(|_| rng.gen_range(0..range)).collect()).collect())
                .collect()
        };
        let output = table(input_size);
        let next = table(states);
        let e = Self {
            period,
            states,
            source_size,
            input_size,
            output,
            next,
            initial: 0,
        };
        e.validate()?;
        Ok(e)
    }
}

/// Periodically time-varying finite-state decoder with delay `d`:
/// `v_{i−d} = f′_t(w_i, y_i, z_i)`, `z_{i+1} = g′_t(w_i, y_i, z_i)`.
///
/// Tables are indexed `[phase][w][y][state]`, flattened over `(w, y)` as
/// `w * channel_size + y`. The last `d` reconstructions are `fill`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderSpec {
    pub period: usize,
    pub states: usize,
    pub delay: usize,
    pub side_size: usize,
    pub channel_size: usize,
    pub reconstruction_size: usize,
    pub output: Vec<Vec<Vec<usize>>>,
    pub next: Vec<Vec<Vec<usize>>>,
    #[serde(default)]
    pub initial: usize,
    #[serde(default)]
    pub fill: usize,
}

impl DecoderSpec {
    pub fn validate(&self) -> Result<()> {
        if self.period == 0 || self.states == 0 || self.side_size == 0 || self.channel_size == 0 || self.reconstruction_size == 0
        {
            return Err(Error::param("period, state count and alphabets must be at least 1"));
        }
        if self.initial >= self.states {
            return Err(Error::param("initial state out of range"));
        }
        if self.fill >= self.reconstruction_size {
            return Err(Error::SymbolOutOfRange {
                symbol: self.fill,
                size: self.reconstruction_size,
            });
        }
        let rows = self.side_size * self.channel_size;
        check_table("output", &self.output, self.period, rows, self.states, self.reconstruction_size)?;
        check_table("next", &self.next, self.period, rows, self.states, self.states)
    }

    pub fn random<R: Rng>(
        rng: &mut R,
        period: usize,
        states: usize,
        delay: usize,
        side_size: usize,
        channel_size: usize,
        reconstruction_size: usize,
    ) -> Result<Self> {
        let rows = side_size * channel_size;
        let mut table = |range: usize| -> Vec<Vec<Vec<usize>>> {
            (0..period)
                .map(|_| (0..rows).map(|_| (0..states).map(|_| rng.gen_range(0..range)).collect()).collect())
                .collect()
        };
        let output = table(reconstruction_size);
        let next = table(states);
        let d = Self {
            period,
            states,
            delay,
            side_size,
            channel_size,
            reconstruction_size,
            output,
            next,
            initial: 0,
            fill: 0,
        };
        d.validate()?;
        Ok(d)
    }
}

pub fn run_encoder(enc: &EncoderSpec, u: &SymbolSequence) -> Result<SymbolSequence> {
    enc.validate()?;
    check_input(u, enc.source_size, "source")?;
    SymbolSequence::from_indices(enc.input_size, encode(enc, u.symbols()))
}

pub(crate) fn encode(enc: &EncoderSpec, u: &[usize]) -> Vec<usize> {
    let mut z = enc.initial;
    u.iter()
        .enumerate()
        .map(|(k, &s)| {
            let t = phase(k + 1, enc.period);
            let x = enc.output[t][s][z];
            z = enc.next[t][s][z];
            x
        })
        .collect()
}

pub fn run_decoder(dec: &DecoderSpec, w: &SymbolSequence, y: &SymbolSequence) -> Result<SymbolSequence> {
    dec.validate()?;
    if w.len() != y.len() {
        return Err(Error::LengthMismatch {
            what: "side information and channel output",
            left: w.len(),
            right: y.len(),
        });
    }
    check_input(w, dec.side_size, "side-information")?;
    check_input(y, dec.channel_size, "channel output")?;
    let mut v = vec![0; y.len()];
    decode_into(dec, w.symbols(), y.symbols(), &mut v);
    SymbolSequence::from_indices(dec.reconstruction_size, v)
}

pub(crate) fn decode_into(dec: &DecoderSpec, w: &[usize], y: &[usize], v: &mut [usize]) {
    let n = y.len();
    let d = dec.delay;
    let mut z = dec.initial;
    for k in 0..n {
        let t = phase(k + 1, dec.period);
        let row = w[k] * dec.channel_size + y[k];
        let out = dec.output[t][row][z];
        z = dec.next[t][row][z];
        if k >= d {
            v[k - d] = out;
        }
    }
    for slot in v.iter_mut().skip(n.saturating_sub(d)) {
        *slot = dec.fill;
    }
}

/// Symbol maps for the uncoded baseline: `encode[u]` is the channel input
/// sent for `u`, `decode[y]` the reconstruction for channel output `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolMaps {
    pub encode: Vec<usize>,
    pub input_size: usize,
    pub decode: Vec<usize>,
    pub reconstruction_size: usize,
    #[serde(default = "one")]
    pub side_size: usize,
}

fn one() -> usize {
    1
}

impl SymbolMaps {
    /// Identity maps on a common alphabet of the given size.
    pub fn identity(size: usize) -> Self {
        Self {
            encode: (0..size).collect(),
            input_size: size,
            decode: (0..size).collect(),
            reconstruction_size: size,
            side_size: 1,
        }
    }
}

/// Single-state, zero-delay encoder/decoder pair applying the maps
/// letter by letter.
pub fn baseline_uncoded(period: usize, maps: &SymbolMaps) -> Result<(EncoderSpec, DecoderSpec)> {
    let (nu, nx, ny, nv) = (maps.encode.len(), maps.input_size, maps.decode.len(), maps.reconstruction_size);
    if nu > nx {
        return Err(Error::shape(format!("source alphabet ({nu}) larger than channel input ({nx})")));
    }
    if ny < nv {
        return Err(Error::shape(format!("channel output ({ny}) smaller than reconstruction ({nv})")));
    }
    let enc = EncoderSpec {
        period,
        states: 1,
        source_size: nu,
        input_size: nx,
        output: vec![maps.encode.iter().map(|&x| vec![x]).collect(); period],
        next: vec![vec![vec![0]; nu]; period],
        initial: 0,
    };
    let rows: Vec<Vec<usize>> = (0..maps.side_size).flat_map(|_| maps.decode.iter().map(|&v| vec![v])).collect();
    let dec = DecoderSpec {
        period,
        states: 1,
        delay: 0,
        side_size: maps.side_size,
        channel_size: ny,
        reconstruction_size: nv,
        next: vec![vec![vec![0]; rows.len()]; period],
        output: vec![rows; period],
        initial: 0,
        fill: 0,
    };
    enc.validate()?;
    dec.validate()?;
    Ok((enc, dec))
}

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use fsbound::lzmaxent::DifferenceDistortion;
use fsbound::{DistortionMeasure, Dmc, FinitePmf, StateChannel, SymbolSequence};
use serde::de::DeserializeOwned;
use serde::Deserialize;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).with_context(|| format!("cannot parse {}", path.display()))
}

/// A sequence file holds either a run of base-36 digits (whitespace
/// ignored) or comma-separated integers.
pub fn sequence(path: &Path, alphabet: Option<usize>) -> Result<SymbolSequence> {
    let text = read(path)?;
    let symbols: Vec<usize> = if text.contains(',') {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().with_context(|| format!("bad symbol {t:?} in {}", path.display())))
            .collect::<Result<_>>()?
    } else {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                c.to_digit(36)
                    .map(|d| d as usize)
                    .ok_or_else(|| anyhow!("bad symbol {c:?} in {}", path.display()))
            })
            .collect::<Result<_>>()?
    };
    if symbols.is_empty() {
        bail!("{} holds no symbols", path.display());
    }
    let size = alphabet.unwrap_or_else(|| symbols.iter().max().map_or(2, |m| (m + 1).max(2)));
    Ok(SymbolSequence::from_indices(size, symbols)?)
}

pub fn list(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("bad number {t:?}")))
        .collect()
}

pub fn pmf(text: &str) -> Result<FinitePmf> {
    Ok(FinitePmf::new(list(text)?)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Matrix {
    Bare(Vec<Vec<f64>>),
    Rows { rows: Vec<Vec<f64>> },
}

impl Matrix {
    fn rows(self) -> Vec<Vec<f64>> {
        match self {
            Matrix::Bare(r) | Matrix::Rows { rows: r } => r,
        }
    }
}

fn param(spec: &str, kind: &str) -> Result<f64> {
    spec.parse().with_context(|| format!("bad {kind} parameter {spec:?}"))
}

/// `bsc:p`, `bec:e`, `noiseless:n`, `constant:n` or a JSON matrix file.
pub fn channel(spec: &str) -> Result<Dmc> {
    if let Some((kind, arg)) = spec.split_once(':') {
        let ch = match kind {
            "bsc" => Dmc::bsc(param(arg, kind)?)?,
            "bec" => {
                let e = param(arg, kind)?;
                Dmc::new(vec![vec![1.0 - e, e, 0.0], vec![0.0, e, 1.0 - e]])?
            }
            "noiseless" => Dmc::noiseless(param(arg, kind)? as usize)?,
            "constant" => Dmc::new(vec![vec![1.0]; param(arg, kind)? as usize])?,
            _ => return file_channel(spec),
        };
        return Ok(ch);
    }
    file_channel(spec)
}

fn file_channel(path: &str) -> Result<Dmc> {
    let m: Matrix = read_json(Path::new(path))?;
    Ok(Dmc::new(m.rows())?)
}

/// `hamming`, `hamming:n` or a JSON table file. Plain `hamming` takes its
/// size from `alphabet`.
pub fn distortion(spec: &str, alphabet: usize) -> Result<DistortionMeasure> {
    match spec.split_once(':') {
        None if spec == "hamming" => Ok(DistortionMeasure::hamming(alphabet)?),
        Some(("hamming", n)) => Ok(DistortionMeasure::hamming(param(n, "hamming")? as usize)?),
        _ => {
            let m: Matrix = read_json(Path::new(spec))?;
            Ok(DistortionMeasure::new(m.rows())?)
        }
    }
}

/// `hamming` or a comma-separated difference table `ϱ(0), ϱ(1), …`.
pub fn difference(spec: &str, alphabet: usize) -> Result<DifferenceDistortion> {
    if spec == "hamming" {
        return Ok(DifferenceDistortion::hamming(alphabet)?);
    }
    Ok(DifferenceDistortion::new(list(spec)?)?)
}

#[derive(Deserialize)]
struct StateFile {
    state_pmf: Vec<f64>,
    rows: Vec<Vec<Vec<f64>>>,
}

pub fn state_channel(path: &Path) -> Result<StateChannel> {
    let f: StateFile = read_json(path)?;
    Ok(StateChannel::new(FinitePmf::new(f.state_pmf)?, f.rows)?)
}

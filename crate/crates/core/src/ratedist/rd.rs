use serde::{Deserialize, Serialize};

use super::ba::{Component, Engine, Point};
use crate::channels::Dmc;
use crate::distortion::DistortionMeasure;
use crate::empirical::block_symbols;
use crate::pmf::{FinitePmf, JointPmf};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdSolution {
    /// Bits per source symbol.
    pub rate: f64,
    /// Achieved distortion per source symbol.
    pub distortion: f64,
    /// `−dR/dD` at the solution (`+∞` at the minimum distortion).
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub slope: f64,
    /// Optimal test channel `P(v|u)`.
    pub channel: Dmc,
}

fn check_target(name: &str, x: f64) -> Result<()> {
    if !(x >= 0.0) || x.is_infinite() {
        return Err(Error::param(format!("{name} must be finite and nonnegative, got {x}")));
    }
    Ok(())
}

fn check_source(p: &FinitePmf, rho: &DistortionMeasure) -> Result<()> {
    if p.len() != rho.sources() {
        return Err(Error::shape(format!(
            "source has {} symbols, distortion table has {} rows",
            p.len(),
            rho.sources()
        )));
    }
    Ok(())
}

fn single_engine(p: &FinitePmf, rho: &DistortionMeasure) -> Engine {
    Engine::new(
        vec![Component::new(1.0, p.probs(), |u| rho.row(u).to_vec())],
        rho.reconstructions(),
    )
}

fn to_solution(engine: &Engine, pt: Point, nu: usize, rho: &DistortionMeasure) -> Result<RdSolution> {
    let nv = engine.nv;
    let c = &engine.parts[0];
    let mut rows: Vec<Vec<f64>> = (0..nu)
        .map(|u| {
            let best = (0..nv)
                .min_by(|&a, &b| rho.get(u, a).total_cmp(&rho.get(u, b)))
                .unwrap_or(0);
            (0..nv).map(|v| if v == best { 1.0 } else { 0.0 }).collect()
        })
        .collect();
    for (i, &u) in c.support.iter().enumerate() {
        rows[u] = pt.channels[0][i * nv..(i + 1) * nv].to_vec();
    }
    Ok(RdSolution {
        rate: pt.rate,
        distortion: pt.distortion,
        slope: pt.slope,
        channel: Dmc::from_weights(&rows)?,
    })
}

/// `R(D) = min { I(U;V) : E ρ(U,V) ≤ D }` in bits.
pub fn rate_distortion(p: &FinitePmf, rho: &DistortionMeasure, d: f64) -> Result<f64> {
    Ok(rate_distortion_solution(p, rho, d)?.rate)
}

pub fn rate_distortion_solution(p: &FinitePmf, rho: &DistortionMeasure, d: f64) -> Result<RdSolution> {
    check_source(p, rho)?;
    check_target("distortion", d)?;
    let engine = single_engine(p, rho);
    let pt = engine.at_distortion(d)?;
    to_solution(&engine, pt, p.len(), rho)
}

/// `D(R)`, the inverse of [`rate_distortion`].
pub fn distortion_rate(p: &FinitePmf, rho: &DistortionMeasure, rate: f64) -> Result<f64> {
    Ok(distortion_rate_solution(p, rho, rate)?.distortion)
}

pub fn distortion_rate_solution(p: &FinitePmf, rho: &DistortionMeasure, rate: f64) -> Result<RdSolution> {
    check_source(p, rho)?;
    check_target("rate", rate)?;
    let engine = single_engine(p, rho);
    let pt = engine.at_rate(rate);
    to_solution(&engine, pt, p.len(), rho)
}

/// Smallest distortion reachable at any rate, `Σ_u p(u) min_v ρ(u,v)`.
pub fn min_distortion(p: &FinitePmf, rho: &DistortionMeasure) -> Result<f64> {
    check_source(p, rho)?;
    Ok(single_engine(p, rho).d_min())
}

/// Distortion of the best constant reconstruction, where `R(D)` reaches 0.
pub fn zero_rate_distortion(p: &FinitePmf, rho: &DistortionMeasure) -> Result<f64> {
    check_source(p, rho)?;
    Ok(single_engine(p, rho).d_max())
}

fn conditional_engine(joint: &JointPmf, rho: &DistortionMeasure) -> Result<Engine> {
    if joint.arity() != 2 {
        return Err(Error::shape("conditional RDF needs a joint PMF over (U, W)"));
    }
    let (nu, nw) = (joint.dims()[0], joint.dims()[1]);
    if nu != rho.sources() {
        return Err(Error::shape("source alphabet does not match the distortion table"));
    }
    let pr = joint.probs();
    let parts = (0..nw)
        .filter_map(|w| {
            let col: Vec<f64> = (0..nu).map(|u| pr[u * nw + w]).collect();
            let pw: f64 = col.iter().sum();
            (pw > 0.0).then(|| Component::new(pw, &col, |u| rho.row(u).to_vec()))
        })
        .collect();
    Ok(Engine::new(parts, rho.reconstructions()))
}

/// `R_{U|W}(D) = min { I(U;V|W) : E ρ(U,V) ≤ D }` with `W` known at both
/// ends. Axis 0 of `joint` is `U`, axis 1 is `W`.
pub fn conditional_rate_distortion(joint: &JointPmf, rho: &DistortionMeasure, d: f64) -> Result<f64> {
    check_target("distortion", d)?;
    Ok(conditional_engine(joint, rho)?.at_distortion(d)?.rate)
}

pub fn conditional_distortion_rate(joint: &JointPmf, rho: &DistortionMeasure, rate: f64) -> Result<f64> {
    check_target("rate", rate)?;
    Ok(conditional_engine(joint, rho)?.at_rate(rate).distortion)
}

/// Per-position marginals when `blocks` factorizes into them.
fn product_marginals(blocks: &FinitePmf, alpha: usize, block_len: usize) -> Option<Vec<Vec<f64>>> {
    let mut marg = vec![vec![0.0; alpha]; block_len];
    for (i, &p) in blocks.probs().iter().enumerate() {
        if p > 0.0 {
            for (k, s) in block_symbols(i, alpha, block_len).into_iter().enumerate() {
                marg[k][s] += p;
            }
        }
    }
    for (i, &p) in blocks.probs().iter().enumerate() {
        let prod: f64 = block_symbols(i, alpha, block_len)
            .into_iter()
            .enumerate()
            .map(|(k, s)| marg[k][s])
            .product();
        if (prod - p).abs() > 1e-12 {
            return None;
        }
    }
    Some(marg)
}

fn block_engine(blocks: &FinitePmf, rho: &DistortionMeasure, block_len: usize) -> Result<Engine> {
    if block_len == 0 {
        return Err(Error::param("block length must be at least 1"));
    }
    let alpha = rho.sources();
    let m = crate::empirical::superalphabet(alpha, block_len)?;
    if blocks.len() != m {
        return Err(Error::shape(format!(
            "block PMF has {} entries, expected {alpha}^{block_len} = {m}",
            blocks.len()
        )));
    }
    let weight = 1.0 / block_len as f64;
    if block_len > 1 {
        if let Some(marg) = product_marginals(blocks, alpha, block_len) {
            let parts = marg
                .iter()
                .map(|pk| Component::new(weight, pk, |u| rho.row(u).to_vec()))
                .collect();
            return Ok(Engine::new(parts, rho.reconstructions()));
        }
    }
    let table = rho.block(block_len)?;
    Ok(Engine::new(
        vec![Component::new(weight, blocks.probs(), |u| table.row(u).to_vec())],
        table.reconstructions(),
    ))
}

/// RDF of an ℓ-block source under the additive extension of a single-letter
/// distortion, normalised per symbol. Product sources are decomposed per
/// position; otherwise the full block table is used.
pub fn block_rate_distortion(blocks: &FinitePmf, rho: &DistortionMeasure, block_len: usize, d: f64) -> Result<f64> {
    check_target("distortion", d)?;
    Ok(block_engine(blocks, rho, block_len)?.at_distortion(d)?.rate)
}

/// Inverse of [`block_rate_distortion`]: per-symbol distortion at `rate`
/// bits per symbol.
pub fn block_distortion_rate(blocks: &FinitePmf, rho: &DistortionMeasure, block_len: usize, rate: f64) -> Result<f64> {
    check_target("rate", rate)?;
    Ok(block_engine(blocks, rho, block_len)?.at_rate(rate).distortion)
}

/// `(min distortion, zero-rate distortion)` of an ℓ-block source, per symbol.
pub fn block_distortion_range(blocks: &FinitePmf, rho: &DistortionMeasure, block_len: usize) -> Result<(f64, f64)> {
    let e = block_engine(blocks, rho, block_len)?;
    Ok((e.d_min(), e.d_max()))
}

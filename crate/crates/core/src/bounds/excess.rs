use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{redundancy_delta1, BoundReport, SystemParams};
use crate::channels::{sphere_packing_exponent, sphere_packing_primal, Dmc, PrimalConfig};
use crate::distortion::DistortionMeasure;
use crate::empirical::block_symbols;
use crate::pmf::{divergence_bits, FinitePmf};
use crate::ratedist::{block_distortion_range, block_rate_distortion, wyner_ziv_rd_with, RdProblem, WzConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessBound {
    pub report: BoundReport,
    pub best_delta: Option<f64>,
    /// Exponent at the best `Δ` (`+∞` when every `Δ` is vacuous).
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub exponent: f64,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub log2_value: f64,
}

fn check_level(d: f64, rho_max: f64) -> Result<()> {
    if !(d >= 0.0) || d >= rho_max {
        return Err(Error::param(format!("distortion level must lie in [0, ρ_max = {rho_max})")));
    }
    Ok(())
}

/// Per-symbol `R(D)` of the ℓ-block source, `+∞` below the minimum distortion.
fn block_rate(blocks: &FinitePmf, rho: &DistortionMeasure, l: usize, d: f64) -> Result<f64> {
    let (lo, _) = block_distortion_range(blocks, rho, l)?;
    if d < lo {
        return Ok(f64::INFINITY);
    }
    block_rate_distortion(blocks, rho, l, d)
}

/// `E_sp(R)` with `+∞` for negative rates (empty constraint set).
fn esp(ch: &Dmc, rate: f64) -> Result<f64> {
    if rate < 0.0 {
        return Ok(f64::INFINITY);
    }
    if rate.is_infinite() {
        return Ok(0.0);
    }
    Ok(sphere_packing_exponent(ch, rate)?.value)
}

/// Excess-distortion probability lower bound
/// `sup_Δ [Δ/(ρ_max − D)] 2^{−(n+d) E_sp[R(D+Δ) − λ]}` over the supplied
/// grid of `Δ` values (entries outside `(0, ρ_max − D]` are ignored).
pub fn excess_distortion_bound(
    blocks: &FinitePmf,
    ch: &Dmc,
    d: f64,
    lambda: f64,
    deltas: &[f64],
    rho: &DistortionMeasure,
    params: &SystemParams,
) -> Result<ExcessBound> {
    params.validate()?;
    let rho_max = rho.max();
    check_level(d, rho_max)?;
    if !(lambda >= 0.0) {
        return Err(Error::param("λ must be nonnegative"));
    }
    let grid: Vec<f64> = deltas.iter().copied().filter(|&x| x > 0.0 && x <= rho_max - d).collect();
    if grid.is_empty() {
        return Err(Error::param("Δ grid has no entry in (0, ρ_max − D]"));
    }
    let horizon = (params.n + params.delay as u64) as f64;
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for &delta in &grid {
        let rate = block_rate(blocks, rho, params.block_len, d + delta)?;
        let e = esp(ch, rate - lambda)?;
        let log2 = (delta / (rho_max - d)).log2() - horizon * e;
        if best.map_or(true, |b| log2 > b.0) {
            best = Some((log2, delta, rate, e));
        }
    }
    let (log2_value, delta, rate, exponent) = best.unwrap();
    let vacuous = log2_value == f64::NEG_INFINITY;
    let value = if vacuous { 0.0 } else { log2_value.exp2() };
    let mut report = BoundReport::new(value)
        .term("prefactor", delta / (rho_max - d))
        .term("delta", delta)
        .term("rate", rate)
        .term("lambda", lambda)
        .term("argument", rate - lambda)
        .term("exponent", exponent)
        .term("horizon", horizon)
        .term("log2_value", log2_value);
    report.vacuous = vacuous;
    if vacuous {
        report = report.note("sphere-packing exponent is infinite for every Δ in the grid");
    }
    Ok(ExcessBound {
        report,
        best_delta: (!vacuous).then_some(delta),
        exponent,
        log2_value,
    })
}

/// Exponent bound `E_sp[R(D+0) − ζ]`, with a negative argument treated as 0.
pub fn excess_exponent_corollary(
    blocks: &FinitePmf,
    ch: &Dmc,
    d: f64,
    zeta: f64,
    rho: &DistortionMeasure,
    block_len: usize,
) -> Result<BoundReport> {
    if !(d >= 0.0) || !(zeta >= 0.0) {
        return Err(Error::param("D and ζ must be nonnegative"));
    }
    let scale = rho.max().max(1e-300);
    let mut rate = block_rate(blocks, rho, block_len, d + scale * 2f64.powi(-10))?;
    for k in 11..=52 {
        let next = block_rate(blocks, rho, block_len, d + scale * 2f64.powi(-k))?;
        let done = (next - rate).abs() <= 1e-12 || (next.is_infinite() && rate.is_infinite());
        rate = next;
        if done {
            break;
        }
    }
    let argument = (rate - zeta).max(0.0);
    let exponent = esp(ch, argument)?;
    let mut r = BoundReport::new(exponent)
        .term("rate_right_limit", rate)
        .term("zeta", zeta)
        .term("argument", argument)
        .term("exponent", exponent);
    r.vacuous = false;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WzExcessConfig {
    /// Simplex step for the rows of `Q_{W|U}`.
    pub si_step: f64,
    /// Simplex step for the channel input distribution `Q_X`.
    pub input_step: f64,
    /// Restarts per Wyner–Ziv evaluation.
    pub restarts: usize,
    pub seed: u64,
    pub max_points: usize,
}

impl Default for WzExcessConfig {
    fn default() -> Self {
        Self {
            si_step: 0.1,
            input_step: 0.05,
            restarts: 4,
            seed: 0,
            max_points: 20_000,
        }
    }
}

fn simplex(m: usize, step: f64) -> Vec<Vec<f64>> {
    let n = (1.0 / step).round().max(1.0) as usize;
    fn rec(k: usize, left: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / n as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k - 1, left - c, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, n, n, &mut Vec::new(), &mut out);
    out
}

/// Single-letter marginal of an ℓ-block PMF averaged over positions.
fn letter_marginal(blocks: &FinitePmf, alpha: usize, l: usize) -> Vec<f64> {
    let mut m = vec![0.0; alpha];
    for (i, &p) in blocks.probs().iter().enumerate() {
        if p > 0.0 {
            for s in block_symbols(i, alpha, l) {
                m[s] += p / l as f64;
            }
        }
    }
    m
}

/// Excess-distortion lower bound with decoder side information, changing
/// measure on both the side-information channel and the main channel.
///
/// The exponent is `max_{Q_X} min [D(Q_{W|U}‖P_{W|U}|P_U) + D(Q_{Y|X}‖P_{Y|X}|Q_X)]`
/// over pairs with `R^WZ_Q(D + ρ_max d/ℓ + Δ) ≥ I_Q(X;Y) + log₂ s_d/ℓ + Δ₁`.
/// `Q_{W|U}` ranges over a simplex grid (always including `P_{W|U}`); for
/// each one the channel part is the exact fixed-input sphere-packing
/// functional.
#[allow(clippy::too_many_arguments)]
pub fn wz_excess_bound(
    blocks: &FinitePmf,
    side_info: &Dmc,
    ch: &Dmc,
    d: f64,
    delta: f64,
    rho: &DistortionMeasure,
    params: &SystemParams,
    cfg: &WzExcessConfig,
) -> Result<ExcessBound> {
    params.validate()?;
    let rho_max = rho.max();
    check_level(d, rho_max)?;
    if !(delta > 0.0 && delta <= rho_max - d) {
        return Err(Error::param("Δ must lie in (0, ρ_max − D]"));
    }
    let (alpha, nw, l) = (rho.sources(), side_info.outputs(), params.block_len);
    if side_info.inputs() != alpha {
        return Err(Error::shape("side-information channel inputs do not match the source alphabet"));
    }
    let extra = params.decoder_excess() + redundancy_delta1(params, alpha, ch.outputs())?;
    let target = d + rho_max * params.delay as f64 / l as f64 + delta;
    let pu = letter_marginal(blocks, alpha, l);

    let rows = simplex(nw, cfg.si_step);
    let per_u: Vec<Vec<Vec<f64>>> = (0..alpha)
        .map(|u| {
            let mut r = rows.clone();
            if !r.iter().any(|x| x.iter().zip(side_info.row(u)).all(|(a, b)| (a - b).abs() < 1e-15)) {
                r.push(side_info.row(u).to_vec());
            }
            r
        })
        .collect();
    let total = per_u
        .iter()
        .try_fold(1usize, |acc, r| acc.checked_mul(r.len()))
        .filter(|&t| t <= cfg.max_points)
        .ok_or_else(|| Error::ResourceCap("side-information grid exceeds the point cap; coarsen si_step".into()))?;
    let wz_cfg = WzConfig {
        restarts: cfg.restarts,
        seed: cfg.seed,
        ..WzConfig::default()
    };
    // (divergence of Q_{W|U}, R^WZ_Q(target)) for every grid channel
    let mut cands: Vec<(f64, f64)> = (0..total)
        .into_par_iter()
        .map(|mut idx| -> Result<(f64, f64)> {
            let mut q = Vec::with_capacity(alpha);
            let mut div = 0.0;
            for (u, r) in per_u.iter().enumerate() {
                let row = &r[idx % r.len()];
                idx /= r.len();
                if pu[u] > 0.0 {
                    div += pu[u] * divergence_bits(row, side_info.row(u));
                }
                q.push(row.clone());
            }
            if div.is_infinite() {
                return Ok((div, 0.0));
            }
            let prob = RdProblem::blocks(blocks.clone(), rho, Some(&Dmc::new(q)?), l)?;
            let rate = match wyner_ziv_rd_with(&prob, target, &wz_cfg) {
                Ok(s) => s.rate,
                Err(e) if e.is_infeasible() => f64::INFINITY,
                Err(e) => return Err(e),
            };
            Ok((div, rate))
        })
        .collect::<Result<Vec<_>>>()?;
    cands.retain(|c| c.0.is_finite());
    cands.sort_by(|a, b| a.0.total_cmp(&b.0));

    let primal = PrimalConfig::default();
    let inputs = simplex(ch.inputs(), cfg.input_step);
    let exponents: Vec<f64> = inputs
        .par_iter()
        .map(|qx| -> Result<f64> {
            let qx = FinitePmf::new(qx.clone())?;
            let mut best = f64::INFINITY;
            for &(div, rate) in &cands {
                if div >= best {
                    break;
                }
                let r = rate - extra;
                if r < 0.0 {
                    continue;
                }
                let chan = if r.is_infinite() { 0.0 } else { sphere_packing_primal(ch, r, &qx, &primal)? };
                best = best.min(div + chan);
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let exponent = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let horizon = (params.n + params.delay as u64) as f64;
    let prefactor = delta / (rho_max - d);
    let log2_value = prefactor.log2() - horizon * exponent;
    let vacuous = log2_value == f64::NEG_INFINITY;
    let mut report = BoundReport::new(if vacuous { 0.0 } else { log2_value.exp2() })
        .term("prefactor", prefactor)
        .term("delta", delta)
        .term("target_distortion", target)
        .term("rate_excess", extra)
        .term("exponent", exponent)
        .term("horizon", horizon)
        .term("log2_value", log2_value)
        .term("grid_channels", total as f64);
    report.vacuous = vacuous;
    if vacuous {
        report = report.note("no grid pair satisfies the rate constraint");
    }
    Ok(ExcessBound {
        report,
        best_delta: (!vacuous).then_some(delta),
        exponent,
        log2_value,
    })
}

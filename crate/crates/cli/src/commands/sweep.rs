use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use fsbound::bounds::expected_distortion_bound;
use fsbound::channels::{capacity, sphere_packing_exponent};
use fsbound::ratedist::{block_distortion_rate, block_rate_distortion};
use fsbound::CostFunction;
use serde::{Deserialize, Serialize};

use super::{need, MachineArgs, SourceArgs};
use crate::inputs;
use crate::output::{num, Echo, Outcome, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    /// R(D) over a D grid.
    Rdf,
    /// D(R) over a rate grid.
    DistortionRate,
    /// Cost-constrained capacity over a budget grid.
    CapacityCost,
    /// Sphere-packing exponent over a rate grid.
    SpherePacking,
    /// Expected-distortion bound over a capacity grid.
    ExpectedBound,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: Option<SweepKind>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long)]
    pub side_info: Option<String>,
    #[arg(long, default_value = "hamming")]
    pub distortion: String,
    #[arg(long)]
    pub costs: Option<String>,
    #[arg(long)]
    pub n: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub machine: MachineArgs,
}

/// Infeasible points become `inf` rather than aborting the sweep.
fn or_inf(r: fsbound::Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(e) if e.is_infeasible() => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

pub fn sweep(args: SweepArgs, echo: &Echo) -> Result<Outcome> {
    let kind = need(&args.kind, "--kind")?;
    let (from, to) = (need(&args.from, "--from")?, need(&args.to, "--to")?);
    if args.points < 2 || !(to > from) {
        bail!("a sweep needs --to > --from and at least two points");
    }
    let grid: Vec<f64> = (0..args.points)
        .map(|k| from + (to - from) * k as f64 / (args.points - 1) as f64)
        .collect();
    let l = args.machine.block_len;
    let mut rows = Vec::new();
    let header: Vec<&str> = match kind {
        SweepKind::Rdf | SweepKind::DistortionRate => {
            let (blocks, alpha, _) = args.source.blocks(l)?;
            let rho = inputs::distortion(&args.distortion, alpha)?;
            for &x in &grid {
                let y = if kind == SweepKind::Rdf {
                    or_inf(block_rate_distortion(&blocks, &rho, l, x))?
                } else {
                    block_distortion_rate(&blocks, &rho, l, x)?
                };
                rows.push(vec![num(x), num(y)]);
            }
            if kind == SweepKind::Rdf {
                vec!["distortion", "rate"]
            } else {
                vec!["rate", "distortion"]
            }
        }
        SweepKind::CapacityCost => {
            let ch = inputs::channel(&need(&args.channel, "--channel")?)?;
            let costs = inputs::list(&need(&args.costs, "--costs")?)?;
            for &b in &grid {
                let cf = CostFunction::new(costs.clone(), b)?;
                match capacity(&ch, Some(&cf)) {
                    Ok(c) => rows.push(vec![num(b), num(c.value), num(c.expected_cost.unwrap_or(f64::NAN))]),
                    Err(e) if e.is_infeasible() => rows.push(vec![num(b), "-inf".into(), "nan".into()]),
                    Err(e) => return Err(e.into()),
                }
            }
            vec!["budget", "capacity", "expected_cost"]
        }
        SweepKind::SpherePacking => {
            let ch = inputs::channel(&need(&args.channel, "--channel")?)?;
            for &r in &grid {
                rows.push(vec![num(r), num(sphere_packing_exponent(&ch, r)?.value)]);
            }
            vec!["rate", "exponent"]
        }
        SweepKind::ExpectedBound => {
            let (blocks, alpha, emp) = args.source.blocks(l)?;
            let rho = inputs::distortion(&args.distortion, alpha)?;
            let gamma = match &args.channel {
                Some(c) => inputs::channel(c)?.outputs(),
                None => 2,
            };
            let si = args.side_info.as_deref().map(inputs::channel).transpose()?;
            let n = args.n.or(emp.as_ref().map(|e| (e.blocks * l + e.truncated) as u64));
            let params = args.machine.params(need(&n, "--n")?)?;
            for &c in &grid {
                let b = expected_distortion_bound(&blocks, si.as_ref(), c, gamma, &rho, &params)?;
                let t = |name: &str| num(b.get(name).unwrap_or(f64::NAN));
                rows.push(vec![
                    num(c),
                    num(b.value),
                    t("distortion_rate"),
                    t("argument"),
                    t("log_sd_over_l"),
                    t("delta1"),
                    t("delay_penalty"),
                ]);
            }
            vec!["capacity", "bound", "distortion_rate", "argument", "log_sd_over_l", "delta1", "delay_penalty"]
        }
    };
    echo.csv(Status::Ok, &header, &rows, &[])
}

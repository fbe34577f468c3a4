use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use fsbound::bounds::{
    excess_distortion_bound, expected_distortion_bound, redundancy_delta1, wz_excess_bound, ExcessBound,
    WzExcessConfig,
};
use fsbound::channels::capacity;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{need, MachineArgs, SourceArgs};
use crate::inputs;
use crate::output::{num, value, Echo, Outcome, Status};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundExpectedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Channel: `bsc:p`, `bec:e`, `noiseless:n` or a JSON matrix file.
    #[arg(long)]
    pub channel: Option<String>,
    /// Side-information channel P(w|u), same syntax as --channel.
    #[arg(long)]
    pub side_info: Option<String>,
    /// `hamming`, `hamming:n` or a JSON table file.
    #[arg(long, default_value = "hamming")]
    pub distortion: String,
    /// Use this capacity instead of computing it from the channel.
    #[arg(long)]
    pub capacity: Option<f64>,
    /// Sequence length n for Δ₁ (default: the source length).
    #[arg(long)]
    pub n: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub machine: MachineArgs,
}

pub fn bound_expected(args: BoundExpectedArgs, echo: &Echo) -> Result<Outcome> {
    let l = args.machine.block_len;
    let (blocks, alpha, emp) = args.source.blocks(l)?;
    let ch = inputs::channel(&need(&args.channel, "--channel")?)?;
    let si = args.side_info.as_deref().map(inputs::channel).transpose()?;
    let rho = inputs::distortion(&args.distortion, alpha)?;
    let n = args.n.or(emp.as_ref().map(|e| (e.blocks * l + e.truncated) as u64));
    let params = args.machine.params(need(&n, "--n")?)?;
    let c = match args.capacity {
        Some(c) => c,
        None => capacity(&ch, None)?.value,
    };
    let report = expected_distortion_bound(&blocks, si.as_ref(), c, ch.outputs(), &rho, &params)?;
    let status = if report.vacuous { Status::Vacuous } else { Status::Ok };
    echo.json(
        status,
        json!({
            "bound": report,
            "capacity": value(c),
            "n": params.n,
            "block_len": l,
            "blocks": emp.as_ref().map(|e| e.blocks),
            "truncated": emp.as_ref().map(|e| e.truncated),
            "block_entropy_per_symbol": blocks.entropy() / l as f64,
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundExcessArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub channel: Option<String>,
    /// Side-information channel; switches to the two-measure bound.
    #[arg(long)]
    pub side_info: Option<String>,
    #[arg(long, default_value = "hamming")]
    pub distortion: String,
    /// Distortion level D.
    #[arg(long)]
    pub level: Option<f64>,
    /// Rate slack λ (default: log₂ s_d/ℓ + Δ₁).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Explicit Δ grid, comma-separated.
    #[arg(long)]
    pub deltas: Option<String>,
    /// Size of the default uniform Δ grid on (0, ρ_max − D].
    #[arg(long, default_value_t = 20)]
    pub delta_points: usize,
    #[arg(long)]
    pub n: Option<u64>,
    /// Simplex step for Q_{W|U} rows (side-information bound).
    #[arg(long, default_value_t = 0.1)]
    pub si_step: f64,
    /// Simplex step for Q_X (side-information bound).
    #[arg(long, default_value_t = 0.05)]
    pub input_step: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    #[serde(flatten)]
    pub machine: MachineArgs,
}

pub fn bound_excess(args: BoundExcessArgs, echo: &Echo) -> Result<Outcome> {
    let l = args.machine.block_len;
    let (blocks, alpha, emp) = args.source.blocks(l)?;
    let ch = inputs::channel(&need(&args.channel, "--channel")?)?;
    let rho = inputs::distortion(&args.distortion, alpha)?;
    let d = need(&args.level, "--level")?;
    let n = args.n.or(emp.as_ref().map(|e| (e.blocks * l + e.truncated) as u64));
    let params = args.machine.params(need(&n, "--n")?)?;
    let span = rho.max() - d;
    let deltas: Vec<f64> = match &args.deltas {
        Some(s) => inputs::list(s)?,
        None if span > 0.0 => (1..=args.delta_points).map(|k| span * k as f64 / args.delta_points as f64).collect(),
        None => Vec::new(),
    };
    if deltas.is_empty() {
        bail!("the Δ grid is empty");
    }
    let lambda = match args.lambda {
        Some(x) => x,
        None => params.decoder_excess() + redundancy_delta1(&params, alpha, ch.outputs())?,
    };

    let (header, rows, best): (Vec<&str>, Vec<Vec<String>>, ExcessBound) = match &args.side_info {
        None => {
            let best = excess_distortion_bound(&blocks, &ch, d, lambda, &deltas, &rho, &params)?;
            let mut rows = Vec::new();
            for &delta in deltas.iter().filter(|&&x| x > 0.0 && x <= span) {
                let b = excess_distortion_bound(&blocks, &ch, d, lambda, &[delta], &rho, &params)?;
                rows.push(vec![
                    num(delta),
                    num(b.report.get("rate").unwrap_or(f64::NAN)),
                    num(b.report.get("argument").unwrap_or(f64::NAN)),
                    num(b.exponent),
                    num(b.log2_value),
                    num(b.report.value),
                ]);
            }
            (vec!["delta", "rate", "argument", "exponent", "log2_bound", "bound"], rows, best)
        }
        Some(spec) => {
            let si = inputs::channel(spec)?;
            let cfg = WzExcessConfig {
                si_step: args.si_step,
                input_step: args.input_step,
                ..WzExcessConfig::default()
            };
            let mut rows = Vec::new();
            let mut best: Option<ExcessBound> = None;
            for &delta in deltas.iter().filter(|&&x| x > 0.0 && x <= span) {
                let b = wz_excess_bound(&blocks, &si, &ch, d, delta, &rho, &params, &cfg)?;
                rows.push(vec![
                    num(delta),
                    num(b.report.get("target_distortion").unwrap_or(f64::NAN)),
                    num(b.exponent),
                    num(b.log2_value),
                    num(b.report.value),
                ]);
                if best.as_ref().map_or(true, |x| b.log2_value > x.log2_value) {
                    best = Some(b);
                }
            }
            let Some(best) = best else {
                bail!("no Δ in the grid lies in (0, ρ_max − D]");
            };
            (vec!["delta", "target_distortion", "exponent", "log2_bound", "bound"], rows, best)
        }
    };
    let status = if best.report.vacuous { Status::Vacuous } else { Status::Ok };
    match args.format {
        Format::Json => echo.json(
            status,
            json!({
                "best": best,
                "lambda": value(lambda),
                "columns": header,
                "rows": rows,
            }),
        ),
        Format::Csv => {
            let notes = vec![
                format!("lambda: {}", num(lambda)),
                format!(
                    "best: delta={} bound={} log2_bound={}",
                    best.best_delta.map_or("none".into(), num),
                    num(best.report.value),
                    num(best.log2_value)
                ),
            ];
            echo.csv(status, &header, &rows, &notes)
        }
    }
}

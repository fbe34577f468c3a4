use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use fsbound::channels::{
    capacity as channel_capacity, causal_state_capacity, sphere_packing_exponent, DEFAULT_STRATEGY_CAP,
};
use fsbound::lzmaxent::{joint_parse, lz78_parse, two_sided_si_bound};
use fsbound::ratedist::{
    block_distortion_range, block_distortion_rate, block_rate_distortion, distortion_rate_solution,
    min_distortion, rate_distortion_solution, wyner_ziv_rd_with, wz_distortion_rate_with, zero_rate_distortion,
    RdProblem, WzConfig,
};
use fsbound::{CostFunction, SymbolSequence};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{need, Source, SourceArgs};
use crate::inputs;
use crate::output::{value, Echo, Outcome, Status};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LzArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Side-information sequence w to condition on.
    #[arg(long)]
    pub given: Option<PathBuf>,
    #[arg(long)]
    pub given_alphabet: Option<usize>,
    /// Report the q-corrected complexity as well.
    #[arg(long)]
    pub q: Option<f64>,
    /// Evaluate the two-sided bound with this channel capacity.
    #[arg(long)]
    pub capacity: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0)]
    pub delay: usize,
    #[arg(long, default_value_t = 1)]
    pub block_len: usize,
    /// Difference distortion: `hamming` or `ϱ(0),ϱ(1),…`.
    #[arg(long, default_value = "hamming")]
    pub rho: String,
}

pub fn lz(args: LzArgs, echo: &Echo) -> Result<Outcome> {
    let u = args.source.sequence()?;
    let n = u.len();
    let c = lz78_parse(&u)?.count() as f64;
    let mut result = json!({
        "n": n,
        "lz78_phrases": c,
        "lz78_rate": c * c.log2() / n as f64,
    });
    let w = match &args.given {
        Some(p) => Some(inputs::sequence(p, args.given_alphabet)?),
        None => None,
    };
    if let Some(q) = args.q {
        if !(q > 0.0 && q < 1.0) {
            bail!("q must lie in (0, 1)");
        }
    }
    if let Some(w) = &w {
        let jp = joint_parse(&u, w)?;
        result["conditional"] = json!({
            "complexity": jp.complexity(),
            "phrases": jp.total(),
            "distinct_w_phrases": jp.distinct_w(),
            "corrected": args.q.map(|q| value(jp.corrected_complexity(q))),
        });
    }
    let mut status = Status::Ok;
    if let Some(cap) = args.capacity {
        let dd = inputs::difference(&args.rho, u.alphabet_size())?;
        let w = match w {
            Some(w) => w,
            None => SymbolSequence::from_indices(1, vec![0; n])?,
        };
        let rho_max = dd.table().iter().copied().fold(0.0, f64::max);
        let report = two_sided_si_bound(&u, &w, cap, &dd, args.eta, args.delay, args.block_len, rho_max)?;
        if report.vacuous {
            status = Status::Vacuous;
        }
        result["bound"] = serde_json::to_value(report)?;
    }
    echo.json(status, result)
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RdfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 1)]
    pub block_len: usize,
    #[arg(long, default_value = "hamming")]
    pub distortion: String,
    /// Distortion level D: report R(D).
    #[arg(long)]
    pub level: Option<f64>,
    /// Rate R: report D(R).
    #[arg(long)]
    pub rate: Option<f64>,
}

fn one_target(level: Option<f64>, rate: Option<f64>) -> Result<bool> {
    match (level, rate) {
        (Some(_), None) => Ok(true),
        (None, Some(_)) => Ok(false),
        _ => bail!("give exactly one of --level and --rate"),
    }
}

pub fn rdf(args: RdfArgs, echo: &Echo) -> Result<Outcome> {
    let by_level = one_target(args.level, args.rate)?;
    let l = args.block_len;
    match args.source.load()? {
        Source::Pmf(p) if l == 1 => {
            let rho = inputs::distortion(&args.distortion, p.len())?;
            let sol = if by_level {
                rate_distortion_solution(&p, &rho, args.level.unwrap())?
            } else {
                distortion_rate_solution(&p, &rho, args.rate.unwrap())?
            };
            echo.json(
                Status::Ok,
                json!({
                    "solution": sol,
                    "min_distortion": min_distortion(&p, &rho)?,
                    "zero_rate_distortion": zero_rate_distortion(&p, &rho)?,
                }),
            )
        }
        _ => {
            let (blocks, alpha, _) = args.source.blocks(l)?;
            let rho = inputs::distortion(&args.distortion, alpha)?;
            let (lo, hi) = block_distortion_range(&blocks, &rho, l)?;
            let (rate, distortion) = if by_level {
                let d = args.level.unwrap();
                (block_rate_distortion(&blocks, &rho, l, d)?, d)
            } else {
                let r = args.rate.unwrap();
                (r, block_distortion_rate(&blocks, &rho, l, r)?)
            };
            echo.json(
                Status::Ok,
                json!({
                    "rate": rate,
                    "distortion": distortion,
                    "block_len": l,
                    "min_distortion": lo,
                    "zero_rate_distortion": hi,
                }),
            )
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct WzRdfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = 1)]
    pub block_len: usize,
    /// Side-information channel P(w|u); omitted means no side information.
    #[arg(long)]
    pub side_info: Option<String>,
    #[arg(long, default_value = "hamming")]
    pub distortion: String,
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub rate: Option<f64>,
    /// Auxiliary alphabet size |A|.
    #[arg(long)]
    pub aux_size: Option<usize>,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn wz_rdf(args: WzRdfArgs, echo: &Echo) -> Result<Outcome> {
    let by_level = one_target(args.level, args.rate)?;
    let l = args.block_len;
    let (blocks, alpha, _) = args.source.blocks(l)?;
    let rho = inputs::distortion(&args.distortion, alpha)?;
    let si = args.side_info.as_deref().map(inputs::channel).transpose()?;
    let prob = RdProblem::blocks(blocks, &rho, si.as_ref(), l)?;
    let cfg = WzConfig {
        aux_size: args.aux_size,
        restarts: args.restarts,
        seed: args.seed,
        ..WzConfig::default()
    };
    if by_level {
        let sol = wyner_ziv_rd_with(&prob, args.level.unwrap(), &cfg)?;
        echo.json(Status::Ok, json!({ "solution": sol }))
    } else {
        let r = args.rate.unwrap();
        let d = wz_distortion_rate_with(&prob, r, &cfg)?;
        echo.json(Status::Ok, json!({ "rate": r, "distortion": d }))
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CapacityArgs {
    #[arg(long)]
    pub channel: Option<String>,
    /// Per-input costs, comma-separated.
    #[arg(long)]
    pub costs: Option<String>,
    /// Cost budget Γ (needs --costs).
    #[arg(long)]
    pub budget: Option<f64>,
    /// Also report the sphere-packing exponent at this rate.
    #[arg(long)]
    pub rate: Option<f64>,
}

fn cost(costs: &Option<String>, budget: Option<f64>) -> Result<Option<CostFunction>> {
    match (costs, budget) {
        (Some(c), Some(b)) => Ok(Some(CostFunction::new(inputs::list(c)?, b)?)),
        (None, None) => Ok(None),
        _ => bail!("--costs and --budget go together"),
    }
}

pub fn capacity(args: CapacityArgs, echo: &Echo) -> Result<Outcome> {
    let ch = inputs::channel(&need(&args.channel, "--channel")?)?;
    let cf = cost(&args.costs, args.budget)?;
    let cap = channel_capacity(&ch, cf.as_ref())?;
    let sp = args.rate.map(|r| sphere_packing_exponent(&ch, r)).transpose()?;
    echo.json(Status::Ok, json!({ "capacity": cap, "sphere_packing": sp }))
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CausalCapacityArgs {
    /// JSON file `{"state_pmf": [...], "rows": [[[P(y|x,s)]]]}` indexed `[x][s][y]`.
    #[arg(long)]
    pub state_channel: Option<PathBuf>,
    #[arg(long)]
    pub costs: Option<String>,
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_STRATEGY_CAP)]
    pub strategy_cap: usize,
}

pub fn causal_capacity(args: CausalCapacityArgs, echo: &Echo) -> Result<Outcome> {
    let sch = inputs::state_channel(&need(&args.state_channel, "--state-channel")?)?;
    let cf = cost(&args.costs, args.budget)?;
    let res = causal_state_capacity(&sch, cf.as_ref(), args.strategy_cap)?;
    echo.json(Status::Ok, res)
}

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use fsbound::bounds::{excess_distortion_bound, expected_distortion_bound, redundancy_delta1, Mode, SystemParams};
use fsbound::channels::capacity;
use fsbound::simfsm::{
    baseline_uncoded, monte_carlo_distortion, monte_carlo_excess, DecoderSpec, EncoderSpec, SimConfig, SymbolMaps,
};
use fsbound::{block_empirical, Dmc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{need, MachineArgs, SourceArgs};
use crate::inputs;
use crate::output::{value, Echo, Outcome, Status};

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,
    /// Encoder spec (JSON). Without encoder and decoder the uncoded baseline is used.
    #[arg(long)]
    pub encoder: Option<PathBuf>,
    /// Decoder spec (JSON).
    #[arg(long)]
    pub decoder: Option<PathBuf>,
    /// Simulate this many random machine pairs sized by the machine options.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long)]
    pub channel: Option<String>,
    /// Side-information channel (default: none, i.e. a constant W).
    #[arg(long)]
    pub side_info: Option<String>,
    #[arg(long, default_value = "hamming")]
    pub distortion: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    /// Also estimate the probability of excess distortion at this level.
    #[arg(long)]
    pub level: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub machine: MachineArgs,
}

type Key = (usize, usize, usize, usize);

fn key(enc: &EncoderSpec, dec: &DecoderSpec) -> Key {
    (enc.period, dec.delay, enc.states, dec.states)
}

pub fn simulate(args: SimulateArgs, echo: &Echo) -> Result<Outcome> {
    let u = args.source.sequence()?;
    let alpha = u.alphabet_size();
    let ch = inputs::channel(&need(&args.channel, "--channel")?)?;
    let si_given = args.side_info.as_deref().map(inputs::channel).transpose()?;
    let si = match &si_given {
        Some(s) => s.clone(),
        None => Dmc::new(vec![vec![1.0]; alpha])?,
    };
    let rho = inputs::distortion(&args.distortion, alpha)?;
    let mode: Mode = args.machine.mode.into();

    let machines: Vec<(EncoderSpec, DecoderSpec)> = if args.random > 0 {
        if args.encoder.is_some() || args.decoder.is_some() {
            bail!("--random cannot be combined with --encoder/--decoder");
        }
        let m = &args.machine;
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        rng.set_stream(u64::MAX);
        (0..args.random)
            .map(|_| -> Result<_> {
                let e = EncoderSpec::random(&mut rng, m.block_len, m.enc_states, alpha, ch.inputs())?;
                let d = DecoderSpec::random(
                    &mut rng,
                    m.block_len,
                    m.dec_states,
                    m.delay,
                    si.outputs(),
                    ch.outputs(),
                    rho.reconstructions(),
                )?;
                Ok((e, d))
            })
            .collect::<Result<_>>()?
    } else {
        match (&args.encoder, &args.decoder) {
            (Some(e), Some(d)) => vec![(inputs::read_json(e)?, inputs::read_json(d)?)],
            (None, None) => {
                let maps = SymbolMaps {
                    encode: (0..alpha).collect(),
                    input_size: ch.inputs(),
                    decode: (0..ch.outputs()).map(|y| y.min(rho.reconstructions() - 1)).collect(),
                    reconstruction_size: rho.reconstructions(),
                    side_size: si.outputs(),
                };
                vec![baseline_uncoded(args.machine.block_len, &maps)?]
            }
            _ => bail!("give both --encoder and --decoder, or neither"),
        }
    };

    let c = capacity(&ch, None)?.value;
    let n = u.len() as u64;
    let mut bounds: BTreeMap<Key, (f64, Option<f64>)> = BTreeMap::new();
    let mut results = Vec::new();
    let mut violations = 0;
    for (i, (enc, dec)) in machines.iter().enumerate() {
        let k = key(enc, dec);
        if !bounds.contains_key(&k) {
            let params = SystemParams::new(k.0, k.1, k.2, k.3, n, mode)?;
            let emp = block_empirical(&u, k.0)?;
            let expected = expected_distortion_bound(&emp.pmf, si_given.as_ref(), c, ch.outputs(), &rho, &params)?.value;
            let excess = match (args.level, &si_given) {
                (Some(d), None) if d < rho.max() => {
                    let lambda = params.decoder_excess() + redundancy_delta1(&params, alpha, ch.outputs())?;
                    let span = rho.max() - d;
                    let grid: Vec<f64> = (1..=20).map(|j| span * j as f64 / 20.0).collect();
                    Some(excess_distortion_bound(&emp.pmf, &ch, d, lambda, &grid, &rho, &params)?.report.value)
                }
                _ => None,
            };
            bounds.insert(k, (expected, excess));
        }
        let (bound, excess_bound) = bounds[&k];
        let cfg = SimConfig {
            trials: args.trials,
            seed: args.seed.wrapping_add(i as u64),
            confidence: args.confidence,
        };
        let est = monte_carlo_distortion(enc, dec, &u, &ch, &si, &rho, &cfg)?;
        let violation = est.mean + est.half_width < bound;
        violations += usize::from(violation);
        let mut entry = json!({
            "index": i,
            "period": enc.period,
            "enc_states": enc.states,
            "dec_states": dec.states,
            "delay": dec.delay,
            "distortion": est,
            "bound": value(bound),
            "margin": value(est.mean + est.half_width - bound),
            "violation": violation,
        });
        if let Some(d) = args.level {
            let ex = monte_carlo_excess(enc, dec, &u, &ch, &si, &rho, d, &cfg)?;
            entry["excess"] = json!({
                "estimate": ex,
                "bound": excess_bound.map_or(Value::Null, value),
            });
        }
        results.push(entry);
    }
    echo.json(
        Status::Ok,
        json!({
            "capacity": value(c),
            "n": n,
            "seed": args.seed,
            "machines": results,
            "summary": { "machines": machines.len(), "violations": violations },
        }),
    )
}

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::fsm::{decode_into, encode, DecoderSpec, EncoderSpec};
use crate::channels::Dmc;
use crate::distortion::DistortionMeasure;
use crate::pmf::pairwise_sum;
use crate::symbols::SymbolSequence;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: usize,
    pub seed: u64,
    /// Two-sided confidence level of the reported intervals.
    pub confidence: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 0,
            confidence: 0.99,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("at least one trial is required"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::param("confidence must lie in (0, 1)"));
        }
        Ok(())
    }

    fn z(&self) -> f64 {
        Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.5 + 0.5 * self.confidence)
    }
}

/// Sample mean of the per-trial average distortion with a
/// normal-approximation confidence half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionEstimate {
    pub mean: f64,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub half_width: f64,
    pub std_dev: f64,
    pub trials: usize,
    pub seed: u64,
    pub confidence: f64,
}

/// Fraction of trials with `Σ ρ(u_i, v_i) ≥ nD`, with a Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessEstimate {
    pub probability: f64,
    pub lower: f64,
    pub upper: f64,
    pub hits: usize,
    pub level: f64,
    pub trials: usize,
    pub seed: u64,
    pub confidence: f64,
}

struct Sampler {
    rows: Vec<WeightedIndex<f64>>,
}

impl Sampler {
    fn new(ch: &Dmc) -> Result<Self> {
        let rows = (0..ch.inputs())
            .map(|x| WeightedIndex::new(ch.row(x)).map_err(|e| Error::InvalidChannel(format!("row {x}: {e}"))))
            .collect::<Result<_>>()?;
        Ok(Self { rows })
    }

    fn fill<R: Rng>(&self, rng: &mut R, x: &[usize], out: &mut [usize]) {
        for (o, &s) in out.iter_mut().zip(x) {
            *o = self.rows[s].sample(rng);
        }
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Passes `x` through the memoryless channel, i.i.d. per symbol. The same
/// seed always gives the same output.
pub fn sample_channel(ch: &Dmc, x: &SymbolSequence, seed: u64) -> Result<SymbolSequence> {
    if x.alphabet_size() != ch.inputs() {
        return Err(Error::shape(format!(
            "sequence alphabet has {} symbols, channel has {} inputs",
            x.alphabet_size(),
            ch.inputs()
        )));
    }
    let mut y = vec![0; x.len()];
    Sampler::new(ch)?.fill(&mut trial_rng(seed, 0), x.symbols(), &mut y);
    SymbolSequence::from_indices(ch.outputs(), y)
}

/// One end-to-end system: source sequence, machines, channels, distortion.
struct System<'a> {
    dec: &'a DecoderSpec,
    u: &'a [usize],
    x: Vec<usize>,
    ch: Sampler,
    si: Sampler,
    rho: &'a DistortionMeasure,
}

#[allow(clippy::too_many_arguments)]
fn system<'a>(
    enc: &'a EncoderSpec,
    dec: &'a DecoderSpec,
    u: &'a SymbolSequence,
    ch: &Dmc,
    si: &Dmc,
    rho: &'a DistortionMeasure,
    cfg: &SimConfig,
) -> Result<System<'a>> {
    cfg.validate()?;
    enc.validate()?;
    dec.validate()?;
    if u.is_empty() {
        return Err(Error::EmptyInput("source sequence".into()));
    }
    if enc.period != dec.period {
        return Err(Error::param(format!(
            "encoder period {} differs from decoder period {}",
            enc.period, dec.period
        )));
    }
    let checks = [
        (u.alphabet_size(), enc.source_size, "source alphabet vs encoder"),
        (ch.inputs(), enc.input_size, "channel inputs vs encoder outputs"),
        (ch.outputs(), dec.channel_size, "channel outputs vs decoder"),
        (si.inputs(), enc.source_size, "side-information inputs vs source"),
        (si.outputs(), dec.side_size, "side-information outputs vs decoder"),
        (rho.sources(), enc.source_size, "distortion rows vs source"),
        (rho.reconstructions(), dec.reconstruction_size, "distortion columns vs decoder"),
    ];
    for (a, b, what) in checks {
        if a != b {
            return Err(Error::shape(format!("{what}: {a} vs {b}")));
        }
    }
    Ok(System {
        dec,
        u: u.symbols(),
        x: encode(enc, u.symbols()),
        ch: Sampler::new(ch)?,
        si: Sampler::new(si)?,
        rho,
    })
}

impl System<'_> {
    /// Total distortion `Σ ρ(u_i, v_i)` of every trial, in trial order.
    fn totals(&self, cfg: &SimConfig) -> Vec<f64> {
        let n = self.u.len();
        (0..cfg.trials)
            .into_par_iter()
            .map_init(
                || (vec![0; n], vec![0; n], vec![0; n], vec![0.0; n]),
                |(y, w, v, cost), trial| {
                    let mut rng = trial_rng(cfg.seed, trial as u64);
                    self.ch.fill(&mut rng, &self.x, y);
                    self.si.fill(&mut rng, self.u, w);
                    decode_into(self.dec, w, y, v);
                    for ((c, &a), &b) in cost.iter_mut().zip(self.u).zip(v.iter()) {
                        *c = self.rho.get(a, b);
                    }
                    pairwise_sum(cost)
                },
            )
            .collect()
    }
}

/// Monte-Carlo estimate of the expected average distortion. Trial `k`
/// draws the channel output and then the side information from stream `k`
/// of a ChaCha8 generator keyed by the seed, so results do not depend on
/// the thread count.
pub fn monte_carlo_distortion(
    enc: &EncoderSpec,
    dec: &DecoderSpec,
    u: &SymbolSequence,
    ch: &Dmc,
    si: &Dmc,
    rho: &DistortionMeasure,
    cfg: &SimConfig,
) -> Result<DistortionEstimate> {
    let sys = system(enc, dec, u, ch, si, rho, cfg)?;
    let n = u.len() as f64;
    let per: Vec<f64> = sys.totals(cfg).iter().map(|t| t / n).collect();
    let trials = per.len() as f64;
    let mean = pairwise_sum(&per) / trials;
    let dev: Vec<f64> = per.iter().map(|x| (x - mean) * (x - mean)).collect();
    let (std_dev, half_width) = if per.len() < 2 {
        (0.0, f64::INFINITY)
    } else {
        let s = (pairwise_sum(&dev) / (trials - 1.0)).sqrt();
        (s, cfg.z() * s / trials.sqrt())
    };
    Ok(DistortionEstimate {
        mean,
        half_width,
        std_dev,
        trials: cfg.trials,
        seed: cfg.seed,
        confidence: cfg.confidence,
    })
}

/// Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: usize, trials: usize, z: f64) -> (f64, f64) {
    let t = trials as f64;
    let p = hits as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = z / denom * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Monte-Carlo estimate of `Pr{Σ ρ(u_i, v_i) ≥ nD}`.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_excess(
    enc: &EncoderSpec,
    dec: &DecoderSpec,
    u: &SymbolSequence,
    ch: &Dmc,
    si: &Dmc,
    rho: &DistortionMeasure,
    d: f64,
    cfg: &SimConfig,
) -> Result<ExcessEstimate> {
    if !d.is_finite() {
        return Err(Error::param("distortion level must be finite"));
    }
    let sys = system(enc, dec, u, ch, si, rho, cfg)?;
    let threshold = u.len() as f64 * d;
    let slack = 1e-9 * threshold.abs().max(1.0);
    let hits = sys.totals(cfg).iter().filter(|&&t| t >= threshold - slack).count();
    let (lower, upper) = wilson_interval(hits, cfg.trials, cfg.z());
    Ok(ExcessEstimate {
        probability: hits as f64 / cfg.trials as f64,
        lower,
        upper,
        hits,
        level: d,
        trials: cfg.trials,
        seed: cfg.seed,
        confidence: cfg.confidence,
    })
}

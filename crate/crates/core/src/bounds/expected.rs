use super::{redundancy_delta1, BoundReport, SystemParams};
use crate::channels::Dmc;
use crate::distortion::DistortionMeasure;
use crate::pmf::FinitePmf;
use crate::ratedist::{block_distortion_rate, wz_distortion_rate, RdProblem};
use crate::Result;

/// Expected-distortion lower bound
/// `D^WZ(C + log₂ s_d/ℓ + Δ₁) − ρ_max d/ℓ`, clamped at 0.
///
/// `blocks` is the ℓ-block empirical PMF, `rho` the single-letter
/// distortion, `side_info` the single-letter side-information channel and
/// `channel_outputs` the channel output alphabet size `γ` used in `Δ₁`.
/// Without side information the ordinary ℓ-block distortion-rate function
/// is used.
pub fn expected_distortion_bound(
    blocks: &FinitePmf,
    side_info: Option<&Dmc>,
    capacity: f64,
    channel_outputs: usize,
    rho: &DistortionMeasure,
    params: &SystemParams,
) -> Result<BoundReport> {
    params.validate()?;
    if !(capacity >= 0.0) || capacity.is_infinite() {
        return Err(crate::Error::param("capacity must be finite and nonnegative"));
    }
    let l = params.block_len;
    let delta1 = redundancy_delta1(params, rho.sources(), channel_outputs)?;
    let excess = params.decoder_excess();
    let argument = capacity + excess + delta1;
    let dr = match side_info {
        Some(si) => wz_distortion_rate(&RdProblem::blocks(blocks.clone(), rho, Some(si), l)?, argument)?,
        None => block_distortion_rate(blocks, rho, l, argument)?,
    };
    let penalty = rho.max() * params.delay as f64 / l as f64;
    let value = (dr - penalty).max(0.0);
    Ok(BoundReport::new(value)
        .term("capacity", capacity)
        .term("log_sd_over_l", excess)
        .term("delta1", delta1)
        .term("argument", argument)
        .term("distortion_rate", dr)
        .term("delay_penalty", penalty))
}

//! Ordinary, conditional, Wyner–Ziv and common-reconstruction
//! rate-distortion functions.

mod ba;
mod hull;
mod oracle;
mod rd;
mod wz;

pub use oracle::{cr_oracle, wz_oracle, OracleResult, ORACLE_POINT_CAP};
pub use rd::{
    block_distortion_range, block_distortion_rate, block_rate_distortion, conditional_distortion_rate,
    conditional_rate_distortion, distortion_rate, distortion_rate_solution, min_distortion, rate_distortion,
    rate_distortion_solution, zero_rate_distortion, RdSolution,
};
pub use wz::{
    common_reconstruction_rd, wyner_ziv_rd, wyner_ziv_rd_with, wz_distortion_rate, wz_distortion_rate_with,
    RdProblem, RestartStats, WzConfig, WzSolution, DEFAULT_AUX_CAP,
};

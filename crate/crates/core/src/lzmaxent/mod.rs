//! Incremental parsing, conditional LZ complexity and the maximum-entropy
//! pair Φ/Ψ for difference distortion measures.

mod maxent;
mod parse;

pub use maxent::{phi, psi, psi_dual, two_sided_si_bound, DifferenceDistortion};
pub use parse::{
    conditional_lz_complexity, conditional_lz_complexity_corrected, joint_parse, lz78_parse, JointParse,
    JointPhrase, Lz78Parse,
};

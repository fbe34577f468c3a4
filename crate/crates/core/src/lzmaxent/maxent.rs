use serde::{Deserialize, Serialize};

use super::parse::joint_parse;
use crate::bounds::BoundReport;
use crate::symbols::SymbolSequence;
use crate::{Error, Result};

/// Difference distortion `ρ(u, v) = ϱ((u − v) mod α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceDistortion {
    table: Vec<f64>,
}

impl DifferenceDistortion {
    pub fn new(table: Vec<f64>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::EmptyInput("difference distortion table".into()));
        }
        if table.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::param("difference distortion entries must be finite and nonnegative"));
        }
        if table.iter().any(|&x| x < table[0]) {
            return Err(Error::param("ϱ(0) must be the smallest entry"));
        }
        Ok(Self { table })
    }

    /// `ϱ(0) = 0`, `ϱ(k) = 1` otherwise.
    pub fn hamming(alpha: usize) -> Result<Self> {
        Self::new((0..alpha).map(|k| if k == 0 { 0.0 } else { 1.0 }).collect())
    }

    pub fn alphabet_size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        let a = self.table.len();
        self.table[(u + a - v % a) % a]
    }

    pub fn to_measure(&self) -> Result<crate::DistortionMeasure> {
        let a = self.table.len();
        crate::DistortionMeasure::new((0..a).map(|u| (0..a).map(|v| self.get(u, v)).collect()).collect())
    }

    fn min(&self) -> f64 {
        self.table[0]
    }

    fn mean(&self) -> f64 {
        self.table.iter().sum::<f64>() / self.table.len() as f64
    }

    fn minimizers(&self) -> usize {
        self.table.iter().filter(|&&x| x == self.min()).count()
    }

    /// Tilted distribution `∝ 2^{−θϱ}`, its mean distortion and entropy.
    fn tilted(&self, theta: f64) -> (f64, f64) {
        let m = self.min();
        let w: Vec<f64> = self.table.iter().map(|&x| (-theta * (x - m)).exp2()).collect();
        let z: f64 = w.iter().sum();
        let mean = w.iter().zip(&self.table).map(|(a, x)| a * x).sum::<f64>() / z;
        let ent = crate::pmf::entropy_bits(&w.iter().map(|a| a / z).collect::<Vec<_>>());
        (mean, ent)
    }

    fn log_partition(&self, theta: f64) -> f64 {
        let m = self.min();
        -theta * m + self.table.iter().map(|&x| (-theta * (x - m)).exp2()).sum::<f64>().log2()
    }
}

/// Smallest `θ` whose tilted quantity crosses `target`; `f` is decreasing in `θ`.
fn solve_theta(f: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) > target && hi < 1e12 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Maximum entropy under a moment constraint, `max { H(P) : E_P ϱ ≤ D }`,
/// evaluated through `min_{θ≥0} [θD + log₂ Σ_u 2^{−θϱ(u)}]`. Returns `−∞`
/// below `min ϱ`.
pub fn phi(d: f64, dd: &DifferenceDistortion) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::param("distortion must be nonnegative"));
    }
    let alpha = dd.alphabet_size() as f64;
    if d < dd.min() {
        return Ok(f64::NEG_INFINITY);
    }
    if d >= dd.mean() {
        return Ok(alpha.log2());
    }
    if d == dd.min() {
        return Ok((dd.minimizers() as f64).log2());
    }
    let theta = solve_theta(|t| dd.tilted(t).0, d);
    Ok(theta * d + dd.log_partition(theta))
}

/// Inverse of [`phi`]: the least `D` with `Φ(D) ≥ R`, by bisection on the
/// tilting parameter.
pub fn psi(r: f64, dd: &DifferenceDistortion) -> Result<f64> {
    let top = (dd.alphabet_size() as f64).log2();
    if !(r >= 0.0) || r > top + 1e-12 {
        return Err(Error::param(format!("rate must lie in [0, {top}], got {r}")));
    }
    if r >= top {
        return Ok(dd.mean());
    }
    if r <= (dd.minimizers() as f64).log2() {
        return Ok(dd.min());
    }
    let theta = solve_theta(|t| dd.tilted(t).1, r);
    Ok(dd.tilted(theta).0)
}

/// `Ψ(R) = sup_{ϑ≥0} ϑ [R − log₂ Σ_u 2^{−ϱ(u)/ϑ}]` maximized directly by
/// golden-section search in `ln ϑ`.
pub fn psi_dual(r: f64, dd: &DifferenceDistortion) -> Result<f64> {
    let top = (dd.alphabet_size() as f64).log2();
    if !(r >= 0.0) || r > top + 1e-12 {
        return Err(Error::param(format!("rate must lie in [0, {top}], got {r}")));
    }
    Ok(sup_vartheta(r, dd).max(dd.min()))
}

fn sup_vartheta(x: f64, dd: &DifferenceDistortion) -> f64 {
    let g = |ln_v: f64| {
        let v = ln_v.exp();
        v * (x - dd.log_partition(1.0 / v))
    };
    let (mut a, mut b) = (-40.0f64, 40.0f64);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut e = a + ratio * (b - a);
    let (mut gc, mut ge) = (g(c), g(e));
    for _ in 0..300 {
        if gc < ge {
            a = c;
            c = e;
            gc = ge;
            e = a + ratio * (b - a);
            ge = g(e);
        } else {
            b = e;
            e = c;
            ge = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        }
    }
    gc.max(ge)
}

/// Lower bound on expected distortion from the conditional LZ complexity
/// `K` of `u` given `w`: `Ψ(K − C − η) − ρ_max d/ℓ`, clamped at 0.
#[allow(clippy::too_many_arguments)]
pub fn two_sided_si_bound(
    u: &SymbolSequence,
    w: &SymbolSequence,
    capacity: f64,
    dd: &DifferenceDistortion,
    eta: f64,
    delay: usize,
    block_len: usize,
    rho_max: f64,
) -> Result<BoundReport> {
    if !(capacity >= 0.0) || !(eta >= 0.0) {
        return Err(Error::param("capacity and eta must be nonnegative"));
    }
    if block_len == 0 {
        return Err(Error::param("block length must be at least 1"));
    }
    if u.alphabet_size() != dd.alphabet_size() {
        return Err(Error::shape("u alphabet does not match the distortion table"));
    }
    let parse = joint_parse(u, w)?;
    let k = parse.complexity();
    let arg = k - capacity - eta;
    let top = (dd.alphabet_size() as f64).log2();
    let penalty = rho_max * delay as f64 / block_len as f64;
    let mut notes = Vec::new();
    let psi_val = if arg <= 0.0 {
        0.0
    } else if arg > top {
        notes.push(format!("argument {arg} exceeds log2 alpha = {top}; clamped"));
        dd.mean()
    } else {
        psi(arg, dd)?
    };
    let value = if arg <= 0.0 { 0.0 } else { (psi_val - penalty).max(0.0) };
    let mut report = BoundReport::new(value)
        .term("lz_complexity", k)
        .term("capacity", capacity)
        .term("eta", eta)
        .term("argument", arg)
        .term("psi", psi_val)
        .term("delay_penalty", penalty)
        .term("distinct_w_phrases", parse.distinct_w() as f64)
        .term("phrases", parse.total() as f64);
    for n in notes {
        report = report.note(n);
    }
    if arg <= 0.0 {
        report = report.note("complexity does not exceed capacity plus redundancy");
    }
    Ok(report)
}

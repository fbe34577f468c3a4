//! Blahut–Arimoto for sums of independent rate-distortion problems solved at
//! a common slope. One component is the ordinary RDF; one component per
//! conditioning symbol gives the conditional RDF; one per block position
//! gives the RDF of a product source under additive distortion.

use crate::pmf::entropy_bits;
use crate::{Error, Result};

const GAP_TOL: f64 = 1e-13;
const MAX_ITER: usize = 100_000;

#[derive(Debug, Clone)]
pub(crate) struct Component {
    pub weight: f64,
    /// Source probabilities restricted to the support.
    pub p: Vec<f64>,
    /// Index of each support entry in the original alphabet.
    pub support: Vec<usize>,
    /// Distortion rows for the support entries.
    pub rho: Vec<Vec<f64>>,
}

impl Component {
    pub fn new(weight: f64, probs: &[f64], rho_rows: impl Fn(usize) -> Vec<f64>) -> Self {
        let support: Vec<usize> = (0..probs.len()).filter(|&u| probs[u] > 0.0).collect();
        let total: f64 = support.iter().map(|&u| probs[u]).sum();
        Self {
            weight,
            p: support.iter().map(|&u| probs[u] / total).collect(),
            rho: support.iter().map(|&u| rho_rows(u)).collect(),
            support,
        }
    }

    fn d_min(&self) -> f64 {
        self.p
            .iter()
            .zip(&self.rho)
            .map(|(p, r)| p * r.iter().copied().fold(f64::INFINITY, f64::min))
            .sum()
    }

    fn best_constant(&self) -> (usize, f64) {
        let nv = self.rho[0].len();
        (0..nv)
            .map(|v| (v, self.p.iter().zip(&self.rho).map(|(p, r)| p * r[v]).sum::<f64>()))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Point {
    /// Per component, row-major `P(v|u)` over the support.
    pub channels: Vec<Vec<f64>>,
    pub rate: f64,
    pub distortion: f64,
    pub slope: f64,
}

pub(crate) struct Engine {
    pub parts: Vec<Component>,
    pub nv: usize,
}

impl Engine {
    pub fn new(parts: Vec<Component>, nv: usize) -> Self {
        Self { parts, nv }
    }

    pub fn d_min(&self) -> f64 {
        self.parts.iter().map(|c| c.weight * c.d_min()).sum()
    }

    pub fn d_max(&self) -> f64 {
        self.parts.iter().map(|c| c.weight * c.best_constant().1).sum()
    }

    fn evaluate(&self, channels: Vec<Vec<f64>>, slope: f64) -> Point {
        let nv = self.nv;
        let mut rate = 0.0;
        let mut distortion = 0.0;
        for (c, ch) in self.parts.iter().zip(&channels) {
            let mut q = vec![0.0; nv];
            let mut cond = 0.0;
            for (i, &p) in c.p.iter().enumerate() {
                let row = &ch[i * nv..(i + 1) * nv];
                cond += p * entropy_bits(row);
                for v in 0..nv {
                    q[v] += p * row[v];
                    distortion += c.weight * p * row[v] * c.rho[i][v];
                }
            }
            rate += c.weight * (entropy_bits(&q) - cond).max(0.0);
        }
        Point {
            channels,
            rate,
            distortion,
            slope,
        }
    }

    pub fn zero_rate(&self) -> Point {
        let channels = self
            .parts
            .iter()
            .map(|c| {
                let v = c.best_constant().0;
                let mut ch = vec![0.0; c.p.len() * self.nv];
                for i in 0..c.p.len() {
                    ch[i * self.nv + v] = 1.0;
                }
                ch
            })
            .collect();
        self.evaluate(channels, 0.0)
    }

    /// Least-rate channel among those attaining the minimum distortion.
    pub fn min_distortion(&self) -> Point {
        let channels = self
            .parts
            .iter()
            .map(|c| {
                let mask: Vec<Vec<bool>> = c
                    .rho
                    .iter()
                    .map(|r| {
                        let m = r.iter().copied().fold(f64::INFINITY, f64::min);
                        r.iter().map(|&x| x <= m).collect()
                    })
                    .collect();
                ba_component(c, self.nv, 0.0, None, Some(&mask))
            })
            .collect();
        self.evaluate(channels, f64::INFINITY)
    }

    pub fn at_slope(&self, s: f64, warm: Option<&Point>) -> Point {
        let channels = self
            .parts
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let q0 = warm.map(|w| output_of(c, &w.channels[k], self.nv));
                ba_component(c, self.nv, s, q0.as_deref(), None)
            })
            .collect();
        self.evaluate(channels, s)
    }

    pub fn mix(&self, a: &Point, b: &Point, lam: f64) -> Point {
        let channels = a
            .channels
            .iter()
            .zip(&b.channels)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| lam * p + (1.0 - lam) * q).collect())
            .collect();
        let mut pt = self.evaluate(channels, a.slope);
        if lam < 0.5 {
            pt.slope = b.slope;
        }
        pt
    }

    /// Brackets the slope so that one side meets `accept` and the other does
    /// not, then bisects. Returns `(lo, hi)` with `hi` accepted.
    fn bracket(&self, accept: impl Fn(&Point) -> bool) -> (Point, Point) {
        let mut lo = self.zero_rate();
        let mut s = 1.0;
        let mut hi = loop {
            let pt = self.at_slope(s, Some(&lo));
            if accept(&pt) {
                break pt;
            }
            if s > 1e7 {
                break self.min_distortion();
            }
            lo = pt;
            s *= 2.0;
        };
        if hi.slope.is_finite() {
            for _ in 0..200 {
                let (a, b) = (lo.slope, hi.slope);
                if b - a <= 1e-13 * b || (lo.distortion - hi.distortion).abs() < 1e-15 {
                    break;
                }
                let mid = self.at_slope(0.5 * (a + b), Some(&hi));
                if accept(&mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
        }
        (lo, hi)
    }

    /// Minimum rate at distortion `target` with the optimal channel.
    pub fn at_distortion(&self, target: f64) -> Result<Point> {
        let d_min = self.d_min();
        let slack = 1e-12 * (1.0 + d_min.abs());
        if target < d_min - slack {
            return Err(Error::Infeasible(format!(
                "distortion {target} is below the minimum achievable {d_min}"
            )));
        }
        if target >= self.d_max() {
            return Ok(self.zero_rate());
        }
        if target <= d_min + slack {
            return Ok(self.min_distortion());
        }
        let (lo, hi) = self.bracket(|p| p.distortion <= target);
        let span = lo.distortion - hi.distortion;
        if span <= 0.0 {
            return Ok(hi);
        }
        let lam = ((target - hi.distortion) / span).clamp(0.0, 1.0);
        Ok(self.mix(&lo, &hi, lam))
    }

    /// Minimum distortion at rate `target`.
    pub fn at_rate(&self, target: f64) -> Point {
        if target <= 0.0 {
            return self.zero_rate();
        }
        let top = self.min_distortion();
        if target >= top.rate {
            return top;
        }
        let (lo, hi) = self.bracket(|p| p.rate >= target);
        let span = hi.rate - lo.rate;
        if span <= 0.0 {
            return lo;
        }
        // rate is convex along the segment, so the chord point is feasible
        let lam = ((hi.rate - target) / span).clamp(0.0, 1.0);
        let mut pt = self.mix(&lo, &hi, lam);
        pt.distortion = lam * lo.distortion + (1.0 - lam) * hi.distortion;
        pt
    }
}

fn output_of(c: &Component, ch: &[f64], nv: usize) -> Vec<f64> {
    let mut q = vec![0.0; nv];
    for (i, &p) in c.p.iter().enumerate() {
        for v in 0..nv {
            q[v] += p * ch[i * nv + v];
        }
    }
    q
}

/// One Blahut–Arimoto run at slope `s`; stops on the certified gap
/// `max_v log c_v`.
fn ba_component(c: &Component, nv: usize, s: f64, q0: Option<&[f64]>, mask: Option<&[Vec<bool>]>) -> Vec<f64> {
    let nu = c.p.len();
    let allowed = |i: usize, v: usize| mask.map_or(true, |m| m[i][v]);
    let mut q: Vec<f64> = match q0 {
        Some(q) => q.iter().map(|x| x.max(1e-300)).collect(),
        None => vec![1.0 / nv as f64; nv],
    };
    // 2^{-s(ρ - min_v ρ)} per row, fixed across iterations
    let kernel: Vec<f64> = (0..nu)
        .flat_map(|i| {
            let row = &c.rho[i];
            let m = (0..nv).filter(|&v| allowed(i, v)).map(|v| row[v]).fold(f64::INFINITY, f64::min);
            (0..nv).map(move |v| if allowed(i, v) { (-s * (row[v] - m)).exp2() } else { 0.0 })
        })
        .collect();
    let mut ch = vec![0.0; nu * nv];
    let mut cvec = vec![0.0; nv];
    for _ in 0..MAX_ITER {
        cvec.iter_mut().for_each(|x| *x = 0.0);
        for i in 0..nu {
            let k = &kernel[i * nv..(i + 1) * nv];
            let z: f64 = k.iter().zip(&q).map(|(a, b)| a * b).sum();
            let row = &mut ch[i * nv..(i + 1) * nv];
            for v in 0..nv {
                row[v] = q[v] * k[v] / z;
                cvec[v] += c.p[i] * k[v] / z;
            }
        }
        let gap = cvec.iter().copied().fold(f64::NEG_INFINITY, f64::max).log2();
        for v in 0..nv {
            q[v] *= cvec[v];
        }
        let total: f64 = q.iter().sum();
        q.iter_mut().for_each(|x| *x /= total);
        if gap < GAP_TOL {
            break;
        }
    }
    ch
}

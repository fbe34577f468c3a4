use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{capacity, sphere_packing_exponent, Dmc};
use crate::distortion::DistortionMeasure;
use crate::pmf::{divergence_bits, FinitePmf};
use crate::ratedist::{min_distortion, rate_distortion};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartonConfig {
    /// Upper limit on simplex-grid points before local refinement.
    pub max_points: usize,
    pub refine_steps: usize,
}

impl Default for MartonConfig {
    fn default() -> Self {
        Self {
            max_points: 500,
            refine_steps: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartonExponent {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub value: f64,
    /// Minimizing source distribution, absent when the value is infinite.
    pub source: Option<FinitePmf>,
}

/// Evaluates `R_Q(D)` on the support of `p`, `+∞` below the minimum distortion.
struct Problem<'a> {
    p: &'a FinitePmf,
    rho: &'a DistortionMeasure,
    support: Vec<usize>,
    d: f64,
    rate: f64,
}

impl Problem<'_> {
    fn expand(&self, x: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.p.len()];
        for (&i, &v) in self.support.iter().zip(x) {
            q[i] = v;
        }
        q
    }

    fn feasible(&self, x: &[f64]) -> bool {
        let q = self.expand(x);
        let Ok(q) = FinitePmf::from_weights(&q) else {
            return false;
        };
        match min_distortion(&q, self.rho) {
            Ok(m) if self.d < m => true,
            Ok(_) => rate_distortion(&q, self.rho, self.d).map_or(false, |r| r >= self.rate - 1e-12),
            Err(_) => false,
        }
    }

    fn divergence(&self, x: &[f64]) -> f64 {
        divergence_bits(&self.expand(x), self.p.probs())
    }

    fn base(&self) -> Vec<f64> {
        self.support.iter().map(|&i| self.p.prob(i)).collect()
    }

    /// Moves `x` toward `P` as far as feasibility allows (bisection on the
    /// mixing weight).
    fn pull_toward_p(&self, x: &[f64]) -> Vec<f64> {
        let base = self.base();
        let at = |t: f64| -> Vec<f64> { x.iter().zip(&base).map(|(a, b)| t * a + (1.0 - t) * b).collect() };
        let (mut lo, mut hi) = (0.0, 1.0);
        while hi - lo > 1e-11 {
            let mid = 0.5 * (lo + hi);
            if self.feasible(&at(mid)) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        at(hi)
    }
}

fn simplex(m: usize, n: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / n as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k - 1, left - c, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, n, n, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

/// Marton's source-coding exponent `min { D(Q‖P) : R_Q(D) ≥ R }`, by a
/// simplex grid over the support of `P` followed by a pattern search and a
/// bisection toward `P` along the constraint boundary.
pub fn marton_exponent(p: &FinitePmf, rho: &DistortionMeasure, d: f64, rate: f64) -> Result<MartonExponent> {
    marton_exponent_with(p, rho, d, rate, &MartonConfig::default())
}

pub fn marton_exponent_with(
    p: &FinitePmf,
    rho: &DistortionMeasure,
    d: f64,
    rate: f64,
    cfg: &MartonConfig,
) -> Result<MartonExponent> {
    if !(rate >= 0.0) || !(d >= 0.0) {
        return Err(Error::param("D and R must be nonnegative"));
    }
    if p.len() != rho.sources() {
        return Err(Error::shape("source does not match the distortion table"));
    }
    let support: Vec<usize> = (0..p.len()).filter(|&i| p.prob(i) > 0.0).collect();
    let prob = Problem {
        p,
        rho,
        support,
        d,
        rate,
    };
    if prob.feasible(&prob.base()) {
        return Ok(MartonExponent {
            value: 0.0,
            source: Some(p.clone()),
        });
    }
    let m = prob.support.len();
    if m == 1 {
        return Ok(MartonExponent {
            value: f64::INFINITY,
            source: None,
        });
    }
    let mut n = 1;
    while binomial(n + 1 + m - 1, m - 1) <= cfg.max_points as f64 {
        n += 1;
    }
    let grid = simplex(m, n);
    let best = grid
        .par_iter()
        .filter(|x| prob.feasible(x))
        .map(|x| (prob.divergence(x), x.clone()))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let Some((_, start)) = best else {
        return Ok(MartonExponent {
            value: f64::INFINITY,
            source: None,
        });
    };
    let mut x = prob.pull_toward_p(&start);
    let mut val = prob.divergence(&x);
    let mut step = 0.5 / n as f64;
    // on a segment the pull toward P already lands on the boundary
    let steps = if m > 2 { cfg.refine_steps } else { 0 };
    for _ in 0..steps {
        if step < 1e-8 {
            break;
        }
        let mut moved = false;
        for i in 0..m {
            for j in 0..m {
                if i == j || x[i] < step {
                    continue;
                }
                let mut y = x.clone();
                y[i] -= step;
                y[j] += step;
                if !prob.feasible(&y) {
                    continue;
                }
                let y = prob.pull_toward_p(&y);
                let v = prob.divergence(&y);
                if v < val - 1e-15 {
                    x = y;
                    val = v;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    Ok(MartonExponent {
        value: val,
        source: Some(FinitePmf::from_weights(&prob.expand(&x))?),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsccPoint {
    pub rate: f64,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub marton: f64,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub sphere_packing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsccExponent {
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub value: f64,
    pub best: JsccPoint,
    pub grid: Vec<JsccPoint>,
}

/// Upper bound on the joint source-channel excess-distortion exponent,
/// `min_R [F(R, D, P) + E_sp(R)]` over a rate grid between `R_P(D)` and
/// capacity.
pub fn jscc_exponent_upper(p: &FinitePmf, rho: &DistortionMeasure, d: f64, ch: &Dmc, points: usize) -> Result<JsccExponent> {
    if points < 2 {
        return Err(Error::param("rate grid needs at least two points"));
    }
    let cap = capacity(ch, None)?.value;
    let r_p = if d < min_distortion(p, rho)? { f64::INFINITY } else { rate_distortion(p, rho, d)? };
    let rates: Vec<f64> = if r_p >= cap {
        vec![cap]
    } else {
        (0..points).map(|k| r_p + (cap - r_p) * k as f64 / (points - 1) as f64).collect()
    };
    let grid = rates
        .par_iter()
        .map(|&r| -> Result<JsccPoint> {
            Ok(JsccPoint {
                rate: r,
                marton: marton_exponent(p, rho, d, r)?.value,
                sphere_packing: sphere_packing_exponent(ch, r)?.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = grid
        .iter()
        .min_by(|a, b| (a.marton + a.sphere_packing).total_cmp(&(b.marton + b.sphere_packing)))
        .cloned()
        .unwrap();
    Ok(JsccExponent {
        value: best.marton + best.sphere_packing,
        best,
        grid,
    })
}

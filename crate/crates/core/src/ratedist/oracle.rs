//! Brute-force simplex-grid references for the Wyner–Ziv and
//! common-reconstruction problems on tiny alphabets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hull::{interpolate, lower_hull};
use super::wz::RdProblem;
use crate::pmf::entropy_bits;
use crate::{Error, Result};

/// Largest number of grid points an oracle call will visit.
pub const ORACLE_POINT_CAP: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Lower convex envelope of the grid's `(distortion, rate)` cloud at `D`.
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub value: f64,
    /// Least grid rate with distortion at most `D`.
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub raw: f64,
    /// Difference to the same search on a grid twice as coarse.
    pub slack_estimate: f64,
    pub points: usize,
    pub warning: Option<String>,
}

struct Tables {
    nu: usize,
    nw: usize,
    nv: usize,
    puw: Vec<f64>,
    rho: Vec<f64>,
    ell: f64,
}

impl Tables {
    fn new(prob: &RdProblem) -> Result<Self> {
        let (nu, nv) = (prob.source().len(), prob.distortion().reconstructions());
        let nw = prob.side_info().map_or(1, |s| s.outputs());
        if nu > 3 || nw > 3 || nv > 3 {
            return Err(Error::ResourceCap(format!(
                "oracle needs |U|, |W|, |V| <= 3, got {nu}, {nw}, {nv}"
            )));
        }
        let p = prob.source().probs();
        let puw = (0..nu * nw)
            .map(|i| p[i / nw] * prob.side_info().map_or(1.0, |s| s.prob(i / nw, i % nw)))
            .collect();
        let ell = prob.block_len() as f64;
        let rho = (0..nu * nv).map(|i| prob.distortion().get(i / nv, i % nv) / ell).collect();
        Ok(Self {
            nu,
            nw,
            nv,
            puw,
            rho,
            ell,
        })
    }

    /// `(distortion, rate)` of `P(a|u)` given as `rows[u]`.
    fn point(&self, rows: &[&[f64]], k: usize, identity: bool) -> (f64, f64) {
        let (nu, nw, nv) = (self.nu, self.nw, self.nv);
        // joint p(u, w, a)
        let mut j = vec![0.0; nu * nw * k];
        for u in 0..nu {
            for w in 0..nw {
                for a in 0..k {
                    j[(u * nw + w) * k + a] = self.puw[u * nw + w] * rows[u][a];
                }
            }
        }
        let marg = |keep: &dyn Fn(usize, usize) -> usize, size: usize| {
            let mut m = vec![0.0; size];
            for u in 0..nu {
                for w in 0..nw {
                    for a in 0..k {
                        m[keep(u, w) * k + a] += j[(u * nw + w) * k + a];
                    }
                }
            }
            m
        };
        let pua = marg(&|u, _| u, nu * k);
        let pwa = marg(&|_, w| w, nw * k);
        let pa = marg(&|_, _| 0, k);
        let pu: Vec<f64> = (0..nu).map(|u| pua[u * k..(u + 1) * k].iter().sum()).collect();
        let pw: Vec<f64> = (0..nw).map(|w| pwa[w * k..(w + 1) * k].iter().sum()).collect();
        let h_a = entropy_bits(&pa);
        let i_ua = h_a + entropy_bits(&pu) - entropy_bits(&pua);
        let i_wa = h_a + entropy_bits(&pw) - entropy_bits(&pwa);
        let mut dist = 0.0;
        for a in 0..k {
            for w in 0..nw {
                let cost = |v: usize| -> f64 { (0..nu).map(|u| j[(u * nw + w) * k + a] * self.rho[u * nv + v]).sum() };
                dist += if identity {
                    cost(a)
                } else {
                    (0..nv).map(cost).fold(f64::INFINITY, f64::min)
                };
            }
        }
        (dist, ((i_ua - i_wa) / self.ell).max(0.0))
    }
}

fn simplex_grid(k: usize, n: usize) -> Vec<Vec<f64>> {
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
    rec(k, n, n, &mut Vec::new(), &mut out);
    out
}

fn grid_search(t: &Tables, d: f64, n: usize, k: usize, identity: bool) -> Result<(f64, f64, usize)> {
    let rows = simplex_grid(k, n);
    let m = rows.len();
    let total = (0..t.nu).try_fold(1usize, |acc, _| acc.checked_mul(m)).filter(|&x| x <= ORACLE_POINT_CAP);
    let Some(total) = total else {
        return Err(Error::ResourceCap(format!(
            "oracle grid with {m} points per row and {} rows exceeds {ORACLE_POINT_CAP}",
            t.nu
        )));
    };
    let pts: Vec<(f64, f64)> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut sel: Vec<&[f64]> = Vec::with_capacity(t.nu);
            for _ in 0..t.nu {
                sel.push(&rows[idx % m]);
                idx /= m;
            }
            t.point(&sel, k, identity)
        })
        .collect();
    let raw = pts
        .iter()
        .filter(|p| p.0 <= d + 1e-12)
        .map(|p| p.1)
        .fold(f64::INFINITY, f64::min);
    let h = lower_hull(&pts);
    let verts: Vec<(f64, f64)> = h.iter().map(|&i| pts[i]).collect();
    let value = interpolate(&verts, d).unwrap_or(f64::INFINITY);
    Ok((value, raw, total))
}

fn run(prob: &RdProblem, d: f64, step: f64, k: usize, identity: bool, tolerance: f64) -> Result<OracleResult> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::param("grid step must lie in (0, 0.5]"));
    }
    if !(d >= 0.0) {
        return Err(Error::param("distortion must be nonnegative"));
    }
    let t = Tables::new(prob)?;
    let n = (1.0 / step).round().max(1.0) as usize;
    let (value, raw, points) = grid_search(&t, d, n, k, identity)?;
    let coarse = grid_search(&t, d, (n / 2).max(1), k, identity)?.0;
    let slack_estimate = if value.is_finite() && coarse.is_finite() {
        (coarse - value).max(0.0)
    } else {
        0.0
    };
    let warning = (slack_estimate > tolerance).then(|| {
        format!("grid step {step} may be too coarse: halving the resolution moves the value by {slack_estimate:.3e}")
    });
    Ok(OracleResult {
        value,
        raw,
        slack_estimate,
        points,
        warning,
    })
}

/// Exhaustive minimization of `I(U;A) − I(W;A)` over a simplex grid of
/// `P(a|u)` rows, with the optimal decoder `G(a, w)` at every grid point.
pub fn wz_oracle(prob: &RdProblem, d: f64, step: f64, aux_size: usize, tolerance: f64) -> Result<OracleResult> {
    if !(1..=4).contains(&aux_size) {
        return Err(Error::ResourceCap("oracle needs 1 <= |A| <= 4".into()));
    }
    run(prob, d, step, aux_size, false, tolerance)
}

/// Common-reconstruction counterpart of [`wz_oracle`] (`A = V`, `G(v, w) = v`).
pub fn cr_oracle(prob: &RdProblem, d: f64, step: f64, tolerance: f64) -> Result<OracleResult> {
    let nv = prob.distortion().reconstructions();
    run(prob, d, step, nv, true, tolerance)
}

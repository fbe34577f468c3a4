use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ba::{Component, Engine};
use super::hull::{locate, lower_hull, Located};
use crate::channels::Dmc;
use crate::distortion::DistortionMeasure;
use crate::pmf::{entropy_bits, FinitePmf, JointPmf};
use crate::{Error, Result};

/// Default ceiling on the auxiliary alphabet size.
pub const DEFAULT_AUX_CAP: usize = 8;

/// Source, distortion and optional side-information channel `P(w|u)`.
///
/// For ℓ-block problems the source ranges over the block superalphabet, the
/// distortion table is the additive block extension and all reported rates
/// and distortions are per source symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdProblem {
    source: FinitePmf,
    distortion: DistortionMeasure,
    side_info: Option<Dmc>,
    block_len: usize,
}

impl RdProblem {
    pub fn new(source: FinitePmf, distortion: DistortionMeasure) -> Result<Self> {
        if source.len() != distortion.sources() {
            return Err(Error::shape("source alphabet does not match the distortion table"));
        }
        Ok(Self {
            source,
            distortion,
            side_info: None,
            block_len: 1,
        })
    }

    pub fn with_side_info(mut self, side_info: Dmc) -> Result<Self> {
        if side_info.inputs() != self.source.len() {
            return Err(Error::shape("side-information channel inputs do not match the source"));
        }
        self.side_info = Some(side_info);
        Ok(self)
    }

    /// ℓ-block problem from single-letter distortion and side-information
    /// channel (applied memorylessly inside each block).
    pub fn blocks(
        blocks: FinitePmf,
        rho: &DistortionMeasure,
        side_info: Option<&Dmc>,
        block_len: usize,
    ) -> Result<Self> {
        let table = rho.block(block_len)?;
        let mut p = Self::new(blocks, table)?;
        p.block_len = block_len;
        if let Some(si) = side_info {
            p = p.with_side_info(si.block(block_len)?)?;
        }
        Ok(p)
    }

    pub fn source(&self) -> &FinitePmf {
        &self.source
    }

    pub fn distortion(&self) -> &DistortionMeasure {
        &self.distortion
    }

    pub fn side_info(&self) -> Option<&Dmc> {
        self.side_info.as_ref()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    fn side_outputs(&self) -> usize {
        self.side_info.as_ref().map_or(1, Dmc::outputs)
    }

    /// Joint PMF of `(U, W)`.
    pub fn joint(&self) -> Result<JointPmf> {
        match &self.side_info {
            Some(si) => JointPmf::from_channel(&self.source, si),
            None => JointPmf::new(vec![self.source.len(), 1], self.source.probs().to_vec()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WzConfig {
    /// Auxiliary alphabet size; `None` means `min(|U| + 1, DEFAULT_AUX_CAP)`.
    pub aux_size: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for WzConfig {
    fn default() -> Self {
        Self {
            aux_size: None,
            restarts: 32,
            seed: 0,
            max_iterations: 5_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartStats {
    pub restarts: usize,
    /// Slope at which the restarts were compared.
    pub slope: f64,
    /// Lagrangian `R + sD` over restarts.
    pub best: f64,
    pub worst: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WzSolution {
    /// Bits per source symbol, `(1/ℓ) I(U;A|W)` of the returned pair.
    pub rate: f64,
    /// Achieved distortion per source symbol.
    pub distortion: f64,
    /// `P(a|u)`.
    pub test_channel: Dmc,
    /// `decoder[a][w]` is the reconstruction index.
    pub decoder: Vec<Vec<usize>>,
    pub aux_size: usize,
    /// Auxiliary alphabet size the solver was allowed.
    pub aux_cap: usize,
    /// True when `aux_cap` is below `|U| + 1`.
    pub aux_capped: bool,
    pub block_len: usize,
    pub restarts: Option<RestartStats>,
}

#[derive(Debug, Clone)]
pub(crate) struct Cand {
    pub k: usize,
    pub pa: Vec<f64>,
    pub g: Vec<usize>,
    pub rate: f64,
    pub dist: f64,
}

impl Cand {
    fn lagrangian(&self, s: f64) -> f64 {
        self.rate + s * self.dist
    }
}

pub(crate) struct WzEngine {
    pub nu: usize,
    pub nw: usize,
    pub nv: usize,
    pub p: Vec<f64>,
    pub pw: Vec<f64>,
    pub puw: Vec<f64>,
    pub w_marg: Vec<f64>,
    /// Per-symbol distortion, `ρ_block / ℓ`.
    pub rho: Vec<f64>,
    pub ell: f64,
    fallback: Vec<usize>,
}

impl WzEngine {
    pub fn new(prob: &RdProblem) -> Result<Self> {
        let nu = prob.source.len();
        let nw = prob.side_outputs();
        let nv = prob.distortion.reconstructions();
        let p = prob.source.probs().to_vec();
        let pw: Vec<f64> = match &prob.side_info {
            Some(si) => (0..nu).flat_map(|u| si.row(u).to_vec()).collect(),
            None => vec![1.0; nu],
        };
        let puw: Vec<f64> = (0..nu * nw).map(|i| p[i / nw] * pw[i]).collect();
        let mut w_marg = vec![0.0; nw];
        for (i, m) in puw.iter().enumerate() {
            w_marg[i % nw] += m;
        }
        let ell = prob.block_len as f64;
        let rho: Vec<f64> = (0..nu * nv).map(|i| prob.distortion.get(i / nv, i % nv) / ell).collect();
        let fallback = (0..nw)
            .map(|w| {
                argmin((0..nv).map(|v| (0..nu).map(|u| puw[u * nw + w] * rho[u * nv + v]).sum()))
            })
            .collect();
        Ok(Self {
            nu,
            nw,
            nv,
            p,
            pw,
            puw,
            w_marg,
            rho,
            ell,
            fallback,
        })
    }

    pub fn d_min(&self) -> f64 {
        (0..self.nu)
            .map(|u| self.p[u] * self.rho[u * self.nv..(u + 1) * self.nv].iter().copied().fold(f64::INFINITY, f64::min))
            .sum()
    }

    pub fn rho_max(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }

    fn joint_aw(&self, pa: &[f64], k: usize) -> Vec<f64> {
        let nw = self.nw;
        let mut paw = vec![0.0; k * nw];
        for u in 0..self.nu {
            if self.p[u] == 0.0 {
                continue;
            }
            for w in 0..nw {
                let m = self.puw[u * nw + w];
                if m == 0.0 {
                    continue;
                }
                for a in 0..k {
                    paw[a * nw + w] += m * pa[u * k + a];
                }
            }
        }
        paw
    }

    pub fn optimal_g(&self, pa: &[f64], k: usize) -> Vec<usize> {
        let (nu, nw, nv) = (self.nu, self.nw, self.nv);
        let mut g = vec![0; k * nw];
        let mut cost = vec![0.0; nv];
        for a in 0..k {
            for w in 0..nw {
                cost.iter_mut().for_each(|c| *c = 0.0);
                let mut mass = 0.0;
                for u in 0..nu {
                    let m = self.puw[u * nw + w] * pa[u * k + a];
                    if m > 0.0 {
                        mass += m;
                        for v in 0..nv {
                            cost[v] += m * self.rho[u * nv + v];
                        }
                    }
                }
                g[a * nw + w] = if mass > 0.0 { argmin(cost.iter().copied()) } else { self.fallback[w] };
            }
        }
        g
    }

    pub fn evaluate(&self, pa: &[f64], k: usize, g: &[usize]) -> (f64, f64) {
        let (nu, nw, nv) = (self.nu, self.nw, self.nv);
        let paw = self.joint_aw(pa, k);
        let mut h_aw = 0.0;
        for w in 0..nw {
            if self.w_marg[w] > 0.0 {
                let col: Vec<f64> = (0..k).map(|a| paw[a * nw + w] / self.w_marg[w]).collect();
                h_aw += self.w_marg[w] * entropy_bits(&col);
            }
        }
        let h_au: f64 = (0..nu)
            .filter(|&u| self.p[u] > 0.0)
            .map(|u| self.p[u] * entropy_bits(&pa[u * k..(u + 1) * k]))
            .sum();
        let mut dist = 0.0;
        for u in 0..nu {
            for w in 0..nw {
                let m = self.puw[u * nw + w];
                if m > 0.0 {
                    for a in 0..k {
                        dist += m * pa[u * k + a] * self.rho[u * nv + g[a * nw + w]];
                    }
                }
            }
        }
        ((h_aw - h_au).max(0.0) / self.ell, dist)
    }

    fn finish(&self, pa: Vec<f64>, k: usize, g: Vec<usize>) -> Cand {
        let (rate, dist) = self.evaluate(&pa, k, &g);
        Cand { k, pa, g, rate, dist }
    }

    /// Block-coordinate descent on `Σ p P [log P − Σ_w P(w|u) log r(a|w)] + ℓ s d_G`.
    pub fn descend(&self, s: f64, init: Vec<f64>, k: usize, fixed_g: Option<&[usize]>, max_iter: usize) -> Cand {
        let (nu, nw, nv) = (self.nu, self.nw, self.nv);
        let lam = s * self.ell;
        let mut pa = init;
        let mut logr = vec![0.0; k * nw];
        let mut c = vec![0.0; k];
        let mut prev = f64::INFINITY;
        for it in 0..max_iter {
            let g = match fixed_g {
                Some(f) => f.to_vec(),
                None => self.optimal_g(&pa, k),
            };
            let paw = self.joint_aw(&pa, k);
            for (i, lr) in logr.iter_mut().enumerate() {
                let w = i % nw;
                *lr = if paw[i] > 0.0 && self.w_marg[w] > 0.0 {
                    (paw[i] / self.w_marg[w]).log2()
                } else {
                    f64::NEG_INFINITY
                };
            }
            let mut f = 0.0;
            for u in 0..nu {
                if self.p[u] == 0.0 {
                    continue;
                }
                for a in 0..k {
                    let mut acc = 0.0;
                    for w in 0..nw {
                        let q = self.pw[u * nw + w];
                        if q > 0.0 {
                            acc += q * (logr[a * nw + w] - lam * self.rho[u * nv + g[a * nw + w]]);
                        }
                    }
                    c[a] = if acc.is_nan() { f64::NEG_INFINITY } else { acc };
                }
                let m = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = c.iter().map(|x| (x - m).exp2()).sum();
                for a in 0..k {
                    pa[u * k + a] = (c[a] - m).exp2() / z;
                }
                f -= self.p[u] * (m + z.log2());
            }
            if it > 0 && prev - f < 1e-13 * (1.0 + f.abs()) {
                break;
            }
            prev = f;
        }
        let g = match fixed_g {
            Some(f) => f.to_vec(),
            None => self.optimal_g(&pa, k),
        };
        self.finish(pa, k, g)
    }

    /// Drops dead auxiliary symbols and merges symbols sharing a decoder row.
    pub fn compact(&self, c: &Cand) -> Cand {
        let (nu, nw) = (self.nu, self.nw);
        let mass: Vec<f64> = (0..c.k).map(|a| (0..nu).map(|u| self.p[u] * c.pa[u * c.k + a]).sum()).collect();
        let mut rows: Vec<Vec<usize>> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for a in 0..c.k {
            if mass[a] <= 1e-15 {
                continue;
            }
            let row = c.g[a * nw..(a + 1) * nw].to_vec();
            match rows.iter().position(|r| *r == row) {
                Some(i) => groups[i].push(a),
                None => {
                    rows.push(row);
                    groups.push(vec![a]);
                }
            }
        }
        if groups.is_empty() {
            return c.clone();
        }
        let k = groups.len();
        let mut pa = vec![0.0; nu * k];
        for u in 0..nu {
            let row = &mut pa[u * k..(u + 1) * k];
            for (j, grp) in groups.iter().enumerate() {
                row[j] = grp.iter().map(|&a| c.pa[u * c.k + a]).sum();
            }
            let z: f64 = row.iter().sum();
            if z > 0.0 {
                row.iter_mut().for_each(|x| *x /= z);
            } else {
                row.iter_mut().for_each(|x| *x = 1.0 / k as f64);
            }
        }
        let g = rows.concat();
        self.finish(pa, k, g)
    }

    /// Time-sharing: `lam` of `a` and `1 − lam` of `b` over the disjoint
    /// union of their auxiliary alphabets.
    pub fn time_share(&self, a: &Cand, b: &Cand, lam: f64) -> Cand {
        let k = a.k + b.k;
        let mut pa = Vec::with_capacity(self.nu * k);
        for u in 0..self.nu {
            pa.extend(a.pa[u * a.k..(u + 1) * a.k].iter().map(|x| lam * x));
            pa.extend(b.pa[u * b.k..(u + 1) * b.k].iter().map(|x| (1.0 - lam) * x));
        }
        let g = [a.g.as_slice(), b.g.as_slice()].concat();
        self.compact(&self.finish(pa, k, g))
    }

    pub fn zero_rate(&self) -> Cand {
        self.finish(vec![1.0; self.nu], 1, self.fallback.clone())
    }

    /// `A = argmin_v ρ(U, v)` with the decoder reading `A` directly.
    pub fn min_distortion_candidate(&self, k: usize) -> Option<Cand> {
        let nv = self.nv;
        let best: Vec<usize> = (0..self.nu)
            .map(|u| argmin(self.rho[u * nv..(u + 1) * nv].iter().copied()))
            .collect();
        let mut used: Vec<usize> = best.clone();
        used.sort_unstable();
        used.dedup();
        if used.len() > k {
            return None;
        }
        let kk = used.len();
        let mut pa = vec![0.0; self.nu * kk];
        for u in 0..self.nu {
            pa[u * kk + used.iter().position(|&v| v == best[u]).unwrap()] = 1.0;
        }
        let g = used.iter().flat_map(|&v| std::iter::repeat(v).take(self.nw)).collect();
        Some(self.compact(&self.finish(pa, kk, g)))
    }

    /// Starting point near `c`, padded to `k` symbols.
    pub fn embed(&self, c: &Cand, k: usize) -> Vec<f64> {
        let mut pa = vec![0.0; self.nu * k];
        let kk = c.k.min(k);
        for u in 0..self.nu {
            for a in 0..kk {
                pa[u * k + a] = 0.99 * c.pa[u * c.k + a];
            }
            let rest: f64 = 1.0 - pa[u * k..(u + 1) * k].iter().sum::<f64>();
            for a in 0..k {
                pa[u * k + a] += rest / k as f64;
            }
        }
        pa
    }

    pub fn random_init(&self, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut pa = vec![0.0; self.nu * k];
        for u in 0..self.nu {
            let row = &mut pa[u * k..(u + 1) * k];
            for x in row.iter_mut() {
                *x = -(1.0 - rng.gen::<f64>()).ln() + 1e-12;
            }
            let z: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= z);
        }
        pa
    }

    fn identity_decoder(&self) -> Vec<usize> {
        (0..self.nv).flat_map(|v| std::iter::repeat(v).take(self.nw)).collect()
    }

    fn to_solution(&self, c: &Cand, cap: usize, prob: &RdProblem, restarts: Option<RestartStats>) -> Result<WzSolution> {
        let rows: Vec<Vec<f64>> = (0..self.nu).map(|u| c.pa[u * c.k..(u + 1) * c.k].to_vec()).collect();
        Ok(WzSolution {
            rate: c.rate,
            distortion: c.dist,
            test_channel: Dmc::from_weights(&rows)?,
            decoder: (0..c.k).map(|a| c.g[a * self.nw..(a + 1) * self.nw].to_vec()).collect(),
            aux_size: c.k,
            aux_cap: cap,
            aux_capped: cap < self.nu + 1,
            block_len: prob.block_len,
            restarts,
        })
    }
}

fn argmin(it: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, x) in it.enumerate() {
        if x < best.1 {
            best = (i, x);
        }
    }
    best.0
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn aux_size(e: &WzEngine, cfg: &WzConfig) -> Result<usize> {
    let full = e.nu + 1;
    let k = cfg.aux_size.unwrap_or(full.min(DEFAULT_AUX_CAP));
    if k == 0 || k > full {
        return Err(Error::param(format!("auxiliary alphabet size must lie in 1..={full}")));
    }
    if e.nu * e.nw * e.nv * k > 50_000_000 {
        return Err(Error::ResourceCap(format!(
            "Wyner-Ziv problem with |U|={}, |W|={}, |V|={}, |A|={k} is too large",
            e.nu, e.nw, e.nv
        )));
    }
    Ok(k)
}

/// Point cloud of Lagrangian solutions whose lower convex hull approximates
/// the Wyner–Ziv curve.
struct Curve<'a> {
    e: &'a WzEngine,
    k: usize,
    cfg: WzConfig,
    cloud: Vec<Cand>,
    stats: Option<RestartStats>,
}

impl<'a> Curve<'a> {
    fn build(e: &'a WzEngine, k: usize, cfg: &WzConfig, seeds: Vec<Cand>) -> Self {
        let mut cloud = vec![e.zero_rate()];
        cloud.extend(e.min_distortion_candidate(k));
        cloud.extend(seeds.into_iter().filter(|c| c.k <= k));
        let scale = e.rho_max().max(1e-300);
        let mut warm: Option<Cand> = None;
        for j in -8i32..=16 {
            let s = (j as f64 / 2.0).exp2() / scale;
            let mut inits: Vec<Vec<f64>> = (0..cfg.restarts)
                .map(|r| e.random_init(k, &mut rng_for(cfg.seed, ((j + 8) as u64) << 32 | r as u64)))
                .collect();
            if let Some(w) = &warm {
                inits.push(e.embed(w, k));
            }
            let found: Vec<Cand> = inits
                .into_par_iter()
                .map(|init| e.compact(&e.descend(s, init, k, None, cfg.max_iterations)))
                .collect();
            warm = found
                .iter()
                .min_by(|a, b| a.lagrangian(s).total_cmp(&b.lagrangian(s)))
                .cloned();
            cloud.extend(found);
        }
        Self {
            e,
            k,
            cfg: *cfg,
            cloud,
            stats: None,
        }
    }

    fn hull(&self) -> Vec<usize> {
        let pts: Vec<(f64, f64)> = self.cloud.iter().map(|c| (c.dist, c.rate)).collect();
        lower_hull(&pts)
    }

    fn locate_d(&self, d: f64) -> Located {
        let h = self.hull();
        let pts: Vec<(f64, f64)> = h.iter().map(|&i| (self.cloud[i].dist, self.cloud[i].rate)).collect();
        match locate(&pts, d) {
            Located::Between(i, j) => Located::Between(h[i], h[j]),
            Located::At(i) => Located::At(h[i]),
            Located::Below => Located::Below,
        }
    }

    /// Hull segments touching `d`: the one containing it, or both
    /// neighbours when `d` falls on a vertex.
    fn segments(&self, d: f64) -> Vec<(usize, usize)> {
        let h = self.hull();
        let pts: Vec<(f64, f64)> = h.iter().map(|&i| (self.cloud[i].dist, self.cloud[i].rate)).collect();
        match locate(&pts, d) {
            Located::Between(i, j) => vec![(h[i], h[j])],
            Located::At(i) => {
                let mut v = Vec::new();
                if i > 0 {
                    v.push((h[i - 1], h[i]));
                }
                if i + 1 < h.len() {
                    v.push((h[i], h[i + 1]));
                }
                v
            }
            Located::Below => Vec::new(),
        }
    }

    fn slope(&self, (l, r): (usize, usize)) -> f64 {
        let (a, b) = (&self.cloud[l], &self.cloud[r]);
        (a.rate - b.rate) / (b.dist - a.dist)
    }

    /// Tightens the hull near `d` with warm-started descents at the slopes
    /// of the segments touching it.
    fn refine(&mut self, d: f64) {
        for _ in 0..60 {
            let mut improved = false;
            for seg in self.segments(d) {
                let s = self.slope(seg);
                let level = self.cloud[seg.0].lagrangian(s);
                let inits = [self.e.embed(&self.cloud[seg.0], self.k), self.e.embed(&self.cloud[seg.1], self.k)];
                let found: Vec<Cand> = inits
                    .into_par_iter()
                    .map(|init| self.e.compact(&self.e.descend(s, init, self.k, None, self.cfg.max_iterations)))
                    .collect();
                improved |= found.iter().any(|c| c.lagrangian(s) < level - 1e-12);
                self.cloud.extend(found);
            }
            if !improved {
                return;
            }
        }
    }

    /// Random restarts at the slopes of the segments touching `d`.
    fn restart_at(&mut self, d: f64) {
        for seg in self.segments(d) {
            let s = self.slope(seg);
            let inits: Vec<Vec<f64>> = (0..self.cfg.restarts)
                .map(|i| self.e.random_init(self.k, &mut rng_for(self.cfg.seed, (1000u64 << 32) | i as u64)))
                .collect();
            let found: Vec<Cand> = inits
                .into_par_iter()
                .map(|init| self.e.compact(&self.e.descend(s, init, self.k, None, self.cfg.max_iterations)))
                .collect();
            if !found.is_empty() {
                let vals: Vec<f64> = found.iter().map(|c| c.lagrangian(s)).collect();
                self.stats = Some(RestartStats {
                    restarts: vals.len(),
                    slope: s,
                    best: vals.iter().copied().fold(f64::INFINITY, f64::min),
                    worst: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    mean: vals.iter().sum::<f64>() / vals.len() as f64,
                });
            }
            self.cloud.extend(found);
        }
    }

    fn at_distortion(&mut self, d: f64) -> Result<Cand> {
        self.refine(d);
        self.restart_at(d);
        self.refine(d);
        match self.locate_d(d) {
            Located::Below => Err(Error::Infeasible(format!(
                "distortion {d} not reached with an auxiliary alphabet of size {}",
                self.k
            ))),
            Located::At(i) => Ok(self.cloud[i].clone()),
            Located::Between(l, r) => {
                let (a, b) = (&self.cloud[l], &self.cloud[r]);
                let lam = (b.dist - d) / (b.dist - a.dist);
                let ts = self.e.time_share(a, b, lam);
                Ok(if ts.k <= self.k { ts } else { a.clone() })
            }
        }
    }
}

/// Wyner–Ziv rate-distortion function with decoder-only side information.
pub fn wyner_ziv_rd(prob: &RdProblem, d: f64) -> Result<WzSolution> {
    wyner_ziv_rd_with(prob, d, &WzConfig::default())
}

pub fn wyner_ziv_rd_with(prob: &RdProblem, d: f64, cfg: &WzConfig) -> Result<WzSolution> {
    if !(d >= 0.0) || d.is_infinite() {
        return Err(Error::param("distortion must be finite and nonnegative"));
    }
    let e = WzEngine::new(prob)?;
    let k = aux_size(&e, cfg)?;
    let d_min = e.d_min();
    if d < d_min - 1e-12 * (1.0 + d_min) {
        return Err(Error::Infeasible(format!(
            "distortion {d} is below the minimum achievable {d_min}"
        )));
    }
    let zero = e.zero_rate();
    if d >= zero.dist {
        return e.to_solution(&e.compact(&zero), k, prob, None);
    }
    let cr = cr_candidate(&e, d, cfg)?;
    let mut curve = Curve::build(&e, k, cfg, vec![cr.clone()]);
    let mut best = curve.at_distortion(d.max(d_min))?;
    if cr.k <= k && cr.rate < best.rate && cr.dist <= d + 1e-12 {
        best = cr;
    }
    e.to_solution(&best, k, prob, curve.stats.clone())
}

/// Inverse Wyner–Ziv function: least distortion at `rate` bits per symbol.
pub fn wz_distortion_rate(prob: &RdProblem, rate: f64) -> Result<f64> {
    wz_distortion_rate_with(prob, rate, &WzConfig::default())
}

pub fn wz_distortion_rate_with(prob: &RdProblem, rate: f64, cfg: &WzConfig) -> Result<f64> {
    if !(rate >= 0.0) || rate.is_infinite() {
        return Err(Error::param("rate must be finite and nonnegative"));
    }
    let e = WzEngine::new(prob)?;
    let k = aux_size(&e, cfg)?;
    let zero = e.zero_rate();
    if rate == 0.0 {
        return Ok(zero.dist);
    }
    let mut curve = Curve::build(&e, k, cfg, Vec::new());
    let d_min = e.d_min();
    let top = curve.at_distortion(d_min)?;
    if rate >= top.rate {
        return Ok(top.dist);
    }
    // monotone bisection on the (nonincreasing) curve
    let (mut lo, mut hi) = (d_min, zero.dist);
    for _ in 0..60 {
        if hi - lo <= 1e-10 * (1.0 + hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if curve.at_distortion(mid)?.rate <= rate {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Ordinary RDF solution at `d`, embedded as a common-reconstruction point.
fn ordinary_seed(e: &WzEngine, d: f64) -> Result<Cand> {
    let nv = e.nv;
    let engine = Engine::new(
        vec![Component::new(1.0, &e.p, |u| e.rho[u * nv..(u + 1) * nv].to_vec())],
        nv,
    );
    let pt = engine.at_distortion(d)?;
    let part = &engine.parts[0];
    let mut pa = vec![1.0 / nv as f64; e.nu * nv];
    for (i, &u) in part.support.iter().enumerate() {
        pa[u * nv..(u + 1) * nv].copy_from_slice(&pt.channels[0][i * nv..(i + 1) * nv]);
    }
    Ok(e.finish(pa, nv, e.identity_decoder()))
}

fn mix(e: &WzEngine, a: &Cand, b: &Cand, lam: f64) -> Cand {
    let pa = a.pa.iter().zip(&b.pa).map(|(x, y)| lam * x + (1.0 - lam) * y).collect();
    e.finish(pa, a.k, a.g.clone())
}

/// Common-reconstruction problem: convex in `P(v|u)`, solved by alternating
/// minimization with the decoder fixed to `V = A`, a slope bisection and a
/// final convex combination.
fn cr_candidate(e: &WzEngine, d: f64, cfg: &WzConfig) -> Result<Cand> {
    let nv = e.nv;
    let id = e.identity_decoder();
    let seed = ordinary_seed(e, d)?;
    let d_min = e.d_min();
    let constant = {
        let v = argmin((0..nv).map(|v| (0..e.nu).map(|u| e.p[u] * e.rho[u * nv + v]).sum()));
        let mut pa = vec![0.0; e.nu * nv];
        for u in 0..e.nu {
            pa[u * nv + v] = 1.0;
        }
        e.finish(pa, nv, id.clone())
    };
    if d >= constant.dist {
        return Ok(constant);
    }
    if d <= d_min + 1e-12 * (1.0 + d_min) {
        return Ok(seed);
    }
    let iters = cfg.max_iterations.max(20_000);
    let solve = |s: f64, from: &Cand| e.descend(s, e.embed(from, nv), nv, Some(&id), iters);
    let mut lo = constant;
    let mut s = 1.0 / e.rho_max().max(1e-300);
    let mut hi = loop {
        let c = solve(s, &seed);
        if c.dist <= d {
            break c;
        }
        if s > 1e8 {
            break seed.clone();
        }
        lo = c;
        s *= 2.0;
    };
    let (mut s_lo, mut s_hi) = (s / 2.0, s);
    for _ in 0..100 {
        if s_hi - s_lo <= 1e-12 * s_hi || lo.dist - hi.dist < 1e-14 {
            break;
        }
        let mid = 0.5 * (s_lo + s_hi);
        let c = solve(mid, &hi);
        if c.dist <= d {
            hi = c;
            s_hi = mid;
        } else {
            lo = c;
            s_lo = mid;
        }
    }
    let span = lo.dist - hi.dist;
    let best = if span > 0.0 {
        mix(e, &lo, &hi, ((d - hi.dist) / span).clamp(0.0, 1.0))
    } else {
        hi
    };
    Ok(if seed.rate < best.rate { seed } else { best })
}

/// Common-reconstruction RDF `min { I(U;V|W) : V–U–W, E ρ(U,V) ≤ D }`.
pub fn common_reconstruction_rd(prob: &RdProblem, d: f64) -> Result<WzSolution> {
    if !(d >= 0.0) || d.is_infinite() {
        return Err(Error::param("distortion must be finite and nonnegative"));
    }
    let e = WzEngine::new(prob)?;
    let d_min = e.d_min();
    if d < d_min - 1e-12 * (1.0 + d_min) {
        return Err(Error::Infeasible(format!(
            "distortion {d} is below the minimum achievable {d_min}"
        )));
    }
    let c = cr_candidate(&e, d, &WzConfig::default())?;
    e.to_solution(&c, e.nv, prob, None)
}

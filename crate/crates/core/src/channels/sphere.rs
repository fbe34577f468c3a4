use serde::{Deserialize, Serialize};

use super::Dmc;
use crate::pmf::FinitePmf;
use crate::serde_ext::extended_f64;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePackingConfig {
    /// Upper end of the initial ρ scan.
    pub rho_cap: f64,
    /// ρ is doubled past `rho_cap` up to this limit while the objective grows.
    pub rho_limit: f64,
    /// Growth per doubling at `rho_limit` above which the exponent is `+∞`.
    pub divergence_slope: f64,
    /// Certified optimality gap (bits) of the inner maximization over inputs.
    pub inner_tolerance: f64,
    pub inner_iterations: usize,
}

impl Default for SpherePackingConfig {
    fn default() -> Self {
        Self {
            rho_cap: 64.0,
            rho_limit: (1u64 << 30) as f64,
            divergence_slope: 1e-6,
            inner_tolerance: 1e-11,
            inner_iterations: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePacking {
    #[serde(with = "extended_f64")]
    pub value: f64,
    /// Maximizing ρ (the last one tried when the value is infinite).
    pub rho: f64,
    /// Maximizing input distribution at `rho`.
    pub input: FinitePmf,
    pub diagnostic: Option<String>,
}

impl SpherePacking {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// Log-domain evaluation of `F(Q) = Σ_y (Σ_x Q(x) P(y|x)^{1/(1+ρ)})^{1+ρ}`.
struct E0Eval<'a> {
    ch: &'a Dmc,
    /// `expm1(ln P(y|x) / (1+ρ))`, `-1` for zero entries.
    em1: Vec<f64>,
    /// `ln P(y|x) / (1+ρ)`.
    eps: Vec<f64>,
    rho: f64,
}

struct E0Point {
    ln_f: f64,
    /// `h_x − 1` where `∂ ln F / ∂Q(x) = (1+ρ) h_x`.
    excess: Vec<f64>,
}

impl<'a> E0Eval<'a> {
    fn new(ch: &'a Dmc, rho: f64) -> Self {
        let k = 1.0 / (1.0 + rho);
        let mut em1 = Vec::with_capacity(ch.inputs() * ch.outputs());
        let mut eps = Vec::with_capacity(em1.capacity());
        for x in 0..ch.inputs() {
            for &p in ch.row(x) {
                if p > 0.0 {
                    let e = p.ln() * k;
                    eps.push(e);
                    em1.push(e.exp_m1());
                } else {
                    eps.push(f64::NEG_INFINITY);
                    em1.push(-1.0);
                }
            }
        }
        Self { ch, em1, eps, rho }
    }

    fn eval(&self, q: &[f64]) -> E0Point {
        let (nx, ny) = (self.ch.inputs(), self.ch.outputs());
        let a: Vec<f64> = (0..ny)
            .map(|y| {
                let t: f64 = (0..nx).map(|x| q[x] * self.em1[x * ny + y]).sum();
                if t <= -1.0 {
                    f64::NEG_INFINITY
                } else {
                    t.ln_1p()
                }
            })
            .collect();
        let scaled: Vec<f64> = a.iter().map(|v| (1.0 + self.rho) * v).collect();
        let ln_f = log_sum_exp(&scaled);
        let pi: Vec<f64> = scaled.iter().map(|s| (s - ln_f).exp()).collect();
        let excess = (0..nx)
            .map(|x| {
                (0..ny)
                    .filter(|&y| pi[y] > 0.0 && self.eps[x * ny + y].is_finite())
                    .map(|y| pi[y] * (self.eps[x * ny + y] - a[y]).exp_m1())
                    .sum::<f64>()
                    - (0..ny)
                        .filter(|&y| pi[y] > 0.0 && !self.eps[x * ny + y].is_finite())
                        .map(|y| pi[y])
                        .sum::<f64>()
            })
            .collect();
        E0Point { ln_f, excess }
    }

    /// Upper bound (bits) on `E0(ρ, Q*) − E0(ρ, Q)` from convexity of `F`.
    fn gap_bits(&self, pt: &E0Point) -> f64 {
        let worst = pt.excess.iter().copied().fold(f64::INFINITY, f64::min);
        let delta = (-(1.0 + self.rho) * worst).max(0.0);
        if delta >= 1.0 {
            f64::INFINITY
        } else {
            -(-delta).ln_1p() / std::f64::consts::LN_2
        }
    }
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Gallager's `E0(ρ, Q) = −log₂ Σ_y (Σ_x Q(x) P(y|x)^{1/(1+ρ)})^{1+ρ}`.
pub fn gallager_e0(ch: &Dmc, rho: f64, input: &FinitePmf) -> Result<f64> {
    if input.len() != ch.inputs() {
        return Err(Error::shape("input distribution does not match channel inputs"));
    }
    if !(rho >= 0.0) || rho.is_infinite() {
        return Err(Error::param("rho must be finite and nonnegative"));
    }
    Ok(-E0Eval::new(ch, rho).eval(input.probs()).ln_f / std::f64::consts::LN_2)
}

/// `max_Q E0(ρ, Q)` by exponentiated-gradient descent on `ln F`.
fn max_e0(ch: &Dmc, rho: f64, init: &[f64], cfg: &SpherePackingConfig) -> (f64, Vec<f64>) {
    if rho == 0.0 {
        return (0.0, init.to_vec());
    }
    let ev = E0Eval::new(ch, rho);
    let mut q = init.to_vec();
    let mut pt = ev.eval(&q);
    let mut eta = 1.0;
    for _ in 0..cfg.inner_iterations {
        if ev.gap_bits(&pt) < cfg.inner_tolerance {
            break;
        }
        let step = |eta: f64| {
            let d: Vec<f64> = pt.excess.iter().map(|e| (1.0 + rho) * e).collect();
            let m = d.iter().copied().fold(f64::INFINITY, f64::min);
            let mut nq: Vec<f64> = q.iter().zip(&d).map(|(qx, dx)| qx * (-eta * (dx - m)).exp()).collect();
            let z: f64 = nq.iter().sum();
            nq.iter_mut().for_each(|v| *v /= z);
            nq
        };
        let mut moved = false;
        for _ in 0..60 {
            let nq = step(eta);
            let npt = ev.eval(&nq);
            if npt.ln_f <= pt.ln_f {
                let improved = npt.ln_f < pt.ln_f;
                q = nq;
                pt = npt;
                eta *= 2.0;
                moved = improved;
                break;
            }
            eta *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (-pt.ln_f / std::f64::consts::LN_2, q)
}

pub fn sphere_packing_exponent(ch: &Dmc, rate: f64) -> Result<SpherePacking> {
    sphere_packing_exponent_with(ch, rate, &SpherePackingConfig::default())
}

/// `E_sp(R) = sup_{ρ≥0} [max_Q E0(ρ, Q) − ρR]`.
pub fn sphere_packing_exponent_with(ch: &Dmc, rate: f64, cfg: &SpherePackingConfig) -> Result<SpherePacking> {
    if !(rate >= 0.0) {
        return Err(Error::param(format!("rate must be nonnegative, got {rate}")));
    }
    let nx = ch.inputs();
    let uniform = vec![1.0 / nx as f64; nx];
    let max_rate = (nx.min(ch.outputs()) as f64).log2();
    if rate >= max_rate {
        return Ok(SpherePacking {
            value: 0.0,
            rho: 0.0,
            input: FinitePmf::new(uniform)?,
            diagnostic: None,
        });
    }

    let eval = |rho: f64, init: &[f64]| {
        let (e0, q) = max_e0(ch, rho, init, cfg);
        (e0 - rho * rate, q)
    };

    // scan: 0 and a geometric grid up to the cap
    let mut rhos = vec![0.0];
    rhos.extend((0..=24).rev().map(|k| cfg.rho_cap / f64::powi(2.0, k)));
    let mut vals = Vec::with_capacity(rhos.len());
    let mut inputs = Vec::with_capacity(rhos.len());
    let mut warm = uniform.clone();
    for &r in &rhos {
        let (g, q) = eval(r, &warm);
        warm = q.clone();
        vals.push(g);
        inputs.push(q);
    }

    let mut diagnostic = None;
    let mut best = argmax(&vals);
    if best == rhos.len() - 1 {
        // still increasing at the cap: keep doubling
        let mut rho = cfg.rho_cap;
        loop {
            rho *= 2.0;
            let (g, q) = eval(rho, inputs.last().unwrap());
            let prev = *vals.last().unwrap();
            rhos.push(rho);
            vals.push(g);
            inputs.push(q);
            if g < prev {
                best = rhos.len() - 2;
                break;
            }
            if rho >= cfg.rho_limit {
                if g - prev > cfg.divergence_slope {
                    return Ok(SpherePacking {
                        value: f64::INFINITY,
                        rho,
                        input: FinitePmf::from_weights(inputs.last().unwrap())?,
                        diagnostic: Some(format!(
                            "dual objective still increasing at rho = {rho:e}; rate below R_inf"
                        )),
                    });
                }
                diagnostic = Some(format!("supremum approached at rho = {rho:e}"));
                best = rhos.len() - 1;
                break;
            }
        }
    }

    let (mut rho_best, mut g_best, mut q_best) = (rhos[best], vals[best], inputs[best].clone());
    if best + 1 < rhos.len() {
        let lo = if best == 0 { 0.0 } else { rhos[best - 1] };
        let hi = rhos[best + 1];
        let (r, g, q) = golden_max(lo, hi, &q_best, &eval);
        if g > g_best {
            rho_best = r;
            g_best = g;
            q_best = q;
        }
    }
    Ok(SpherePacking {
        value: g_best.max(0.0),
        rho: rho_best,
        input: FinitePmf::from_weights(&q_best)?,
        diagnostic,
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn golden_max<F>(mut a: f64, mut b: f64, init: &[f64], f: &F) -> (f64, f64, Vec<f64>)
where
    F: Fn(f64, &[f64]) -> (f64, Vec<f64>),
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut qc) = f(c, init);
    let (mut fd, mut qd) = f(d, &qc);
    for _ in 0..90 {
        if (b - a) <= 1e-12 * (1.0 + b) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            qd = qc.clone();
            c = b - inv_phi * (b - a);
            let r = f(c, &qc);
            fc = r.0;
            qc = r.1;
        } else {
            a = c;
            c = d;
            fc = fd;
            qc = qd.clone();
            d = a + inv_phi * (b - a);
            let r = f(d, &qd);
            fd = r.0;
            qd = r.1;
        }
    }
    if fc >= fd {
        (c, fc, qc)
    } else {
        (d, fd, qd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimalConfig {
    /// Largest `|X|·|Y|` accepted.
    pub max_product: usize,
    /// Convergence tolerance of the inner alternating minimization.
    pub tolerance: f64,
}

impl Default for PrimalConfig {
    fn default() -> Self {
        Self {
            max_product: 64,
            tolerance: 1e-13,
        }
    }
}

/// Fixed-input sphere-packing functional
/// `min { D(V ‖ P | Q) : I(Q, V) ≤ R }`, solved through its Lagrangian
/// `min_V D(V‖P|Q) + s·I(Q,V)` by alternating minimization and a bisection
/// on the slope `s`.
pub fn sphere_packing_primal(ch: &Dmc, rate: f64, input: &FinitePmf, cfg: &PrimalConfig) -> Result<f64> {
    if input.len() != ch.inputs() {
        return Err(Error::shape("input distribution does not match channel inputs"));
    }
    let product = ch.inputs() * ch.outputs();
    if product > cfg.max_product {
        return Err(Error::ResourceCap(format!(
            "channel size {product} exceeds the primal cap {}",
            cfg.max_product
        )));
    }
    if !(rate >= 0.0) {
        return Err(Error::param("rate must be nonnegative"));
    }
    let q = input.probs();
    if rate >= (ch.inputs().min(ch.outputs()) as f64).log2() || ch.mutual_information(q) <= rate {
        return Ok(0.0);
    }
    if rate == 0.0 {
        let s: f64 = (0..ch.outputs())
            .map(|y| {
                (0..ch.inputs())
                    .filter(|&x| q[x] > 0.0)
                    .map(|x| ch.prob(x, y).powf(q[x]))
                    .product::<f64>()
            })
            .sum();
        return Ok(if s > 0.0 { -s.log2() } else { f64::INFINITY });
    }

    let solve = |s: f64, warm: &[f64]| lagrangian_channel(ch, q, s, warm, cfg.tolerance);
    let start = ch.output_distribution(q);
    let mut s_hi = 1.0;
    let mut hi = solve(s_hi, &start);
    let mut s_lo = 0.0;
    while hi.info > rate {
        s_lo = s_hi;
        s_hi *= 2.0;
        if s_hi > 1e9 {
            return Err(Error::ResourceCap("slope search did not bracket the rate".into()));
        }
        hi = solve(s_hi, &hi.output);
    }
    for _ in 0..200 {
        if s_hi - s_lo <= 1e-13 * s_hi {
            break;
        }
        let mid = 0.5 * (s_lo + s_hi);
        let m = solve(mid, &hi.output);
        if m.info > rate {
            s_lo = mid;
        } else {
            s_hi = mid;
            hi = m;
        }
    }
    Ok(hi.divergence)
}

struct LagrangianSolution {
    info: f64,
    divergence: f64,
    output: Vec<f64>,
}

fn lagrangian_channel(ch: &Dmc, input: &[f64], s: f64, warm: &[f64], tol: f64) -> LagrangianSolution {
    let (nx, ny) = (ch.inputs(), ch.outputs());
    let k = 1.0 / (1.0 + s);
    let mut out = warm.to_vec();
    let mut v = vec![0.0; nx * ny];
    for _ in 0..200_000 {
        for x in 0..nx {
            if input[x] == 0.0 {
                continue;
            }
            let row = &mut v[x * ny..(x + 1) * ny];
            let mut z = 0.0;
            for y in 0..ny {
                let p = ch.prob(x, y);
                row[y] = if p > 0.0 && out[y] > 0.0 {
                    (k * p.ln() + s * k * out[y].ln()).exp()
                } else {
                    0.0
                };
                z += row[y];
            }
            row.iter_mut().for_each(|r| *r /= z);
        }
        let mut next = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                next[y] += input[x] * v[x * ny + y];
            }
        }
        let change = next.iter().zip(&out).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        out = next;
        if change < tol {
            break;
        }
    }
    let vch = Dmc {
        inputs: nx,
        outputs: ny,
        matrix: v.iter().enumerate().map(|(i, &p)| if input[i / ny] > 0.0 { p } else { ch.matrix[i] }).collect(),
    };
    LagrangianSolution {
        info: vch.mutual_information(input),
        divergence: vch.conditional_divergence(ch, input),
        output: out,
    }
}

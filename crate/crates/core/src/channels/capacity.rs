use serde::{Deserialize, Serialize};

use super::{CostFunction, Dmc};
use crate::pmf::FinitePmf;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityConfig {
    /// Stop once the certified duality gap `max_x c_x − Σ p c` drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub bisection_steps: usize,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-11,
            max_iterations: 100_000,
            bisection_steps: 80,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Capacity {
    /// Bits per channel use.
    pub value: f64,
    pub input: FinitePmf,
    /// Lagrange multiplier on the cost constraint (0 when inactive).
    pub multiplier: f64,
    pub expected_cost: Option<f64>,
    pub iterations: usize,
}

pub fn capacity(ch: &Dmc, cost: Option<&CostFunction>) -> Result<Capacity> {
    capacity_with(ch, cost, &CapacityConfig::default())
}

struct BaRun {
    p: Vec<f64>,
    iterations: usize,
}

/// Blahut–Arimoto for `max_p I(p) − Σ p(x) penalty(x)` over inputs with
/// `active[x]`.
fn blahut_arimoto(ch: &Dmc, active: &[bool], penalty: &[f64], init: &[f64], cfg: &CapacityConfig) -> BaRun {
    let nx = ch.inputs();
    let mut p: Vec<f64> = (0..nx).map(|x| if active[x] { init[x].max(1e-300) } else { 0.0 }).collect();
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= z);
    let mut c = vec![0.0; nx];
    let mut iterations = 0;
    loop {
        let q = ch.output_distribution(&p);
        let mut cmax = f64::NEG_INFINITY;
        let mut mean = 0.0;
        for x in 0..nx {
            if !active[x] {
                continue;
            }
            let d: f64 = ch
                .row(x)
                .iter()
                .zip(&q)
                .filter(|(&w, _)| w > 0.0)
                .map(|(&w, &qy)| w * (w / qy).log2())
                .sum();
            c[x] = d - penalty[x];
            cmax = cmax.max(c[x]);
            mean += p[x] * c[x];
        }
        if cmax - mean < cfg.tolerance || iterations >= cfg.max_iterations {
            break;
        }
        let mut z = 0.0;
        for x in 0..nx {
            if active[x] {
                p[x] *= (c[x] - cmax).exp2();
                z += p[x];
            }
        }
        p.iter_mut().for_each(|v| *v /= z);
        iterations += 1;
    }
    BaRun { p, iterations }
}

/// Capacity `max I(X;Y)` subject to `E φ(X) ≤ Γ` when a cost is given.
pub fn capacity_with(ch: &Dmc, cost: Option<&CostFunction>, cfg: &CapacityConfig) -> Result<Capacity> {
    let nx = ch.inputs();
    let uniform = vec![1.0 / nx as f64; nx];
    let all = vec![true; nx];
    let zero = vec![0.0; nx];
    let free = blahut_arimoto(ch, &all, &zero, &uniform, cfg);

    let Some(cost) = cost else {
        return finish(ch, free.p, 0.0, None, free.iterations);
    };
    if cost.costs().len() != nx {
        return Err(Error::shape(format!(
            "cost table has {} entries, channel has {nx} inputs",
            cost.costs().len()
        )));
    }
    let phi = cost.costs();
    let budget = cost.budget();
    let slack = 1e-12 * (1.0 + budget.abs());
    let min_cost = cost.min_cost();
    if budget < min_cost - slack {
        return Err(Error::Infeasible(format!(
            "budget {budget} is below the minimum input cost {min_cost}"
        )));
    }
    let mut iterations = free.iterations;
    if cost.expected(&free.p) <= budget + slack {
        return finish(ch, free.p, 0.0, Some(cost), iterations);
    }

    // Solution restricted to the cheapest inputs: the s → ∞ limit.
    let cheapest: Vec<bool> = phi.iter().map(|&c| c <= min_cost + slack).collect();
    let floor = blahut_arimoto(ch, &cheapest, &zero, &uniform, cfg);
    iterations += floor.iterations;
    if budget <= min_cost + slack {
        return finish(ch, floor.p, f64::INFINITY, Some(cost), iterations);
    }

    let penalised = |s: f64, init: &[f64]| {
        let pen: Vec<f64> = phi.iter().map(|c| s * c).collect();
        blahut_arimoto(ch, &all, &pen, init, cfg)
    };
    let (mut s_lo, mut p_lo) = (0.0, free.p);
    let mut s_hi = 1.0;
    let mut p_hi = None;
    while s_hi < 1e12 {
        let run = penalised(s_hi, &p_lo);
        iterations += run.iterations;
        if cost.expected(&run.p) <= budget {
            p_hi = Some(run.p);
            break;
        }
        s_lo = s_hi;
        p_lo = run.p;
        s_hi *= 2.0;
    }
    let mut p_hi = match p_hi {
        Some(p) => p,
        None => {
            s_hi = f64::INFINITY;
            floor.p
        }
    };
    if s_hi.is_finite() {
        for _ in 0..cfg.bisection_steps {
            if s_hi - s_lo <= 1e-14 * s_hi {
                break;
            }
            let mid = 0.5 * (s_lo + s_hi);
            let run = penalised(mid, &p_hi);
            iterations += run.iterations;
            if cost.expected(&run.p) <= budget {
                s_hi = mid;
                p_hi = run.p;
            } else {
                s_lo = mid;
                p_lo = run.p;
            }
        }
    }
    // I is concave in p, so mixing the two brackets to meet the budget
    // with equality loses nothing to first order.
    let (e_lo, e_hi) = (cost.expected(&p_lo), cost.expected(&p_hi));
    let lam = if e_lo - e_hi > 0.0 {
        ((budget - e_hi) / (e_lo - e_hi)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mix: Vec<f64> = p_lo.iter().zip(&p_hi).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
    let multiplier = if s_hi.is_finite() { 0.5 * (s_lo + s_hi) } else { s_hi };
    finish(ch, mix, multiplier, Some(cost), iterations)
}

fn finish(ch: &Dmc, p: Vec<f64>, multiplier: f64, cost: Option<&CostFunction>, iterations: usize) -> Result<Capacity> {
    let input = FinitePmf::from_weights(&p)?;
    Ok(Capacity {
        value: ch.mutual_information(input.probs()),
        expected_cost: cost.map(|c| c.expected(input.probs())),
        input,
        multiplier,
        iterations,
    })
}

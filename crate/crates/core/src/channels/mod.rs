//! Discrete memoryless channels and the channel-side quantities the bounds
//! need: cost-constrained capacity, the sphere-packing exponent and the
//! capacity of a state-dependent channel with causal state at the encoder.

mod capacity;
mod sphere;
mod state;

pub use capacity::{capacity, capacity_with, Capacity, CapacityConfig};
pub use sphere::{
    gallager_e0, sphere_packing_exponent, sphere_packing_exponent_with, sphere_packing_primal,
    PrimalConfig, SpherePacking, SpherePackingConfig,
};
pub use state::{causal_state_capacity, CausalCapacity, StateChannel, DEFAULT_STRATEGY_CAP};

use serde::{Deserialize, Serialize};

use crate::pmf::{divergence_bits, entropy_bits, FinitePmf};
use crate::symbols::checked_power;
use crate::{Error, Result, PMF_TOLERANCE};

/// Row-stochastic transition matrix `P(y|x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRows", into = "ChannelRows")]
pub struct Dmc {
    inputs: usize,
    outputs: usize,
    matrix: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ChannelRows {
    rows: Vec<Vec<f64>>,
}

impl TryFrom<ChannelRows> for Dmc {
    type Error = Error;
    fn try_from(r: ChannelRows) -> Result<Self> {
        Dmc::new(r.rows)
    }
}

impl From<Dmc> for ChannelRows {
    fn from(d: Dmc) -> Self {
        ChannelRows { rows: d.rows() }
    }
}

pub(crate) fn check_row(row: &[f64], label: &str) -> Result<()> {
    if row.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
        return Err(Error::InvalidChannel(format!("{label} has entries outside [0, 1]")));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > PMF_TOLERANCE * (row.len() as f64).max(1.0) {
        return Err(Error::InvalidChannel(format!("{label} sums to {s}")));
    }
    Ok(())
}

impl Dmc {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let inputs = rows.len();
        let outputs = rows.first().map_or(0, Vec::len);
        if inputs == 0 || outputs == 0 {
            return Err(Error::InvalidChannel("empty transition matrix".into()));
        }
        if rows.iter().any(|r| r.len() != outputs) {
            return Err(Error::InvalidChannel("ragged transition matrix".into()));
        }
        Self::from_flat(inputs, outputs, rows.into_iter().flatten().collect())
    }

    pub fn from_flat(inputs: usize, outputs: usize, matrix: Vec<f64>) -> Result<Self> {
        if inputs == 0 || outputs == 0 || matrix.len() != inputs * outputs {
            return Err(Error::InvalidChannel("matrix size does not match alphabets".into()));
        }
        for x in 0..inputs {
            check_row(&matrix[x * outputs..(x + 1) * outputs], &format!("row {x}"))?;
        }
        Ok(Self {
            inputs,
            outputs,
            matrix,
        })
    }

    /// Builds a channel from nonnegative weights, normalising every row.
    pub fn from_weights(rows: &[Vec<f64>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| FinitePmf::from_weights(r).map(|p| p.probs().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn noiseless(size: usize) -> Result<Self> {
        let rows = (0..size)
            .map(|x| (0..size).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(rows)
    }

    /// Channel whose output does not depend on the input.
    pub fn constant(inputs: usize, output: &FinitePmf) -> Result<Self> {
        Self::new(vec![output.probs().to_vec(); inputs])
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn row(&self, x: usize) -> &[f64] {
        &self.matrix[x * self.outputs..(x + 1) * self.outputs]
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.matrix[x * self.outputs + y]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.inputs).map(|x| self.row(x).to_vec()).collect()
    }

    pub fn output_distribution(&self, input: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.outputs];
        for (x, &px) in input.iter().enumerate() {
            if px > 0.0 {
                for (qy, &w) in q.iter_mut().zip(self.row(x)) {
                    *qy += px * w;
                }
            }
        }
        q
    }

    /// `I(X; Y)` in bits for input distribution `input`.
    pub fn mutual_information(&self, input: &[f64]) -> f64 {
        let q = self.output_distribution(input);
        let cond: f64 = input
            .iter()
            .enumerate()
            .map(|(x, &px)| px * entropy_bits(self.row(x)))
            .sum();
        (entropy_bits(&q) - cond).max(0.0)
    }

    /// `D(self ‖ other | prior)`, `+∞` on absolute-continuity failure.
    pub fn conditional_divergence(&self, other: &Dmc, prior: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (x, &w) in prior.iter().enumerate() {
            if w > 0.0 {
                let d = divergence_bits(self.row(x), other.row(x));
                if d.is_infinite() {
                    return f64::INFINITY;
                }
                acc += w * d;
            }
        }
        acc
    }

    /// True when every row is the same distribution.
    pub fn is_input_independent(&self) -> bool {
        let first = self.row(0);
        (1..self.inputs).all(|x| {
            self.row(x)
                .iter()
                .zip(first)
                .all(|(a, b)| (a - b).abs() <= 1e-15)
        })
    }

    /// Memoryless extension to ℓ-blocks, indexed like
    /// [`crate::empirical::block_index`].
    pub fn block(&self, block_len: usize) -> Result<Self> {
        if block_len == 1 {
            return Ok(self.clone());
        }
        let a = checked_power(self.inputs, block_len, "block channel inputs")?;
        let b = checked_power(self.outputs, block_len, "block channel outputs")?;
        if a.checked_mul(b).map_or(true, |t| t > crate::empirical::MAX_SUPERALPHABET) {
            return Err(Error::ResourceCap(format!("block channel {a}x{b} is too large")));
        }
        let mut matrix = Vec::with_capacity(a * b);
        for xi in 0..a {
            let xs = crate::empirical::block_symbols(xi, self.inputs, block_len);
            for yi in 0..b {
                let ys = crate::empirical::block_symbols(yi, self.outputs, block_len);
                matrix.push(xs.iter().zip(&ys).map(|(&x, &y)| self.prob(x, y)).product());
            }
        }
        // products of normalised rows drift by a few ulps; renormalise
        for row in matrix.chunks_mut(b) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= s);
        }
        Self::from_flat(a, b, matrix)
    }
}

/// Per-input transmission cost `φ(x)` and budget `Γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostFunction {
    costs: Vec<f64>,
    budget: f64,
}

impl CostFunction {
    pub fn new(costs: Vec<f64>, budget: f64) -> Result<Self> {
        if costs.is_empty() {
            return Err(Error::param("cost table is empty"));
        }
        if costs.iter().any(|c| !c.is_finite() || *c < 0.0) || !budget.is_finite() || budget < 0.0 {
            return Err(Error::param("costs and budget must be finite and nonnegative"));
        }
        Ok(Self { costs, budget })
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn with_budget(&self, budget: f64) -> Result<Self> {
        Self::new(self.costs.clone(), budget)
    }

    pub fn min_cost(&self) -> f64 {
        self.costs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn expected(&self, input: &[f64]) -> f64 {
        input.iter().zip(&self.costs).map(|(p, c)| p * c).sum()
    }
}

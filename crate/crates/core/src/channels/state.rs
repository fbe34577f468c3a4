use serde::{Deserialize, Serialize};

use super::{capacity, check_row, Capacity, CostFunction, Dmc};
use crate::pmf::FinitePmf;
use crate::symbols::checked_power;
use crate::{Error, Result};

/// Default cap on the number of Shannon strategies `|X|^|S|`.
pub const DEFAULT_STRATEGY_CAP: usize = 4096;

/// State-dependent channel `P(y|x,s)` with i.i.d. states drawn from `P_S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateChannel {
    state_pmf: FinitePmf,
    inputs: usize,
    outputs: usize,
    /// Indexed `[(x * states + s) * outputs + y]`.
    matrix: Vec<f64>,
}

impl StateChannel {
    /// `rows[x][s]` is the output distribution for input `x` in state `s`.
    pub fn new(state_pmf: FinitePmf, rows: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let states = state_pmf.len();
        let inputs = rows.len();
        let outputs = rows.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if inputs == 0 || outputs == 0 {
            return Err(Error::InvalidChannel("empty state channel".into()));
        }
        let mut matrix = Vec::with_capacity(inputs * states * outputs);
        for (x, per_state) in rows.iter().enumerate() {
            if per_state.len() != states {
                return Err(Error::shape(format!(
                    "input {x} has {} state rows, expected {states}",
                    per_state.len()
                )));
            }
            for (s, row) in per_state.iter().enumerate() {
                if row.len() != outputs {
                    return Err(Error::InvalidChannel("ragged state channel".into()));
                }
                check_row(row, &format!("row (x={x}, s={s})"))?;
                matrix.extend_from_slice(row);
            }
        }
        Ok(Self {
            state_pmf,
            inputs,
            outputs,
            matrix,
        })
    }

    /// A state channel whose transitions ignore the state.
    pub fn state_blind(state_pmf: FinitePmf, ch: &Dmc) -> Result<Self> {
        let states = state_pmf.len();
        let rows = (0..ch.inputs()).map(|x| vec![ch.row(x).to_vec(); states]).collect();
        Self::new(state_pmf, rows)
    }

    pub fn states(&self) -> usize {
        self.state_pmf.len()
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn state_pmf(&self) -> &FinitePmf {
        &self.state_pmf
    }

    pub fn row(&self, x: usize, s: usize) -> &[f64] {
        let start = (x * self.states() + s) * self.outputs;
        &self.matrix[start..start + self.outputs]
    }

    /// `Σ_s P_S(s) P(y|x,s)`: the channel seen by a state-blind encoder.
    pub fn averaged(&self) -> Result<Dmc> {
        let rows = (0..self.inputs)
            .map(|x| {
                let mut r = vec![0.0; self.outputs];
                for s in 0..self.states() {
                    let w = self.state_pmf.prob(s);
                    for (acc, p) in r.iter_mut().zip(self.row(x, s)) {
                        *acc += w * p;
                    }
                }
                r
            })
            .collect::<Vec<_>>();
        Dmc::from_weights(&rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalCapacity {
    pub capacity: Capacity,
    /// `strategies[t][s]` is the input chosen by strategy `t` in state `s`.
    pub strategies: Vec<Vec<usize>>,
    pub derived: Dmc,
}

/// Capacity with causal state at the encoder, via Shannon strategies
/// `t: S → X` and the derived channel `P(y|t) = Σ_s P_S(s) P(y|t(s),s)`.
pub fn causal_state_capacity(
    sch: &StateChannel,
    cost: Option<&CostFunction>,
    strategy_cap: usize,
) -> Result<CausalCapacity> {
    let states = sch.states();
    let count = checked_power(sch.inputs(), states, "strategy alphabet")?;
    if count > strategy_cap {
        return Err(Error::ResourceCap(format!(
            "{} inputs and {states} states give {count} strategies, above the cap {strategy_cap}",
            sch.inputs()
        )));
    }
    if let Some(c) = cost {
        if c.costs().len() != sch.inputs() {
            return Err(Error::shape("cost table does not match channel inputs"));
        }
    }
    let strategies: Vec<Vec<usize>> = (0..count)
        .map(|t| crate::empirical::block_symbols(t, sch.inputs(), states))
        .collect();
    let ps = sch.state_pmf().probs();
    let rows: Vec<Vec<f64>> = strategies
        .iter()
        .map(|t| {
            let mut r = vec![0.0; sch.outputs()];
            for (s, &x) in t.iter().enumerate() {
                for (acc, p) in r.iter_mut().zip(sch.row(x, s)) {
                    *acc += ps[s] * p;
                }
            }
            r
        })
        .collect();
    let derived = Dmc::from_weights(&rows)?;
    let derived_cost = cost
        .map(|c| {
            let costs = strategies
                .iter()
                .map(|t| t.iter().enumerate().map(|(s, &x)| ps[s] * c.costs()[x]).sum())
                .collect();
            CostFunction::new(costs, c.budget())
        })
        .transpose()?;
    let capacity = capacity(&derived, derived_cost.as_ref())?;
    Ok(CausalCapacity {
        capacity,
        strategies,
        derived,
    })
}

//! Probability mass functions on finite (product) alphabets and the
//! information measures computed from them. Logarithms are base 2 and
//! `0 log 0 = 0`.

use serde::{Deserialize, Serialize};

use crate::channels::Dmc;
use crate::{Error, Result, PMF_TOLERANCE};

/// `-p log2 p`, zero at `p = 0`.
#[inline]
pub fn neg_xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of a weight vector (assumed normalised), in bits.
pub fn entropy_bits(p: &[f64]) -> f64 {
    p.iter().map(|&x| neg_xlog2x(x)).sum()
}

/// Binary entropy function `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    neg_xlog2x(p) + neg_xlog2x(1.0 - p)
}

/// Relative entropy `D(p‖q)` in bits; `+∞` when `p` is not absolutely
/// continuous with respect to `q`.
pub fn divergence_bits(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            acc += a * (a / b).log2();
        }
    }
    acc.max(0.0)
}

/// Pairwise summation, so that aggregates do not depend on how a caller
/// chunks the data.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn validate_probs(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidPmf("empty support".into()));
    }
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidPmf(format!("entry {bad} is not a probability")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PMF_TOLERANCE * (p.len() as f64).max(1.0) {
        return Err(Error::InvalidPmf(format!("sums to {s}, not 1")));
    }
    Ok(())
}

/// A probability mass function on `{0, …, m-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinitePmf {
    probs: Vec<f64>,
}

impl FinitePmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_probs(&probs)?;
        Ok(Self { probs })
    }

    /// Normalises nonnegative weights into a PMF.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidPmf("weights must be finite and nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if s <= 0.0 {
            return Err(Error::InvalidPmf("weights sum to zero".into()));
        }
        Ok(Self {
            probs: weights.iter().map(|w| w / s).collect(),
        })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPmf("empty support".into()));
        }
        Ok(Self {
            probs: vec![1.0 / m as f64; m],
        })
    }

    pub fn point_mass(m: usize, at: usize) -> Result<Self> {
        if at >= m {
            return Err(Error::InvalidPmf(format!("point mass at {at} outside support {m}")));
        }
        let mut probs = vec![0.0; m];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    pub fn divergence(&self, other: &FinitePmf) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                what: "pmf supports",
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(divergence_bits(&self.probs, &other.probs))
    }

    /// Product distribution `self × other`, row-major in `(self, other)`.
    pub fn product(&self, other: &FinitePmf) -> JointPmf {
        let probs = self
            .probs
            .iter()
            .flat_map(|&a| other.probs.iter().map(move |&b| a * b))
            .collect();
        JointPmf {
            dims: vec![self.len(), other.len()],
            probs,
        }
    }
}

/// A joint PMF over a product of finite alphabets, stored row-major (the
/// last component varies fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::shape("joint pmf needs nonempty component alphabets"));
        }
        let total: usize = dims.iter().product();
        if total != probs.len() {
            return Err(Error::LengthMismatch {
                what: "joint pmf entries vs product of dims",
                left: probs.len(),
                right: total,
            });
        }
        validate_probs(&probs)?;
        Ok(Self { dims, probs })
    }

    pub fn from_weights(dims: Vec<usize>, weights: &[f64]) -> Result<Self> {
        let p = FinitePmf::from_weights(weights)?;
        Self::new(dims, p.probs)
    }

    /// Joint distribution of `(X, Y)` from `P_X` and a channel `P_{Y|X}`.
    pub fn from_channel(input: &FinitePmf, channel: &Dmc) -> Result<Self> {
        if input.len() != channel.inputs() {
            return Err(Error::shape(format!(
                "input pmf has {} symbols, channel expects {}",
                input.len(),
                channel.inputs()
            )));
        }
        let mut probs = Vec::with_capacity(channel.inputs() * channel.outputs());
        for x in 0..channel.inputs() {
            for &q in channel.row(x) {
                probs.push(input.prob(x) * q);
            }
        }
        Ok(Self {
            dims: vec![channel.inputs(), channel.outputs()],
            probs,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Marginal over the listed components, in the listed order.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointPmf> {
        if axes.is_empty() {
            return Err(Error::shape("marginal needs at least one component"));
        }
        let mut seen = vec![false; self.dims.len()];
        for &a in axes {
            if a >= self.dims.len() || seen[a] {
                return Err(Error::shape(format!("bad or repeated component {a}")));
            }
            seen[a] = true;
        }
        let dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        let mut out = vec![0.0; dims.iter().product()];
        let strides = self.strides();
        let mut out_strides = vec![1; axes.len()];
        for k in (0..axes.len().saturating_sub(1)).rev() {
            out_strides[k] = out_strides[k + 1] * dims[k + 1];
        }
        for (idx, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut o = 0;
            for (k, &a) in axes.iter().enumerate() {
                let coord = (idx / strides[a]) % self.dims[a];
                o += coord * out_strides[k];
            }
            out[o] += p;
        }
        Ok(JointPmf { dims, probs: out })
    }

    /// Flattens to a [`FinitePmf`] over the product alphabet.
    pub fn flatten(&self) -> FinitePmf {
        FinitePmf {
            probs: self.probs.clone(),
        }
    }

    /// Entropy of the listed components.
    pub fn entropy(&self, axes: &[usize]) -> Result<f64> {
        Ok(entropy_bits(self.marginal(axes)?.probs()))
    }

    /// `H(A | B)` for disjoint component sets; `given` may be empty.
    pub fn conditional_entropy(&self, target: &[usize], given: &[usize]) -> Result<f64> {
        if given.is_empty() {
            return self.entropy(target);
        }
        let joint: Vec<usize> = target.iter().chain(given).copied().collect();
        Ok(self.entropy(&joint)? - self.entropy(given)?)
    }

    /// `I(A; B)`.
    pub fn mutual_information(&self, a: &[usize], b: &[usize]) -> Result<f64> {
        self.conditional_mutual_information(a, b, &[])
    }

    /// `I(A; B | C)`; `c` may be empty.
    pub fn conditional_mutual_information(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
        let ac: Vec<usize> = a.iter().chain(c).copied().collect();
        let bc: Vec<usize> = b.iter().chain(c).copied().collect();
        let abc: Vec<usize> = a.iter().chain(b).chain(c).copied().collect();
        let hc = if c.is_empty() { 0.0 } else { self.entropy(c)? };
        let v = self.entropy(&ac)? + self.entropy(&bc)? - self.entropy(&abc)? - hc;
        Ok(v.max(0.0))
    }
}

/// Conditional divergence `D(q‖p | prior) = Σ_x prior(x) D(q(·|x) ‖ p(·|x))`.
///
/// Returns `+∞` when some `x` with `prior(x) > 0` has `q(y|x) > 0 = p(y|x)`.
pub fn conditional_divergence(q: &Dmc, p: &Dmc, prior: &FinitePmf) -> Result<f64> {
    if q.inputs() != p.inputs() || q.outputs() != p.outputs() {
        return Err(Error::shape(format!(
            "channels {}x{} and {}x{} differ",
            q.inputs(),
            q.outputs(),
            p.inputs(),
            p.outputs()
        )));
    }
    if prior.len() != q.inputs() {
        return Err(Error::shape("prior length differs from channel input alphabet"));
    }
    let mut acc = 0.0;
    for x in 0..q.inputs() {
        let w = prior.prob(x);
        if w == 0.0 {
            continue;
        }
        let d = divergence_bits(q.row(x), p.row(x));
        if d.is_infinite() {
            return Ok(f64::INFINITY);
        }
        acc += w * d;
    }
    Ok(acc)
}

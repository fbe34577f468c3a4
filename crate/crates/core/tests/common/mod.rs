#![allow(dead_code)]

//! Closed-form oracles shared by the integration tests. Deliberately
//! independent of the library's own numerics.

pub fn h(p: f64) -> f64 {
    let t = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    t(p) + t(1.0 - p)
}

/// Inverse of the binary entropy on `[0, 1/2]`.
pub fn h_inv(v: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Binary divergence `d(a ‖ b)` in bits.
pub fn d2(a: f64, b: f64) -> f64 {
    let t = |x: f64, y: f64| if x <= 0.0 { 0.0 } else { x * (x / y).log2() };
    t(a, b) + t(1.0 - a, 1.0 - b)
}

/// Sphere-packing exponent of a BSC(p): `d(δ ‖ p)` with `1 − h(δ) = R`.
pub fn bsc_esp(p: f64, rate: f64) -> f64 {
    let cap = 1.0 - h(p);
    if rate >= cap {
        return 0.0;
    }
    let delta = h_inv(1.0 - rate);
    d2(delta, p)
}

/// `P(Bin(n, p) ≥ k)` by direct log-domain summation.
pub fn binomial_tail(n: u64, p: f64, k: u64) -> f64 {
    let mut ln_fact = vec![0.0f64; n as usize + 1];
    for i in 1..=n as usize {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    (k..=n)
        .map(|j| {
            let (j, n) = (j as usize, n as usize);
            (ln_fact[n] - ln_fact[j] - ln_fact[n - j] + j as f64 * p.ln() + (n - j) as f64 * (1.0 - p).ln()).exp()
        })
        .sum()
}

/// Small deterministic generator for building random instances in tests.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64) / ((1u64 << 53) as f64)
    }

    /// A probability vector with every entry at least `floor`.
    pub fn pmf(&mut self, m: usize, floor: f64) -> Vec<f64> {
        let w: Vec<f64> = (0..m).map(|_| floor + self.next_f64()).collect();
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }
}

/// Binary Wyner–Ziv function for a uniform source observed through a
/// BSC(q) at the decoder, Hamming distortion: the lower envelope of
/// `h(q ⋆ D) − h(D)` and the point `(q, 0)`, by dense search over the
/// time-sharing point `β ≤ D`.
pub fn wz_dsbs(q: f64, d: f64) -> f64 {
    if d >= q {
        return 0.0;
    }
    let g = |b: f64| h(q * (1.0 - b) + b * (1.0 - q)) - h(b);
    let steps = 200_000;
    (0..=steps)
        .map(|i| {
            let b = d * i as f64 / steps as f64;
            (q - d) / (q - b) * g(b)
        })
        .fold(f64::INFINITY, f64::min)
}

//! Acceptance suite: one PASS/FAIL line per criterion, then a single
//! assertion that every criterion passed.

use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fsbound::bounds::{excess_distortion_bound, expected_distortion_bound, Mode, SystemParams};
use fsbound::channels::{capacity, sphere_packing_exponent, sphere_packing_primal, PrimalConfig};
use fsbound::lzmaxent::{conditional_lz_complexity, joint_parse, phi, psi, DifferenceDistortion};
use fsbound::ratedist::{
    common_reconstruction_rd, conditional_rate_distortion, rate_distortion, wyner_ziv_rd, wz_oracle,
    zero_rate_distortion, RdProblem,
};
use fsbound::simfsm::{
    baseline_uncoded, monte_carlo_distortion, monte_carlo_excess, DecoderSpec, EncoderSpec, SimConfig, SymbolMaps,
};
use fsbound::{block_empirical, CostFunction, DistortionMeasure, Dmc, FinitePmf, SymbolSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn h(p: f64) -> f64 {
    let t = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    t(p) + t(1.0 - p)
}

/// `P(Bin(n, p) ≥ k)` summed in the log domain.
fn binomial_tail(n: u64, p: f64, k: u64) -> f64 {
    let mut ln_fact = vec![0.0f64; n as usize + 1];
    for i in 1..=n as usize {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let n = n as usize;
    (k as usize..=n)
        .map(|j| (ln_fact[n] - ln_fact[j] - ln_fact[n - j] + j as f64 * p.ln() + (n - j) as f64 * (1.0 - p).ln()).exp())
        .sum()
}

fn pmf(rng: &mut ChaCha8Rng, m: usize, floor: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..m).map(|_| floor + rng.gen::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn seq(a: usize, s: Vec<usize>) -> SymbolSequence {
    SymbolSequence::from_indices(a, s).unwrap()
}

fn random_seq(rng: &mut ChaCha8Rng, a: usize, n: usize) -> SymbolSequence {
    seq(a, (0..n).map(|_| rng.gen_range(0..a)).collect())
}

fn check(ok: bool, msg: String) -> Result<String, String> {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit {
        Ok(())
    } else {
        Err(format!("took {:.1}s, limit {limit}s", elapsed.as_secs_f64()))
    }
}

fn blahut_arimoto() -> Result<String, String> {
    let start = Instant::now();
    let p = FinitePmf::uniform(2).unwrap();
    let rho = DistortionMeasure::hamming(2).unwrap();
    let mut worst = 0.0f64;
    for k in 0..50 {
        let d = 0.5 * k as f64 / 49.0;
        let r = rate_distortion(&p, &rho, d).map_err(|e| e.to_string())?;
        worst = worst.max((r - (1.0 - h(d))).abs());
    }
    within(start.elapsed(), 5.0)?;
    check(worst <= 1e-4, format!("max error {worst:.2e} in {:.2}s", start.elapsed().as_secs_f64()))
}

fn channel_capacity() -> Result<String, String> {
    let mut worst = 0.0f64;
    for p in [0.05, 0.1, 0.2, 0.3] {
        let c = capacity(&Dmc::bsc(p).unwrap(), None).unwrap().value;
        worst = worst.max((c - (1.0 - h(p))).abs());
    }
    if worst > 1e-6 {
        return Err(format!("BSC error {worst:.2e}"));
    }
    let ch = Dmc::new(vec![vec![0.85, 0.1, 0.05], vec![0.1, 0.8, 0.1], vec![0.05, 0.1, 0.85]]).unwrap();
    let costs = vec![0.0, 1.0, 3.0];
    let grid: Vec<f64> = (0..20).map(|k| 3.0 * k as f64 / 19.0).collect();
    let vals: Vec<f64> = grid
        .iter()
        .map(|&g| capacity(&ch, Some(&CostFunction::new(costs.clone(), g).unwrap())).unwrap().value)
        .collect();
    let monotone = vals.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let concave = vals.windows(3).all(|w| w[1] - 0.5 * (w[0] + w[2]) >= -1e-8);
    check(
        monotone && concave,
        format!("BSC error {worst:.2e}; C(Γ) monotone={monotone} concave={concave}"),
    )
}

fn sphere_packing() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = PrimalConfig::default();
    let (mut worst, mut at_cap) = (0.0f64, 0.0f64);
    for nx in [2, 3] {
        for _ in 0..20 {
            let ch = Dmc::new((0..nx).map(|_| pmf(&mut rng, nx, 0.05)).collect()).unwrap();
            let cap = capacity(&ch, None).unwrap().value;
            for k in 1..=5 {
                let rate = cap * k as f64 / 6.0;
                let dual = sphere_packing_exponent(&ch, rate).unwrap();
                let primal = sphere_packing_primal(&ch, rate, &dual.input, &cfg).unwrap();
                worst = worst.max((primal - dual.value).abs());
            }
            at_cap = at_cap.max(sphere_packing_exponent(&ch, cap).unwrap().value.abs());
        }
    }
    check(
        worst <= 2e-3 && at_cap <= 1e-6,
        format!("max |primal - dual| {worst:.2e}; max |E_sp(C)| {at_cap:.2e}"),
    )
}

fn wyner_ziv() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut order_ok = true;
    for _ in 0..10 {
        let p = FinitePmf::new(pmf(&mut rng, 2, 0.1)).unwrap();
        let si = Dmc::new((0..2).map(|_| pmf(&mut rng, 2, 0.0)).collect()).unwrap();
        let rho = DistortionMeasure::new(vec![
            vec![0.0, 0.2 + rng.gen::<f64>()],
            vec![0.2 + rng.gen::<f64>(), 0.0],
        ])
        .unwrap();
        let prob = RdProblem::new(p, rho).unwrap().with_side_info(si).unwrap();
        let dmax = zero_rate_distortion(prob.source(), prob.distortion()).unwrap();
        let d = (0.1 + 0.7 * rng.gen::<f64>()) * dmax;
        let wz = wyner_ziv_rd(&prob, d).unwrap().rate;
        let oracle = wz_oracle(&prob, d, 0.02, 3, 5e-3).unwrap().value;
        worst = worst.max((wz - oracle).abs());
        let cond = conditional_rate_distortion(&prob.joint().unwrap(), prob.distortion(), d).unwrap();
        let rd = rate_distortion(prob.source(), prob.distortion(), d).unwrap();
        let cr = common_reconstruction_rd(&prob, d).unwrap().rate;
        order_ok &= cond <= wz + 1e-6 && wz <= rd.min(cr) + 1e-6;
    }
    let p = FinitePmf::new(vec![0.3, 0.7]).unwrap();
    let rho = DistortionMeasure::hamming(2).unwrap();
    let flat = Dmc::new(vec![vec![0.4, 0.6], vec![0.4, 0.6]]).unwrap();
    let indep = RdProblem::new(p.clone(), rho.clone()).unwrap().with_side_info(flat).unwrap();
    let mut degen = 0.0f64;
    for d in [0.0, 0.05, 0.1, 0.2, 0.29] {
        let wz = wyner_ziv_rd(&indep, d).unwrap().rate;
        degen = degen.max((wz - rate_distortion(&p, &rho, d).unwrap()).abs());
    }
    check(
        worst <= 5e-3 && order_ok && degen <= 1e-6,
        format!("max |WZ - oracle| {worst:.2e}; ordering {order_ok}; independent SI gap {degen:.2e}"),
    )
}

fn max_entropy_inverse() -> Result<String, String> {
    let b = DifferenceDistortion::hamming(2).unwrap();
    let t = DifferenceDistortion::new(vec![0.0, 1.0, 2.0]).unwrap();
    let mut worst = 0.0f64;
    for dd in [&b, &t] {
        let mean = dd.table().iter().sum::<f64>() / dd.alphabet_size() as f64;
        for k in 1..50 {
            let d = mean * k as f64 / 50.0;
            let back = psi(phi(d, dd).unwrap(), dd).unwrap();
            worst = worst.max((back - d).abs());
        }
    }
    let at = (phi(0.11, &b).unwrap() - h(0.11)).abs();
    check(
        worst <= 1e-6 && at <= 1e-6,
        format!("max |psi(phi(D)) - D| {worst:.2e}; |phi(0.11) - h(0.11)| {at:.2e}"),
    )
}

fn joint_parse_invariants(u: &SymbolSequence, w: &SymbolSequence) -> bool {
    let jp = joint_parse(u, w).unwrap();
    let (mut uu, mut ww) = (Vec::new(), Vec::new());
    let mut seen = HashSet::new();
    for (i, p) in jp.phrases.iter().enumerate() {
        if p.start != uu.len() || jp.w_phrases[p.w_index] != p.w {
            return false;
        }
        uu.extend_from_slice(&p.u);
        ww.extend_from_slice(&p.w);
        let fresh = seen.insert((p.u.clone(), p.w.clone()));
        if !fresh && !(jp.last_incomplete && i + 1 == jp.total()) {
            return false;
        }
    }
    let mut by_w: HashMap<&[usize], HashSet<&[usize]>> = HashMap::new();
    for p in &jp.phrases {
        by_w.entry(&p.w).or_default().insert(&p.u);
    }
    uu == u.symbols()
        && ww == w.symbols()
        && jp.w_phrases.iter().enumerate().all(|(j, wp)| by_w[&wp[..]].len() == jp.counts[j])
}

fn conditional_lz() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let self_zero = (0..100).all(|_| {
        let a = rng.gen_range(1..5);
        let n = rng.gen_range(1..3000);
        let u = random_seq(&mut rng, a, n);
        conditional_lz_complexity(&u, &u).unwrap() == 0.0
    });
    let u = SymbolSequence::from_digits(2, "010011").unwrap();
    let w = SymbolSequence::from_digits(2, "000000").unwrap();
    let jp = joint_parse(&u, &w).unwrap();
    let example = jp.distinct_w() == 2 && jp.counts == vec![2, 2] && jp.complexity() == 2.0 / 3.0;
    let invariants = (0..1000).all(|_| {
        let (au, aw) = (rng.gen_range(1..4), rng.gen_range(1..4));
        let n = rng.gen_range(1..500);
        let u = random_seq(&mut rng, au, n);
        let w = random_seq(&mut rng, aw, n);
        joint_parse_invariants(&u, &w)
    });
    check(
        self_zero && example && invariants,
        format!("K(u,u)=0: {self_zero}; worked example: {example}; invariants on 1000 pairs: {invariants}"),
    )
}

fn uncoded() -> (EncoderSpec, DecoderSpec) {
    baseline_uncoded(1, &SymbolMaps::identity(2)).unwrap()
}

fn constant_si() -> Dmc {
    Dmc::new(vec![vec![1.0], vec![1.0]]).unwrap()
}

fn matched_point() -> Result<String, String> {
    let start = Instant::now();
    let u = SymbolSequence::from_digits(2, &"01".repeat(50_000)).unwrap();
    let ch = Dmc::bsc(0.1).unwrap();
    let rho = DistortionMeasure::hamming(2).unwrap();
    let c = capacity(&ch, None).unwrap().value;
    let params = SystemParams::new(1, 0, 1, 1, u.len() as u64, Mode::Asymptotic).unwrap();
    let blocks = block_empirical(&u, 1).unwrap().pmf;
    let bound = expected_distortion_bound(&blocks, None, c, 2, &rho, &params).unwrap().value;
    let (enc, dec) = uncoded();
    let cfg = SimConfig {
        trials: 200,
        seed: 7,
        confidence: 0.99,
    };
    let est = monte_carlo_distortion(&enc, &dec, &u, &ch, &constant_si(), &rho, &cfg).unwrap();
    within(start.elapsed(), 30.0)?;
    check(
        (bound - 0.1).abs() < 1e-6 && (est.mean - bound).abs() <= est.half_width,
        format!(
            "bound {bound:.6}; estimate {:.6} ± {:.6} in {:.2}s",
            est.mean,
            est.half_width,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn stress_sequences(n: usize) -> Vec<SymbolSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let coin = random_seq(&mut rng, 2, n);
    let mut sticky = Vec::with_capacity(n);
    let mut s = 0;
    for _ in 0..n {
        if rng.gen::<f64>() < 0.1 {
            s = 1 - s;
        }
        sticky.push(s);
    }
    let periodic: Vec<usize> = (0..n).map(|i| [0, 0, 1, 0, 1, 1, 1][i % 7]).collect();
    vec![coin, seq(2, sticky), seq(2, periodic)]
}

fn converse_stress() -> Result<String, String> {
    let start = Instant::now();
    let n = 1200;
    let seqs = stress_sequences(n);
    let ch = Dmc::bsc(0.1).unwrap();
    let c = capacity(&ch, None).unwrap().value;
    let rho = DistortionMeasure::hamming(2).unwrap();
    let si = constant_si();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bounds: HashMap<(usize, usize, usize, usize, usize), f64> = HashMap::new();
    let (mut runs, mut violations, mut min_margin) = (0, 0, f64::INFINITY);
    for pair in 0..100 {
        let l = rng.gen_range(1..=4);
        let (se, sd, d) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(0..=2));
        let enc = EncoderSpec::random(&mut rng, l, se, 2, 2).unwrap();
        let dec = DecoderSpec::random(&mut rng, l, sd, d, 1, 2, 2).unwrap();
        for (k, u) in seqs.iter().enumerate() {
            let bound = *bounds.entry((k, l, se, sd, d)).or_insert_with(|| {
                let params = SystemParams::new(l, d, se, sd, n as u64, Mode::Asymptotic).unwrap();
                let blocks = block_empirical(u, l).unwrap().pmf;
                expected_distortion_bound(&blocks, None, c, 2, &rho, &params).unwrap().value
            });
            let cfg = SimConfig {
                trials: 200,
                seed: (pair * 3 + k) as u64,
                confidence: 0.99,
            };
            let est = monte_carlo_distortion(&enc, &dec, u, &ch, &si, &rho, &cfg).unwrap();
            let margin = est.mean + est.half_width - bound;
            min_margin = min_margin.min(margin);
            violations += usize::from(margin < 0.0);
            runs += 1;
        }
    }
    within(start.elapsed(), 300.0)?;
    check(
        violations == 0,
        format!(
            "{violations} violations in {runs} runs; smallest margin {min_margin:.4} in {:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn excess_distortion() -> Result<String, String> {
    let u = SymbolSequence::from_digits(2, &"01".repeat(100)).unwrap();
    let ch = Dmc::bsc(0.1).unwrap();
    let rho = DistortionMeasure::hamming(2).unwrap();
    let (enc, dec) = uncoded();
    let cfg = SimConfig {
        trials: 20_000,
        seed: 10,
        confidence: 0.99,
    };
    let est = monte_carlo_excess(&enc, &dec, &u, &ch, &constant_si(), &rho, 0.15, &cfg).unwrap();
    let exact = binomial_tail(200, 0.1, 30);
    let params = SystemParams::new(1, 0, 1, 1, 200, Mode::Asymptotic).unwrap();
    let deltas: Vec<f64> = (1..=85).map(|k| k as f64 * 0.01).collect();
    let bound = excess_distortion_bound(&FinitePmf::uniform(2).unwrap(), &ch, 0.15, 0.0, &deltas, &rho, &params)
        .unwrap()
        .report
        .value;
    check(
        est.lower <= exact && exact <= est.upper && bound <= est.upper,
        format!(
            "estimate {:.5} in [{:.5}, {:.5}]; exact tail {exact:.5}; bound {bound:.3e}",
            est.probability, est.lower, est.upper
        ),
    )
}

fn fsbound(args: &[&str], dir: &Path, out: &str) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_fsbound"))
        .current_dir(dir)
        .args(args)
        .args(["-o", out])
        .status()
        .unwrap();
    assert!(status.code().is_some_and(|c| c <= 1), "{args:?}: {status}");
    std::fs::read(dir.join(out)).unwrap()
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bits: String = (0..600).map(|_| if rng.gen::<f64>() < 0.3 { '1' } else { '0' }).collect();
    std::fs::write(dir.path().join("u.txt"), &bits).unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["simulate", "--source", "u.txt", "--channel", "bsc:0.1", "--random", "5", "--block-len", "2",
             "--enc-states", "3", "--dec-states", "2", "--delay", "1", "--trials", "300", "--seed", "42", "--level", "0.2"],
        vec!["simulate", "--source", "u.txt", "--channel", "bsc:0.1", "--side-info", "bsc:0.2", "--trials", "300",
             "--seed", "42"],
        vec!["wz-rdf", "--source-pmf", "0.4,0.6", "--side-info", "bsc:0.25", "--level", "0.1", "--seed", "42"],
        vec!["bound-expected", "--source", "u.txt", "--channel", "bsc:0.1", "--block-len", "2"],
        vec!["bound-excess", "--source", "u.txt", "--channel", "bsc:0.1", "--level", "0.3"],
        vec!["lz", "--source", "u.txt", "--given", "u.txt", "--capacity", "0.5"],
        vec!["sweep", "--kind", "rdf", "--source-pmf", "0.3,0.7", "--from", "0", "--to", "0.3", "--points", "7"],
    ];
    let mut differing = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let a = fsbound(args, dir.path(), &format!("a{i}"));
        let b = fsbound(args, dir.path(), &format!("b{i}"));
        if a != b || a.is_empty() {
            differing.push(args[0]);
        }
    }
    check(
        differing.is_empty(),
        format!("{} commands run twice; differing: {differing:?}", commands.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Result<String, String>); 10] = [
        ("Blahut-Arimoto R(D) for uniform binary Hamming", blahut_arimoto),
        ("channel capacity and cost-constrained capacity", channel_capacity),
        ("sphere-packing dual/primal agreement", sphere_packing),
        ("Wyner-Ziv solver vs grid oracle", wyner_ziv),
        ("maximum-entropy pair inverse", max_entropy_inverse),
        ("conditional LZ complexity", conditional_lz),
        ("matched point, uncoded BSC(0.1)", matched_point),
        ("converse stress test on random machines", converse_stress),
        ("excess distortion, uncoded BSC(0.1)", excess_distortion),
        ("CLI determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[{:>2}] PASS {name}: {detail}", i + 1),
            Err(detail) => {
                println!("[{:>2}] FAIL {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

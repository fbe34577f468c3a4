mod common;

use common::{binomial_tail, Lcg};
use fsbound::bounds::{excess_distortion_bound, expected_distortion_bound, Mode, SystemParams};
use fsbound::channels::capacity;
use fsbound::simfsm::{
    baseline_uncoded, monte_carlo_distortion, monte_carlo_excess, run_decoder, run_encoder, sample_channel,
    DecoderSpec, EncoderSpec, SimConfig, SymbolMaps,
};
use fsbound::{block_empirical, Dmc, DistortionMeasure, FinitePmf, SymbolSequence};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bits(s: &str) -> SymbolSequence {
    SymbolSequence::from_digits(2, s).unwrap()
}

fn random_bits(rng: &mut Lcg, n: usize, p1: f64) -> SymbolSequence {
    SymbolSequence::from_indices(2, (0..n).map(|_| usize::from(rng.next_f64() < p1)).collect()).unwrap()
}

fn encoder(period: usize, states: usize, f: impl Fn(usize, usize, usize) -> (usize, usize)) -> EncoderSpec {
    let table = |pick: usize| -> Vec<Vec<Vec<usize>>> {
        (0..period)
            .map(|t| {
                (0..2)
                    .map(|u| {
                        (0..states)
                            .map(|z| {
                                let (x, n) = f(t, u, z);
                                if pick == 0 {
                                    x
                                } else {
                                    n
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    };
    EncoderSpec {
        period,
        states,
        source_size: 2,
        input_size: 2,
        output: table(0),
        next: table(1),
        initial: 0,
    }
}

/// Single-state binary decoder `v = g(w, y)` with delay `d`.
fn stateless_decoder(side: usize, delay: usize, g: impl Fn(usize, usize) -> usize) -> DecoderSpec {
    let rows: Vec<Vec<usize>> = (0..side).flat_map(|w| (0..2).map(move |y| (w, y))).map(|(w, y)| vec![g(w, y)]).collect();
    DecoderSpec {
        period: 1,
        states: 1,
        delay,
        side_size: side,
        channel_size: 2,
        reconstruction_size: 2,
        next: vec![vec![vec![0]; rows.len()]],
        output: vec![rows],
        initial: 0,
        fill: 0,
    }
}

fn uncoded() -> (EncoderSpec, DecoderSpec) {
    baseline_uncoded(1, &SymbolMaps::identity(2)).unwrap()
}

fn constant_si() -> Dmc {
    Dmc::new(vec![vec![1.0], vec![1.0]]).unwrap()
}

fn hamming() -> DistortionMeasure {
    DistortionMeasure::hamming(2).unwrap()
}

fn cfg(trials: usize, seed: u64) -> SimConfig {
    SimConfig {
        trials,
        seed,
        confidence: 0.99,
    }
}

#[test]
fn encoder_examples() {
    let id = encoder(1, 1, |_, u, _| (u, 0));
    let u = bits("0110100");
    assert_eq!(run_encoder(&id, &u).unwrap(), u);

    // x_i = u_i xor (i mod 2), 1-based i
    let xor = encoder(2, 1, |t, u, _| (u ^ t, 0));
    assert_eq!(run_encoder(&xor, &bits("0000")).unwrap(), bits("1010"));
    assert_eq!(run_encoder(&xor, &bits("1100")).unwrap(), bits("0110"));

    // running parity of u_1..u_i
    let parity = encoder(1, 2, |_, u, z| (z ^ u, z ^ u));
    assert_eq!(run_encoder(&parity, &bits("1011")).unwrap(), bits("1101"));
    assert_eq!(run_encoder(&parity, &bits("0110")).unwrap(), bits("0100"));

    assert!(run_encoder(&id, &SymbolSequence::from_indices(3, vec![0, 2]).unwrap()).is_err());
    let mut bad = id.clone();
    bad.output[0][1][0] = 5;
    assert!(bad.validate().is_err());
}

#[test]
fn decoder_examples() {
    let w = bits("0000");
    let y = bits("1011");
    let id = stateless_decoder(2, 0, |_, y| y);
    assert_eq!(run_decoder(&id, &w, &y).unwrap(), y);

    let shifted = stateless_decoder(2, 1, |_, y| y);
    assert_eq!(run_decoder(&shifted, &w, &y).unwrap(), bits("0110"));
    let mut filled = shifted.clone();
    filled.fill = 1;
    assert_eq!(run_decoder(&filled, &w, &y).unwrap(), bits("0111"));

    let copy = stateless_decoder(2, 2, |w, _| w);
    assert_eq!(run_decoder(&copy, &bits("1101"), &y).unwrap(), bits("0100"));
    assert_eq!(run_decoder(&copy, &bits("1"), &bits("1")).unwrap(), bits("0"));

    assert!(run_decoder(&id, &bits("000"), &y).is_err());
}

#[test]
fn channel_sampling() {
    let mut rng = Lcg(9);
    let x = random_bits(&mut rng, 100_000, 0.5);
    assert_eq!(sample_channel(&Dmc::noiseless(2).unwrap(), &x, 3).unwrap(), x);

    let ch = Dmc::bsc(0.1).unwrap();
    let y = sample_channel(&ch, &x, 3).unwrap();
    let flips = x.symbols().iter().zip(y.symbols()).filter(|(a, b)| a != b).count() as f64;
    let n = x.len() as f64;
    let sigma = (n * 0.1 * 0.9).sqrt();
    assert!((flips - 0.1 * n).abs() < 3.0 * sigma, "{flips}");

    assert_eq!(sample_channel(&ch, &x, 3).unwrap(), y);
    assert_ne!(sample_channel(&ch, &x, 4).unwrap(), y);
    assert!(sample_channel(&Dmc::noiseless(3).unwrap(), &x, 0).is_err());
}

#[test]
fn expected_distortion_estimates() {
    let mut rng = Lcg(21);
    let u = random_bits(&mut rng, 2000, 0.5);
    let (enc, dec) = uncoded();
    let rho = hamming();

    let est = monte_carlo_distortion(&enc, &dec, &u, &Dmc::noiseless(2).unwrap(), &constant_si(), &rho, &cfg(20, 1)).unwrap();
    assert_eq!((est.mean, est.half_width), (0.0, 0.0));

    let est = monte_carlo_distortion(&enc, &dec, &u, &Dmc::bsc(0.1).unwrap(), &constant_si(), &rho, &cfg(400, 2)).unwrap();
    assert!((est.mean - 0.1).abs() <= est.half_width, "{est:?}");
    assert!(est.half_width > 0.0 && est.half_width < 0.005);

    let copy = stateless_decoder(2, 0, |w, _| w);
    let si = Dmc::bsc(0.2).unwrap();
    let est = monte_carlo_distortion(&enc, &copy, &u, &Dmc::bsc(0.1).unwrap(), &si, &rho, &cfg(400, 3)).unwrap();
    assert!((est.mean - 0.2).abs() <= est.half_width, "{est:?}");

    let one = monte_carlo_distortion(&enc, &dec, &u, &Dmc::bsc(0.1).unwrap(), &constant_si(), &rho, &cfg(1, 2)).unwrap();
    assert!(one.half_width.is_infinite());
}

#[test]
fn excess_probability_estimates() {
    let mut rng = Lcg(22);
    let (enc, dec) = uncoded();
    let rho = hamming();
    let ch = Dmc::bsc(0.1).unwrap();
    let u = random_bits(&mut rng, 200, 0.5);

    let e = monte_carlo_excess(&enc, &dec, &u, &ch, &constant_si(), &rho, 1.5, &cfg(200, 0)).unwrap();
    assert_eq!(e.hits, 0);
    let e = monte_carlo_excess(&enc, &dec, &u, &ch, &constant_si(), &rho, 0.0, &cfg(200, 0)).unwrap();
    assert_eq!(e.probability, 1.0);

    let e = monte_carlo_excess(&enc, &dec, &u, &ch, &constant_si(), &rho, 0.15, &cfg(20_000, 5)).unwrap();
    let exact = binomial_tail(200, 0.1, 30);
    assert!(e.lower <= exact && exact <= e.upper, "{exact} not in {e:?}");
}

#[test]
fn uncoded_baseline() {
    let (enc, dec) = uncoded();
    assert_eq!((enc.states, dec.states, dec.delay), (1, 1, 0));
    let u = bits("0110");
    assert_eq!(run_encoder(&enc, &u).unwrap(), u);

    let mut rng = Lcg(23);
    let u = random_bits(&mut rng, 4000, 0.5);
    let rho = hamming();
    let est = monte_carlo_distortion(&enc, &dec, &u, &Dmc::noiseless(2).unwrap(), &constant_si(), &rho, &cfg(10, 0)).unwrap();
    assert_eq!(est.mean, 0.0);

    // matched point: uncoded transmission meets the bound
    let ch = Dmc::bsc(0.1).unwrap();
    let c = capacity(&ch, None).unwrap().value;
    let emp = block_empirical(&u, 1).unwrap();
    let params = SystemParams::new(1, 0, 1, 1, u.len() as u64, Mode::Asymptotic).unwrap();
    let bound = expected_distortion_bound(&emp.pmf, None, c, 2, &rho, &params).unwrap();
    let est = monte_carlo_distortion(&enc, &dec, &u, &ch, &constant_si(), &rho, &cfg(400, 4)).unwrap();
    assert!(est.mean + est.half_width >= bound.value);
    assert!((est.mean - bound.value).abs() < 0.01, "{} vs {}", est.mean, bound.value);
    assert!((bound.value - 0.1).abs() < 0.01);

    let maps = SymbolMaps {
        encode: vec![0, 1, 2],
        input_size: 2,
        decode: vec![0, 1],
        reconstruction_size: 3,
        side_size: 1,
    };
    assert!(baseline_uncoded(1, &maps).is_err());
    let maps = SymbolMaps {
        encode: vec![0, 1],
        input_size: 3,
        decode: vec![0, 1, 1],
        reconstruction_size: 2,
        side_size: 1,
    };
    let (enc, dec) = baseline_uncoded(2, &maps).unwrap();
    assert_eq!((enc.input_size, dec.channel_size, enc.period), (3, 3, 2));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let mut rng = Lcg(24);
    let u = random_bits(&mut rng, 500, 0.3);
    let mut g = ChaCha8Rng::seed_from_u64(1);
    let enc = EncoderSpec::random(&mut g, 2, 3, 2, 2).unwrap();
    let dec = DecoderSpec::random(&mut g, 2, 2, 1, 2, 2, 2).unwrap();
    let ch = Dmc::bsc(0.1).unwrap();
    let si = Dmc::bsc(0.3).unwrap();
    let rho = hamming();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            (
                monte_carlo_distortion(&enc, &dec, &u, &ch, &si, &rho, &cfg(300, 7)).unwrap(),
                monte_carlo_excess(&enc, &dec, &u, &ch, &si, &rho, 0.4, &cfg(300, 7)).unwrap(),
            )
        })
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.0.mean.to_bits(), b.0.mean.to_bits());
    assert_eq!(a.0.half_width.to_bits(), b.0.half_width.to_bits());
    assert_eq!(a.1, b.1);
}

#[test]
fn specs_round_trip_through_json() {
    let mut g = ChaCha8Rng::seed_from_u64(2);
    let enc = EncoderSpec::random(&mut g, 3, 2, 2, 2).unwrap();
    let dec = DecoderSpec::random(&mut g, 3, 2, 1, 2, 2, 2).unwrap();
    let e: EncoderSpec = serde_json::from_str(&serde_json::to_string(&enc).unwrap()).unwrap();
    let d: DecoderSpec = serde_json::from_str(&serde_json::to_string(&dec).unwrap()).unwrap();
    assert_eq!((e, d), (enc, dec));
}

#[test]
fn random_machines_respect_the_expected_distortion_bound() {
    let rho = hamming();
    let ch = Dmc::bsc(0.1).unwrap();
    let c = capacity(&ch, None).unwrap().value;
    let mut rng = Lcg(25);
    let seqs = [random_bits(&mut rng, 600, 0.5), random_bits(&mut rng, 600, 0.2)];
    let mut g = ChaCha8Rng::seed_from_u64(3);
    for k in 0..20 {
        let l = 1 + k % 3;
        let (se, sd, d) = (1 + k % 2, 1 + (k / 2) % 3, k % 2);
        let enc = EncoderSpec::random(&mut g, l, se, 2, 2).unwrap();
        let dec = DecoderSpec::random(&mut g, l, sd, d, 1, 2, 2).unwrap();
        for u in &seqs {
            let emp = block_empirical(u, l).unwrap();
            let params = SystemParams::new(l, d, se, sd, u.len() as u64, Mode::Asymptotic).unwrap();
            let bound = expected_distortion_bound(&emp.pmf, None, c, 2, &rho, &params).unwrap().value;
            let est = monte_carlo_distortion(&enc, &dec, u, &ch, &constant_si(), &rho, &cfg(200, k as u64)).unwrap();
            assert!(est.mean + est.half_width >= bound, "machine {k}: {est:?} < {bound}");
        }
    }
}

#[test]
fn uncoded_excess_respects_the_excess_bound() {
    let rho = hamming();
    let ch = Dmc::bsc(0.1).unwrap();
    let (enc, dec) = uncoded();
    let u = bits(&"01".repeat(50));
    let params = SystemParams::new(1, 0, 1, 1, 100, Mode::Asymptotic).unwrap();
    let deltas: Vec<f64> = (1..=30).map(|k| k as f64 * 0.01).collect();
    for d in [0.12, 0.15, 0.2] {
        let bound = excess_distortion_bound(&FinitePmf::uniform(2).unwrap(), &ch, d, 0.0, &deltas, &rho, &params).unwrap();
        let est = monte_carlo_excess(&enc, &dec, &u, &ch, &constant_si(), &rho, d, &cfg(5000, 6)).unwrap();
        assert!(est.upper >= bound.report.value, "D={d}: {est:?} vs {}", bound.report.value);
    }
}

/// Independent recursion used as the reference machine.
fn reference_encode(enc: &EncoderSpec, u: &[usize], start: usize) -> (Vec<usize>, usize) {
    let mut z = start;
    let mut x = Vec::new();
    for (k, &s) in u.iter().enumerate() {
        let t = (k + 1) % enc.period;
        x.push(enc.output[t][s][z]);
        z = enc.next[t][s][z];
    }
    (x, z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoder_is_phase_covariant(seed in any::<u64>(), l in 1usize..5, s in 1usize..5, m in 1usize..4, n in 1usize..60) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let enc = EncoderSpec::random(&mut g, l, s, 3, 2).unwrap();
        let mut rng = Lcg(seed);
        let prefix: Vec<usize> = (0..m * l).map(|_| rng.below(3)).collect();
        let tail: Vec<usize> = (0..n).map(|_| rng.below(3)).collect();
        let (_, z) = reference_encode(&enc, &prefix, enc.initial);
        let whole = run_encoder(&enc, &SymbolSequence::from_indices(3, [prefix.clone(), tail.clone()].concat()).unwrap()).unwrap();
        let mut resumed = enc.clone();
        resumed.initial = z;
        let part = run_encoder(&resumed, &SymbolSequence::from_indices(3, tail.clone()).unwrap()).unwrap();
        prop_assert_eq!(&whole.symbols()[m * l..], part.symbols());
        if z == enc.initial {
            prop_assert_eq!(part, run_encoder(&enc, &SymbolSequence::from_indices(3, tail).unwrap()).unwrap());
        }
    }

    #[test]
    fn decoder_matches_reference_recursion(seed in any::<u64>(), l in 1usize..4, s in 1usize..4, d in 0usize..3, n in 1usize..40) {
        let mut g = ChaCha8Rng::seed_from_u64(seed);
        let dec = DecoderSpec::random(&mut g, l, s, d, 2, 3, 2).unwrap();
        let mut rng = Lcg(seed ^ 1);
        let w: Vec<usize> = (0..n).map(|_| rng.below(2)).collect();
        let y: Vec<usize> = (0..n).map(|_| rng.below(3)).collect();
        let mut expect = vec![dec.fill; n];
        let mut z = dec.initial;
        for i in 1..=n {
            let t = i % l;
            let row = w[i - 1] * 3 + y[i - 1];
            if i >= d + 1 {
                expect[i - d - 1] = dec.output[t][row][z];
            }
            z = dec.next[t][row][z];
        }
        let v = run_decoder(
            &dec,
            &SymbolSequence::from_indices(2, w).unwrap(),
            &SymbolSequence::from_indices(3, y).unwrap(),
        ).unwrap();
        prop_assert_eq!(v.symbols(), &expect[..]);
    }

    #[test]
    fn identical_seeds_replay(seed in any::<u64>()) {
        let mut rng = Lcg(seed);
        let x = random_bits(&mut rng, 300, 0.5);
        let ch = Dmc::bsc(0.3).unwrap();
        prop_assert_eq!(sample_channel(&ch, &x, seed).unwrap(), sample_channel(&ch, &x, seed).unwrap());
    }
}

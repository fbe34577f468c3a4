mod common;

use common::{bsc_esp, d2, h, Lcg};
use fsbound::channels::{
    capacity, causal_state_capacity, sphere_packing_exponent, sphere_packing_primal, PrimalConfig,
    StateChannel, DEFAULT_STRATEGY_CAP,
};
use fsbound::{CostFunction, Dmc, FinitePmf};
use proptest::prelude::*;

fn random_channel(rng: &mut Lcg, nx: usize, ny: usize, floor: f64) -> Dmc {
    Dmc::new((0..nx).map(|_| rng.pmf(ny, floor)).collect()).unwrap()
}

#[test]
fn bsc_capacity_matches_closed_form() {
    for p in [0.05, 0.1, 0.2, 0.3] {
        let c = capacity(&Dmc::bsc(p).unwrap(), None).unwrap();
        assert!((c.value - (1.0 - h(p))).abs() <= 1e-6, "p={p}: {}", c.value);
    }
}

#[test]
fn cost_constrained_capacity_is_concave_and_nondecreasing() {
    let ch = Dmc::new(vec![
        vec![0.9, 0.05, 0.05],
        vec![0.1, 0.8, 0.1],
        vec![0.05, 0.15, 0.8],
    ])
    .unwrap();
    let grid: Vec<f64> = (0..20).map(|k| 2.0 * k as f64 / 19.0).collect();
    let vals: Vec<f64> = grid
        .iter()
        .map(|&g| {
            let cost = CostFunction::new(vec![0.0, 1.0, 2.0], g).unwrap();
            let c = capacity(&ch, Some(&cost)).unwrap();
            assert!(c.expected_cost.unwrap() <= g + 1e-9);
            c.value
        })
        .collect();
    for w in vals.windows(2) {
        assert!(w[1] >= w[0] - 1e-9, "{vals:?}");
    }
    for w in vals.windows(3) {
        assert!(w[1] - 0.5 * (w[0] + w[2]) >= -1e-8, "{vals:?}");
    }
    assert!(vals[0].abs() < 1e-12);
}

#[test]
fn bsc_sphere_packing_examples() {
    let ch = Dmc::bsc(0.1).unwrap();
    let c = 1.0 - h(0.1);
    assert!(sphere_packing_exponent(&ch, c).unwrap().value <= 1e-6);
    let at_zero = sphere_packing_exponent(&ch, 0.0).unwrap().value;
    assert!((at_zero - d2(0.5, 0.1)).abs() < 1e-6, "{at_zero}");
    for r in [1e-6, 1e-3] {
        let v = sphere_packing_exponent(&ch, r).unwrap().value;
        assert!((v - bsc_esp(0.1, r)).abs() < 1e-6, "R={r}: {v} vs {}", bsc_esp(0.1, r));
    }
    let quarter = sphere_packing_exponent(&ch, 0.25).unwrap().value;
    assert!((quarter - bsc_esp(0.1, 0.25)).abs() < 1e-7, "{quarter} vs {}", bsc_esp(0.1, 0.25));
}

#[test]
fn bsc_primal_matches_dual() {
    let ch = Dmc::bsc(0.1).unwrap();
    let u = FinitePmf::uniform(2).unwrap();
    let primal = sphere_packing_primal(&ch, 0.25, &u, &PrimalConfig::default()).unwrap();
    assert!((primal - bsc_esp(0.1, 0.25)).abs() < 2e-3, "{primal}");
}

#[test]
fn primal_zero_rate_closed_form() {
    let ch = Dmc::bsc(0.1).unwrap();
    let u = FinitePmf::uniform(2).unwrap();
    let v = sphere_packing_primal(&ch, 0.0, &u, &PrimalConfig::default()).unwrap();
    assert!((v - d2(0.5, 0.1)).abs() < 1e-12);
}

#[test]
fn sphere_packing_curve_shape() {
    let mut rng = Lcg(7);
    let ch = random_channel(&mut rng, 3, 3, 0.05);
    let cap = capacity(&ch, None).unwrap().value;
    let rates: Vec<f64> = (0..=16).map(|k| cap * k as f64 / 16.0).collect();
    let e: Vec<f64> = rates.iter().map(|&r| sphere_packing_exponent(&ch, r).unwrap().value).collect();
    for w in e.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{e:?}");
    }
    for w in e.windows(3) {
        assert!(0.5 * (w[0] + w[2]) - w[1] >= -1e-7, "{e:?}");
    }
    assert!(e[16] <= 1e-6);
    assert!(sphere_packing_exponent(&ch, cap + 0.05).unwrap().value <= 1e-6);
}

fn dual_primal_agree(nx: usize, seed: u64) {
    let mut rng = Lcg(seed);
    let ch = random_channel(&mut rng, nx, nx, 0.05);
    let cap = capacity(&ch, None).unwrap().value;
    let cfg = PrimalConfig::default();
    for k in 1..=5 {
        let rate = cap * k as f64 / 6.0;
        let dual = sphere_packing_exponent(&ch, rate).unwrap();
        let at_opt = sphere_packing_primal(&ch, rate, &dual.input, &cfg).unwrap();
        assert!(
            (at_opt - dual.value).abs() <= 2e-3,
            "seed {seed} rate {rate}: primal {at_opt} dual {}",
            dual.value
        );
        for _ in 0..3 {
            let q = FinitePmf::new(rng.pmf(nx, 0.0)).unwrap();
            let other = sphere_packing_primal(&ch, rate, &q, &cfg).unwrap();
            assert!(other <= dual.value + 2e-3, "seed {seed}: {other} > {}", dual.value);
        }
    }
}

#[test]
fn dual_and_primal_agree_on_random_channels() {
    for seed in 0..10 {
        dual_primal_agree(2, 100 + seed);
        dual_primal_agree(3, 200 + seed);
    }
}

#[test]
fn state_independent_channel_reduces_to_capacity() {
    let ch = Dmc::bsc(0.15).unwrap();
    let sch = StateChannel::state_blind(FinitePmf::new(vec![0.3, 0.7]).unwrap(), &ch).unwrap();
    let a = causal_state_capacity(&sch, None, DEFAULT_STRATEGY_CAP).unwrap().capacity.value;
    assert!((a - capacity(&ch, None).unwrap().value).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn strategies_beat_state_blind_inputs(seed in any::<u64>(), nx in 2usize..4, ns in 1usize..4) {
        let mut rng = Lcg(seed);
        let ps = FinitePmf::new(rng.pmf(ns, 0.05)).unwrap();
        let rows = (0..nx).map(|_| (0..ns).map(|_| rng.pmf(3, 0.0)).collect()).collect();
        let sch = StateChannel::new(ps, rows).unwrap();
        let causal = causal_state_capacity(&sch, None, DEFAULT_STRATEGY_CAP).unwrap().capacity.value;
        let blind = capacity(&sch.averaged().unwrap(), None).unwrap().value;
        prop_assert!(causal >= blind - 1e-8, "{causal} < {blind}");
    }

    #[test]
    fn capacity_bounded_by_alphabets(seed in any::<u64>(), nx in 2usize..5, ny in 2usize..5) {
        let mut rng = Lcg(seed);
        let ch = random_channel(&mut rng, nx, ny, 0.0);
        let c = capacity(&ch, None).unwrap();
        prop_assert!(c.value >= -1e-12);
        prop_assert!(c.value <= (nx.min(ny) as f64).log2() + 1e-12);
        prop_assert!((ch.mutual_information(c.input.probs()) - c.value).abs() < 1e-12);
    }
}

use entcool_core::cooling::*;
use entcool_core::entanglement::EntropyCache;
use entcool_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(gate_set: GateSet, total_steps: usize, n_trajectories: usize) -> CoolingConfig {
    CoolingConfig { gate_set, total_steps, n_temperatures: 10.min(total_steps.max(1)), n_trajectories, ..Default::default() }
}

#[test]
fn acceptance_rate_is_calibrated() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let t = 1e-6;
    let trials = 100_000;
    let accepted = (0..trials).filter(|_| accept_move(t * std::f64::consts::LN_2, t, rng.random())).count();
    let rate = accepted as f64 / trials as f64;
    assert!((rate - 0.5).abs() <= 0.01, "{rate}");
    assert!(accept_move(-0.1, 1e-8, 0.999_999));
    assert!(!accept_move(0.1, 1e-8, 0.0));
    assert!(!accept_move(0.1, 1e-8, f64::MIN_POSITIVE));
}

#[test]
fn rejection_restores_state_bit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for set in [GateSet::Set1, GateSet::Universal] {
        let mut metro = Metropolis::new(7, set, DEFAULT_DT, 2.0).unwrap();
        let mut state = StateVector::random(7, &mut rng);
        let mut cache = EntropyCache::compute(&state, metro.engine_mut()).unwrap();
        let mut rejections = 0;
        for _ in 0..500 {
            let (s0, c0) = (state.clone(), cache.clone());
            let out = metro.step(&mut state, &mut cache, &mut rng, 1e-8).unwrap();
            if out.accepted {
                assert!(out.delta <= 50.0 * 1e-8, "{}", out.delta);
            } else {
                rejections += 1;
                assert_eq!(state, s0);
                assert_eq!(cache, c0);
            }
        }
        assert!(rejections > 50);
    }
}

#[test]
fn trajectories_are_reproducible() {
    let initial = StateVector::random(7, &mut ChaCha8Rng::seed_from_u64(22));
    let cfg = CoolingConfig { base_seed: 99, ..config(GateSet::Universal, 200, 1) };
    let a = run_trajectory(&initial, &cfg, 3).unwrap();
    let b = run_trajectory(&initial, &cfg, 3).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, run_trajectory(&initial, &cfg, 4).unwrap());
    assert_eq!(a.entropy_trace.len(), 201);
    assert_eq!(a.accepted_count, a.accept_trace.iter().filter(|&&x| x).count());
    assert_eq!(a.final_spectra.len(), 7);
}

#[test]
fn ensemble_is_independent_of_execution_order() {
    let initial = StateVector::random(7, &mut ChaCha8Rng::seed_from_u64(23));
    let cfg = config(GateSet::Universal, 150, 4);
    let sequential = run_ensemble(&initial, &cfg).unwrap();
    let mut shuffled: Vec<TrajectoryRecord> = [3, 1, 0, 2].iter().map(|&i| run_trajectory(&initial, &cfg, i).unwrap()).collect();
    shuffled.sort_by_key(|r| r.trajectory_index);
    assert_eq!(EnsembleResult::from_records(cfg.clone(), shuffled).unwrap(), sequential);
    for k in 0..=150 {
        let mean = sequential.per_trajectory.iter().map(|r| r.entropy_trace[k]).sum::<f64>() / 4.0;
        assert!((sequential.mean_trace[k] - mean).abs() <= 1e-12);
    }

    let single = run_ensemble(&initial, &CoolingConfig { n_trajectories: 1, ..cfg }).unwrap();
    assert_eq!(single.mean_trace, single.per_trajectory[0].entropy_trace);
    assert!(single.stderr_trace.iter().all(|&s| s == 0.0));
}

#[test]
fn zero_steps_records_only_the_initial_value() {
    let ghz = StateVector::ghz(9);
    let cfg = config(GateSet::Universal, 0, 2);
    let rec = run_trajectory(&ghz, &cfg, 0).unwrap();
    assert_eq!(rec.entropy_trace.len(), 1);
    assert!((rec.entropy_trace[0] - 1.0).abs() < 1e-12);
    assert!(rec.accept_trace.is_empty());
}

#[test]
fn ghz_freezes_under_parity_preserving_gates() {
    let ghz = StateVector::ghz(9);
    let mut frozen = 0;
    let seeds = 20;
    for seed in 0..seeds {
        let cfg = CoolingConfig { base_seed: seed, ..config(GateSet::Set1, 1_000, 1) };
        let rec = run_trajectory(&ghz, &cfg, 0).unwrap();
        assert!(rec.entropy_trace.iter().all(|s| (s - 1.0).abs() <= 1e-6));
        let uphill = rec.entropy_trace.windows(2).filter(|w| w[1] > w[0] + 1e-12).count();
        frozen += usize::from(uphill == 0);
    }
    assert!(frozen as f64 >= 0.95 * seeds as f64);
}

#[test]
fn entropy_stays_within_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let n = 9;
    let cfg = CoolingConfig { t_high: 1.0, t_low: 1e-2, ..config(GateSet::Universal, 400, 3) };
    for initial in [StateVector::random(n, &mut rng), StateVector::all_up(n), StateVector::w_state(n)] {
        let res = run_ensemble(&initial, &cfg).unwrap();
        for rec in &res.per_trajectory {
            assert!(rec.entropy_trace.iter().all(|&s| (0.0..=((n - 1) / 2) as f64).contains(&s)));
        }
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let ok = config(GateSet::Set1, 100, 2);
    assert!(ok.validate().is_ok());
    assert!(CoolingConfig { n_trajectories: 0, ..ok.clone() }.validate().is_err());
    assert!(CoolingConfig { t_low: 1e-3, ..ok.clone() }.validate().is_err());
    assert!(CoolingConfig { n_temperatures: 0, ..ok.clone() }.validate().is_err());
    assert!(CoolingConfig { total_steps: 5, ..ok.clone() }.validate().is_err());
    assert!(CoolingConfig { alpha: -1.0, ..ok }.validate().is_err());
}

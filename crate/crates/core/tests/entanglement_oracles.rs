use entcool_core::entanglement::*;
use entcool_core::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eigenvalues (descending) of ρ_A built by summing over environment states.
fn brute_force_spectrum(state: &StateVector, block: BlockSpec) -> Vec<f64> {
    let n = state.n_sites();
    let sites: Vec<usize> = (0..block.length).map(|k| (block.start + k) % n).collect();
    let k = 1usize << sites.len();
    let sub = |a: usize| sites.iter().enumerate().fold(0, |acc, (p, &s)| acc | ((a >> s) & 1) << p);
    let env_mask: usize = (0..n).filter(|s| !sites.contains(s)).fold(0, |m, s| m | 1 << s);
    let amps = state.amplitudes();
    let mut rho = DMatrix::<Complex64>::zeros(k, k);
    for a in 0..amps.len() {
        for b in 0..amps.len() {
            if a & env_mask == b & env_mask {
                rho[(sub(a), sub(b))] += amps[a] * amps[b].conj();
            }
        }
    }
    let mut eig: Vec<f64> = rho.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

fn all_blocks(n: usize) -> impl Iterator<Item = BlockSpec> {
    (1..n).flat_map(move |len| (0..n).map(move |s| BlockSpec::new(s, len, n).unwrap()))
}

fn random_gate(rng: &mut ChaCha8Rng) -> TwoSiteGate {
    two_site_unitary(GateKind::from_number(rng.random_range(1..=6)).unwrap(), DEFAULT_DT)
}

fn ground(n: usize, ratio: f64) -> StateVector {
    ground_state_with(&build_hamiltonian(&ChainSpec::from_ratio(n, ratio).unwrap()), &GroundStateOptions::default())
        .unwrap()
        .state
}

#[test]
fn spectra_match_explicit_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in [3, 5, 7] {
        let state = StateVector::random(n, &mut rng);
        for block in all_blocks(n) {
            let fast = block_rdm_spectrum(&state, block).unwrap();
            let oracle = brute_force_spectrum(&state, block);
            assert!((fast.trace() - 1.0).abs() <= 1e-10);
            for (i, &o) in oracle.iter().enumerate() {
                let f = fast.eigenvalues.get(i).copied().unwrap_or(0.0);
                assert!((f - o.max(0.0)).abs() <= 1e-12, "N={n} {block:?}");
            }
        }
    }
    let w = block_rdm_spectrum(&StateVector::w_state(3), BlockSpec::new(0, 1, 3).unwrap()).unwrap();
    assert!((w.eigenvalues[0] - 2.0 / 3.0).abs() < 1e-12 && (w.eigenvalues[1] - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn renyi_is_non_increasing_in_alpha() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [5, 7, 9] {
        let state = StateVector::random(n, &mut rng);
        for block in all_blocks(n) {
            let spec = block_rdm_spectrum(&state, block).unwrap();
            let s: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 3.0, f64::INFINITY]
                .iter()
                .map(|&a| renyi_entropy(&spec.eigenvalues, a).unwrap())
                .collect();
            assert!(s.windows(2).all(|w| w[0] >= w[1] - 1e-12), "{s:?}");
            assert!(s.iter().all(|&x| x >= 0.0 && x <= block.length.min(n - block.length) as f64 + 1e-12));
        }
    }
}

#[test]
fn complementary_blocks_share_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [5, 7, 9, 11] {
        let state = StateVector::random(n, &mut rng);
        let l = half_chain_len(n);
        for s in 0..n {
            let a = block_rdm_spectrum(&state, BlockSpec::new(s, l, n).unwrap()).unwrap();
            let b = block_rdm_spectrum(&state, BlockSpec::new((s + l) % n, n - l, n).unwrap()).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).abs() <= 1e-10);
            }
            assert!(b.eigenvalues[a.eigenvalues.len()..].iter().all(|&y| y.abs() <= 1e-10));
        }
    }
}

#[test]
fn purity_path_matches_spectrum_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in 0..100 {
        let n = [3, 5, 7, 9, 11][k % 5];
        let state = StateVector::random(n, &mut rng);
        for block in all_blocks(n) {
            let fast = renyi2_via_purity(&state, block).unwrap();
            let slow = renyi_entropy(&block_rdm_spectrum(&state, block).unwrap().eigenvalues, 2.0).unwrap();
            assert!((fast - slow).abs() <= 1e-9, "N={n} {block:?}: {fast} vs {slow}");
        }
    }
    let ghz = StateVector::ghz(5);
    assert!((renyi2_via_purity(&ghz, BlockSpec::new(1, 2, 5).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(renyi2_via_purity(&StateVector::all_up(5), BlockSpec::new(0, 2, 5).unwrap()).unwrap(), 0.0);
}

#[test]
fn gates_only_touch_blocks_they_straddle() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let n = 7;
    let state = StateVector::random(n, &mut rng);
    let before: Vec<(BlockSpec, RdmSpectrum)> = all_blocks(n).map(|b| (b, block_rdm_spectrum(&state, b).unwrap())).collect();
    for bond in 0..n {
        let mut after = state.clone();
        after.apply_two_site(&random_gate(&mut rng), bond).unwrap();
        let (p, q) = (bond, (bond + 1) % n);
        for (block, spec) in &before {
            if block.contains(p, n) != block.contains(q, n) {
                continue;
            }
            let now = block_rdm_spectrum(&after, *block).unwrap();
            for (x, y) in spec.eigenvalues.iter().zip(&now.eigenvalues) {
                assert!((x - y).abs() <= 1e-10, "bond {bond} {block:?}");
            }
        }
    }
}

#[test]
fn cache_tracks_full_recompute() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let n = 7;
    for alpha in [2.0, 1.0] {
        let mut state = StateVector::random(n, &mut rng);
        let mut engine = EntropyEngine::new(n, alpha).unwrap();
        let mut cache = EntropyCache::compute(&state, &mut engine).unwrap();
        for step in 0..1_000 {
            let bond = rng.random_range(0..n);
            state.apply_two_site(&random_gate(&mut rng), bond).unwrap();
            cache.update_bond(&state, bond, &mut engine).unwrap();
            if step % 100 == 99 {
                let fresh = averaged_half_chain_entropy(&state, alpha).unwrap();
                for (c, f) in cache.per_block.iter().zip(&fresh.per_block) {
                    assert!((c - f).abs() <= 1e-8);
                }
                let mean = cache.per_block.iter().sum::<f64>() / n as f64;
                assert!((cache.average - mean).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn incremental_update_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let n = 7;
    for bond in [2, n - 1] {
        let mut state = StateVector::random(n, &mut rng);
        let mut cache = averaged_half_chain_entropy(&state, 2.0).unwrap();
        let untouched = cache.clone();
        incremental_update(&mut cache, &state, bond).unwrap();
        for (a, b) in cache.per_block.iter().zip(&untouched.per_block) {
            assert!((a - b).abs() <= 1e-12);
        }
        state.apply_two_site(&random_gate(&mut rng), bond).unwrap();
        incremental_update(&mut cache, &state, bond).unwrap();
        let fresh = averaged_half_chain_entropy(&state, 2.0).unwrap();
        for (a, b) in cache.per_block.iter().zip(&fresh.per_block) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}

#[test]
fn half_chain_averages() {
    let up = averaged_half_chain_entropy(&StateVector::all_up(9), 2.0).unwrap();
    assert!(up.per_block.iter().all(|&s| s == 0.0) && up.average == 0.0);
    let ghz = averaged_half_chain_entropy(&StateVector::ghz(7), 2.0).unwrap();
    assert!(ghz.per_block.iter().all(|&s| (s - 1.0).abs() < 1e-12));

    let afm = ground(9, 2.5);
    let cache = averaged_half_chain_entropy(&afm, 2.0).unwrap();
    let oracle: f64 = (0..9)
        .map(|s| {
            let eig = brute_force_spectrum(&afm, BlockSpec::half_chain(s, 9).unwrap());
            -eig.iter().map(|l| l * l).sum::<f64>().log2()
        })
        .sum::<f64>()
        / 9.0;
    assert!((cache.average - oracle).abs() <= 1e-10);
    let fm = averaged_half_chain_entropy(&ground(9, -2.5), 2.0).unwrap();
    assert!(cache.average > fm.average);
}

/// Closed-form concurrence for a two-site density matrix with only diagonal
/// and anti-diagonal entries.
fn x_state_concurrence(rho: &[[Complex64; 4]; 4]) -> f64 {
    let d = |i: usize| rho[i][i].re;
    let a = rho[0][3].norm() - (d(1) * d(2)).sqrt();
    let b = rho[1][2].norm() - (d(0) * d(3)).sqrt();
    (2.0 * a.max(b)).max(0.0)
}

#[test]
fn concurrence_matches_x_state_formula() {
    for ratio in [-2.5, 0.75, 2.5] {
        let state = ground(9, ratio);
        for (i, j) in [(0, 1), (3, 4), (8, 0), (2, 5)] {
            let rho = two_site_rdm(&state, i, j).unwrap();
            assert!(rho[0][1].norm() < 1e-12 && rho[0][2].norm() < 1e-12, "parity-symmetric RDM");
            let c = concurrence(&state, i, j).unwrap();
            assert!((c - x_state_concurrence(&rho)).abs() <= 1e-9, "J/h={ratio} ({i},{j})");
        }
    }
    let w = StateVector::w_state(3);
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        assert!((concurrence(&w, i, j).unwrap() - 2.0 / 3.0).abs() < 1e-9);
    }
    let bell = StateVector::from_real(2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
    assert!((concurrence(&bell, 0, 1).unwrap() - 1.0).abs() < 1e-9);
    assert!(concurrence(&StateVector::all_up(3), 0, 1).unwrap().abs() < 1e-12);
    assert_eq!(concurrence(&w, 1, 1), Err(Error::SameSite(1)));
}

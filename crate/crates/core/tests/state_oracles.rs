use entcool_core::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M4 = [[Complex64; 4]; 4];

fn matmul(a: &M4, b: &M4) -> M4 {
    let mut c = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// `exp(A)` by scaling, a 20-term Taylor series and repeated squaring.
fn expm(a: &M4) -> M4 {
    let squarings = 8;
    let scale = 1.0 / f64::from(1 << squarings);
    let scaled: M4 = core::array::from_fn(|i| core::array::from_fn(|j| a[i][j] * scale));
    let mut sum: M4 = core::array::from_fn(|i| core::array::from_fn(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0)));
    let mut term = sum;
    for k in 1..=20 {
        term = matmul(&term, &scaled);
        term.iter_mut().flatten().for_each(|x| *x /= k as f64);
        for i in 0..4 {
            for j in 0..4 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// Applies `u` on `(bond, bond+1 mod N)` by visiting every basis state.
fn brute_force_apply(state: &StateVector, u: &M4, bond: usize) -> Vec<Complex64> {
    let n = state.n_sites();
    let (p, q) = (bond, (bond + 1) % n);
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    for (b, &amp) in state.amplitudes().iter().enumerate() {
        let local = 2 * ((b >> p) & 1) + ((b >> q) & 1);
        let rest = b & !(1 << p) & !(1 << q);
        for (row, u_row) in u.iter().enumerate() {
            let target = rest | ((row >> 1) << p) | ((row & 1) << q);
            out[target] += u_row[local] * amp;
        }
    }
    out
}

fn random_unitary(rng: &mut ChaCha8Rng) -> TwoSiteGate {
    let mut u = TwoSiteGate::identity();
    for _ in 0..12 {
        let kind = GateKind::from_number(rng.random_range(1..=6)).unwrap();
        u = TwoSiteGate::from_matrix(matmul(two_site_unitary(kind, rng.random::<f64>() * 3.0).matrix(), u.matrix()));
    }
    u
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn closed_forms_match_matrix_exponential() {
    for kind in GateKind::ALL {
        let generator = kind.generator();
        let i_dt: M4 = core::array::from_fn(|r| core::array::from_fn(|c| generator[r][c] * Complex64::new(0.0, DEFAULT_DT)));
        let oracle = expm(&i_dt);
        let u = two_site_unitary(kind, DEFAULT_DT);
        for r in 0..4 {
            for c in 0..4 {
                assert!((u.matrix()[r][c] - oracle[r][c]).norm() <= 1e-12, "{kind:?} ({r},{c})");
            }
        }
    }
}

#[test]
fn gates_are_unitary() {
    for kind in GateKind::ALL {
        let u = two_site_unitary(kind, DEFAULT_DT);
        let m = u.matrix();
        for r in 0..4 {
            for c in 0..4 {
                let dot: Complex64 = (0..4).map(|k| m[k][r].conj() * m[k][c]).sum();
                let expected = if r == c { 1.0 } else { 0.0 };
                assert!((dot - expected).norm() <= 1e-12);
            }
        }
    }
}

#[test]
fn kernel_matches_brute_force_on_every_bond() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [2, 3, 5, 7] {
        let state = StateVector::random(n, &mut rng);
        for bond in 0..n {
            let gate = random_unitary(&mut rng);
            let mut applied = state.clone();
            applied.apply_two_site(&gate, bond).unwrap();
            assert!(max_diff(applied.amplitudes(), &brute_force_apply(&state, gate.matrix(), bond)) <= 1e-13);
        }
    }
}

/// Amplitudes after renaming site `k` to site `(k + shift) mod N`.
fn relabel(state: &StateVector, shift: usize) -> StateVector {
    let n = state.n_sites();
    let mut amps = vec![Complex64::new(0.0, 0.0); state.dim()];
    for (b, &a) in state.amplitudes().iter().enumerate() {
        let moved = (0..n).filter(|k| b >> k & 1 == 1).fold(0, |acc, k| acc | 1 << ((k + shift) % n));
        amps[moved] = a;
    }
    StateVector::from_amplitudes(n, amps).unwrap()
}

#[test]
fn wraparound_bond_matches_relabeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 5;
    for _ in 0..10 {
        let state = StateVector::random(n, &mut rng);
        let gate = random_unitary(&mut rng);
        let mut direct = state.clone();
        direct.apply_two_site(&gate, n - 1).unwrap();

        // Sites (N−1, 0) become (0, 1).
        let mut moved = relabel(&state, 1);
        moved.apply_two_site(&gate, 0).unwrap();
        let back = relabel(&moved, n - 1);
        assert!(max_diff(direct.amplitudes(), back.amplitudes()) <= 1e-13);
    }
}

#[test]
fn norm_survives_many_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gates: Vec<TwoSiteGate> = GateKind::ALL.iter().map(|&k| two_site_unitary(k, DEFAULT_DT)).collect();
    let mut state = StateVector::random(7, &mut rng);
    for step in 1..=100_000 {
        let before = state.norm();
        state.apply_two_site(&gates[rng.random_range(0..6)], rng.random_range(0..7)).unwrap();
        assert!((state.norm() - before).abs() <= 1e-12);
        if step % 10_000 == 0 {
            state.renormalize();
        }
        assert!((state.norm() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn set1_conserves_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in [3, 5, 7, 9] {
        for _ in 0..5 {
            let mut state = StateVector::random(n, &mut rng);
            for &kind in GateSet::Set1.kinds() {
                let gate = two_site_unitary(kind, DEFAULT_DT);
                for bond in 0..n {
                    let before = state.parity_expectation();
                    state.apply_two_site(&gate, bond).unwrap();
                    assert!((state.parity_expectation() - before).abs() <= 1e-10);
                }
            }
        }
    }
    // Set 2 is not parity preserving: an X field on |↑↑↑⟩ moves the parity.
    let mut state = StateVector::all_up(3);
    state.apply_two_site(&two_site_unitary(GateKind::XField, DEFAULT_DT), 0).unwrap();
    assert!((state.parity_expectation() - 1.0).abs() > 0.1);
}

#[test]
fn documented_examples() {
    let mut s = StateVector::basis(2, 0).unwrap();
    s.apply_two_site(&two_site_unitary(GateKind::XX, DEFAULT_DT), 0).unwrap();
    let (c, sn) = (DEFAULT_DT.cos(), DEFAULT_DT.sin());
    assert!((s.amplitudes()[0] - Complex64::new(c, 0.0)).norm() < 1e-15);
    assert!((s.amplitudes()[3] - Complex64::new(0.0, sn)).norm() < 1e-15);

    // |01⟩: site 0 up, site 1 down, i.e. bit 1 set.
    let mut s = StateVector::basis(2, 0b10).unwrap();
    s.apply_two_site(&two_site_unitary(GateKind::ZField, 0.37), 0).unwrap();
    assert!((s.amplitudes()[0b10] - Complex64::new(1.0, 0.0)).norm() < 1e-15);

    let mut s = StateVector::basis(2, 0).unwrap();
    s.apply_two_site(&two_site_unitary(GateKind::XX, std::f64::consts::FRAC_PI_4), 0).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((s.amplitudes()[0] - Complex64::new(r, 0.0)).norm() < 1e-15);
    assert!((s.amplitudes()[3] - Complex64::new(0.0, r)).norm() < 1e-15);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let state = StateVector::random(5, &mut rng);
    let mut same = state.clone();
    same.apply_two_site(&TwoSiteGate::identity(), 2).unwrap();
    assert_eq!(same, state);

    assert_eq!(StateVector::all_up(3).parity_expectation(), 1.0);
    assert_eq!(StateVector::basis(3, 1).unwrap().parity_expectation(), -1.0);
    assert!(StateVector::ghz(3).parity_expectation().abs() < 1e-15);
    assert!(matches!(same.apply_two_site(&TwoSiteGate::identity(), 5), Err(Error::SiteOutOfRange { .. })));
    assert!(GateKind::from_number(7).is_err());
}

use entcool_core::ising::DEFAULT_DENSE_MAX_SITES;
use entcool_core::*;
use nalgebra::{DMatrix, SymmetricEigen};

fn pauli_x() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

fn pauli_z() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

/// `op` on `site` of an `n`-site register. Site `j` is bit `j`, so it sits
/// `j` places from the right of the Kronecker product.
fn embed(ops: &[(usize, DMatrix<f64>)], n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::identity(1, 1);
    for site in (0..n).rev() {
        let factor = ops.iter().find(|(s, _)| *s == site).map_or_else(|| DMatrix::identity(2, 2), |(_, o)| o.clone());
        m = m.kronecker(&factor);
    }
    m
}

fn kronecker_hamiltonian(n: usize, j: f64, h: f64) -> DMatrix<f64> {
    let dim = 1 << n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for s in 0..n {
        m += embed(&[(s, pauli_x()), ((s + 1) % n, pauli_x())], n) * j;
        m -= embed(&[(s, pauli_z())], n) * h;
    }
    m
}

fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn matrix_matches_kronecker_construction() {
    let spec = ChainSpec::from_ratio(9, 2.5).unwrap();
    let h = build_hamiltonian(&spec);
    let oracle = kronecker_hamiltonian(9, 2.5, 1.0);
    for a in 0..h.dim() {
        for b in 0..h.dim() {
            assert_eq!(h.entry(a, b), oracle[(a, b)], "entry ({a}, {b})");
        }
    }
}

#[test]
fn hermitian_and_parity_commuting() {
    for n in [3, 5, 7, 9, 11] {
        let h = build_hamiltonian(&ChainSpec::new(n, 1.3, 0.7).unwrap());
        let parity = |a: usize| if a.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        for a in 0..h.dim() {
            for b in 0..h.dim() {
                let hab = h.entry(a, b);
                assert_eq!(hab, h.entry(b, a));
                assert!((hab * parity(b) - parity(a) * hab).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn ground_energy_matches_dense_oracle() {
    for (n, ratio) in [(9, 2.5), (9, -2.5), (9, 0.75)] {
        let h = build_hamiltonian(&ChainSpec::from_ratio(n, ratio).unwrap());
        let e0 = sorted_eigenvalues(kronecker_hamiltonian(n, ratio, 1.0))[0];
        for dense_max_sites in [DEFAULT_DENSE_MAX_SITES.max(n), 0] {
            let gs = ground_state_with(&h, &GroundStateOptions { dense_max_sites, ..Default::default() }).unwrap();
            assert!((gs.energy - e0).abs() <= 1e-9 * e0.abs(), "N={n} J/h={ratio}: {} vs {e0}", gs.energy);
            let mut hv = vec![0.0; h.dim()];
            let v: Vec<f64> = gs.state.amplitudes().iter().map(|c| c.re).collect();
            h.apply(&v, &mut hv);
            let res: f64 = hv.iter().zip(&v).map(|(y, x)| (y - gs.energy * x).powi(2)).sum::<f64>().sqrt();
            assert!(res <= 1e-8 * h.norm_bound());
        }
    }
}

/// Without a field the model is classical in the σ^x basis and flipping `J`
/// negates the spectrum. On an odd ring that spectrum is not symmetric about
/// zero: the frustrated ground energy `−(N−2)|J|` lies above the ferromagnetic
/// `−N|J|`, so the ±J spectra do not coincide.
#[test]
fn coupling_sign_flip_without_field() {
    for n in [3, 5, 7, 9] {
        let afm = sorted_eigenvalues(build_hamiltonian(&ChainSpec::new(n, 1.0, 0.0).unwrap()).to_dense());
        let fm = sorted_eigenvalues(build_hamiltonian(&ChainSpec::new(n, -1.0, 0.0).unwrap()).to_dense());
        for (a, b) in afm.iter().zip(fm.iter().rev()) {
            assert!((a + b).abs() <= 1e-10, "N={n}: {a} vs {b}");
        }
        assert!((afm[0] + (n - 2) as f64).abs() <= 1e-10);
        assert!((fm[0] + n as f64).abs() <= 1e-10);
    }
}

#[test]
fn ground_energy_non_increasing_in_field() {
    for coupling in [0.0, 0.5, 2.5] {
        let mut previous = f64::INFINITY;
        for k in 0..=30 {
            let field = 0.1 * k as f64;
            let h = build_hamiltonian(&ChainSpec::new(7, coupling, field).unwrap());
            let e = ground_state(&h, 1e-10).unwrap().energy;
            assert!(e <= previous + 1e-12, "J={coupling} h={field}: {e} > {previous}");
            previous = e;
        }
    }
}

#[test]
fn documented_examples() {
    let gs = ground_state(&build_hamiltonian(&ChainSpec::new(5, 0.0, 1.0).unwrap()), 1e-10).unwrap();
    assert!((gs.energy + 5.0).abs() < 1e-12);
    assert!((gs.state.amplitudes()[0].re - 1.0).abs() < 1e-12);

    let gs = ground_state(&build_hamiltonian(&ChainSpec::new(3, 1.0, 0.0).unwrap()), 1e-10).unwrap();
    assert!((gs.energy + 1.0).abs() < 1e-12);
    assert!(gs.degenerate);

    assert_eq!(ChainSpec::new(4, 1.0, 1.0), Err(Error::EvenChain(4)));
    assert!(ChainSpec::new(23, 1.0, 1.0).is_err());
    assert_eq!(classify_phase(&ChainSpec::from_ratio(9, 0.75).unwrap()), Ok(PhaseLabel::Paramagnetic));
    assert_eq!(classify_phase(&ChainSpec::from_ratio(9, -2.5).unwrap()), Ok(PhaseLabel::Ferromagnetic));
    assert_eq!(classify_phase(&ChainSpec::from_ratio(9, 2.5).unwrap()), Ok(PhaseLabel::FrustratedAfm));
    assert_eq!(classify_phase(&ChainSpec::from_ratio(9, 1.0).unwrap()), Err(Error::CriticalPoint(1.0)));
    assert_eq!(classify_phase(&ChainSpec::new(9, 1.0, 0.0).unwrap()), Err(Error::NonPositiveField(0.0)));
}

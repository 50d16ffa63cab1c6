//! Transverse-field Ising ring `H = J Σ σ^x_j σ^x_{j+1} − h Σ σ^z_j` with
//! periodic boundaries, and its ground state by exact diagonalization.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lanczos::{lowest_eigenpair, LanczosOptions, SymmetricOperator};
use crate::linalg::symmetric_eigen;
use crate::state::StateVector;

/// Largest chain accepted unless a caller raises it.
pub const DEFAULT_MAX_SITES: usize = 21;

/// Chains up to this size are diagonalized densely; larger ones use Lanczos.
pub const DEFAULT_DENSE_MAX_SITES: usize = 9;

/// Relative degeneracy tolerance, multiplied by the norm bound of `H`.
pub const DEFAULT_DEGENERACY_REL_TOL: f64 = 1e-10;

/// An odd-length TFIM ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n_sites: usize,
    /// `J`
    pub coupling: f64,
    /// `h`
    pub field: f64,
}

impl ChainSpec {
    pub fn new(n_sites: usize, coupling: f64, field: f64) -> Result<Self> {
        Self::with_max_sites(n_sites, coupling, field, DEFAULT_MAX_SITES)
    }

    pub fn with_max_sites(n_sites: usize, coupling: f64, field: f64, max: usize) -> Result<Self> {
        if n_sites < 3 || n_sites > max {
            return Err(Error::ChainSize { n: n_sites, max });
        }
        if n_sites % 2 == 0 {
            return Err(Error::EvenChain(n_sites));
        }
        if !coupling.is_finite() || !field.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { n_sites, coupling, field })
    }

    /// Chain with `h = 1` and the given `J/h`.
    pub fn from_ratio(n_sites: usize, j_over_h: f64) -> Result<Self> {
        Self::new(n_sites, j_over_h, 1.0)
    }

    pub fn ratio(&self) -> f64 {
        self.coupling / self.field
    }
}

/// Macroscopic phase of the ring at `h > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLabel {
    Paramagnetic,
    Ferromagnetic,
    FrustratedAfm,
}

impl PhaseLabel {
    pub fn short_name(self) -> &'static str {
        match self {
            PhaseLabel::Paramagnetic => "para",
            PhaseLabel::Ferromagnetic => "fm",
            PhaseLabel::FrustratedAfm => "afm",
        }
    }
}

pub fn classify_phase(spec: &ChainSpec) -> Result<PhaseLabel> {
    if !(spec.field > 0.0) {
        return Err(Error::NonPositiveField(spec.field));
    }
    let r = spec.ratio();
    if r.abs() == 1.0 {
        return Err(Error::CriticalPoint(r));
    }
    Ok(if r.abs() < 1.0 {
        PhaseLabel::Paramagnetic
    } else if r < -1.0 {
        PhaseLabel::Ferromagnetic
    } else {
        PhaseLabel::FrustratedAfm
    })
}

/// The Hamiltonian in the σ^z product basis, stored matrix-free: the diagonal
/// field term plus one two-spin-flip partner per bond.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    spec: ChainSpec,
    diagonal: Vec<f64>,
    bond_masks: Vec<usize>,
}

pub fn build_hamiltonian(spec: &ChainSpec) -> HamiltonianMatrix {
    let n = spec.n_sites;
    let diagonal = (0..1usize << n)
        .map(|a| -spec.field * (n as f64 - 2.0 * a.count_ones() as f64))
        .collect();
    let bond_masks = (0..n).map(|j| (1usize << j) | (1usize << ((j + 1) % n))).collect();
    HamiltonianMatrix { spec: *spec, diagonal, bond_masks }
}

impl HamiltonianMatrix {
    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// `⟨a|H|b⟩`.
    pub fn entry(&self, a: usize, b: usize) -> f64 {
        let mut v = if a == b { self.diagonal[a] } else { 0.0 };
        for &m in &self.bond_masks {
            if a ^ b == m {
                v += self.spec.coupling;
            }
        }
        v
    }

    /// `N(|J| + |h|)`, an upper bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.spec.n_sites as f64 * (self.spec.coupling.abs() + self.spec.field.abs())
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let j = self.spec.coupling;
        for (a, ya) in y.iter_mut().enumerate() {
            let mut acc = self.diagonal[a] * x[a];
            for &m in &self.bond_masks {
                acc += j * x[a ^ m];
            }
            *ya = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal));
        for a in 0..dim {
            for &mask in &self.bond_masks {
                m[(a, a ^ mask)] += self.spec.coupling;
            }
        }
        m
    }

    fn sector(&self, parity: usize) -> ParitySector<'_> {
        ParitySector { h: self, parity }
    }
}

/// `H` restricted to states of fixed z-parity. Local index `i` stands for the
/// global index `2i + b`, where `b` restores the sector's popcount parity.
struct ParitySector<'a> {
    h: &'a HamiltonianMatrix,
    parity: usize,
}

impl ParitySector<'_> {
    #[inline]
    fn global(&self, local: usize) -> usize {
        (local << 1) | ((local.count_ones() as usize & 1) ^ self.parity)
    }
}

impl SymmetricOperator for ParitySector<'_> {
    fn dim(&self) -> usize {
        self.h.dim() / 2
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let j = self.h.spec.coupling;
        for (i, yi) in y.iter_mut().enumerate() {
            let a = self.global(i);
            let mut acc = self.h.diagonal[a] * x[i];
            for &m in &self.h.bond_masks {
                acc += j * x[(a ^ m) >> 1];
            }
            *yi = acc;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateOptions {
    /// Absolute gap below which eigenvalues count as degenerate. `None` means
    /// `1e-10 · ‖H‖`.
    pub degeneracy_tol: Option<f64>,
    pub dense_max_sites: usize,
    pub lanczos: LanczosOptions,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self { degeneracy_tol: None, dense_max_sites: DEFAULT_DENSE_MAX_SITES, lanczos: LanczosOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    pub degenerate: bool,
    /// Dimension of the (near-)degenerate ground manifold.
    pub multiplicity: usize,
}

/// Lowest eigenpair with the default solver settings.
pub fn ground_state(h: &HamiltonianMatrix, degeneracy_tol: f64) -> Result<GroundState> {
    ground_state_with(h, &GroundStateOptions { degeneracy_tol: Some(degeneracy_tol), ..Default::default() })
}

/// Lowest eigenpair of `h`.
///
/// When several eigenvalues lie within the degeneracy tolerance of the
/// minimum, the returned state is the normalized projection of the first basis
/// state carrying weight in that manifold; the sign is then fixed so the
/// largest-magnitude amplitude is positive.
pub fn ground_state_with(h: &HamiltonianMatrix, opts: &GroundStateOptions) -> Result<GroundState> {
    let scale = h.norm_bound().max(f64::MIN_POSITIVE);
    let tol = opts.degeneracy_tol.unwrap_or(DEFAULT_DEGENERACY_REL_TOL * scale);
    let (energy, manifold) = if h.spec.n_sites <= opts.dense_max_sites {
        dense_manifold(h, tol)
    } else {
        lanczos_manifold(h, tol, scale, &opts.lanczos)?
    };
    let amps = canonical_representative(&manifold);
    let mut hv = vec![0.0; amps.len()];
    h.apply(&amps, &mut hv);
    let residual = libm::sqrt(hv.iter().zip(&amps).map(|(y, x)| (y - energy * x) * (y - energy * x)).sum());
    if residual > 1e-8 * scale {
        return Err(Error::NoConvergence { iterations: 0, residual });
    }
    Ok(GroundState {
        energy,
        state: StateVector::from_real(h.spec.n_sites, &amps)?,
        degenerate: manifold.len() > 1,
        multiplicity: manifold.len(),
    })
}

fn dense_manifold(h: &HamiltonianMatrix, tol: f64) -> (f64, Vec<Vec<f64>>) {
    let (values, vectors) = symmetric_eigen(h.to_dense());
    let e0 = values[0];
    let manifold = values
        .iter()
        .take_while(|&&e| e - e0 <= tol)
        .enumerate()
        .map(|(k, _)| vectors.column(k).iter().copied().collect())
        .collect();
    (e0, manifold)
}

fn lanczos_manifold(
    h: &HamiltonianMatrix,
    tol: f64,
    scale: f64,
    opts: &LanczosOptions,
) -> Result<(f64, Vec<Vec<f64>>)> {
    let sectors = [h.sector(0), h.sector(1)];
    let mut found: [Vec<(f64, Vec<f64>)>; 2] = [Vec::new(), Vec::new()];
    for (p, sector) in sectors.iter().enumerate() {
        if let Some(pair) = lowest_eigenpair(sector, &[], scale, opts)? {
            found[p].push(pair);
        }
    }
    let e0 = found.iter().flatten().map(|(e, _)| *e).fold(f64::INFINITY, f64::min);
    for (p, sector) in sectors.iter().enumerate() {
        if found[p].first().map_or(true, |(e, _)| e - e0 > tol) {
            continue;
        }
        loop {
            let locked: Vec<Vec<f64>> = found[p].iter().map(|(_, v)| v.clone()).collect();
            match lowest_eigenpair(sector, &locked, scale, opts)? {
                Some((e, v)) if e - e0 <= tol => found[p].push((e, v)),
                _ => break,
            }
        }
    }
    let mut manifold = Vec::new();
    for (p, sector) in sectors.iter().enumerate() {
        for (e, v) in &found[p] {
            if e - e0 > tol {
                continue;
            }
            let mut g = vec![0.0; h.dim()];
            for (i, x) in v.iter().enumerate() {
                g[sector.global(i)] = *x;
            }
            manifold.push(g);
        }
    }
    Ok((e0, manifold))
}

/// Weight below which a basis state counts as absent from the manifold.
const SUPPORT_THRESHOLD: f64 = 1e-14;

fn canonical_representative(manifold: &[Vec<f64>]) -> Vec<f64> {
    let mut v = if manifold.len() == 1 {
        manifold[0].clone()
    } else {
        let dim = manifold[0].len();
        let anchor = (0..dim)
            .find(|&a| manifold.iter().map(|u| u[a] * u[a]).sum::<f64>() > SUPPORT_THRESHOLD)
            .unwrap_or(0);
        let mut v = vec![0.0; dim];
        for u in manifold {
            let c = u[anchor];
            v.iter_mut().zip(u).for_each(|(vi, ui)| *vi += c * ui);
        }
        v
    };
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
    let pivot = v
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, x)| if x.abs() > best.1 { (i, x.abs()) } else { best })
        .0;
    let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
    v.iter_mut().for_each(|x| *x *= sign / norm);
    v
}

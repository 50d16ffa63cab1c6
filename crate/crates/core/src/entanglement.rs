//! Reduced density matrices of contiguous blocks, Rényi entropies, the
//! averaged half-chain entropy with its two-block incremental update, and the
//! Wootters concurrence of a spin pair.
//!
//! All entropies are in bits.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues};
use crate::state::StateVector;

/// Eigenvalues in `[NEGATIVE_CLAMP, 0)` are solver noise and are set to zero.
pub const NEGATIVE_CLAMP: f64 = -1e-12;

/// A contiguous run of `length` sites starting at `start`, wrapping around the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockSpec {
    pub start: usize,
    pub length: usize,
}

impl BlockSpec {
    pub fn new(start: usize, length: usize, n_sites: usize) -> Result<Self> {
        if start >= n_sites || length == 0 || length >= n_sites {
            return Err(Error::InvalidBlock { start, length, n_sites });
        }
        Ok(Self { start, length })
    }

    /// The block of `(N-1)/2` sites starting at `start`.
    pub fn half_chain(start: usize, n_sites: usize) -> Result<Self> {
        Self::new(start, half_chain_len(n_sites), n_sites)
    }

    pub fn contains(&self, site: usize, n_sites: usize) -> bool {
        (site + n_sites - self.start) % n_sites < self.length
    }
}

pub fn half_chain_len(n_sites: usize) -> usize {
    (n_sites - 1) / 2
}

/// Cyclic relabelling that moves a block onto the low bits: basis index
/// `rows[r] | cols[c]` has block configuration `r` and environment `c`.
#[derive(Debug, Clone)]
pub struct BlockIndexer {
    n_sites: usize,
    block: BlockSpec,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl BlockIndexer {
    pub fn new(n_sites: usize, block: BlockSpec) -> Result<Self> {
        let block = BlockSpec::new(block.start, block.length, n_sites)?;
        let scatter = |first: usize, len: usize| -> Vec<usize> {
            (0..1usize << len)
                .map(|x| {
                    (0..len)
                        .filter(|k| x >> k & 1 == 1)
                        .fold(0, |acc, k| acc | 1 << ((first + k) % n_sites))
                })
                .collect()
        };
        let rows = scatter(block.start, block.length);
        let cols = scatter(block.start + block.length, n_sites - block.length);
        Ok(Self { n_sites, block, rows, cols })
    }

    pub fn block(&self) -> BlockSpec {
        self.block
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn row_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn col_dim(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        self.rows[row] | self.cols[col]
    }
}

/// Scratch buffers for reshaping a state into a block matrix.
///
/// The reshaped matrix is always stored with its smaller dimension as rows
/// (`rows × cols`, split real/imaginary), so the Gram product is the small one.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    re: Vec<f64>,
    im: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    fn gather(&mut self, state: &StateVector, ix: &BlockIndexer) {
        let amps = state.amplitudes();
        let (r, c) = (ix.row_dim(), ix.col_dim());
        let transpose = r > c;
        self.rows = r.min(c);
        self.cols = r.max(c);
        self.re.resize(r * c, 0.0);
        self.im.resize(r * c, 0.0);
        for row in 0..r {
            for col in 0..c {
                let a = amps[ix.index(row, col)];
                let k = if transpose { col * r + row } else { row * c + col };
                self.re[k] = a.re;
                self.im[k] = a.im;
            }
        }
    }

    /// `⟨row_i, row_j⟩ = Σ_c ψ_ic conj(ψ_jc)`.
    #[inline]
    fn row_product(&self, i: usize, j: usize) -> Complex64 {
        let n = self.cols;
        let (ar, ai) = (&self.re[i * n..(i + 1) * n], &self.im[i * n..(i + 1) * n]);
        let (br, bi) = (&self.re[j * n..(j + 1) * n], &self.im[j * n..(j + 1) * n]);
        let mut re = [0.0f64; 4];
        let mut im = [0.0f64; 4];
        let chunks = n / 4 * 4;
        for k in (0..chunks).step_by(4) {
            for l in 0..4 {
                re[l] += ar[k + l] * br[k + l] + ai[k + l] * bi[k + l];
                im[l] += ai[k + l] * br[k + l] - ar[k + l] * bi[k + l];
            }
        }
        for k in chunks..n {
            re[0] += ar[k] * br[k] + ai[k] * bi[k];
            im[0] += ai[k] * br[k] - ar[k] * bi[k];
        }
        Complex64::new(re.iter().sum(), im.iter().sum())
    }

    fn gram(&self) -> Vec<Complex64> {
        let k = self.rows;
        let mut g = vec![Complex64::new(0.0, 0.0); k * k];
        for i in 0..k {
            for j in i..k {
                let v = self.row_product(i, j);
                g[i * k + j] = v;
                g[j * k + i] = v.conj();
            }
        }
        g
    }

    /// `Tr ρ² = ‖ψψ†‖_F²` from the upper triangle of the Gram matrix.
    fn purity(&self) -> f64 {
        let k = self.rows;
        let mut diag = 0.0;
        let mut off = 0.0;
        for i in 0..k {
            let d = self.row_product(i, i).re;
            diag += d * d;
            for j in i + 1..k {
                off += self.row_product(i, j).norm_sqr();
            }
        }
        diag + 2.0 * off
    }
}

/// Entanglement spectrum of a block: eigenvalues of `ρ_A`, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct RdmSpectrum {
    pub eigenvalues: Vec<f64>,
    pub block: BlockSpec,
}

impl RdmSpectrum {
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

pub fn block_rdm_spectrum(state: &StateVector, block: BlockSpec) -> Result<RdmSpectrum> {
    let ix = BlockIndexer::new(state.n_sites(), block)?;
    Ok(block_rdm_spectrum_with(state, &ix, &mut Workspace::new()))
}

/// Diagonalizes the Gram matrix on the smaller side of the block reshaping and
/// pads with zeros up to `2^L` eigenvalues.
pub fn block_rdm_spectrum_with(state: &StateVector, ix: &BlockIndexer, ws: &mut Workspace) -> RdmSpectrum {
    ws.gather(state, ix);
    let mut eigenvalues = hermitian_eigenvalues(ws.rows, &ws.gram());
    for e in eigenvalues.iter_mut() {
        if *e < 0.0 && *e >= NEGATIVE_CLAMP {
            *e = 0.0;
        }
    }
    eigenvalues.resize(ix.row_dim(), 0.0);
    RdmSpectrum { eigenvalues, block: ix.block() }
}

/// Rényi-α entropy in bits of a (possibly unnormalized-by-noise) spectrum.
///
/// `α = 1` is the von Neumann entropy with `0·log 0 = 0`; `α = 0` counts the
/// strictly positive eigenvalues; `α = ∞` uses the largest eigenvalue.
pub fn renyi_entropy(eigenvalues: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::NegativeAlpha(alpha));
    }
    let clean = eigenvalues.iter().map(|&l| l.max(0.0));
    let s = if alpha == 1.0 {
        -clean.filter(|&l| l > 0.0).map(|l| l * libm::log2(l)).sum::<f64>()
    } else if alpha == 0.0 {
        libm::log2(clean.filter(|&l| l > 0.0).count() as f64)
    } else if alpha.is_infinite() {
        -libm::log2(clean.fold(0.0, f64::max))
    } else {
        let moment: f64 = clean.filter(|&l| l > 0.0).map(|l| libm::pow(l, alpha)).sum();
        libm::log2(moment) / (1.0 - alpha)
    };
    Ok(s.max(0.0))
}

/// `S₂ = −log₂ Tr ρ_A²` without diagonalization.
pub fn renyi2_via_purity(state: &StateVector, block: BlockSpec) -> Result<f64> {
    let ix = BlockIndexer::new(state.n_sites(), block)?;
    renyi2_via_purity_with(state, &ix, &mut Workspace::new())
}

pub fn renyi2_via_purity_with(state: &StateVector, ix: &BlockIndexer, ws: &mut Workspace) -> Result<f64> {
    ws.gather(state, ix);
    let purity = ws.purity();
    let n = state.n_sites();
    if !(purity >= libm::ldexp(1e-3, -(n as i32))) {
        return Err(Error::PurityUnderflow { purity, n_sites: n });
    }
    Ok((-libm::log2(purity)).max(0.0))
}

/// Evaluates half-chain block entropies for one chain length and Rényi index,
/// reusing one indexer per block offset.
#[derive(Debug, Clone)]
pub struct EntropyEngine {
    alpha: f64,
    indexers: Vec<BlockIndexer>,
    ws: Workspace,
}

impl EntropyEngine {
    pub fn new(n_sites: usize, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) {
            return Err(Error::NegativeAlpha(alpha));
        }
        if n_sites < 3 {
            return Err(Error::InvalidBlock { start: 0, length: half_chain_len(n_sites.max(1)), n_sites });
        }
        let indexers = (0..n_sites)
            .map(|s| BlockIndexer::new(n_sites, BlockSpec::half_chain(s, n_sites)?))
            .collect::<Result<_>>()?;
        Ok(Self { alpha, indexers, ws: Workspace::new() })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_sites(&self) -> usize {
        self.indexers.len()
    }

    pub fn block_len(&self) -> usize {
        self.indexers[0].block().length
    }

    /// Entropy of the half-chain block starting at `offset`. Uses the purity
    /// fast path for `α = 2` and the spectrum otherwise.
    pub fn block_entropy(&mut self, state: &StateVector, offset: usize) -> Result<f64> {
        let ix = &self.indexers[offset];
        if self.alpha == 2.0 {
            renyi2_via_purity_with(state, ix, &mut self.ws)
        } else {
            let spec = block_rdm_spectrum_with(state, ix, &mut self.ws);
            renyi_entropy(&spec.eigenvalues, self.alpha)
        }
    }

    pub fn block_spectrum(&mut self, state: &StateVector, offset: usize) -> RdmSpectrum {
        block_rdm_spectrum_with(state, &self.indexers[offset], &mut self.ws)
    }

    /// Offsets of the two half-chain blocks that have a boundary on the bond
    /// `(bond, bond + 1)`: the block ending at `bond` and the one starting
    /// right after it.
    pub fn blocks_cut_by(&self, bond: usize) -> [usize; 2] {
        let n = self.n_sites();
        let l = self.block_len();
        [(bond + n + 1 - l) % n, (bond + 1) % n]
    }
}

/// Per-block half-chain entropies and their mean `S̄_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCache {
    pub alpha: f64,
    pub per_block: Vec<f64>,
    pub average: f64,
}

impl EntropyCache {
    pub fn compute(state: &StateVector, engine: &mut EntropyEngine) -> Result<Self> {
        let per_block = (0..engine.n_sites())
            .map(|s| engine.block_entropy(state, s))
            .collect::<Result<Vec<_>>>()?;
        let mut cache = Self { alpha: engine.alpha(), per_block, average: 0.0 };
        cache.refresh_average();
        Ok(cache)
    }

    fn refresh_average(&mut self) {
        self.average = self.per_block.iter().sum::<f64>() / self.per_block.len() as f64;
    }

    /// Recomputes only the two blocks cut by `bond` after a gate on
    /// `(bond, bond + 1)`; every other block is untouched by such a gate.
    pub fn update_bond(&mut self, state: &StateVector, bond: usize, engine: &mut EntropyEngine) -> Result<()> {
        let n = engine.n_sites();
        if bond >= n {
            return Err(Error::SiteOutOfRange { index: bond, n_sites: n });
        }
        for offset in engine.blocks_cut_by(bond) {
            self.per_block[offset] = engine.block_entropy(state, offset)?;
        }
        self.refresh_average();
        Ok(())
    }

    pub fn copy_from(&mut self, other: &EntropyCache) {
        self.alpha = other.alpha;
        self.average = other.average;
        self.per_block.clear();
        self.per_block.extend_from_slice(&other.per_block);
    }
}

/// All `N` half-chain entropies of `state` and their average.
pub fn averaged_half_chain_entropy(state: &StateVector, alpha: f64) -> Result<EntropyCache> {
    let mut engine = EntropyEngine::new(state.n_sites(), alpha)?;
    EntropyCache::compute(state, &mut engine)
}

/// Refreshes `cache` after a gate on `(bond, bond + 1)`.
pub fn incremental_update(cache: &mut EntropyCache, state: &StateVector, bond: usize) -> Result<()> {
    let mut engine = EntropyEngine::new(state.n_sites(), cache.alpha)?;
    cache.update_bond(state, bond, &mut engine)
}

/// Two-site reduced density matrix in the local basis `2·b_i + b_j`.
pub fn two_site_rdm(state: &StateVector, i: usize, j: usize) -> Result<[[Complex64; 4]; 4]> {
    let n = state.n_sites();
    for s in [i, j] {
        if s >= n {
            return Err(Error::SiteOutOfRange { index: s, n_sites: n });
        }
    }
    if i == j {
        return Err(Error::SameSite(i));
    }
    let amps = state.amplitudes();
    let (bi, bj) = (1usize << i, 1usize << j);
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    let local = |a: usize| ((a & bi != 0) as usize) << 1 | (a & bj != 0) as usize;
    for base in (0..amps.len()).filter(|a| a & (bi | bj) == 0) {
        let idx = [base, base | bj, base | bi, base | bi | bj];
        for r in 0..4 {
            for c in 0..4 {
                rho[local(idx[r])][local(idx[c])] += amps[idx[r]] * amps[idx[c]].conj();
            }
        }
    }
    Ok(rho)
}

/// Wootters concurrence of sites `i` and `j`.
pub fn concurrence(state: &StateVector, i: usize, j: usize) -> Result<f64> {
    let rho = two_site_rdm(state, i, j)?;
    let rho_m = DMatrix::from_fn(4, 4, |r, c| rho[r][c]);
    // σ^y⊗σ^y in the |00⟩,|01⟩,|10⟩,|11⟩ basis is the anti-diagonal (-1, 1, 1, -1).
    let yy = DMatrix::from_fn(4, 4, |r, c| {
        if r + c == 3 {
            Complex64::new(if r == 0 || r == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let flipped = &yy * rho_m.map(|z| z.conj()) * &yy;
    let eig = hermitian_eigen(rho_m);
    let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(libm::sqrt(l.max(0.0)), 0.0)));
    let sqrt_rho = &eig.eigenvectors * sqrt_d * eig.eigenvectors.adjoint();
    let r = &sqrt_rho * flipped * &sqrt_rho;
    let r = (&r + r.adjoint()).map(|z| z * 0.5);
    let mut mu: Vec<f64> = r.symmetric_eigenvalues().iter().map(|&l| libm::sqrt(l.max(0.0))).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

//! Dense state vectors on a ring of spins and the two-site gates of the cooling moves.
//!
//! Site `s` (0-based) is stored in bit `s` of the basis index, and bit value 0 is
//! spin up (σ^z = +1). Two-site operators act on the pair `(s, s + 1 mod N)`; their
//! 4×4 matrices use the local index `2·b_s + b_{s+1}`, so site `s` is the first
//! tensor factor.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Default gate time step, π/10.
pub const DEFAULT_DT: f64 = PI / 10.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Normalized amplitude vector over the `2^N` σ^z product states of an `N`-spin ring.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(n_sites: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        check_dim(n_sites, amps.len())?;
        let norm = norm_of(&amps);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n_sites, amps })
    }

    pub fn from_real(n_sites: usize, amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(n_sites, amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The product state with the given basis index.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        assert!(n_sites < usize::BITS as usize);
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(Error::SiteOutOfRange { index, n_sites });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_sites, amps })
    }

    /// |↑↑…↑⟩.
    pub fn all_up(n_sites: usize) -> Self {
        Self::basis(n_sites, 0).expect("index 0 always exists")
    }

    /// (|↑…↑⟩ + |↓…↓⟩)/√2.
    pub fn ghz(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let mut amps = vec![ZERO; dim];
        amps[0] = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[dim - 1] = amps[0];
        Self { n_sites, amps }
    }

    /// Equal superposition of the `N` single-flip states.
    pub fn w_state(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let mut amps = vec![ZERO; dim];
        let w = 1.0 / libm::sqrt(n_sites as f64);
        for s in 0..n_sites {
            amps[1 << s] = Complex64::new(w, 0.0);
        }
        Self { n_sites, amps }
    }

    /// A random normalized state with i.i.d. uniform real and imaginary parts.
    pub fn random<R: Rng + ?Sized>(n_sites: usize, rng: &mut R) -> Self {
        let dim = 1usize << n_sites;
        let amps = (0..dim)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        Self::from_amplitudes(n_sites, amps).expect("random state has nonzero norm")
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amps)
    }

    pub fn renormalize(&mut self) {
        let norm = self.norm();
        self.amps.iter_mut().for_each(|a| *a /= norm);
    }

    /// Overwrites `self` with `other` without reallocating.
    pub fn copy_from(&mut self, other: &StateVector) {
        self.n_sites = other.n_sites;
        self.amps.clear();
        self.amps.extend_from_slice(&other.amps);
    }

    /// Applies `gate` to the pair `(bond, bond + 1 mod N)` in place.
    ///
    /// Runs in `O(2^N)`: the four target amplitudes are gathered for each of
    /// the `2^{N-2}` spectator configurations.
    pub fn apply_two_site(&mut self, gate: &TwoSiteGate, bond: usize) -> Result<()> {
        let n = self.n_sites;
        if n < 2 || bond >= n {
            return Err(Error::SiteOutOfRange { index: bond, n_sites: n });
        }
        let p = bond;
        let q = (bond + 1) % n;
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        let bit_p = 1usize << p;
        let bit_q = 1usize << q;
        let u = &gate.matrix;
        for t in 0..(1usize << (n - 2)) {
            let base = insert_zero_bit(insert_zero_bit(t, lo), hi);
            let idx = [base, base | bit_q, base | bit_p, base | bit_p | bit_q];
            let a = [self.amps[idx[0]], self.amps[idx[1]], self.amps[idx[2]], self.amps[idx[3]]];
            for (r, &i) in idx.iter().enumerate() {
                let row = &u[r];
                self.amps[i] = row[0] * a[0] + row[1] * a[1] + row[2] * a[2] + row[3] * a[3];
            }
        }
        Ok(())
    }

    /// ⟨Ψ|⊗_j σ^z_j|Ψ⟩.
    pub fn parity_expectation(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(a, amp)| {
                let w = amp.norm_sqr();
                if a.count_ones() % 2 == 0 {
                    w
                } else {
                    -w
                }
            })
            .sum()
    }
}

fn check_dim(n_sites: usize, len: usize) -> Result<()> {
    if n_sites == 0 || n_sites >= usize::BITS as usize || len != 1usize << n_sites {
        return Err(Error::DimensionMismatch { len, n_sites });
    }
    Ok(())
}

fn norm_of(amps: &[Complex64]) -> f64 {
    libm::sqrt(amps.iter().map(|a| a.norm_sqr()).sum::<f64>())
}

/// Inserts a zero bit at position `pos`, shifting higher bits up.
#[inline]
fn insert_zero_bit(x: usize, pos: usize) -> usize {
    let low = x & ((1usize << pos) - 1);
    ((x >> pos) << (pos + 1)) | low
}

/// The six two-site generators `h^(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    /// σ^z ⊗ I + I ⊗ σ^z
    ZField,
    /// σ^x ⊗ σ^x
    XX,
    /// σ^y ⊗ σ^y
    YY,
    /// σ^x ⊗ I + I ⊗ σ^x
    XField,
    /// σ^y ⊗ I + I ⊗ σ^y
    YField,
    /// σ^z ⊗ σ^z
    ZZ,
}

impl GateKind {
    pub const ALL: [GateKind; 6] =
        [Self::ZField, Self::XX, Self::YY, Self::XField, Self::YField, Self::ZZ];

    /// Looks a generator up by its table number `k ∈ 1..=6`.
    pub fn from_number(k: usize) -> Result<Self> {
        k.checked_sub(1)
            .and_then(|i| Self::ALL.get(i).copied())
            .ok_or(Error::UnknownGateKind(k))
    }

    pub fn number(self) -> usize {
        self as usize + 1
    }

    /// Generators 1–3 commute with the global z-parity.
    pub fn preserves_parity(self) -> bool {
        matches!(self, Self::ZField | Self::XX | Self::YY)
    }

    fn pauli(self) -> Pauli {
        match self {
            Self::ZField | Self::ZZ => Pauli::Z,
            Self::XX | Self::XField => Pauli::X,
            Self::YY | Self::YField => Pauli::Y,
        }
    }

    fn is_product(self) -> bool {
        matches!(self, Self::XX | Self::YY | Self::ZZ)
    }

    /// The Hermitian 4×4 generator matrix.
    pub fn generator(self) -> [[Complex64; 4]; 4] {
        let s = self.pauli().matrix();
        if self.is_product() {
            kron(&s, &s)
        } else {
            let id = [[ONE, ZERO], [ZERO, ONE]];
            let a = kron(&s, &id);
            let b = kron(&id, &s);
            let mut out = [[ZERO; 4]; 4];
            for r in 0..4 {
                for c in 0..4 {
                    out[r][c] = a[r][c] + b[r][c];
                }
            }
            out
        }
    }
}

#[derive(Clone, Copy)]
enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 4]; 4] {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = a[r >> 1][c >> 1] * b[r & 1][c & 1];
        }
    }
    out
}

/// Which generators a cooling run draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateSet {
    /// Parity-preserving generators 1–3.
    Set1,
    /// All six generators.
    Universal,
}

impl GateSet {
    pub fn kinds(self) -> &'static [GateKind] {
        match self {
            GateSet::Set1 => &GateKind::ALL[..3],
            GateSet::Universal => &GateKind::ALL,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateSet::Set1 => "set1",
            GateSet::Universal => "universal",
        }
    }
}

impl core::str::FromStr for GateSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "set1" | "set-1" | "Set1" => Ok(GateSet::Set1),
            "universal" | "Universal" => Ok(GateSet::Universal),
            _ => Err(Error::InvalidConfig("gate set must be `set1` or `universal`")),
        }
    }
}

/// A 4×4 unitary acting on a neighbouring pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteGate {
    matrix: [[Complex64; 4]; 4],
}

impl TwoSiteGate {
    pub fn identity() -> Self {
        let mut matrix = [[ZERO; 4]; 4];
        for (r, row) in matrix.iter_mut().enumerate() {
            row[r] = ONE;
        }
        Self { matrix }
    }

    /// Wraps an arbitrary 4×4 matrix. Unitarity is the caller's responsibility.
    pub fn from_matrix(matrix: [[Complex64; 4]; 4]) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.matrix
    }
}

/// `exp(i·h^(k)·dt)` in closed form.
///
/// Product generators square to the identity, so the exponential is
/// `cos(dt)·I + i·sin(dt)·h`. Sum generators factor into two commuting
/// single-site rotations `exp(i·dt·σ) ⊗ exp(i·dt·σ)`.
pub fn two_site_unitary(kind: GateKind, dt: f64) -> TwoSiteGate {
    let (c, s) = (libm::cos(dt), libm::sin(dt));
    if kind.is_product() {
        let h = kind.generator();
        let mut m = [[ZERO; 4]; 4];
        for r in 0..4 {
            for col in 0..4 {
                m[r][col] = I * s * h[r][col];
            }
            m[r][r] += c;
        }
        TwoSiteGate { matrix: m }
    } else {
        let p = kind.pauli().matrix();
        let mut single = [[ZERO; 2]; 2];
        for r in 0..2 {
            for col in 0..2 {
                single[r][col] = I * s * p[r][col];
            }
            single[r][r] += c;
        }
        TwoSiteGate { matrix: kron(&single, &single) }
    }
}

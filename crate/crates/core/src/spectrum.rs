//! Level-spacing statistics of entanglement spectra.
//!
//! Consecutive spacing ratios `r_i = s_{i+1}/s_i` with `s_i = λ_{i+1} − λ_i`
//! on the ascending bulk spectrum, their order-insensitive form
//! `r̃ = min(r, 1/r)`, the Poisson and GUE reference densities, histograms and
//! the log-linear exponential fit used for finite-size scaling.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};
use rand::Rng;

use crate::error::{Error, Result};

/// `2 ln 2 − 1`
pub const POISSON_RBAR: f64 = 2.0 * LN_2 - 1.0;
/// `2√3/π − 1/2`
pub const GUE_RBAR: f64 = 2.0 * 1.732_050_807_568_877_2 / PI - 0.5;
/// `Z_{β=2} = 4π / (81√3)`
pub const GUE_NORMALIZATION: f64 = 4.0 * PI / (81.0 * 1.732_050_807_568_877_2);

/// Spacings whose denominator falls below this are treated as degenerate.
pub const DEGENERATE_SPACING: f64 = 1e-14;
pub const DEFAULT_DROP: usize = 10;
/// The drop rule never leaves fewer eigenvalues than this.
pub const MIN_SURVIVING: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RmtFamily {
    Poisson,
    WignerDysonGue,
}

impl RmtFamily {
    pub fn rbar_reference(self) -> f64 {
        match self {
            RmtFamily::Poisson => POISSON_RBAR,
            RmtFamily::WignerDysonGue => GUE_RBAR,
        }
    }

    pub fn density(self, r: f64) -> Result<f64> {
        match self {
            RmtFamily::Poisson => poisson_density(r),
            RmtFamily::WignerDysonGue => wd_gue_density(r),
        }
    }

    /// Density of `r̃ = min(r, 1/r)`, supported on `[0, 1]`. Both laws satisfy
    /// `P(1/r)/r² = P(r)`, so this is `2·P(r̃)`.
    pub fn min_max_density(self, x: f64) -> Result<f64> {
        if x > 1.0 {
            return Ok(0.0);
        }
        Ok(2.0 * self.density(x)?)
    }

    /// Cumulative distribution of the raw ratio.
    pub fn cdf(self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r.is_infinite() {
            return 1.0;
        }
        match self {
            RmtFamily::Poisson => r / (1.0 + r),
            // P(1/r)/r² = P(r) gives F(r) = 1 − F(1/r), so only [0, 1] is integrated.
            RmtFamily::WignerDysonGue if r > 1.0 => 1.0 - gue_cdf_unit(1.0 / r),
            RmtFamily::WignerDysonGue => gue_cdf_unit(r),
        }
    }
}

/// `P_Poisson(r) = (1 + r)^{-2}`.
pub fn poisson_density(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::NegativeRatio(r));
    }
    Ok(1.0 / ((1.0 + r) * (1.0 + r)))
}

/// `P_WD(r) = Z₂⁻¹ (r + r²)² (1 + r + r²)^{-4}`.
pub fn wd_gue_density(r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::NegativeRatio(r));
    }
    Ok(gue_unchecked(r))
}

#[inline]
fn gue_unchecked(r: f64) -> f64 {
    let a = r + r * r;
    let b = 1.0 + r + r * r;
    let b2 = b * b;
    a * a / (b2 * b2) / GUE_NORMALIZATION
}

// 20-point Gauss–Legendre rule on [-1, 1].
const GL_NODES: [f64; 20] = [
    -0.9931285991850949, -0.9639719272779138, -0.9122344282513258, -0.8391169718222188,
    -0.7463319064601508, -0.636053680726515, -0.5108670019508271, -0.37370608871541955,
    -0.2277858511416451, -0.07652652113349734, 0.07652652113349734, 0.2277858511416451,
    0.37370608871541955, 0.5108670019508271, 0.636053680726515, 0.7463319064601508,
    0.8391169718222188, 0.9122344282513258, 0.9639719272779138, 0.9931285991850949,
];
const GL_WEIGHTS: [f64; 20] = [
    0.017614007139153273, 0.04060142980038622, 0.06267204833410944, 0.08327674157670467,
    0.10193011981724026, 0.11819453196151825, 0.13168863844917653, 0.14209610931838187,
    0.14917298647260366, 0.15275338713072578, 0.15275338713072578, 0.14917298647260366,
    0.14209610931838187, 0.13168863844917653, 0.11819453196151825, 0.10193011981724026,
    0.08327674157670467, 0.06267204833410944, 0.04060142980038622, 0.017614007139153273,
];

/// `∫₀^r P_WD` for `r ∈ [0, 1]`, split in two panels.
fn gue_cdf_unit(r: f64) -> f64 {
    let panel = |a: f64, b: f64| {
        let (half, mid) = ((b - a) / 2.0, (a + b) / 2.0);
        half * GL_NODES.iter().zip(GL_WEIGHTS).map(|(&x, w)| w * gue_unchecked(mid + half * x)).sum::<f64>()
    };
    panel(0.0, r / 2.0) + panel(r / 2.0, r)
}

/// Inverse-CDF sampler for the raw ratio of a reference family.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceSampler {
    family: RmtFamily,
}

impl ReferenceSampler {
    pub fn new(family: RmtFamily) -> Self {
        Self { family }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match self.family {
            RmtFamily::Poisson => u / (1.0 - u),
            RmtFamily::WignerDysonGue => {
                if u <= 0.5 {
                    invert_gue_unit(u)
                } else {
                    1.0 / invert_gue_unit(1.0 - u)
                }
            }
        }
    }
}

/// Solves `F(r) = u` on `[0, 1]` for `u ∈ [0, 1/2]` by safeguarded Newton.
fn invert_gue_unit(u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut r = 0.5;
    for _ in 0..100 {
        let f = gue_cdf_unit(r) - u;
        if f.abs() < 1e-15 {
            return r;
        }
        if f > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        if hi - lo < 1e-15 {
            break;
        }
        let d = gue_unchecked(r);
        let newton = r - f / d;
        r = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    0.5 * (lo + hi)
}

/// Raw spacing ratios of one spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingRatios {
    pub raw: Vec<f64>,
    /// Ratios discarded because their denominator spacing was degenerate.
    pub n_degenerate: usize,
}

/// Number of largest eigenvalues actually dropped from a spectrum of `len`
/// values: `n_drop`, reduced so that at least [`MIN_SURVIVING`] remain.
pub fn effective_drop(len: usize, n_drop: usize) -> usize {
    n_drop.min(len.saturating_sub(MIN_SURVIVING))
}

/// Drops the `n_drop` largest eigenvalues, sorts the rest ascending and
/// returns `r_i = s_{i+1}/s_i`.
pub fn spacing_ratios(eigenvalues: &[f64], n_drop: usize) -> Result<SpacingRatios> {
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let remaining = sorted.len().saturating_sub(n_drop);
    if remaining < 3 {
        return Err(Error::TooFewEigenvalues { remaining });
    }
    let mut bulk = sorted.split_off(n_drop.min(sorted.len()));
    bulk.reverse();
    let spacings: Vec<f64> = bulk.windows(2).map(|w| w[1] - w[0]).collect();
    let mut raw = Vec::with_capacity(spacings.len() - 1);
    let mut n_degenerate = 0;
    for w in spacings.windows(2) {
        if w[0] < DEGENERATE_SPACING {
            n_degenerate += 1;
        } else {
            raw.push(w[1] / w[0]);
        }
    }
    Ok(SpacingRatios { raw, n_degenerate })
}

/// `min(r, 1/r)`
#[inline]
pub fn min_max_ratio(r: f64) -> f64 {
    if r > 1.0 {
        1.0 / r
    } else {
        r
    }
}

/// Spacing ratios pooled over many spectra.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpacingEnsemble {
    pub ratios: Vec<f64>,
    pub n_degenerate: usize,
    pub n_spectra: usize,
}

impl SpacingEnsemble {
    /// Pools the spacing ratios of `spectra`, dropping
    /// [`effective_drop`]`(len, n_drop)` largest eigenvalues from each.
    pub fn from_spectra<'a, I>(spectra: I, n_drop: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut out = Self::default();
        for eigenvalues in spectra {
            let r = spacing_ratios(eigenvalues, effective_drop(eigenvalues.len(), n_drop))?;
            out.ratios.extend(r.raw);
            out.n_degenerate += r.n_degenerate;
            out.n_spectra += 1;
        }
        Ok(out)
    }

    pub fn min_max_ratios(&self) -> Vec<f64> {
        self.ratios.iter().map(|&r| min_max_ratio(r)).collect()
    }

    /// Mean of `min(s_i, s_{i+1}) / max(s_i, s_{i+1})` over all pooled ratios.
    pub fn rbar(&self) -> Result<f64> {
        if self.ratios.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        Ok(self.ratios.iter().map(|&r| min_max_ratio(r)).sum::<f64>() / self.ratios.len() as f64)
    }
}

/// `r̄` over a collection of spectra, each preprocessed like [`spacing_ratios`].
pub fn rbar<'a, I>(spectra: I, n_drop: usize) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    SpacingEnsemble::from_spectra(spectra, n_drop)?.rbar()
}

/// Equal-width histogram normalized to unit area over its range.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub densities: Vec<f64>,
    /// Samples that fell outside `[lo, hi]` and were not counted.
    pub n_outside: usize,
}

impl Histogram {
    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.densities.len() as f64
    }

    pub fn bin_edges(&self, bin: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + w * bin as f64, self.lo + w * (bin + 1) as f64)
    }

    /// `Σ_b |h_b − p̄_b|·width`, with `p̄_b` the bin average of `reference`
    /// (five-point Gauss–Legendre per bin).
    pub fn l1_distance(&self, reference: impl Fn(f64) -> f64) -> f64 {
        let w = self.width();
        self.densities
            .iter()
            .enumerate()
            .map(|(b, &h)| (h - bin_average(&reference, self.bin_edges(b))).abs() * w)
            .sum()
    }
}

/// Mean of `f` over `[a, b]` by the five-point Gauss–Legendre rule.
pub fn bin_average(f: impl Fn(f64) -> f64, (a, b): (f64, f64)) -> f64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1, 0.236_926_885_056_189_1];
    let (half, mid) = ((b - a) / 2.0, (a + b) / 2.0);
    X.iter().zip(W).map(|(&x, w)| w * f(mid + half * x)).sum::<f64>() / 2.0
}

pub fn histogram(values: &[f64], n_bins: usize, (lo, hi): (f64, f64)) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if n_bins == 0 || !(hi > lo) {
        return Err(Error::InvalidConfig("histogram needs at least one bin and hi > lo"));
    }
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    let mut n_outside = 0;
    for &v in values {
        if !(v >= lo && v <= hi) {
            n_outside += 1;
            continue;
        }
        let bin = (((v - lo) / width) as usize).min(n_bins - 1);
        counts[bin] += 1;
    }
    let inside = (values.len() - n_outside).max(1) as f64;
    let densities = counts.iter().map(|&c| c as f64 / (inside * width)).collect();
    Ok(Histogram { lo, hi, densities, n_outside })
}

/// `y = a·e^{bN}` fitted by least squares on `ln y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub a: f64,
    pub b: f64,
    /// RMS residual in log space.
    pub residual: f64,
}

pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExponentialFit> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    if let Some(&(_, y)) = points.iter().find(|(_, y)| !(*y > 0.0)) {
        return Err(Error::NonPositiveOrdinate(y));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| libm::log(p.1)).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("exponential fit needs distinct abscissae"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (libm::log(p.1) - my)).sum();
    let b = sxy / sxx;
    let intercept = my - b * mx;
    let sq: f64 = points
        .iter()
        .map(|p| {
            let d = libm::log(p.1) - (intercept + b * p.0);
            d * d
        })
        .sum();
    Ok(ExponentialFit { a: libm::exp(intercept), b, residual: libm::sqrt(sq / n) })
}

//! Restarted Lanczos with full reorthogonalization for the lowest eigenpair of
//! a real symmetric operator, with optional deflation against known vectors.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

/// A real symmetric linear operator applied matrix-free.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    /// `y ← A·x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Krylov subspace size before an explicit restart.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Residual tolerance relative to the operator-norm scale.
    pub rel_tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { krylov_dim: 64, max_restarts: 400, rel_tol: 1e-11 }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = libm::sqrt(dot(v, v));
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(b, v);
        axpy(-c, b, v);
    }
}

/// Deterministic pseudo-random start vector with support on every component.
/// A different `salt` gives a different vector; deflated solves must not reuse
/// the start vector, or they never see degenerate partners of earlier vectors.
pub(crate) fn start_vector(dim: usize, salt: u64) -> Vec<f64> {
    let offset = salt.wrapping_mul(0xd1b5_4a32_d192_ed03);
    (0..dim as u64)
        .map(|i| {
            let mut z = (i ^ offset).wrapping_add(0x9e37_79b9_7f4a_7c15);
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Lowest eigenpair of `op` restricted to the orthogonal complement of `locked`.
///
/// `scale` is an upper bound on the operator norm. Returns `None` when `locked`
/// already spans the whole space.
pub fn lowest_eigenpair<O: SymmetricOperator>(
    op: &O,
    locked: &[Vec<f64>],
    scale: f64,
    opts: &LanczosOptions,
) -> Result<Option<(f64, Vec<f64>)>> {
    let dim = op.dim();
    if locked.len() >= dim {
        return Ok(None);
    }
    let mut v0 = start_vector(dim, locked.len() as u64);
    project_out(&mut v0, locked);
    project_out(&mut v0, locked);
    if normalize(&mut v0) < 1e-12 {
        // The fixed start vector lies in span(locked); fall back to unit vectors.
        let found = (0..dim).find_map(|i| {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            project_out(&mut e, locked);
            project_out(&mut e, locked);
            (normalize(&mut e) > 1e-6).then_some(e)
        });
        match found {
            Some(e) => v0 = e,
            None => return Ok(None),
        }
    }

    let m = opts.krylov_dim.min(dim - locked.len()).max(1);
    let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut w = vec![0.0; dim];

    for _ in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut alphas = Vec::with_capacity(m);
        let mut betas: Vec<f64> = Vec::with_capacity(m);
        basis.push(v0.clone());
        let mut exhausted = false;
        loop {
            let k = basis.len() - 1;
            op.apply(&basis[k], &mut w);
            iterations += 1;
            alphas.push(dot(&basis[k], &w));
            // Two passes of classical Gram-Schmidt keep the basis orthogonal to
            // working precision.
            for _ in 0..2 {
                project_out(&mut w, locked);
                project_out(&mut w, &basis);
            }
            let beta = libm::sqrt(dot(&w, &w));
            betas.push(beta);
            if beta <= tiny {
                exhausted = true;
                break;
            }
            if basis.len() == m {
                break;
            }
            basis.push(w.iter().map(|x| x / beta).collect());
        }

        let size = alphas.len();
        let t = DMatrix::from_fn(size, size, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c {
                betas[r]
            } else if c + 1 == r {
                betas[c]
            } else {
                0.0
            }
        });
        let (values, vectors) = symmetric_eigen(t);
        let theta = values[0];
        let last = vectors[(size - 1, 0)];
        residual = if exhausted { 0.0 } else { (betas[size - 1] * last).abs() };

        let mut ritz = vec![0.0; dim];
        for (i, b) in basis.iter().enumerate() {
            axpy(vectors[(i, 0)], b, &mut ritz);
        }
        project_out(&mut ritz, locked);
        normalize(&mut ritz);

        if residual <= opts.rel_tol * scale || exhausted {
            return Ok(Some((theta, ritz)));
        }
        v0 = ritz;
    }
    Err(Error::NoConvergence { iterations, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diag(Vec<f64>);

    impl SymmetricOperator for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    struct Path(usize);

    impl SymmetricOperator for Path {
        fn dim(&self) -> usize {
            self.0
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            let n = self.0;
            for i in 0..n {
                let mut acc = 2.0 * x[i];
                if i > 0 {
                    acc -= x[i - 1];
                }
                if i + 1 < n {
                    acc -= x[i + 1];
                }
                y[i] = acc;
            }
        }
    }

    #[test]
    fn diagonal_operator_with_deflation() {
        let op = Diag(vec![3.0, -1.0, 2.0, -1.0, 5.0]);
        let opts = LanczosOptions::default();
        let (e0, v0) = lowest_eigenpair(&op, &[], 5.0, &opts).unwrap().unwrap();
        assert!((e0 + 1.0).abs() < 1e-12);
        let (e1, v1) = lowest_eigenpair(&op, &[v0.clone()], 5.0, &opts).unwrap().unwrap();
        assert!((e1 + 1.0).abs() < 1e-12, "{e1}");
        assert!(dot(&v0, &v1).abs() < 1e-10);
        let (e2, _) = lowest_eigenpair(&op, &[v0, v1], 5.0, &opts).unwrap().unwrap();
        assert!((e2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn path_laplacian_lowest_mode() {
        let n = 300;
        let op = Path(n);
        let (e0, _) = lowest_eigenpair(&op, &[], 4.0, &LanczosOptions::default()).unwrap().unwrap();
        let exact = 2.0 - 2.0 * libm::cos(core::f64::consts::PI / (n as f64 + 1.0));
        assert!((e0 - exact).abs() < 1e-10, "{e0} vs {exact}");
    }

    #[test]
    fn full_space_locked_returns_none() {
        let op = Diag(vec![1.0, 2.0]);
        let locked = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(lowest_eigenpair(&op, &locked, 2.0, &LanczosOptions::default()).unwrap().is_none());
    }
}

//! Exact action of a two-mode passive unitary on photon-number blocks.
//!
//! For `w` acting on modes `(i, j)` the creation operators transform as
//! `a_i† -> w_ii a_i† + w_ji a_j†` and `a_j† -> w_ij a_i† + w_jj a_j†`.
//! `w` is split as `diag(e^{ix}) R(θ) diag(e^{iy})`. Phases act diagonally;
//! the real rotation is `exp(θG)` with `G = a_j† a_i - a_i† a_j`, which on
//! the `N`-photon block is a tridiagonal antisymmetric matrix with known
//! spectrum `i{-N, -N+2, ..., N}`. Its eigenvectors depend only on `N` and
//! are cached, so every block is unitary to rounding error at any `N`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{base_offsets, strides, FockState, MAX_CUTOFF};
use crate::symplectic::CMat2;

const MAX_BLOCK: usize = 2 * MAX_CUTOFF;

static EIGENVECTORS: [OnceLock<DMatrix<f64>>; MAX_BLOCK + 1] =
    [const { OnceLock::new() }; MAX_BLOCK + 1];

/// Orthogonal `Q` with `T = Q diag(λ) Qᵀ`, where `T` has off-diagonals
/// `-sqrt(k (N - k + 1))`; columns sorted so that `λ_m = 2m - N`.
fn eigenvectors(n: usize) -> &'static DMatrix<f64> {
    EIGENVECTORS[n].get_or_init(|| {
        let dim = n + 1;
        let mut t = DMatrix::<f64>::zeros(dim, dim);
        for k in 1..dim {
            let b = ((k * (n - k + 1)) as f64).sqrt();
            t[(k - 1, k)] = -b;
            t[(k, k - 1)] = -b;
        }
        let eig = SymmetricEigen::new(t);
        let mut q = DMatrix::<f64>::zeros(dim, dim);
        for (col, &lambda) in eig.eigenvalues.iter().enumerate() {
            let m = ((lambda + n as f64) / 2.0).round() as usize;
            q.set_column(m, &eig.eigenvectors.column(col));
        }
        q
    })
}

/// `(x1, x2, θ, y1, y2)` with `w = diag(e^{ix1}, e^{ix2}) R(θ) diag(e^{iy1}, e^{iy2})`.
fn euler(w: &CMat2) -> (f64, f64, f64, f64, f64) {
    let (c, s) = (w[(0, 0)].norm(), w[(1, 0)].norm());
    let theta = s.atan2(c);
    if s < 1e-300 {
        return (w[(0, 0)].arg(), w[(1, 1)].arg(), 0.0, 0.0, 0.0);
    }
    if c < 1e-300 {
        return (
            (-w[(0, 1)]).arg(),
            w[(1, 0)].arg(),
            theta,
            0.0,
            0.0,
        );
    }
    let x1 = w[(0, 0)].arg();
    let x2 = w[(1, 0)].arg();
    (x1, x2, theta, 0.0, (-w[(0, 1)]).arg() - x1)
}

/// Unitary blocks `M_N[k', k] = ⟨k', N-k'| U |k, N-k⟩` for `N = 0..=max_n`,
/// where `k` counts photons in mode `i`.
pub(crate) struct BlockMatrices {
    blocks: Vec<Vec<Complex64>>,
}

impl BlockMatrices {
    pub(crate) fn new(w: &CMat2, max_n: usize) -> Self {
        assert!(max_n <= MAX_BLOCK, "photon-number block {max_n} too large");
        let (x1, x2, theta, y1, y2) = euler(w);
        let blocks = (0..=max_n)
            .map(|n| {
                let dim = n + 1;
                let q = eigenvectors(n);
                let spec: Vec<Complex64> = (0..dim)
                    .map(|m| Complex64::from_polar(1.0, -theta * (2.0 * m as f64 - n as f64)))
                    .collect();
                // D = diag(i^k) undoes the similarity T = D† (iG) D
                let ipow = |k: usize| Complex64::i().powu((k % 4) as u32);
                let phase = |k: usize, a: f64, b: f64| {
                    Complex64::from_polar(1.0, a * k as f64 + b * (n - k) as f64)
                };
                let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
                for kp in 0..dim {
                    let left = ipow(kp) * phase(kp, x1, x2);
                    for k in 0..dim {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for m in 0..dim {
                            acc += spec[m] * (q[(kp, m)] * q[(k, m)]);
                        }
                        out[kp * dim + k] = left * acc * ipow(k).conj() * phase(k, y1, y2);
                    }
                }
                out
            })
            .collect();
        Self { blocks }
    }

    pub(crate) fn block(&self, n: usize) -> &[Complex64] {
        &self.blocks[n]
    }
}

/// Applies `w` on modes `(i, j)` (0-based) in place and returns the
/// probability mass that left the truncated space.
pub(crate) fn apply_two_mode(state: &mut FockState, i: usize, j: usize, w: &CMat2) -> f64 {
    let cutoffs = state.cutoffs;
    let (ci, cj) = (cutoffs[i], cutoffs[j]);
    let st = strides(&cutoffs);
    let (si, sj) = (st[i], st[j]);
    let max_n = ci + cj;
    let mats = BlockMatrices::new(w, max_n);
    let zero = Complex64::new(0.0, 0.0);

    let mut lost = 0.0;
    let mut x = vec![zero; max_n + 1];
    let mut y = vec![zero; max_n + 1];
    for base in base_offsets(&cutoffs, &[i, j]) {
        for n in 0..=max_n {
            let kmin = n.saturating_sub(cj);
            let kmax = n.min(ci);
            let mut any = false;
            for k in kmin..=kmax {
                x[k] = state.amp[base + k * si + (n - k) * sj];
                any |= x[k] != zero;
            }
            if !any {
                continue;
            }
            let m = mats.block(n);
            let dim = n + 1;
            for (kp, yk) in y.iter_mut().enumerate().take(dim) {
                let row = &m[kp * dim..kp * dim + dim];
                *yk = (kmin..=kmax).map(|k| row[k] * x[k]).sum();
            }
            for (kp, yk) in y.iter().enumerate().take(dim) {
                if kp < kmin || kp > kmax {
                    lost += yk.norm_sqr();
                } else {
                    state.amp[base + kp * si + (n - kp) * sj] = *yk;
                }
            }
        }
    }
    lost
}

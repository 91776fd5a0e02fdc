//! Single-mode squeezing `exp[u (a² - a†²) / 2]`.
//!
//! The generator is exponentiated in a padded space and only the block
//! inside the cutoff is kept. The padding is chosen from the decay of the
//! squeezed-vacuum coefficients, `tanh|u|^n`, so that reflections from the
//! artificial boundary are far below double precision.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{base_offsets, check_tail, strides, FockState};
use crate::error::{Error, Result};
use crate::symplectic::mode_index;

/// Largest `|u|` the Fock backend accepts.
pub const MAX_FOCK_SQUEEZE: f64 = 2.0;

fn padding(u: f64) -> usize {
    let decay = -u.abs().tanh().ln();
    // the boundary coupling enters at order tanh^(pad/2); ask for e^-74
    let want = if decay.is_finite() { 74.0 / decay } else { 0.0 };
    want.clamp(40.0, 600.0) as usize
}

/// `⟨m| exp(uG) |n⟩` for `m, n <= cutoff`.
fn squeeze_block(u: f64, cutoff: usize) -> DMatrix<f64> {
    let dim = cutoff + 1 + padding(u);
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for n in 0..dim {
        if n >= 2 {
            g[(n - 2, n)] = ((n * (n - 1)) as f64).sqrt() / 2.0;
        }
        if n + 2 < dim {
            g[(n + 2, n)] = -(((n + 1) * (n + 2)) as f64).sqrt() / 2.0;
        }
    }
    (g * u).exp().view((0, 0), (cutoff + 1, cutoff + 1)).into_owned()
}

/// Squeezes one mode (1-based) by `u`, so that `q -> e^-u q` in the
/// Heisenberg picture, matching the phase-space squeezer.
///
/// Mass pushed above the cutoff is measured; more than the truncation
/// budget is an error.
pub fn apply_squeeze(s: &FockState, mode: usize, u: f64) -> Result<FockState> {
    let k = mode_index(mode)?;
    if !u.is_finite() || u.abs() > MAX_FOCK_SQUEEZE {
        return Err(Error::invalid(format!(
            "Fock squeezing needs |u| <= {MAX_FOCK_SQUEEZE}, got {u}"
        )));
    }
    let mut out = s.clone();
    if u == 0.0 {
        return Ok(out);
    }
    let c = s.cutoffs[k];
    let m = squeeze_block(u, c);
    let stride = strides(&s.cutoffs)[k];
    let zero = Complex64::new(0.0, 0.0);
    let mut lost = 0.0;
    let mut x = vec![zero; c + 1];
    for base in base_offsets(&s.cutoffs, &[k]) {
        let mut before = 0.0;
        for (n, xn) in x.iter_mut().enumerate() {
            *xn = s.amp[base + n * stride];
            before += xn.norm_sqr();
        }
        if before == 0.0 {
            continue;
        }
        let mut after = 0.0;
        for r in 0..=c {
            let y: Complex64 = (0..=c).map(|n| x[n] * m[(r, n)]).sum();
            after += y.norm_sqr();
            out.amp[base + r * stride] = y;
        }
        lost += (before - after).max(0.0);
    }
    check_tail(lost)?;
    out.add_tail(lost);
    Ok(out)
}

//! Vacuum projections behind rotated polarizers.
//!
//! The phase-space formula rotates the state's `G` matrix as `UᵀGU`, which
//! for the state itself is the passive map `R(θ1)† ⊕ R(θ2)†`. After that,
//! mode 1 (3) is the polarizer's transmitted mode `cos θ a1 + sin θ a2` and
//! the projector is a plain sum over configurations with those modes empty.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::passive::apply_block;
use super::{base_offsets, DensityFock, FockState};
use crate::error::Result;
use crate::gaussian::mode_mask;
use crate::symplectic::{CMat2, MODES};

/// Vacuum probabilities entering one coincidence rate: direction `k` alone,
/// direction `k′` alone, and both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumProbabilities {
    pub a: f64,
    pub b: f64,
    pub ab: f64,
}

fn inverse_rotation(theta: f64) -> CMat2 {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, -s, c).map(|x| Complex64::new(x, 0.0))
}

/// Probability that every masked mode is empty.
pub(crate) fn vacuum_mass(s: &FockState, mask: &[bool; MODES]) -> f64 {
    let empty: Vec<usize> = (0..MODES).filter(|&k| mask[k]).collect();
    base_offsets(&s.cutoffs, &empty)
        .into_iter()
        .map(|o| s.amp[o].norm_sqr())
        .sum()
}

/// Moves the polarizer's transmitted mode into mode 1 (angle `a`) and
/// mode 3 (angle `b`); `None` leaves that pair alone.
pub(crate) fn rotated(s: &FockState, a: Option<f64>, b: Option<f64>) -> Result<FockState> {
    let mut out = s.clone();
    for (i, theta) in [(0, a), (2, b)] {
        if let Some(theta) = theta {
            apply_block(&mut out, i, i + 1, &inverse_rotation(theta))?;
        }
    }
    Ok(out)
}

/// Rotates the mode pairs that are only partly projected.
fn rotate_for(s: &FockState, mask: &[bool; MODES], theta1: f64, theta2: f64) -> Result<FockState> {
    let partial = |i: usize| mask[i] != mask[i + 1];
    rotated(
        s,
        partial(0).then_some(theta1),
        partial(2).then_some(theta2),
    )
}

/// `Tr(ρ Π_{i∈modes} |0⟩⟨0|_i)` in the polarizer frame `(θ1, θ2)`, with
/// 1-based mode labels.
pub fn polarizer_vacuum_prob(
    s: &FockState,
    modes: &[usize],
    theta1: f64,
    theta2: f64,
) -> Result<f64> {
    let mask = mode_mask(modes)?;
    let r = rotate_for(s, &mask, theta1, theta2)?;
    Ok(vacuum_mass(&r, &mask))
}

/// The three projections for polarizer angles `a` (direction `k`) and `b`
/// (direction `k′`); `None` means the polarizer is removed and both modes of
/// that direction are projected.
pub fn vacuum_probabilities(
    s: &FockState,
    a: Option<f64>,
    b: Option<f64>,
) -> Result<VacuumProbabilities> {
    let ma = [true, a.is_none(), false, false];
    let mb = [false, false, true, b.is_none()];
    let mab = [true, a.is_none(), true, b.is_none()];
    let r = rotate_for(s, &mab, a.unwrap_or(0.0), b.unwrap_or(0.0))?;
    Ok(VacuumProbabilities {
        a: vacuum_mass(&r, &ma),
        b: vacuum_mass(&r, &mb),
        ab: vacuum_mass(&r, &mab),
    })
}

impl DensityFock {
    /// Branch-summed [`polarizer_vacuum_prob`].
    pub fn polarizer_vacuum_prob(&self, modes: &[usize], theta1: f64, theta2: f64) -> Result<f64> {
        let parts = self
            .branches()
            .par_iter()
            .map(|b| polarizer_vacuum_prob(b, modes, theta1, theta2))
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.iter().sum())
    }

    /// Branch-summed [`vacuum_probabilities`].
    pub fn vacuum_probabilities(&self, a: Option<f64>, b: Option<f64>) -> Result<VacuumProbabilities> {
        let parts = self
            .branches()
            .par_iter()
            .map(|s| vacuum_probabilities(s, a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(parts.iter().fold(VacuumProbabilities { a: 0.0, b: 0.0, ab: 0.0 }, |acc, p| {
            VacuumProbabilities {
                a: acc.a + p.a,
                b: acc.b + p.b,
                ab: acc.ab + p.ab,
            }
        }))
    }
}

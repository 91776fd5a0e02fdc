//! Zero-mean Gaussian states described by their 8×8 covariance matrix.

use nalgebra::{Cholesky, SMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symplectic::{
    beta, embed_passive, max_entangler, polarizer_rotation, squeezer_block, symplectic_defect,
    Mat8, SqueezeParams, SymplecticMap, MODES, VALIDATION_TOL,
};

/// Matrices with a larger condition number are refused rather than
/// inverted or factorized.
pub const MAX_CONDITION: f64 = 1e12;

const OVERLAP_SLACK: f64 = 1e-9;

/// `κ = tanh(ħω / 2kT)`; `κ = 1` is the vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParam(f64);

impl ThermalParam {
    pub fn new(kappa: f64) -> Result<Self> {
        if kappa > 0.0 && kappa <= 1.0 {
            Ok(Self(kappa))
        } else {
            Err(Error::invalid(format!("kappa must lie in (0, 1], got {kappa}")))
        }
    }

    pub fn zero_temperature() -> Self {
        Self(1.0)
    }

    pub fn kappa(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    v: Mat8,
}

/// `G = V⁻¹ / 2`, the quadratic form of the Gaussian Wigner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GMatrix {
    g: Mat8,
}

impl GMatrix {
    pub fn matrix(&self) -> &Mat8 {
        &self.g
    }
}

fn condition_number(m: &Mat8) -> f64 {
    let eig = m.symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &l| (lo.min(l.abs()), hi.max(l.abs())));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Cholesky factor of a symmetric positive-definite matrix, refusing
/// near-singular input.
fn spd_factor(m: &Mat8) -> Result<Cholesky<f64, nalgebra::Const<8>>> {
    let condition = condition_number(m);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    Cholesky::new(*m).ok_or(Error::IllConditioned { condition })
}

fn log_det(chol: &Cholesky<f64, nalgebra::Const<8>>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
}

fn symmetrize(m: &Mat8) -> Mat8 {
    (m + m.transpose()) * 0.5
}

impl GaussianState {
    /// Validates symmetry, positivity and the uncertainty relation
    /// `V + (i/2)β ⪰ 0`.
    pub fn new(v: Mat8) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("covariance has non-finite entries"));
        }
        let scale = v.amax().max(1.0);
        if (v - v.transpose()).amax() > 1e-12 * scale {
            return Err(Error::invalid("covariance matrix is not symmetric"));
        }
        let v = symmetrize(&v);
        if v.symmetric_eigenvalues().min() <= 0.0 {
            return Err(Error::invalid("covariance matrix is not positive definite"));
        }
        let lowest = uncertainty_margin(&v);
        if lowest < -VALIDATION_TOL * scale {
            return Err(Error::invalid(format!(
                "covariance violates the uncertainty relation (eigenvalue {lowest:.3e})"
            )));
        }
        Ok(Self { v })
    }

    pub fn vacuum() -> Self {
        Self { v: Mat8::identity() * 0.5 }
    }

    pub fn covariance(&self) -> &Mat8 {
        &self.v
    }

    /// `V' = m V mᵀ`.
    pub fn apply_symplectic(&self, m: &SymplecticMap) -> Result<Self> {
        let defect = symplectic_defect(m.matrix());
        if defect > VALIDATION_TOL {
            return Err(Error::invalid(format!(
                "map is not symplectic (defect {defect:.3e})"
            )));
        }
        let s = m.matrix();
        Ok(Self {
            v: symmetrize(&(s * self.v * s.transpose())),
        })
    }

    /// Mixes every mode with its own vacuum ancilla on a beam splitter of
    /// transmittance `t` and discards the ancillas: `V' = tV + (1-t)/2 I`.
    pub fn attenuate(&self, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!("transmittance {t} not in [0, 1]")));
        }
        Ok(Self {
            v: self.v * t + Mat8::identity() * ((1.0 - t) / 2.0),
        })
    }

    pub fn g_matrix(&self) -> Result<GMatrix> {
        let chol = spd_factor(&self.v)?;
        Ok(GMatrix {
            g: symmetrize(&(chol.inverse() * 0.5)),
        })
    }

    /// Probability that every listed mode (1-based) is empty once the
    /// polarizer frame is rotated by `(θ1, θ2)`:
    ///
    /// `2^|M| sqrt(det G / det(UᵀGU + Σ_{i∈M} (e_ii + e_{i+4,i+4})))`.
    pub fn vacuum_overlap(&self, modes: &[usize], theta1: f64, theta2: f64) -> Result<f64> {
        let mask = mode_mask(modes)?;
        let g = self.g_matrix()?;
        let u = polarizer_rotation(theta1, theta2);
        let mut a = u.matrix().transpose() * g.g * u.matrix();
        let mut count = 0;
        for (k, &on) in mask.iter().enumerate() {
            if on {
                a[(k, k)] += 1.0;
                a[(k + MODES, k + MODES)] += 1.0;
                count += 1;
            }
        }
        let a = symmetrize(&a);
        let log_ratio = log_det(&spd_factor(&g.g)?) - log_det(&spd_factor(&a)?);
        let p = f64::from(1u32 << count) * (0.5 * log_ratio).exp();
        if !(-OVERLAP_SLACK..=1.0 + OVERLAP_SLACK).contains(&p) {
            return Err(Error::NumericalFailure(format!(
                "vacuum overlap {p} outside [0, 1]"
            )));
        }
        Ok(p.clamp(0.0, 1.0))
    }
}

fn uncertainty_margin(v: &Mat8) -> f64 {
    let b = beta();
    let h: SMatrix<Complex64, 8, 8> =
        SMatrix::from_fn(|i, j| Complex64::new(v[(i, j)], 0.5 * b[(i, j)]));
    h.symmetric_eigenvalues().min()
}

/// Validates a nonempty set of 1-based mode labels.
pub(crate) fn mode_mask(modes: &[usize]) -> Result<[bool; MODES]> {
    if modes.is_empty() {
        return Err(Error::invalid("mode set must be nonempty"));
    }
    let mut mask = [false; MODES];
    for &m in modes {
        let k = crate::symplectic::mode_index(m)?;
        mask[k] = true;
    }
    Ok(mask)
}

/// `V0 = I / (2κ)`.
pub fn thermal_state(t: ThermalParam) -> GaussianState {
    GaussianState {
        v: Mat8::identity() / (2.0 * t.kappa()),
    }
}

/// `K S(u, v)` applied to a thermal input. With `κ = 1` and `v = -u` this is
/// `TMSV13 ⊗ TMSV24`.
pub fn squeezed_entangled(p: SqueezeParams, t: ThermalParam) -> GaussianState {
    let k = embed_passive(&max_entangler());
    let s = k.compose(&squeezer_block(p));
    thermal_state(t)
        .apply_symplectic(&s)
        .expect("K S(u, v) is symplectic")
}

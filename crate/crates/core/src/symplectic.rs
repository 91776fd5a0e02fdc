//! Linear phase-space maps on four modes.
//!
//! Quadratures are always ordered `(q1, q2, q3, q4, p1, p2, p3, p4)` and a
//! mode's annihilation operator is `a = (q + i p) / sqrt(2)`. A passive
//! unitary `u` acts on the annihilation operators as `a -> u a`; its
//! quadrature image is `[[X, Y], [-Y, X]]` with `u = X - iY`.

use nalgebra::{Matrix2, Matrix4, SMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat8 = SMatrix<f64, 8, 8>;
pub type CMat4 = Matrix4<Complex64>;
pub type CMat2 = Matrix2<Complex64>;

pub const MODES: usize = 4;

/// Tolerance used when validating constructor inputs.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Largest squeeze amount accepted by [`SqueezeParams`].
pub const MAX_SQUEEZE: f64 = 5.0;

/// The symplectic form `[[0, I4], [-I4, 0]]`.
pub fn beta() -> Mat8 {
    let mut b = Mat8::zeros();
    for i in 0..MODES {
        b[(i, i + MODES)] = 1.0;
        b[(i + MODES, i)] = -1.0;
    }
    b
}

/// Largest entry of `m β mᵀ - β`.
pub fn symplectic_defect(m: &Mat8) -> f64 {
    (m * beta() * m.transpose() - beta()).amax()
}

/// Largest entry of `mᵀ m - I`.
pub fn orthogonality_defect(m: &Mat8) -> f64 {
    (m.transpose() * m - Mat8::identity()).amax()
}

/// Largest entry of `u u† - I`.
pub fn unitarity_defect(u: &CMat4) -> f64 {
    (u * u.adjoint() - CMat4::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn unitarity_defect2(u: &CMat2) -> f64 {
    (u * u.adjoint() - CMat2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Converts a 1-based mode label into a 0-based index.
pub fn mode_index(mode: usize) -> Result<usize> {
    if (1..=MODES).contains(&mode) {
        Ok(mode - 1)
    } else {
        Err(Error::invalid(format!("mode {mode} is not in 1..=4")))
    }
}

fn mode_pair(i: usize, j: usize) -> Result<(usize, usize)> {
    let (a, b) = (mode_index(i)?, mode_index(j)?);
    if a == b {
        return Err(Error::invalid(format!("modes must differ, got {i} twice")));
    }
    Ok((a, b))
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {x}")))
    }
}

/// A real 8×8 matrix preserving the symplectic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticMap {
    m: Mat8,
}

impl SymplecticMap {
    pub fn new(m: Mat8) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("symplectic map has non-finite entries"));
        }
        let defect = symplectic_defect(&m);
        if defect > VALIDATION_TOL {
            return Err(Error::invalid(format!(
                "matrix is not symplectic (defect {defect:.3e})"
            )));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: Mat8::identity() }
    }

    pub fn matrix(&self) -> &Mat8 {
        &self.m
    }

    /// `self · other`; acting on quadratures, `other` is applied first.
    pub fn compose(&self, other: &SymplecticMap) -> SymplecticMap {
        SymplecticMap { m: self.m * other.m }
    }

    pub fn transpose(&self) -> SymplecticMap {
        SymplecticMap { m: self.m.transpose() }
    }

    /// Exact inverse `-β mᵀ β`.
    pub fn inverse(&self) -> SymplecticMap {
        let b = beta();
        SymplecticMap { m: -(b * self.m.transpose() * b) }
    }

    /// Orthogonal symplectic matrices are exactly the passive (photon-number
    /// conserving) ones.
    pub fn is_passive(&self, tol: f64) -> bool {
        orthogonality_defect(&self.m) <= tol
    }
}

/// Squeeze amounts: `u` on modes 1 and 2, `v` on modes 3 and 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    pub u: f64,
    pub v: f64,
}

impl SqueezeParams {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        check_finite("u", u)?;
        check_finite("v", v)?;
        if u.abs() > MAX_SQUEEZE || v.abs() > MAX_SQUEEZE {
            return Err(Error::invalid(format!(
                "squeeze amounts must satisfy |u|, |v| <= {MAX_SQUEEZE}, got ({u}, {v})"
            )));
        }
        Ok(Self { u, v })
    }
}

/// `diag(e^-u, e^-u, e^-v, e^-v, e^u, e^u, e^v, e^v)`.
pub fn squeezer_block(p: SqueezeParams) -> SymplecticMap {
    let (u, v) = (p.u, p.v);
    let d = [-u, -u, -v, -v, u, u, v, v].map(f64::exp);
    SymplecticMap {
        m: Mat8::from_diagonal(&d.into()),
    }
}

/// Phase rotation `[[cos φ, sin φ], [-sin φ, cos φ]]` on `(q_mode, p_mode)`.
pub fn phase_shift(mode: usize, phi: f64) -> Result<SymplecticMap> {
    let k = mode_index(mode)?;
    check_finite("phase", phi)?;
    let (s, c) = phi.sin_cos();
    let mut m = Mat8::identity();
    m[(k, k)] = c;
    m[(k, k + MODES)] = s;
    m[(k + MODES, k)] = -s;
    m[(k + MODES, k + MODES)] = c;
    Ok(SymplecticMap { m })
}

/// Beam splitter of transmittance `cos²θ` mixing modes `i` and `j`:
/// `a_i -> cos θ a_i - sin θ a_j`, `a_j -> sin θ a_i + cos θ a_j`.
pub fn beam_splitter(i: usize, j: usize, theta: f64) -> Result<SymplecticMap> {
    let (a, b) = mode_pair(i, j)?;
    check_finite("beam splitter angle", theta)?;
    let (s, c) = theta.sin_cos();
    let mut m = Mat8::identity();
    for off in [0, MODES] {
        m[(a + off, a + off)] = c;
        m[(a + off, b + off)] = -s;
        m[(b + off, a + off)] = s;
        m[(b + off, b + off)] = c;
    }
    Ok(SymplecticMap { m })
}

/// Beam-splitter angle for a given transmittance.
pub fn transmittance_angle(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("transmittance {t} not in [0, 1]")));
    }
    Ok(t.sqrt().acos())
}

/// Polarizer frame rotation `R(θ1) ⊕ R(θ2) ⊕ R(θ1) ⊕ R(θ2)` with
/// `R(θ) = [[cos θ, -sin θ], [sin θ, cos θ]]`.
pub fn polarizer_rotation(theta1: f64, theta2: f64) -> SymplecticMap {
    let mut m = Mat8::zeros();
    for (base, theta) in [(0, theta1), (2, theta2), (4, theta1), (6, theta2)] {
        let (s, c) = theta.sin_cos();
        m[(base, base)] = c;
        m[(base, base + 1)] = -s;
        m[(base + 1, base)] = s;
        m[(base + 1, base + 1)] = c;
    }
    SymplecticMap { m }
}

/// A 4×4 unitary acting on `(a1, a2, a3, a4)ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassiveUnitary {
    u: CMat4,
}

impl PassiveUnitary {
    pub fn new(u: CMat4) -> Result<Self> {
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("unitary has non-finite entries"));
        }
        let defect = unitarity_defect(&u);
        if defect > VALIDATION_TOL {
            return Err(Error::invalid(format!(
                "matrix is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(Self { u })
    }

    pub fn from_real(m: &Matrix4<f64>) -> Result<Self> {
        Self::new(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn identity() -> Self {
        Self { u: CMat4::identity() }
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.u
    }

    /// `self · other`.
    pub fn compose(&self, other: &PassiveUnitary) -> PassiveUnitary {
        PassiveUnitary { u: self.u * other.u }
    }

    pub fn adjoint(&self) -> PassiveUnitary {
        PassiveUnitary { u: self.u.adjoint() }
    }

    /// Embeds a 2×2 unitary at modes `(i, j)` of a 4×4 identity.
    pub fn two_mode(i: usize, j: usize, w: &CMat2) -> Result<Self> {
        let (a, b) = mode_pair(i, j)?;
        let defect = unitarity_defect2(w);
        if defect > VALIDATION_TOL {
            return Err(Error::invalid(format!(
                "2x2 block is not unitary (defect {defect:.3e})"
            )));
        }
        let mut u = CMat4::identity();
        u[(a, a)] = w[(0, 0)];
        u[(a, b)] = w[(0, 1)];
        u[(b, a)] = w[(1, 0)];
        u[(b, b)] = w[(1, 1)];
        Ok(Self { u })
    }
}

fn rotation2(theta: f64) -> CMat2 {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c).map(|x| Complex64::new(x, 0.0))
}

fn wave_plate(i: usize, j: usize, phi: f64, eta: f64) -> Result<PassiveUnitary> {
    check_finite("wave plate axis", phi)?;
    let retard = Matrix2::new(
        Complex64::from_polar(1.0, eta / 2.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(1.0, -eta / 2.0),
    );
    let w = rotation2(phi) * retard * rotation2(-phi);
    PassiveUnitary::two_mode(i, j, &w)
}

/// Quarter-wave plate with slow axis at `phi`, acting on modes `(i, j)`.
pub fn quarter_wave(i: usize, j: usize, phi: f64) -> Result<PassiveUnitary> {
    wave_plate(i, j, phi, std::f64::consts::FRAC_PI_2)
}

/// Half-wave plate with slow axis at `phi`, acting on modes `(i, j)`.
pub fn half_wave(i: usize, j: usize, phi: f64) -> Result<PassiveUnitary> {
    wave_plate(i, j, phi, std::f64::consts::PI)
}

/// Assembles `diag(U1, U2) · [[C, S], [-S, C]] · diag(V1ᵀ, V2ᵀ)` with
/// `C = diag(cos θ1, cos θ2)` and `S = diag(sin θ1, sin θ2)`.
pub fn csd_compose(
    u1: &CMat2,
    u2: &CMat2,
    v1: &CMat2,
    v2: &CMat2,
    theta1: f64,
    theta2: f64,
) -> Result<PassiveUnitary> {
    for (name, block) in [("U1", u1), ("U2", u2), ("V1", v1), ("V2", v2)] {
        let defect = unitarity_defect2(block);
        if defect > VALIDATION_TOL {
            return Err(Error::invalid(format!(
                "block {name} is not unitary (defect {defect:.3e})"
            )));
        }
    }
    check_finite("theta1", theta1)?;
    check_finite("theta2", theta2)?;

    let mut left = CMat4::zeros();
    let mut right = CMat4::zeros();
    left.fixed_view_mut::<2, 2>(0, 0).copy_from(u1);
    left.fixed_view_mut::<2, 2>(2, 2).copy_from(u2);
    right.fixed_view_mut::<2, 2>(0, 0).copy_from(&v1.transpose());
    right.fixed_view_mut::<2, 2>(2, 2).copy_from(&v2.transpose());

    let mut mix = CMat4::zeros();
    for (k, theta) in [theta1, theta2].into_iter().enumerate() {
        let (s, c) = theta.sin_cos();
        mix[(k, k)] = c.into();
        mix[(k + 2, k + 2)] = c.into();
        mix[(k, k + 2)] = s.into();
        mix[(k + 2, k)] = (-s).into();
    }
    PassiveUnitary::new(left * mix * right)
}

/// Quadrature image `[[X, Y], [-Y, X]]` of `u = X - iY`.
pub fn embed_passive(u: &PassiveUnitary) -> SymplecticMap {
    let x = u.u.map(|z| z.re);
    let y = u.u.map(|z| -z.im);
    let mut m = Mat8::zeros();
    m.fixed_view_mut::<4, 4>(0, 0).copy_from(&x);
    m.fixed_view_mut::<4, 4>(0, 4).copy_from(&y);
    m.fixed_view_mut::<4, 4>(4, 0).copy_from(&(-y));
    m.fixed_view_mut::<4, 4>(4, 4).copy_from(&x);
    SymplecticMap { m }
}

/// Mode-space form of [`polarizer_rotation`]: `diag(R(θ1), R(θ2))`.
pub fn polarizer_unitary(theta1: f64, theta2: f64) -> PassiveUnitary {
    let mut u = CMat4::zeros();
    u.fixed_view_mut::<2, 2>(0, 0).copy_from(&rotation2(theta1));
    u.fixed_view_mut::<2, 2>(2, 2).copy_from(&rotation2(theta2));
    PassiveUnitary { u }
}

/// The four-mode passive map that turns equal squeezing into
/// `TMSV13 ⊗ TMSV24`.
pub fn max_entangler() -> PassiveUnitary {
    #[rustfmt::skip]
    let m = Matrix4::new(
        1.0, -1.0, -1.0,  1.0,
        1.0,  1.0, -1.0, -1.0,
        1.0, -1.0,  1.0, -1.0,
        1.0,  1.0,  1.0,  1.0,
    ) * 0.5;
    PassiveUnitary {
        u: m.map(|x| Complex64::new(x, 0.0)),
    }
}

/// Balanced mixing of the direction-k pair (1, 2) with the direction-k′
/// pair (3, 4): the cosine–sine block with `C = -S = I/sqrt(2)`.
pub fn direction_mixer() -> PassiveUnitary {
    let id = CMat2::identity();
    csd_compose(&id, &id, &id, &id, -std::f64::consts::FRAC_PI_4, -std::f64::consts::FRAC_PI_4)
        .expect("identity blocks are unitary")
}

/// `U1 = U2 = (1/sqrt 2)[[1, -1], [1, 1]]`, no cross-direction mixing.
pub fn local_splitter() -> PassiveUnitary {
    let r = rotation2(std::f64::consts::FRAC_PI_4);
    let id = CMat2::identity();
    csd_compose(&r, &r, &id, &id, 0.0, 0.0).expect("rotation blocks are unitary")
}

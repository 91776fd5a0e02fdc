//! Passive 4×4 unitaries in Fock space.
//!
//! `u` is reduced to a diagonal of phases by left Givens rotations,
//! `G_m ⋯ G_1 u = D`, so `u = G_1† ⋯ G_m† D`. Since the representation is a
//! homomorphism, `D` acts first (each amplitude picks up `Π d_k^{n_k}`), then
//! `G_m†`, ..., `G_1†`, each exactly via [`super::twomode`].

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::twomode::apply_two_mode;
use super::{check_tail, FockState};
use crate::error::Result;
use crate::symplectic::{CMat2, PassiveUnitary, MODES};

/// Rotations whose off-diagonal weight is below this are dropped.
const GIVENS_SKIP: f64 = 1e-15;

struct Factorization {
    phases: [Complex64; MODES],
    /// `(i, j, G†)` in application order.
    rotations: Vec<(usize, usize, CMat2)>,
}

fn factorize(u: &PassiveUnitary) -> Factorization {
    let mut w = *u.matrix();
    let mut gs = Vec::new();
    for c in 0..MODES {
        for r in c + 1..MODES {
            let (a, b) = (w[(c, c)], w[(r, c)]);
            if b.norm() < GIVENS_SKIP {
                continue;
            }
            let h = a.norm().hypot(b.norm());
            let g = Matrix2::new(a.conj() / h, b.conj() / h, -b / h, a / h);
            for col in 0..MODES {
                let (x, y) = (w[(c, col)], w[(r, col)]);
                w[(c, col)] = g[(0, 0)] * x + g[(0, 1)] * y;
                w[(r, col)] = g[(1, 0)] * x + g[(1, 1)] * y;
            }
            gs.push((c, r, g.adjoint()));
        }
    }
    gs.reverse();
    Factorization {
        phases: std::array::from_fn(|k| w[(k, k)] / w[(k, k)].norm()),
        rotations: gs,
    }
}

fn apply_phases(state: &mut FockState, d: &[Complex64; MODES]) {
    let one = Complex64::new(1.0, 0.0);
    if d.iter().all(|z| (z - one).norm() < GIVENS_SKIP) {
        return;
    }
    let cutoffs = state.cutoffs;
    let powers: Vec<Vec<Complex64>> = (0..MODES)
        .map(|k| {
            std::iter::successors(Some(one), |p| Some(p * d[k]))
                .take(cutoffs[k] + 1)
                .collect()
        })
        .collect();
    let st = super::strides(&cutoffs);
    for (i, z) in state.amp.iter_mut().enumerate() {
        if *z == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut rest = i;
        for k in 0..MODES {
            *z *= powers[k][rest / st[k]];
            rest %= st[k];
        }
    }
}

/// The truncated representation of `u` applied to `s`.
///
/// Photon number is conserved, so states whose total photon number fits in
/// every relevant cutoff incur no loss. Any mass that would leave the
/// truncated space is recorded in the tail and must stay within budget.
pub fn apply_passive(s: &FockState, u: &PassiveUnitary) -> Result<FockState> {
    let f = factorize(u);
    let mut out = s.clone();
    apply_phases(&mut out, &f.phases);
    let mut lost = 0.0;
    for (i, j, g) in &f.rotations {
        lost += apply_two_mode(&mut out, *i, *j, g);
    }
    check_tail(lost)?;
    out.add_tail(lost);
    Ok(out)
}

/// Like [`apply_passive`] for a single two-mode block, without the 4×4
/// factorization.
pub(crate) fn apply_block(s: &mut FockState, i: usize, j: usize, w: &CMat2) -> Result<()> {
    let lost = apply_two_mode(s, i, j, w);
    check_tail(lost)?;
    s.add_tail(lost);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{direction_mixer, local_splitter, max_entangler, quarter_wave};
    use nalgebra::Matrix4;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn factorization_reconstructs_unitary() {
        let u = max_entangler()
            .compose(&quarter_wave(2, 3, 0.4).unwrap())
            .compose(&direction_mixer());
        let f = factorize(&u);
        let mut m = nalgebra::Matrix4::<Complex64>::from_diagonal(&f.phases.into());
        for (i, j, g) in &f.rotations {
            let e = PassiveUnitary::two_mode(i + 1, j + 1, g).unwrap();
            m = e.matrix() * m;
        }
        assert!((m - u.matrix()).norm() < 1e-14);
    }

    #[test]
    fn psi1_from_local_splitters() {
        let s = FockState::basis_state([0, 1, 0, 1], [2; 4]).unwrap();
        let out = apply_passive(&s, &local_splitter()).unwrap();
        for (n, sign) in [([1, 0, 1, 0], 1.0), ([1, 0, 0, 1], -1.0), ([0, 1, 1, 0], -1.0), ([0, 1, 0, 1], 1.0)] {
            assert!((out.amplitude(n) - c(0.5 * sign)).norm() < 1e-15, "{n:?}");
        }
        assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(out.tail(), 0.0);
    }

    #[test]
    fn psi2_from_direction_mixer() {
        let s = FockState::basis_state([0, 0, 1, 1], [2; 4]).unwrap();
        let out = apply_passive(&s, &direction_mixer()).unwrap();
        for (n, sign) in [([1, 1, 0, 0], 1.0), ([1, 0, 0, 1], -1.0), ([0, 1, 1, 0], -1.0), ([0, 0, 1, 1], 1.0)] {
            assert!((out.amplitude(n) - c(0.5 * sign)).norm() < 1e-15, "{n:?}");
        }
    }

    #[test]
    fn diagonal_phases() {
        let phase = Complex64::from_polar(1.0, 0.3);
        let mut d = Matrix4::<Complex64>::identity();
        d[(1, 1)] = phase;
        let u = PassiveUnitary::new(d).unwrap();
        let s = FockState::basis_state([0, 3, 0, 0], [3; 4]).unwrap();
        let out = apply_passive(&s, &u).unwrap();
        assert!((out.amplitude([0, 3, 0, 0]) - phase.powu(3)).norm() < 1e-15);
    }
}

//! Constructors for the non-Gaussian inputs and the Fock images of the
//! Gaussian family.

use num_complex::Complex64;

use super::{apply_passive, apply_squeeze, check_tail, FockState};
use crate::error::{Error, Result};
use crate::symplectic::{direction_mixer, local_splitter, max_entangler, SqueezeParams};

/// `ln n!` for `n = 0..len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut acc = 0.0;
    for n in 0..len {
        if n > 0 {
            acc += (n as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Local splitters on `|0101⟩`:
/// `½(|1010⟩ - |1001⟩ - |0110⟩ + |0101⟩)`.
pub fn psi1(cutoff: usize) -> Result<FockState> {
    apply_passive(&FockState::basis_state([0, 1, 0, 1], [cutoff; 4])?, &local_splitter())
}

/// Direction mixer on `|0011⟩`:
/// `½(|1100⟩ - |1001⟩ - |0110⟩ + |0011⟩)`.
pub fn psi2(cutoff: usize) -> Result<FockState> {
    apply_passive(&FockState::basis_state([0, 0, 1, 1], [cutoff; 4])?, &direction_mixer())
}

/// Fock image of `K S(u, v)` applied to the vacuum (the `κ = 1` member of
/// the squeezed family).
pub fn squeezed_entangled_fock(p: SqueezeParams, cutoff: usize) -> Result<FockState> {
    let mut s = FockState::vacuum([cutoff; 4])?;
    for (mode, r) in [(1, p.u), (2, p.u), (3, p.v), (4, p.v)] {
        s = apply_squeeze(&s, mode, r)?;
    }
    apply_passive(&s, &max_entangler())
}

/// Pair-coherent amplitude `ζ` and photon-number difference `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcsParams {
    pub zeta: Complex64,
    pub q: usize,
}

impl PcsParams {
    pub fn new(zeta: Complex64, q: usize) -> Result<Self> {
        if !zeta.re.is_finite() || !zeta.im.is_finite() {
            return Err(Error::invalid("pair amplitude must be finite"));
        }
        Ok(Self { zeta, q })
    }

    /// Normalized coefficients of `|n+q, n⟩` for `n <= n_max`, together with
    /// the probability mass of the omitted terms.
    ///
    /// The norm comes from summing the series until its terms are negligible.
    pub fn coefficients(&self, n_max: usize) -> (Vec<Complex64>, f64) {
        let r = self.zeta.norm();
        if r == 0.0 {
            let mut c = vec![Complex64::new(0.0, 0.0); n_max + 1];
            c[0] = Complex64::new(1.0, 0.0);
            return (c, 0.0);
        }
        let q = self.q;
        // log |c_n|² = 2n ln|ζ| - ln n! - ln (n+q)!
        let mut lf = ln_factorials(64);
        let mut logw = Vec::new();
        let mut peak = f64::NEG_INFINITY;
        for n in 0.. {
            while lf.len() <= n + q {
                let k = lf.len();
                lf.push(lf[k - 1] + (k as f64).ln());
            }
            let w = 2.0 * n as f64 * r.ln() - lf[n] - lf[n + q];
            peak = peak.max(w);
            logw.push(w);
            if n as f64 > r && n > n_max && w - peak < -90.0 {
                break;
            }
        }
        let weights: Vec<f64> = logw.iter().map(|w| (w - peak).exp()).collect();
        let kept: f64 = weights.iter().take(n_max + 1).sum();
        let rest: f64 = weights.iter().skip(n_max + 1).sum();
        let total = kept + rest;
        let phase = Complex64::from_polar(1.0, self.zeta.arg());
        let coeffs = (0..=n_max)
            .map(|n| phase.powu(n as u32) * (weights[n] / total).sqrt())
            .collect();
        (coeffs, rest / total)
    }
}

/// `|PCS⟩₁₃ |PCS⟩₂₄`: mode 1 (2) holds `n + q` photons when mode 3 (4)
/// holds `n`.
pub fn pcs_pair(p: PcsParams, cutoff: usize) -> Result<FockState> {
    if cutoff < p.q {
        return Err(Error::invalid(format!(
            "cutoff {cutoff} cannot hold photon difference {}",
            p.q
        )));
    }
    let n_max = cutoff - p.q;
    let (c, pair_tail) = p.coefficients(n_max);
    let tail = pair_tail * (2.0 - pair_tail);
    check_tail(tail)?;
    let mut s = FockState::zeros([cutoff; 4])?;
    for (n, cn) in c.iter().enumerate() {
        for (m, cm) in c.iter().enumerate() {
            let i = s.index([n + p.q, m + p.q, n, m]);
            s.amp[i] = cn * cm;
        }
    }
    s.add_tail(tail);
    Ok(s)
}

/// Coherent amplitude of the odd cat states fed into the direction mixer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcsParams {
    pub alpha: Complex64,
}

impl EcsParams {
    pub fn new(alpha: Complex64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::invalid("coherent amplitude must be finite"));
        }
        if alpha.norm() == 0.0 {
            return Err(Error::invalid("odd coherent state needs alpha != 0"));
        }
        Ok(Self { alpha })
    }

    /// Real amplitude, the case the closed-form vacuum probability covers.
    pub fn real(alpha: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0))
    }

    /// `N_o = [2 - 2 exp(-2|α|²)]^(-1/2)`, stable for small `|α|`.
    pub fn odd_norm(&self) -> f64 {
        1.0 / (-2.0 * (-2.0 * self.alpha.norm_sqr()).exp_m1()).sqrt()
    }

    /// `N_o (|α⟩ - |-α⟩)` up to `n_max`, with the omitted mass.
    pub fn odd_coherent(&self, n_max: usize) -> (Vec<Complex64>, f64) {
        let a = self.alpha;
        let pre = 2.0 * self.odd_norm() * (-a.norm_sqr() / 2.0).exp();
        let mut term = Complex64::new(pre, 0.0);
        let mut c = vec![Complex64::new(0.0, 0.0); n_max + 1];
        for n in 0..=n_max {
            if n > 0 {
                term *= a / (n as f64).sqrt();
            }
            if n % 2 == 1 {
                c[n] = term;
            }
        }
        let kept: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        let mut rest = 0.0;
        let mut n = n_max;
        loop {
            n += 1;
            term *= a / (n as f64).sqrt();
            let w = term.norm_sqr();
            if n % 2 == 1 {
                rest += w;
            }
            if n as f64 > a.norm_sqr() && w < 1e-40 * (kept + rest) {
                break;
            }
        }
        (c, rest)
    }
}

/// `|ECS⟩₁₃ |ECS⟩₂₄`, built from vacuum on modes 1 and 2 and odd coherent
/// states on modes 3 and 4 mixed by the direction mixer.
pub fn ecs_pair(p: EcsParams, cutoff: usize) -> Result<FockState> {
    let (c, mode_tail) = p.odd_coherent(cutoff);
    let tail = mode_tail * (2.0 - mode_tail);
    check_tail(tail)?;
    let mut s = FockState::zeros([cutoff; 4])?;
    for (n, cn) in c.iter().enumerate() {
        for (m, cm) in c.iter().enumerate() {
            let i = s.index([0, 0, n, m]);
            s.amp[i] = cn * cm;
        }
    }
    s.add_tail(tail);
    apply_passive(&s, &direction_mixer())
}

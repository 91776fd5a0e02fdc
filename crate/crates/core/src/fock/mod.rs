//! Truncated Fock-space backend.
//!
//! A [`FockState`] stores the amplitudes of `|n1 n2 n3 n4⟩` for
//! `n_i <= cutoff_i`. Every operation that can push probability above the
//! cutoff measures the lost mass, adds it to the state's `tail` and fails
//! with [`Error::Truncation`] when a single operation loses more than the
//! budget. Nothing is renormalized implicitly.

mod loss;
mod passive;
mod probe;
mod squeeze;
mod states;
mod twomode;

pub use loss::{attenuate_fock, DensityFock, BRANCH_FLOOR, MAX_DENSITY_ENTRIES};
pub use passive::apply_passive;
pub(crate) use probe::{rotated, vacuum_mass};
pub use probe::{polarizer_vacuum_prob, vacuum_probabilities, VacuumProbabilities};
pub use squeeze::{apply_squeeze, MAX_FOCK_SQUEEZE};
pub use states::{
    ecs_pair, pcs_pair, psi1, psi2, squeezed_entangled_fock, EcsParams, PcsParams,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symplectic::MODES;

/// Probability mass one operation may push above the cutoff.
pub const TRUNCATION_BUDGET: f64 = 1e-10;

/// Largest per-mode cutoff accepted anywhere in the backend.
pub const MAX_CUTOFF: usize = 80;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    cutoffs: [usize; MODES],
    amp: Vec<Complex64>,
    tail: f64,
}

pub(crate) fn check_cutoffs(cutoffs: [usize; MODES]) -> Result<()> {
    if let Some(c) = cutoffs.iter().find(|&&c| c > MAX_CUTOFF) {
        return Err(Error::invalid(format!("cutoff {c} exceeds maximum {MAX_CUTOFF}")));
    }
    let len = cutoffs.iter().map(|c| c + 1).product::<usize>();
    if len > MAX_DENSITY_ENTRIES {
        return Err(Error::ResourceLimit(format!(
            "state with cutoffs {cutoffs:?} needs {len} amplitudes"
        )));
    }
    Ok(())
}

pub(crate) fn strides(cutoffs: &[usize; MODES]) -> [usize; MODES] {
    let mut s = [1; MODES];
    for k in (0..MODES - 1).rev() {
        s[k] = s[k + 1] * (cutoffs[k + 1] + 1);
    }
    s
}

/// Offsets of all basis states with zero photons in every mode listed in
/// `fixed`.
pub(crate) fn base_offsets(cutoffs: &[usize; MODES], fixed: &[usize]) -> Vec<usize> {
    let st = strides(cutoffs);
    let mut out = vec![0usize];
    for k in 0..MODES {
        if fixed.contains(&k) {
            continue;
        }
        out = out
            .iter()
            .flat_map(|&b| (0..=cutoffs[k]).map(move |n| b + n * st[k]))
            .collect();
    }
    out.sort_unstable();
    out
}

pub(crate) fn check_tail(lost: f64) -> Result<()> {
    if lost > TRUNCATION_BUDGET {
        Err(Error::Truncation {
            tail: lost,
            budget: TRUNCATION_BUDGET,
        })
    } else {
        Ok(())
    }
}

impl FockState {
    pub fn zeros(cutoffs: [usize; MODES]) -> Result<Self> {
        check_cutoffs(cutoffs)?;
        let len = cutoffs.iter().map(|c| c + 1).product();
        Ok(Self {
            cutoffs,
            amp: vec![Complex64::new(0.0, 0.0); len],
            tail: 0.0,
        })
    }

    /// `|n1 n2 n3 n4⟩`.
    pub fn basis_state(n: [usize; MODES], cutoffs: [usize; MODES]) -> Result<Self> {
        if let Some(k) = (0..MODES).find(|&k| n[k] > cutoffs[k]) {
            return Err(Error::invalid(format!(
                "photon count {} in mode {} exceeds cutoff {}",
                n[k],
                k + 1,
                cutoffs[k]
            )));
        }
        let mut s = Self::zeros(cutoffs)?;
        let i = s.index(n);
        s.amp[i] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn vacuum(cutoffs: [usize; MODES]) -> Result<Self> {
        Self::basis_state([0; MODES], cutoffs)
    }

    /// Builds a state from explicit amplitudes; non-finite values are refused.
    pub fn from_amplitudes(cutoffs: [usize; MODES], amp: Vec<Complex64>) -> Result<Self> {
        check_cutoffs(cutoffs)?;
        let len: usize = cutoffs.iter().map(|c| c + 1).product();
        if amp.len() != len {
            return Err(Error::invalid(format!(
                "expected {len} amplitudes, got {}",
                amp.len()
            )));
        }
        if amp.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        Ok(Self {
            cutoffs,
            amp,
            tail: 0.0,
        })
    }

    pub fn cutoffs(&self) -> [usize; MODES] {
        self.cutoffs
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    /// Probability mass lost above the cutoff so far.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn index(&self, n: [usize; MODES]) -> usize {
        let st = strides(&self.cutoffs);
        (0..MODES).map(|k| n[k] * st[k]).sum()
    }

    pub fn photon_counts(&self, index: usize) -> [usize; MODES] {
        let st = strides(&self.cutoffs);
        let mut n = [0; MODES];
        let mut rest = index;
        for k in 0..MODES {
            n[k] = rest / st[k];
            rest %= st[k];
        }
        n
    }

    pub fn amplitude(&self, n: [usize; MODES]) -> Complex64 {
        if (0..MODES).any(|k| n[k] > self.cutoffs[k]) {
            return Complex64::new(0.0, 0.0);
        }
        self.amp[self.index(n)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`; both states must share cutoffs.
    pub fn inner(&self, other: &FockState) -> Result<Complex64> {
        if self.cutoffs != other.cutoffs {
            return Err(Error::invalid("states have different cutoffs"));
        }
        Ok(self
            .amp
            .iter()
            .zip(&other.amp)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²` for normalized inputs.
    pub fn fidelity(&self, other: &FockState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Explicitly rescales to unit norm; the recorded tail is kept.
    pub fn renormalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::NumericalFailure("cannot renormalize a zero state".into()));
        }
        let scale = 1.0 / n.sqrt();
        Ok(Self {
            cutoffs: self.cutoffs,
            amp: self.amp.iter().map(|z| z * scale).collect(),
            tail: self.tail,
        })
    }

    /// Re-embeds into new cutoffs. Dropped amplitudes count as truncation
    /// and must stay within budget.
    pub fn resized(&self, cutoffs: [usize; MODES]) -> Result<Self> {
        let mut out = Self::zeros(cutoffs)?;
        let mut lost = 0.0;
        for (i, z) in self.amp.iter().enumerate() {
            let n = self.photon_counts(i);
            if (0..MODES).any(|k| n[k] > cutoffs[k]) {
                lost += z.norm_sqr();
            } else {
                let j = out.index(n);
                out.amp[j] = *z;
            }
        }
        check_tail(lost)?;
        out.tail = self.tail + lost;
        Ok(out)
    }

    /// Mean photon number of one mode (1-based).
    pub fn mean_photons(&self, mode: usize) -> Result<f64> {
        let k = crate::symplectic::mode_index(mode)?;
        Ok(self
            .amp
            .iter()
            .enumerate()
            .map(|(i, z)| self.photon_counts(i)[k] as f64 * z.norm_sqr())
            .sum())
    }

    pub(crate) fn add_tail(&mut self, lost: f64) {
        self.tail += lost;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_states() {
        let s = FockState::basis_state([0, 1, 0, 1], [6; 4]).unwrap();
        assert_eq!(s.norm_sqr(), 1.0);
        assert_eq!(s.amplitude([0, 1, 0, 1]), Complex64::new(1.0, 0.0));
        assert_eq!(s.amplitude([0, 0, 1, 1]), Complex64::new(0.0, 0.0));
        assert!(FockState::basis_state([0, 7, 0, 0], [6; 4]).is_err());
    }

    #[test]
    fn index_round_trip() {
        let s = FockState::zeros([2, 3, 4, 5]).unwrap();
        for i in 0..s.amplitudes().len() {
            assert_eq!(s.index(s.photon_counts(i)), i);
        }
    }

    #[test]
    fn base_offsets_cover_fibres() {
        let c = [2, 3, 1, 2];
        let b = base_offsets(&c, &[1, 3]);
        assert_eq!(b.len(), 3 * 2);
        let s = FockState::zeros(c).unwrap();
        for &o in &b {
            let n = s.photon_counts(o);
            assert_eq!((n[1], n[3]), (0, 0));
        }
    }

    #[test]
    fn cutoff_guards() {
        assert!(FockState::zeros([MAX_CUTOFF + 1, 0, 0, 0]).is_err());
        assert!(matches!(FockState::zeros([70; 4]), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn embedding_into_larger_cutoffs() {
        let s = FockState::basis_state([1, 0, 2, 0], [2; 4]).unwrap();
        let t = s.resized([3, 3, 5, 3]).unwrap();
        assert_eq!(t.amplitude([1, 0, 2, 0]), Complex64::new(1.0, 0.0));
        assert_eq!(t.resized([2; 4]).unwrap(), s);
        assert!(matches!(t.resized([1; 4]), Err(Error::Truncation { .. })));
    }
}

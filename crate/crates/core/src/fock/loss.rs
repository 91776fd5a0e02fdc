//! Mixed states produced by photon loss.
//!
//! A pure-loss channel of transmittance `t` has Kraus operators
//! `K_l |n⟩ = sqrt(C(n, l) t^(n-l) (1-t)^l) |n-l⟩`. The mixed state is kept
//! as an ensemble `ρ = Σ_b |ψ_b⟩⟨ψ_b|` of unnormalized branches, which is
//! far smaller than a full density tensor for the near-pure states used as
//! oracles here. Branches lighter than [`BRANCH_FLOOR`] are dropped and
//! their mass is recorded in the tail.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_tail, strides, FockState};
use crate::error::{Error, Result};
use crate::symplectic::{PassiveUnitary, MODES};

use super::states::ln_factorials;

/// Upper bound on stored amplitudes (branches × tensor size), and on the
/// size of any single pure tensor.
pub const MAX_DENSITY_ENTRIES: usize = 1 << 24;

/// Branch weight below which a Kraus branch is discarded.
pub const BRANCH_FLOOR: f64 = 1e-16;

/// `ρ = Σ_b |ψ_b⟩⟨ψ_b|` with common cutoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFock {
    cutoffs: [usize; MODES],
    branches: Vec<FockState>,
    tail: f64,
}

impl DensityFock {
    pub fn pure(s: FockState) -> Self {
        Self {
            cutoffs: s.cutoffs,
            tail: s.tail,
            branches: vec![s],
        }
    }

    /// A mixture from explicit (unnormalized) branches sharing cutoffs.
    pub fn from_branches(branches: Vec<FockState>) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| Error::invalid("a mixture needs at least one branch"))?;
        let cutoffs = first.cutoffs;
        if branches.iter().any(|b| b.cutoffs != cutoffs) {
            return Err(Error::invalid("branches have different cutoffs"));
        }
        let len = first.amp.len();
        if branches.len().saturating_mul(len) > MAX_DENSITY_ENTRIES {
            return Err(Error::ResourceLimit(format!(
                "{} branches of {len} amplitudes",
                branches.len()
            )));
        }
        let tail = branches.iter().map(|b| b.tail).sum();
        Ok(Self {
            cutoffs,
            branches,
            tail,
        })
    }

    pub fn cutoffs(&self) -> [usize; MODES] {
        self.cutoffs
    }

    pub fn branches(&self) -> &[FockState] {
        &self.branches
    }

    /// Probability mass lost to truncation or pruning so far.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn trace(&self) -> f64 {
        self.branches.iter().map(FockState::norm_sqr).sum()
    }

    /// `⟨n|ρ|m⟩`.
    pub fn element(&self, n: [usize; MODES], m: [usize; MODES]) -> Complex64 {
        self.branches
            .iter()
            .map(|b| b.amplitude(n) * b.amplitude(m).conj())
            .sum()
    }

    pub fn apply_passive(&self, u: &PassiveUnitary) -> Result<Self> {
        let branches = self
            .branches
            .par_iter()
            .map(|b| super::apply_passive(b, u))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            cutoffs: self.cutoffs,
            tail: branches.iter().map(|b| b.tail).sum(),
            branches,
        })
    }

    /// Loss of transmittance `t` on every mode.
    pub fn attenuate(&self, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!("transmittance {t} not in [0, 1]")));
        }
        let len = self.branches[0].amp.len();
        let mut branches = self.branches.clone();
        let mut pruned = 0.0;
        for k in 0..MODES {
            let kraus = kraus_table(self.cutoffs[k], t);
            let mut next = Vec::new();
            for b in &branches {
                for (l, table) in kraus.iter().enumerate() {
                    let out = apply_kraus(b, k, l, table);
                    let w = out.norm_sqr();
                    if w == 0.0 {
                        continue;
                    }
                    if w < BRANCH_FLOOR {
                        pruned += w;
                        continue;
                    }
                    if (next.len() + 1) * len > MAX_DENSITY_ENTRIES {
                        return Err(Error::ResourceLimit(format!(
                            "loss needs more than {} branches of {len} amplitudes",
                            next.len()
                        )));
                    }
                    next.push(out);
                }
            }
            branches = next;
        }
        check_tail(pruned)?;
        let tail = self.tail + pruned;
        for b in &mut branches {
            b.tail = 0.0;
        }
        if branches.is_empty() {
            return Err(Error::NumericalFailure("loss removed every branch".into()));
        }
        Ok(Self {
            cutoffs: self.cutoffs,
            branches,
            tail,
        })
    }
}

/// `table[l][n]` = `⟨n-l|K_l|n⟩` for `n <= cutoff`.
fn kraus_table(cutoff: usize, t: f64) -> Vec<Vec<f64>> {
    let lf = ln_factorials(cutoff + 1);
    (0..=cutoff)
        .map(|l| {
            (0..=cutoff)
                .map(|n| {
                    if n < l {
                        return 0.0;
                    }
                    let binom = (lf[n] - lf[l] - lf[n - l]).exp();
                    (binom * t.powi((n - l) as i32) * (1.0 - t).powi(l as i32)).sqrt()
                })
                .collect()
        })
        .collect()
}

fn apply_kraus(s: &FockState, k: usize, l: usize, table: &[f64]) -> FockState {
    let mut out = FockState {
        cutoffs: s.cutoffs,
        amp: vec![Complex64::new(0.0, 0.0); s.amp.len()],
        tail: 0.0,
    };
    let st = strides(&s.cutoffs)[k];
    let c = s.cutoffs[k];
    for (i, z) in s.amp.iter().enumerate() {
        let n = (i / st) % (c + 1);
        if n >= l && table[n] != 0.0 {
            out.amp[i - l * st] = z * table[n];
        }
    }
    out
}

/// Sends every mode of `s` through a loss channel of transmittance `t`.
pub fn attenuate_fock(s: &FockState, t: f64) -> Result<DensityFock> {
    DensityFock::pure(s.clone()).attenuate(t)
}

//! Coincidence rates and the Bell functional
//!
//! `f = P(θ1,θ2) - P(θ1,θ2′) + P(θ1′,θ2) + P(θ1′,θ2′) - P(θ1′, ) - P( ,θ2)`,
//! bounded by `-P( , ) <= f <= 0` for local models.
//!
//! Every rate is `1 - P0(A) - P0(B) + P0(A∪B)` where `P0` is a vacuum
//! probability behind a polarizer (or behind nothing, when it is removed).
//! States only need to provide those vacuum probabilities, through
//! [`VacuumProbe`].

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{self, DensityFock, EcsParams, FockState, VacuumProbabilities};
use crate::gaussian::GaussianState;

/// Absolute tolerance on both bounds of the inequality.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Probabilities may overshoot `[0, 1]` by this much before it is an error.
const PROB_SLACK: f64 = 1e-9;

/// One direction's measurement: a polarizer at an angle, or none.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    Angle(f64),
    Removed,
}

impl Setting {
    fn angle(self) -> Option<f64> {
        match self {
            Setting::Angle(t) => Some(t),
            Setting::Removed => None,
        }
    }
}

/// Polarizer angles, canonicalized into `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellAngles {
    theta1: f64,
    theta2: f64,
    theta1p: f64,
    theta2p: f64,
}

fn canonical(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if y >= TAU {
        0.0
    } else {
        y
    }
}

impl BellAngles {
    pub fn new(theta1: f64, theta2: f64, theta1p: f64, theta2p: f64) -> Result<Self> {
        let all = [theta1, theta2, theta1p, theta2p];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("angles must be finite, got {all:?}")));
        }
        Ok(Self {
            theta1: canonical(theta1),
            theta2: canonical(theta2),
            theta1p: canonical(theta1p),
            theta2p: canonical(theta2p),
        })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn theta1p(&self) -> f64 {
        self.theta1p
    }

    pub fn theta2p(&self) -> f64 {
        self.theta2p
    }

    /// `[θ1, θ2, θ1′, θ2′]`.
    pub fn as_array(&self) -> [f64; 4] {
        [self.theta1, self.theta2, self.theta1p, self.theta2p]
    }
}

/// The seven rates of one functional evaluation and the derived quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellReport {
    pub p_t1t2: f64,
    pub p_t1t2p: f64,
    pub p_t1pt2: f64,
    pub p_t1pt2p: f64,
    /// `P(θ1′, )`
    pub p_t1p_x: f64,
    /// `P( , θ2)`
    pub p_x_t2: f64,
    /// `P( , )`
    pub p_xx: f64,
    pub f: f64,
    /// `f + P( , )`; negative means the lower bound is violated.
    pub lower_margin: f64,
    /// `-f`; negative means the upper bound is violated.
    pub upper_margin: f64,
    pub violated: bool,
}

impl BellReport {
    /// Assembles the report from the seven rates.
    pub fn from_rates(rates: [f64; 7]) -> Self {
        let [p_t1t2, p_t1t2p, p_t1pt2, p_t1pt2p, p_t1p_x, p_x_t2, p_xx] = rates;
        let f = p_t1t2 - p_t1t2p + p_t1pt2 + p_t1pt2p - p_t1p_x - p_x_t2;
        Self {
            p_t1t2,
            p_t1t2p,
            p_t1pt2,
            p_t1pt2p,
            p_t1p_x,
            p_x_t2,
            p_xx,
            f,
            lower_margin: f + p_xx,
            upper_margin: -f,
            violated: f > VIOLATION_TOL || f < -p_xx - VIOLATION_TOL,
        }
    }

    /// How far the state is outside the local region; `<= 0` inside.
    pub fn violation(&self) -> f64 {
        (-self.upper_margin).max(-self.lower_margin)
    }
}

/// Vacuum probabilities for every combination of grid angles, all linear in
/// the state so mixtures can be summed branch by branch.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumTable {
    pub angles: Vec<f64>,
    /// `P0` of the transmitted mode of direction `k` at each angle.
    pub a: Vec<f64>,
    /// `P0` of both modes of direction `k`.
    pub a_removed: f64,
    pub b: Vec<f64>,
    pub b_removed: f64,
    /// `ab[i * n + j]`: both transmitted modes at `(angles[i], angles[j])`.
    pub ab: Vec<f64>,
    /// Transmitted mode of `k` at `angles[i]` and both modes of `k′`.
    pub a_rb: Vec<f64>,
    /// Both modes of `k` and the transmitted mode of `k′` at `angles[j]`.
    pub ra_b: Vec<f64>,
    /// All four modes.
    pub ra_rb: f64,
}

impl VacuumTable {
    fn zeros(angles: &[f64]) -> Self {
        let n = angles.len();
        Self {
            angles: angles.to_vec(),
            a: vec![0.0; n],
            a_removed: 0.0,
            b: vec![0.0; n],
            b_removed: 0.0,
            ab: vec![0.0; n * n],
            a_rb: vec![0.0; n],
            ra_b: vec![0.0; n],
            ra_rb: 0.0,
        }
    }

    fn add(mut self, o: &VacuumTable) -> Self {
        let sum = |x: &mut Vec<f64>, y: &Vec<f64>| x.iter_mut().zip(y).for_each(|(p, q)| *p += q);
        sum(&mut self.a, &o.a);
        sum(&mut self.b, &o.b);
        sum(&mut self.ab, &o.ab);
        sum(&mut self.a_rb, &o.a_rb);
        sum(&mut self.ra_b, &o.ra_b);
        self.a_removed += o.a_removed;
        self.b_removed += o.b_removed;
        self.ra_rb += o.ra_rb;
        self
    }
}

/// A state that can report vacuum probabilities behind the polarizers.
pub trait VacuumProbe: Sync {
    /// `P0` for direction `k` alone, `k′` alone and both.
    fn vacuum_probabilities(&self, a: Setting, b: Setting) -> Result<VacuumProbabilities>;

    /// Vacuum probabilities for the seven settings of [`bell_settings`].
    fn bell_vacua(&self, angles: &BellAngles) -> Result<[VacuumProbabilities; 7]> {
        let v: Vec<VacuumProbabilities> = bell_settings(angles)
            .par_iter()
            .map(|&(a, b)| self.vacuum_probabilities(a, b))
            .collect::<Result<_>>()?;
        Ok(v.try_into().expect("seven settings"))
    }

    /// Vacuum probabilities on a grid of angles shared by both directions.
    fn vacuum_table(&self, angles: &[f64]) -> Result<VacuumTable> {
        let n = angles.len();
        let mut t = VacuumTable::zeros(angles);
        let pairs: Vec<VacuumProbabilities> = (0..n * n)
            .into_par_iter()
            .map(|ij| {
                self.vacuum_probabilities(
                    Setting::Angle(angles[ij / n]),
                    Setting::Angle(angles[ij % n]),
                )
            })
            .collect::<Result<_>>()?;
        for (ij, p) in pairs.iter().enumerate() {
            t.ab[ij] = p.ab;
            if ij % n == 0 {
                t.a[ij / n] = p.a;
            }
            if ij / n == 0 {
                t.b[ij % n] = p.b;
            }
        }
        for (i, &g) in angles.iter().enumerate() {
            let p = self.vacuum_probabilities(Setting::Angle(g), Setting::Removed)?;
            t.a_rb[i] = p.ab;
            t.b_removed = p.b;
            let p = self.vacuum_probabilities(Setting::Removed, Setting::Angle(g))?;
            t.ra_b[i] = p.ab;
            t.a_removed = p.a;
        }
        let p = self.vacuum_probabilities(Setting::Removed, Setting::Removed)?;
        t.ra_rb = p.ab;
        t.a_removed = p.a;
        t.b_removed = p.b;
        Ok(t)
    }
}

impl VacuumProbe for GaussianState {
    fn vacuum_probabilities(&self, a: Setting, b: Setting) -> Result<VacuumProbabilities> {
        let ma: &[usize] = if a == Setting::Removed { &[1, 2] } else { &[1] };
        let mb: &[usize] = if b == Setting::Removed { &[3, 4] } else { &[3] };
        let mab: Vec<usize> = ma.iter().chain(mb).copied().collect();
        let (t1, t2) = (a.angle().unwrap_or(0.0), b.angle().unwrap_or(0.0));
        Ok(VacuumProbabilities {
            a: self.vacuum_overlap(ma, t1, t2)?,
            b: self.vacuum_overlap(mb, t1, t2)?,
            ab: self.vacuum_overlap(&mab, t1, t2)?,
        })
    }
}

impl VacuumProbe for FockState {
    fn vacuum_probabilities(&self, a: Setting, b: Setting) -> Result<VacuumProbabilities> {
        fock::vacuum_probabilities(self, a.angle(), b.angle())
    }

    fn bell_vacua(&self, angles: &BellAngles) -> Result<[VacuumProbabilities; 7]> {
        fock_vacua(self, angles)
    }

    fn vacuum_table(&self, angles: &[f64]) -> Result<VacuumTable> {
        fock_table(self, angles)
    }
}

impl VacuumProbe for DensityFock {
    fn vacuum_probabilities(&self, a: Setting, b: Setting) -> Result<VacuumProbabilities> {
        DensityFock::vacuum_probabilities(self, a.angle(), b.angle())
    }

    fn bell_vacua(&self, angles: &BellAngles) -> Result<[VacuumProbabilities; 7]> {
        let zero = VacuumProbabilities { a: 0.0, b: 0.0, ab: 0.0 };
        let mut acc = [zero; 7];
        for b in self.branches() {
            for (x, y) in acc.iter_mut().zip(fock_vacua(b, angles)?) {
                x.a += y.a;
                x.b += y.b;
                x.ab += y.ab;
            }
        }
        Ok(acc)
    }

    fn vacuum_table(&self, angles: &[f64]) -> Result<VacuumTable> {
        let mut acc = VacuumTable::zeros(angles);
        for b in self.branches() {
            acc = acc.add(&fock_table(b, angles)?);
        }
        Ok(acc)
    }
}

/// The seven settings from two direction-`k` rotations and four
/// direction-`k′` rotations.
fn fock_vacua(s: &FockState, angles: &BellAngles) -> Result<[VacuumProbabilities; 7]> {
    use crate::fock::{rotated, vacuum_mass};
    let [t1, t2, t1p, t2p] = angles.as_array();
    const A: [bool; 4] = [true, false, false, false];
    const B: [bool; 4] = [false, false, true, false];
    const AB: [bool; 4] = [true, false, true, false];
    let s1 = rotated(s, Some(t1), None)?;
    let s1p = rotated(s, Some(t1p), None)?;
    let joint: Vec<VacuumProbabilities> = [(&s1, t2), (&s1, t2p), (&s1p, t2), (&s1p, t2p)]
        .par_iter()
        .map(|&(si, h)| {
            let r = rotated(si, None, Some(h))?;
            Ok(VacuumProbabilities {
                a: vacuum_mass(si, &A),
                b: vacuum_mass(&r, &B),
                ab: vacuum_mass(&r, &AB),
            })
        })
        .collect::<Result<_>>()?;
    let a_removed = vacuum_mass(s, &[true, true, false, false]);
    let b_removed = vacuum_mass(s, &[false, false, true, true]);
    // rotating direction k leaves the two-mode vacuum of k invariant
    let s12 = rotated(&s1, None, Some(t2))?;
    Ok([
        joint[0],
        joint[1],
        joint[2],
        joint[3],
        VacuumProbabilities {
            a: joint[2].a,
            b: b_removed,
            ab: vacuum_mass(&s1p, &[true, false, true, true]),
        },
        VacuumProbabilities {
            a: a_removed,
            b: joint[0].b,
            ab: vacuum_mass(&s12, &[true, true, true, false]),
        },
        VacuumProbabilities {
            a: a_removed,
            b: b_removed,
            ab: vacuum_mass(s, &[true; 4]),
        },
    ])
}

/// Fock table reusing each direction-`k` rotation for every `k′` angle.
fn fock_table(s: &FockState, angles: &[f64]) -> Result<VacuumTable> {
    use crate::fock::{rotated, vacuum_mass};
    let n = angles.len();
    let mut t = VacuumTable::zeros(angles);
    let rows: Vec<(f64, f64, Vec<f64>)> = angles
        .par_iter()
        .map(|&g| {
            let si = rotated(s, Some(g), None)?;
            let row = angles
                .iter()
                .map(|&h| Ok(vacuum_mass(&rotated(&si, None, Some(h))?, &[true, false, true, false])))
                .collect::<Result<Vec<_>>>()?;
            Ok((
                vacuum_mass(&si, &[true, false, false, false]),
                vacuum_mass(&si, &[true, false, true, true]),
                row,
            ))
        })
        .collect::<Result<_>>()?;
    for (i, (a, a_rb, row)) in rows.into_iter().enumerate() {
        t.a[i] = a;
        t.a_rb[i] = a_rb;
        t.ab[i * n..(i + 1) * n].copy_from_slice(&row);
    }
    let cols: Vec<(f64, f64)> = angles
        .par_iter()
        .map(|&h| {
            let sj = rotated(s, None, Some(h))?;
            Ok((
                vacuum_mass(&sj, &[false, false, true, false]),
                vacuum_mass(&sj, &[true, true, true, false]),
            ))
        })
        .collect::<Result<_>>()?;
    for (j, (b, ra_b)) in cols.into_iter().enumerate() {
        t.b[j] = b;
        t.ra_b[j] = ra_b;
    }
    t.a_removed = vacuum_mass(s, &[true, true, false, false]);
    t.b_removed = vacuum_mass(s, &[false, false, true, true]);
    t.ra_rb = vacuum_mass(s, &[true; 4]);
    Ok(t)
}

fn checked_probability(p: f64) -> Result<f64> {
    if !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&p) {
        return Err(Error::NumericalFailure(format!("rate {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

fn rate(v: &VacuumProbabilities) -> Result<f64> {
    checked_probability(1.0 - v.a - v.b + v.ab)
}

/// `P(a, b) = 1 - P0(A) - P0(B) + P0(A∪B)`.
pub fn coincidence(state: &impl VacuumProbe, a: Setting, b: Setting) -> Result<f64> {
    rate(&state.vacuum_probabilities(a, b)?)
}

/// The settings behind the seven rates, in [`BellReport`] order.
pub fn bell_settings(angles: &BellAngles) -> [(Setting, Setting); 7] {
    use Setting::{Angle, Removed};
    let [t1, t2, t1p, t2p] = angles.as_array();
    [
        (Angle(t1), Angle(t2)),
        (Angle(t1), Angle(t2p)),
        (Angle(t1p), Angle(t2)),
        (Angle(t1p), Angle(t2p)),
        (Angle(t1p), Removed),
        (Removed, Angle(t2)),
        (Removed, Removed),
    ]
}

/// Evaluates all seven rates and the functional.
pub fn bell_functional(state: &impl VacuumProbe, angles: &BellAngles) -> Result<BellReport> {
    let v = state.bell_vacua(angles)?;
    let mut rates = [0.0; 7];
    for (r, p) in rates.iter_mut().zip(&v) {
        *r = rate(p)?;
    }
    Ok(BellReport::from_rates(rates))
}

/// Coincidence rates on an angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub angles: Vec<f64>,
    /// `joint[i * n + j] = P(angles[i], angles[j])`
    pub joint: Vec<f64>,
    /// `P(angles[i], )`
    pub a_only: Vec<f64>,
    /// `P( , angles[j])`
    pub b_only: Vec<f64>,
    /// `P( , )`
    pub both_removed: f64,
}

impl RateTable {
    pub fn new(state: &impl VacuumProbe, angles: &[f64]) -> Result<Self> {
        Self::from_vacuum(&state.vacuum_table(angles)?)
    }

    pub fn from_vacuum(v: &VacuumTable) -> Result<Self> {
        let n = v.angles.len();
        let joint = (0..n * n)
            .map(|ij| checked_probability(1.0 - v.a[ij / n] - v.b[ij % n] + v.ab[ij]))
            .collect::<Result<_>>()?;
        let a_only = (0..n)
            .map(|i| checked_probability(1.0 - v.a[i] - v.b_removed + v.a_rb[i]))
            .collect::<Result<_>>()?;
        let b_only = (0..n)
            .map(|j| checked_probability(1.0 - v.a_removed - v.b[j] + v.ra_b[j]))
            .collect::<Result<_>>()?;
        Ok(Self {
            angles: v.angles.clone(),
            joint,
            a_only,
            b_only,
            both_removed: checked_probability(1.0 - v.a_removed - v.b_removed + v.ra_rb)?,
        })
    }

    /// Report for grid indices `(θ1, θ2, θ1′, θ2′) = (i, j, k, l)`.
    pub fn report(&self, i: usize, j: usize, k: usize, l: usize) -> BellReport {
        let n = self.angles.len();
        BellReport::from_rates([
            self.joint[i * n + j],
            self.joint[i * n + l],
            self.joint[k * n + j],
            self.joint[k * n + l],
            self.a_only[k],
            self.b_only[j],
            self.both_removed,
        ])
    }
}

/// Threshold below which the closed form is replaced by its `d -> 0` limit.
const ECS_SERIES_BELOW: f64 = 1e-3;

/// `2 e^{d²} / (e^{d²} - 1)² [cosh(¾d²) cosh(¼d² sin 2θ) - cosh(¼d² cos 2θ)]`,
/// the ECS vacuum probability behind one polarizer.
///
/// The bracket is evaluated through `cosh x - 1 = 2 sinh²(x/2)` so that no
/// digits cancel for small `d`; below `|d| = 1e-3` the limit
/// `(9 - cos 4θ) / 16` is returned.
pub fn ecs_vacuum_prob_closed(d: f64, theta: f64) -> f64 {
    if d.abs() < ECS_SERIES_BELOW {
        return (9.0 - (4.0 * theta).cos()) / 16.0;
    }
    let d2 = d * d;
    let cm1 = |x: f64| 2.0 * (x / 2.0).sinh().powi(2);
    let (s2, c2) = (2.0 * theta).sin_cos();
    let a = cm1(0.75 * d2);
    let b = cm1(0.25 * d2 * s2);
    let c = cm1(0.25 * d2 * c2);
    let bracket = a * b + a + b - c;
    2.0 * d2.exp() / d2.exp_m1().powi(2) * bracket
}

/// The closed form for a real odd-coherent amplitude `alpha`, where the
/// displacement entering the formula is `d = √2 α`.
pub fn ecs_vacuum_prob(alpha: f64, theta: f64) -> f64 {
    ecs_vacuum_prob_closed(std::f64::consts::SQRT_2 * alpha, theta)
}

/// ECS evaluator: the closed form for the single-polarizer vacuum terms, the
/// Fock state for everything else.
#[derive(Debug, Clone)]
pub struct EcsHybrid {
    state: FockState,
    d: f64,
}

impl EcsHybrid {
    /// Requires a real amplitude, since the closed form assumes `Im α = 0`.
    pub fn new(p: EcsParams, cutoff: usize) -> Result<Self> {
        if p.alpha.im != 0.0 {
            return Err(Error::invalid("the ECS closed form needs a real amplitude"));
        }
        Ok(Self {
            state: fock::ecs_pair(p, cutoff)?,
            d: std::f64::consts::SQRT_2 * p.alpha.re,
        })
    }

    pub fn fock(&self) -> &FockState {
        &self.state
    }
}

impl VacuumProbe for EcsHybrid {
    fn vacuum_probabilities(&self, a: Setting, b: Setting) -> Result<VacuumProbabilities> {
        let mut p = self.state.vacuum_probabilities(a, b)?;
        if let Some(t) = a.angle() {
            p.a = ecs_vacuum_prob_closed(self.d, t);
        }
        if let Some(t) = b.angle() {
            p.b = ecs_vacuum_prob_closed(self.d, t);
        }
        Ok(p)
    }

    fn bell_vacua(&self, angles: &BellAngles) -> Result<[VacuumProbabilities; 7]> {
        let mut v = fock_vacua(&self.state, angles)?;
        for (p, (a, b)) in v.iter_mut().zip(bell_settings(angles)) {
            if let Some(t) = a.angle() {
                p.a = ecs_vacuum_prob_closed(self.d, t);
            }
            if let Some(t) = b.angle() {
                p.b = ecs_vacuum_prob_closed(self.d, t);
            }
        }
        Ok(v)
    }

    fn vacuum_table(&self, angles: &[f64]) -> Result<VacuumTable> {
        let mut t = fock_table(&self.state, angles)?;
        for (i, &g) in angles.iter().enumerate() {
            t.a[i] = ecs_vacuum_prob_closed(self.d, g);
            t.b[i] = ecs_vacuum_prob_closed(self.d, g);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{psi1, psi2};
    use crate::gaussian::squeezed_entangled;
    use crate::gaussian::ThermalParam;
    use crate::symplectic::SqueezeParams;

    #[test]
    fn canonical_angles() {
        let a = BellAngles::new(-0.5, TAU + 1.0, 3.0, -1e-300).unwrap();
        let [t1, t2, t1p, t2p] = a.as_array();
        assert!((t1 - (TAU - 0.5)).abs() < 1e-15);
        assert!((t2 - 1.0).abs() < 1e-15);
        assert_eq!(t1p, 3.0);
        assert!((0.0..TAU).contains(&t2p));
        assert!(BellAngles::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn vacuum_never_clicks() {
        let angles = BellAngles::new(0.3, 1.9, 4.4, 2.0).unwrap();
        let g = bell_functional(&GaussianState::vacuum(), &angles).unwrap();
        let f = bell_functional(&FockState::vacuum([2; 4]).unwrap(), &angles).unwrap();
        for r in [g, f] {
            assert!(r.f.abs() < 1e-14);
            assert!(r.p_xx.abs() < 1e-14);
            assert!(!r.violated);
        }
    }

    #[test]
    fn two_photon_removed_rates() {
        let p1 = psi1(2).unwrap();
        let p2 = psi2(2).unwrap();
        assert!((coincidence(&p1, Setting::Removed, Setting::Removed).unwrap() - 1.0).abs() < 1e-15);
        assert!((coincidence(&p2, Setting::Removed, Setting::Removed).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn functional_is_the_six_term_combination() {
        let s = squeezed_entangled(SqueezeParams::new(0.4, -0.4).unwrap(), ThermalParam::zero_temperature());
        let r = bell_functional(&s, &BellAngles::new(1.32, 0.93, 3.66, 3.32).unwrap()).unwrap();
        let f = r.p_t1t2 - r.p_t1t2p + r.p_t1pt2 + r.p_t1pt2p - r.p_t1p_x - r.p_x_t2;
        assert!((f - r.f).abs() < 1e-12);
        assert_eq!(r.lower_margin, r.f + r.p_xx);
        assert_eq!(r.upper_margin, -r.f);
        assert!(r.f > 0.0 && r.violated);
    }

    #[test]
    fn table_matches_direct_rates() {
        let angles = [0.0, 0.9, 2.5, 4.1];
        let s = squeezed_entangled(SqueezeParams::new(0.3, 0.1).unwrap(), ThermalParam::new(0.9).unwrap());
        let f = psi2(3).unwrap();
        let e = EcsHybrid::new(EcsParams::real(0.6).unwrap(), 16).unwrap();
        let gt = RateTable::new(&s, &angles).unwrap();
        let ft = RateTable::new(&f, &angles).unwrap();
        let et = RateTable::new(&e, &angles).unwrap();
        for (i, j, k, l) in [(0, 1, 2, 3), (3, 3, 1, 0), (2, 0, 0, 1)] {
            let a = BellAngles::new(angles[i], angles[j], angles[k], angles[l]).unwrap();
            for (t, r) in [
                (&gt, bell_functional(&s, &a).unwrap()),
                (&ft, bell_functional(&f, &a).unwrap()),
                (&et, bell_functional(&e, &a).unwrap()),
            ] {
                let q = t.report(i, j, k, l);
                assert!((q.f - r.f).abs() < 1e-13, "{q:?} vs {r:?}");
                assert!((q.p_xx - r.p_xx).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn shared_rotations_match_independent_settings() {
        let a = BellAngles::new(2.67, 5.59, 1.88, 3.24).unwrap();
        let e = EcsHybrid::new(EcsParams::real(0.7).unwrap(), 16).unwrap();
        let s = e.fock();
        let r = bell_functional(s, &a).unwrap();
        let rh = bell_functional(&e, &a).unwrap();
        let want: Vec<f64> = bell_settings(&a)
            .iter()
            .map(|&(x, y)| coincidence(s, x, y).unwrap())
            .collect();
        let got = [r.p_t1t2, r.p_t1t2p, r.p_t1pt2, r.p_t1pt2p, r.p_t1p_x, r.p_x_t2, r.p_xx];
        let hyb = [rh.p_t1t2, rh.p_t1t2p, rh.p_t1pt2, rh.p_t1pt2p, rh.p_t1p_x, rh.p_x_t2, rh.p_xx];
        for k in 0..7 {
            assert!((got[k] - want[k]).abs() < 1e-14, "rate {k}");
            let direct = coincidence(&e, bell_settings(&a)[k].0, bell_settings(&a)[k].1).unwrap();
            assert!((hyb[k] - direct).abs() < 1e-14, "hybrid rate {k}");
            // the closed form and the Fock state agree, so the hybrid is the Fock value
            assert!((hyb[k] - got[k]).abs() < 1e-10, "hybrid vs fock {k}");
        }
        let rho = DensityFock::pure(s.clone());
        assert!((bell_functional(&rho, &a).unwrap().f - r.f).abs() < 1e-14);
    }

    #[test]
    fn ecs_closed_form_limits() {
        for theta in [0.0f64, 0.7, 2.67, 5.0] {
            let lim = (9.0 - (4.0 * theta).cos()) / 16.0;
            // continuity across the series switch
            let near = ecs_vacuum_prob_closed(1.0001e-3, theta);
            assert!((near - lim).abs() < 1e-6, "θ={theta}");
            assert!((ecs_vacuum_prob_closed(0.0, theta) - lim).abs() < 1e-15);
            let d = 0.9;
            let shifted = ecs_vacuum_prob_closed(d, theta + std::f64::consts::FRAC_PI_2);
            assert!((shifted - ecs_vacuum_prob_closed(d, theta)).abs() < 1e-14);
        }
        assert!((ecs_vacuum_prob_closed(0.0, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ecs_closed_form_matches_fock() {
        for alpha in [0.2, 0.8 / std::f64::consts::SQRT_2, 0.9] {
            let s = fock::ecs_pair(EcsParams::real(alpha).unwrap(), 24).unwrap();
            for theta in [0.0, 0.7, 2.67] {
                let closed = ecs_vacuum_prob(alpha, theta);
                let a = fock::polarizer_vacuum_prob(&s, &[1], theta, 0.0).unwrap();
                let b = fock::polarizer_vacuum_prob(&s, &[3], 0.0, theta).unwrap();
                assert!((closed - a).abs() < 1e-10, "α={alpha} θ={theta}: {closed} vs {a}");
                assert!((closed - b).abs() < 1e-10, "α={alpha} θ={theta}: {closed} vs {b}");
            }
        }
    }
}

//! Gaussian formulas against the Fock simulator, and the physical trends
//! the functional should follow.

use cvbell_core::bell::{bell_functional, coincidence, BellAngles, Setting, VacuumProbe};
use cvbell_core::fock::{
    apply_passive, apply_squeeze, attenuate_fock, polarizer_vacuum_prob, psi1,
    squeezed_entangled_fock, DensityFock, FockState,
};
use cvbell_core::gaussian::{squeezed_entangled, GaussianState, ThermalParam};
use cvbell_core::symplectic::{
    beam_splitter, embed_passive, Mat8, PassiveUnitary, SqueezeParams,
    SymplecticMap,
};
use nalgebra::Matrix2;
use num_complex::Complex64;

const ANGLES: [f64; 4] = [1.32, 0.93, 3.66, 3.32];

fn reference_angles() -> BellAngles {
    BellAngles::new(ANGLES[0], ANGLES[1], ANGLES[2], ANGLES[3]).unwrap()
}

fn rates(r: &cvbell_core::bell::BellReport) -> [f64; 7] {
    [r.p_t1t2, r.p_t1t2p, r.p_t1pt2, r.p_t1pt2p, r.p_t1p_x, r.p_x_t2, r.p_xx]
}

fn gaussian(u: f64, v: f64, kappa: f64) -> GaussianState {
    squeezed_entangled(SqueezeParams::new(u, v).unwrap(), ThermalParam::new(kappa).unwrap())
}

#[test]
fn squeezed_vacuum_backends_agree() {
    let angles = [reference_angles(), BellAngles::new(0.2, 2.9, 4.1, 5.5).unwrap()];
    for (u, v) in [(0.2, -0.2), (0.45, 0.0), (0.5, -0.5)] {
        let f = squeezed_entangled_fock(SqueezeParams::new(u, v).unwrap(), 40).unwrap();
        assert!(f.tail() < 1e-10);
        let g = gaussian(u, v, 1.0);
        for a in &angles {
            let (rf, rg) = (bell_functional(&f, a).unwrap(), bell_functional(&g, a).unwrap());
            for (x, y) in rates(&rf).iter().zip(rates(&rg)) {
                assert!((x - y).abs() < 1e-6, "u={u} v={v}: {x} vs {y}");
            }
        }
    }
}

/// `⊗ (1-x) x^n` with `x = (1-κ)/(1+κ)` on modes 1 and 3, as a mixture of
/// number states.
fn thermal_mixture(kappa: f64, cutoff: usize) -> DensityFock {
    let x = (1.0 - kappa) / (1.0 + kappa);
    let cutoffs = [cutoff, 0, cutoff, 0];
    let mut branches = Vec::new();
    for n in 0..=cutoff {
        for m in 0..=cutoff {
            let w = (1.0 - x).powi(2) * x.powi((n + m) as i32);
            let mut s = FockState::zeros(cutoffs).unwrap();
            let idx = s.index([n, 0, m, 0]);
            let mut amp = s.amplitudes().to_vec();
            amp[idx] = Complex64::new(w.sqrt(), 0.0);
            s = FockState::from_amplitudes(cutoffs, amp).unwrap();
            branches.push(s);
        }
    }
    DensityFock::from_branches(branches).unwrap()
}

#[test]
fn thermal_vacuum_overlap_matches_number_state_mixture() {
    for kappa in [0.5, 0.8, 0.95] {
        let rho = thermal_mixture(kappa, 30);
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        let g = gaussian(0.0, 0.0, kappa);
        let single = 2.0 * kappa / (kappa + 1.0);
        let p1 = rho.polarizer_vacuum_prob(&[1], 0.0, 0.0).unwrap();
        let p13 = rho.polarizer_vacuum_prob(&[1, 3], 0.0, 0.0).unwrap();
        assert!((p1 - single).abs() < 1e-10);
        assert!((p13 - single * single).abs() < 1e-10);
        assert!((g.vacuum_overlap(&[1], 0.0, 0.0).unwrap() - single).abs() < 1e-12);
        assert!((g.vacuum_overlap(&[1, 3], 0.0, 0.0).unwrap() - single * single).abs() < 1e-12);
    }
}

/// `TMSV13` with modes 2 and 4 empty, built the same way in both backends.
/// The Fock state is prepared with headroom and then cut to a uniform
/// cutoff, since the polarizers move photons into modes 2 and 4.
fn single_pair(u: f64, cutoff: usize) -> (FockState, GaussianState) {
    let d = [-u, 0.0, u, 0.0, u, 0.0, -u, 0.0].map(f64::exp);
    let squeeze = SymplecticMap::new(Mat8::from_diagonal(&d.into())).unwrap();
    let (s, c) = std::f64::consts::FRAC_PI_4.sin_cos();
    let w = Matrix2::new(c, -s, s, c).map(|x| Complex64::new(x, 0.0));
    let mix = PassiveUnitary::two_mode(1, 3, &w).unwrap();
    let g = GaussianState::vacuum()
        .apply_symplectic(&embed_passive(&mix).compose(&squeeze))
        .unwrap();

    let mut f = FockState::vacuum([2 * cutoff, 0, 2 * cutoff, 0]).unwrap();
    f = apply_squeeze(&f, 1, u).unwrap();
    f = apply_squeeze(&f, 3, -u).unwrap();
    f = apply_passive(&f, &mix).unwrap();
    (f.resized([cutoff; 4]).unwrap(), g)
}

#[test]
fn loss_channel_matches_gaussian_attenuation() {
    let angles = reference_angles();
    for u in [0.2, 0.3] {
        let (f, g) = single_pair(u, 10);
        assert!(f.tail() < 1e-10);
        for t in [1.0, 0.8, 0.6] {
            let rho = attenuate_fock(&f, t).unwrap();
            let ga = g.attenuate(t).unwrap();
            let (rf, rg) = (
                bell_functional(&rho, &angles).unwrap(),
                bell_functional(&ga, &angles).unwrap(),
            );
            for (x, y) in rates(&rf).iter().zip(rates(&rg)) {
                assert!((x - y).abs() < 1e-9, "u={u} t={t}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn single_pair_splitter_matches_symplectic_splitter() {
    // the embedded unitary and the phase-space splitter are the same map
    let (_, g) = single_pair(0.4, 12);
    let d = [-0.4, 0.0, 0.4, 0.0, 0.4, 0.0, -0.4, 0.0].map(f64::exp);
    let squeeze = SymplecticMap::new(Mat8::from_diagonal(&d.into())).unwrap();
    let direct = GaussianState::vacuum()
        .apply_symplectic(&beam_splitter(1, 3, std::f64::consts::FRAC_PI_4).unwrap().compose(&squeeze))
        .unwrap();
    assert!((g.covariance() - direct.covariance()).amax() < 1e-14);
}

#[test]
fn psi1_correlations_factorize() {
    let s = psi1(2).unwrap();
    let single = |modes: &[usize], t1: f64, t2: f64| 1.0 - polarizer_vacuum_prob(&s, modes, t1, t2).unwrap();
    for t1 in [0.0, 0.4, 1.3, 2.2, 4.0, 5.9] {
        for t2 in [0.1, 0.9, 1.7, 3.3, 5.0] {
            let joint = coincidence(&s, Setting::Angle(t1), Setting::Angle(t2)).unwrap();
            let product = single(&[1], t1, t2) * single(&[3], t1, t2);
            assert!((joint - product).abs() < 1e-10, "θ=({t1}, {t2})");
        }
    }
}

#[test]
fn heat_erodes_violation() {
    let a = reference_angles();
    for u in [0.3, 0.5, 0.7] {
        let f: Vec<f64> = [1.0, 0.8, 0.7]
            .iter()
            .map(|&k| bell_functional(&gaussian(u, -u, k), &a).unwrap().f)
            .collect();
        assert!(f[0] > 0.0);
        assert!(f[0] >= f[1] && f[1] >= f[2], "u={u}: {f:?}");
    }
}

#[test]
fn leakage_keeps_some_violation() {
    let a = reference_angles();
    for t in [1.0, 0.8, 0.6] {
        let best = (1..=120)
            .map(|k| {
                let g = gaussian(0.01 * k as f64, -0.01 * k as f64, 1.0).attenuate(t).unwrap();
                bell_functional(&g, &a).unwrap().f
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best > 0.0, "T={t}");
    }
}

#[test]
fn tables_and_direct_calls_agree_on_mixtures() {
    let (f, _) = single_pair(0.25, 8);
    let rho = attenuate_fock(&f, 0.7).unwrap();
    let grid = [0.0, 1.1, 2.5, 4.0];
    let table = rho.vacuum_table(&grid).unwrap();
    let direct = VacuumProbe::vacuum_probabilities(&rho, Setting::Angle(grid[1]), Setting::Angle(grid[2])).unwrap();
    assert!((table.ab[4 + 2] - direct.ab).abs() < 1e-14);
    assert!((table.a[1] - direct.a).abs() < 1e-14);
    assert!((table.b[2] - direct.b).abs() < 1e-14);
}

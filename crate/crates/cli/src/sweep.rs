//! Evaluating sweeps point by point.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use cvbell_core::bell::{bell_functional, BellAngles, BellReport, EcsHybrid, VacuumProbe};
use cvbell_core::fock::{
    ecs_pair, psi1, psi2, pcs_pair, squeezed_entangled_fock, EcsParams, PcsParams,
};
use cvbell_core::gaussian::{squeezed_entangled, ThermalParam};
use cvbell_core::optimize::{optimize_angles, Optimum};
use cvbell_core::symplectic::SqueezeParams;

use crate::error::{CliError, Result};
use crate::spec::{AngleChoice, Backend, Family, SweepSpec, VRule};

/// One evaluated sweep point. Numeric fields are NaN when the point failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_name: String,
    pub sweep_value: f64,
    pub p_t1t2: f64,
    pub p_t1t2p: f64,
    pub p_t1pt2: f64,
    pub p_t1pt2p: f64,
    pub p_t1p_x: f64,
    pub p_x_t2: f64,
    pub p_xx: f64,
    pub f: f64,
    pub lower_margin: f64,
    pub violated: bool,
    pub backend: String,
    pub tail: f64,
    /// Angles used, after optimization if requested.
    pub angles: Option<[f64; 4]>,
    pub error: Option<String>,
}

impl SweepRow {
    fn ok(spec: &SweepSpec, value: f64, point: Point) -> Self {
        let r = point.report;
        SweepRow {
            sweep_name: spec.name.clone(),
            sweep_value: value,
            p_t1t2: r.p_t1t2,
            p_t1t2p: r.p_t1t2p,
            p_t1pt2: r.p_t1pt2,
            p_t1pt2p: r.p_t1pt2p,
            p_t1p_x: r.p_t1p_x,
            p_x_t2: r.p_x_t2,
            p_xx: r.p_xx,
            f: r.f,
            lower_margin: r.lower_margin,
            violated: r.violated,
            backend: point.backend.to_string(),
            tail: point.tail,
            angles: Some(point.angles.as_array()),
            error: None,
        }
    }

    fn failed(spec: &SweepSpec, value: f64, backend: &str, err: String) -> Self {
        let nan = f64::NAN;
        SweepRow {
            sweep_name: spec.name.clone(),
            sweep_value: value,
            p_t1t2: nan,
            p_t1t2p: nan,
            p_t1pt2: nan,
            p_t1pt2p: nan,
            p_t1p_x: nan,
            p_x_t2: nan,
            p_xx: nan,
            f: nan,
            lower_margin: nan,
            violated: false,
            backend: backend.to_string(),
            tail: nan,
            angles: None,
            error: Some(err),
        }
    }

    pub fn is_failure(&self) -> bool {
        self.error.is_some()
    }
}

/// Result of evaluating one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub angles: BellAngles,
    pub report: BellReport,
    /// Best violation on the grid, when the angles were optimized.
    pub grid_violation: Option<f64>,
    pub backend: &'static str,
    pub tail: f64,
}

/// Label recorded in the `backend` column.
pub fn backend_label(spec: &SweepSpec) -> &'static str {
    match (spec.resolved_backend(), spec.family, spec.backend) {
        (Backend::Gaussian, _, _) => "gaussian",
        (_, Family::Ecs, Backend::Auto) => "hybrid",
        _ => "fock",
    }
}

fn measure(
    state: &impl VacuumProbe,
    spec: &SweepSpec,
    backend: &'static str,
    tail: f64,
) -> cvbell_core::Result<Point> {
    let (angles, report, grid_violation) = match spec.angles {
        AngleChoice::Fixed(a) => (a, bell_functional(state, &a)?, None),
        AngleChoice::Optimize => {
            let Optimum {
                angles,
                report,
                grid_violation,
            } = optimize_angles(state, spec.density)?;
            (angles, report, Some(grid_violation))
        }
    };
    Ok(Point {
        angles,
        report,
        grid_violation,
        backend,
        tail,
    })
}

/// Builds the state for one sweep value and evaluates it.
pub fn evaluate_point(spec: &SweepSpec, value: f64) -> cvbell_core::Result<Point> {
    let label = backend_label(spec);
    let squeeze = || {
        let v = match spec.v_rule {
            VRule::MinusU => -value,
            VRule::Zero => 0.0,
        };
        SqueezeParams::new(value, v)
    };
    match spec.family {
        Family::PureGaussian | Family::SqueezedThermal | Family::Leakage => {
            let kappa = if spec.family == Family::SqueezedThermal { spec.kappa } else { 1.0 };
            if label == "fock" {
                let s = squeezed_entangled_fock(squeeze()?, spec.cutoff)?;
                return measure(&s, spec, label, s.tail());
            }
            let mut g = squeezed_entangled(squeeze()?, ThermalParam::new(kappa)?);
            if spec.family == Family::Leakage {
                g = g.attenuate(spec.transmittance)?;
            }
            measure(&g, spec, label, 0.0)
        }
        Family::Pcs => {
            let s = pcs_pair(PcsParams::new(Complex64::new(value, 0.0), spec.q)?, spec.cutoff)?;
            measure(&s, spec, label, s.tail())
        }
        Family::Ecs => {
            let p = EcsParams::real(value)?;
            if label == "hybrid" {
                let h = EcsHybrid::new(p, spec.cutoff)?;
                let tail = h.fock().tail();
                measure(&h, spec, label, tail)
            } else {
                let s = ecs_pair(p, spec.cutoff)?;
                measure(&s, spec, label, s.tail())
            }
        }
        Family::TwoPhoton => {
            let s = if value == 1.0 { psi1(spec.cutoff)? } else { psi2(spec.cutoff)? };
            measure(&s, spec, label, s.tail())
        }
    }
}

/// Evaluates every point of every spec on a pool of `jobs` threads. Rows come
/// back in spec order and then sweep order, whatever the scheduling.
pub fn run_sweeps(specs: &[SweepSpec], jobs: usize) -> Result<Vec<SweepRow>> {
    let mut points = Vec::new();
    for spec in specs {
        spec.validate()?;
        points.extend(spec.values()?.into_iter().map(|v| (spec, v)));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|&(spec, v)| match evaluate_point(spec, v) {
                Ok(p) => SweepRow::ok(spec, v, p),
                Err(e) => SweepRow::failed(spec, v, backend_label(spec), e.to_string()),
            })
            .collect()
    }))
}

/// [`run_sweeps`] for a single spec.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRow>> {
    run_sweeps(std::slice::from_ref(spec), jobs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> SweepSpec {
        crate::spec::parse_config(text).unwrap()
    }

    #[test]
    fn vacuum_row_is_all_zero() {
        let rows = run_sweep(&spec("family = pure_gaussian\nstop = 0"), 1).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        for p in [r.p_t1t2, r.p_t1t2p, r.p_t1pt2, r.p_t1pt2p, r.p_t1p_x, r.p_x_t2, r.p_xx] {
            assert!(p.abs() < 1e-14);
        }
        assert!(r.f.abs() < 1e-14);
        assert!(!r.violated);
        assert_eq!(r.backend, "gaussian");
    }

    #[test]
    fn failures_become_nan_rows() {
        // strong squeezing does not fit a small cutoff
        let rows = run_sweep(
            &spec("family = pure_gaussian\nbackend = fock\ncutoff = 10\nstart = 0.05\nstop = 0.85\nstep = 0.8"),
            1,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert!(!rows[0].is_failure(), "{:?}", rows[0].error);
        assert!(rows[1].is_failure());
        assert!(rows[1].f.is_nan() && !rows[1].violated);
        assert_eq!(rows[1].backend, "fock");
    }

    #[test]
    fn ecs_backends() {
        let h = run_sweep(&spec("family = ecs\nstart = 0.5\nstop = 0.5\ncutoff = 16"), 1).unwrap();
        let f = run_sweep(
            &spec("family = ecs\nstart = 0.5\nstop = 0.5\ncutoff = 16\nbackend = fock"),
            1,
        )
        .unwrap();
        assert_eq!(h[0].backend, "hybrid");
        assert_eq!(f[0].backend, "fock");
        assert!((h[0].f - f[0].f).abs() < 1e-10);
    }
}

//! Angle search for the largest violation.
//!
//! A coarse grid over `[0, 2π)⁴` is scored from a precomputed rate table,
//! then the best few grid points are refined by Nelder–Mead on the exact
//! functional. Everything is evaluated in a fixed order, so identical inputs
//! give bit-identical results.

use std::f64::consts::TAU;

use crate::bell::{bell_functional, BellAngles, BellReport, RateTable, VacuumProbe};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    /// Grid points per angle.
    pub density: usize,
    /// Number of best grid points refined.
    pub starts: usize,
    /// Nelder–Mead iterations per start.
    pub max_steps: usize,
    /// Stop once every simplex vertex is this close to the best one.
    pub tol: f64,
    /// Edge of the initial simplex, in radians.
    pub initial_step: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            density: 12,
            starts: 4,
            max_steps: 500,
            tol: 1e-6,
            initial_step: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub angles: BellAngles,
    pub report: BellReport,
    /// Best violation on the grid before refinement.
    pub grid_violation: f64,
}

/// [`optimize_angles_with`] using the default options at the given density.
pub fn optimize_angles(state: &impl VacuumProbe, density: usize) -> Result<Optimum> {
    optimize_angles_with(
        state,
        &OptimizeOptions {
            density,
            ..OptimizeOptions::default()
        },
    )
}

/// Maximizes [`BellReport::violation`], i.e. the larger of `f` and
/// `-(f + P( , ))`.
pub fn optimize_angles_with(state: &impl VacuumProbe, opts: &OptimizeOptions) -> Result<Optimum> {
    if opts.density < 4 {
        return Err(Error::invalid(format!(
            "grid density must be at least 4, got {}",
            opts.density
        )));
    }
    if opts.starts == 0 || !(opts.tol > 0.0) || !(opts.initial_step > 0.0) {
        return Err(Error::invalid("optimizer needs starts >= 1 and positive tolerances"));
    }
    let n = opts.density;
    let grid: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    let table = RateTable::new(state, &grid)?;

    let mut scored: Vec<(f64, usize)> = (0..n.pow(4))
        .map(|idx| {
            let (i, j, k, l) = (idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n);
            (table.report(i, j, k, l).violation(), idx)
        })
        .collect();
    // stable order: larger violation first, then lower index
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let grid_violation = scored[0].0;

    let mut best: Option<(BellAngles, BellReport)> = None;
    for &(_, idx) in scored.iter().take(opts.starts) {
        let start = [idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n].map(|g| grid[g]);
        let (angles, report) = nelder_mead(state, start, opts)?;
        let better = match &best {
            None => true,
            Some((_, r)) => report.violation() > r.violation(),
        };
        if better {
            best = Some((angles, report));
        }
    }
    let (angles, report) = best.expect("at least one start");
    Ok(Optimum {
        angles,
        report,
        grid_violation,
    })
}

fn evaluate(state: &impl VacuumProbe, x: &[f64; 4]) -> Result<(BellAngles, BellReport)> {
    let a = BellAngles::new(x[0], x[1], x[2], x[3])?;
    Ok((a, bell_functional(state, &a)?))
}

/// Downhill simplex on `-violation` with the usual coefficients
/// (reflection 1, expansion 2, contraction ½, shrink ½).
fn nelder_mead(
    state: &impl VacuumProbe,
    start: [f64; 4],
    opts: &OptimizeOptions,
) -> Result<(BellAngles, BellReport)> {
    type Point = ([f64; 4], f64, BellAngles, BellReport);
    let eval = |x: [f64; 4]| -> Result<Point> {
        let (a, r) = evaluate(state, &x)?;
        Ok((x, -r.violation(), a, r))
    };
    let mut simplex: Vec<Point> = Vec::with_capacity(5);
    simplex.push(eval(start)?);
    for d in 0..4 {
        let mut x = start;
        x[d] += opts.initial_step;
        simplex.push(eval(x)?);
    }
    let lerp = |a: &[f64; 4], b: &[f64; 4], t: f64| -> [f64; 4] {
        std::array::from_fn(|d| a[d] + t * (b[d] - a[d]))
    };

    for _ in 0..opts.max_steps {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|p| (0..4).map(|d| (p.0[d] - simplex[0].0[d]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.tol {
            break;
        }
        let centroid: [f64; 4] =
            std::array::from_fn(|d| simplex[..4].iter().map(|p| p.0[d]).sum::<f64>() / 4.0);
        let worst = simplex[4];
        let reflected = eval(lerp(&centroid, &worst.0, -1.0))?;
        if reflected.1 < simplex[0].1 {
            let expanded = eval(lerp(&centroid, &worst.0, -2.0))?;
            simplex[4] = if expanded.1 < reflected.1 { expanded } else { reflected };
            continue;
        }
        if reflected.1 < simplex[3].1 {
            simplex[4] = reflected;
            continue;
        }
        let contracted = if reflected.1 < worst.1 {
            eval(lerp(&centroid, &reflected.0, 0.5))?
        } else {
            eval(lerp(&centroid, &worst.0, 0.5))?
        };
        if contracted.1 < worst.1.min(reflected.1) {
            simplex[4] = contracted;
            continue;
        }
        let best = simplex[0].0;
        for p in simplex.iter_mut().skip(1) {
            *p = eval(lerp(&best, &p.0, 0.5))?;
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (_, _, angles, report) = simplex.swap_remove(0);
    Ok((angles, report))
}

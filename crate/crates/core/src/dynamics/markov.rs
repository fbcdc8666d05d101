use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::config::{SimulationConfig, TimeGrid};
use crate::density::{devectorize, vectorize, DensityMatrix};
use crate::error::{Error, Result};
use crate::superop::Superoperator;

use super::trajectory::Trajectory;

/// Most step halvings attempted before giving up.
const MAX_HALVINGS: u32 = 20;

/// One classical 4-stage Runge-Kutta step of a linear equation, as a matrix:
/// `I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24`.
fn rk4_step(l: &DMatrix<C64>, h: f64) -> DMatrix<C64> {
    let n = l.nrows();
    let hl = l * C64::new(h, 0.0);
    let mut term = DMatrix::identity(n, n);
    let mut out = term.clone();
    for k in 1..=4 {
        term = &term * &hl / C64::new(k as f64, 0.0);
        out += &term;
    }
    out
}

/// Propagator over `h` made of `2^level` RK4 substeps.
fn propagator(l: &DMatrix<C64>, h: f64, level: u32) -> DMatrix<C64> {
    let mut p = rk4_step(l, h / 2f64.powi(level as i32));
    for _ in 0..level {
        p = &p * &p;
    }
    p
}

/// Integrates `d rho/dt = L rho` on `grid` with RK4, halving the internal
/// step until the step-halving estimate of the global error is below
/// `cfg.ode_tol`.
pub fn evolve_markov(
    generator: &Superoperator,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    cfg: &SimulationConfig,
) -> Result<Trajectory> {
    grid.validate()?;
    if rho0.dim() != generator.dim() {
        return Err(Error::Dimension {
            expected: generator.dim(),
            actual: rho0.dim(),
        });
    }
    let l = generator.matrix();
    let steps = grid.steps();
    let mut level = 0;
    let mut coarse = propagator(l, grid.step, level);
    let (prop, estimate) = loop {
        let fine = propagator(l, grid.step, level + 1);
        let local = (&coarse - &fine)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            / 15.0;
        let estimate = local * steps.max(1) as f64;
        if estimate <= cfg.ode_tol {
            break (fine, estimate);
        }
        level += 1;
        if level > MAX_HALVINGS {
            return Err(Error::Step(format!(
                "RK4 did not reach tolerance {:.1e} after {MAX_HALVINGS} halvings (estimate {estimate:.3e})",
                cfg.ode_tol
            )));
        }
        coarse = fine;
    };
    let d = rho0.dim();
    let mut traj = Trajectory::new(steps + 1);
    let mut v = vectorize(rho0);
    let times = grid.times();
    traj.push(times[0], rho0.clone(), &cfg.tolerances);
    for &t in &times[1..] {
        v = &prop * &v;
        traj.push(t, devectorize(&v, d)?, &cfg.tolerances);
    }
    traj.error_estimate = Some(estimate);
    Ok(traj)
}

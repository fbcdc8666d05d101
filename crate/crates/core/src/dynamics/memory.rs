//! Volterra solver for `d rho/dt = -i[H, rho] + int_0^t K(s) rho(t - s) ds`.
//!
//! The state is written as `rho_qq'(t) = exp(-i E_qq' t) r_qq'(t)` with `r`
//! interpolated linearly between coarse nodes, so the history weights
//!
//! ```text
//! W_j[c] = exp(-i E_c j D) int K(s)[., c] exp(i E_c s) hat_j(s) ds
//! ```
//!
//! absorb the fast free phases and are integrated on the kernel's fine grid.
//! Time stepping uses the exponential trapezoid rule, solved exactly for the
//! implicit `W_0` contribution.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use std::collections::VecDeque;

use crate::config::{SimulationConfig, TimeGrid};
use crate::density::{devectorize, vectorize, DensityMatrix};
use crate::error::{invalid, Error, Result};
use crate::kernel::MemoryKernel;
use crate::system::SystemSpec;

use super::trajectory::Trajectory;

/// Largest tolerated share of `int |K|` in the second half of the kept history.
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-2;

#[derive(Debug, Clone, Copy)]
pub struct MemoryOptions {
    pub tail_threshold: f64,
    /// Repeat the run with half the step and record the deviation.
    pub check_halving: bool,
}

impl Default for MemoryOptions {
    fn default() -> Self {
        Self {
            tail_threshold: DEFAULT_TAIL_THRESHOLD,
            check_halving: false,
        }
    }
}

pub fn evolve_memory(
    sys: &SystemSpec,
    kernel: &MemoryKernel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    cfg: &SimulationConfig,
) -> Result<Trajectory> {
    evolve_memory_with(sys, kernel, rho0, grid, cfg, &MemoryOptions::default())
}

pub fn evolve_memory_with(
    sys: &SystemSpec,
    kernel: &MemoryKernel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    cfg: &SimulationConfig,
    opts: &MemoryOptions,
) -> Result<Trajectory> {
    let mut traj = integrate(sys, kernel, rho0, grid, cfg, opts)?;
    if opts.check_halving {
        let half = TimeGrid {
            start: grid.start,
            stop: grid.stop,
            step: 0.5 * grid.step,
        };
        let fine = integrate(sys, kernel, rho0, &half, cfg, opts)?;
        let dev = traj
            .states
            .iter()
            .zip(fine.states.iter().step_by(2))
            .map(|(a, b)| {
                (a.matrix() - b.matrix())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        // Second-order scheme: the coarse error is about 4/3 of the difference.
        traj.error_estimate = Some(dev * 4.0 / 3.0);
    }
    Ok(traj)
}

fn integrate(
    sys: &SystemSpec,
    kernel: &MemoryKernel,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    cfg: &SimulationConfig,
    opts: &MemoryOptions,
) -> Result<Trajectory> {
    grid.validate()?;
    let d = sys.dim();
    if kernel.dim() != d || rho0.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            actual: if kernel.dim() != d {
                kernel.dim()
            } else {
                rho0.dim()
            },
        });
    }
    if kernel.energies() != sys.energies() {
        return Err(invalid("memory kernel was sampled for a different system"));
    }
    let big = grid.step;
    let ratio = big / kernel.step();
    let m = ratio.round() as usize;
    if m == 0 || (ratio - m as f64).abs() > 1e-9 * ratio {
        return Err(invalid(format!(
            "time step {big} must be an integer multiple of the kernel step {}",
            kernel.step()
        )));
    }
    let total = grid.stop - grid.start;
    let keep = cfg.history_depth.min(kernel.depth());
    let jmax = ((keep / big) + 1e-9).floor() as usize;
    if jmax == 0 {
        return Err(invalid(format!(
            "history of {keep} is shorter than one time step {big}"
        )));
    }
    if keep < total {
        let tail = kernel.tail_fraction(jmax as f64 * big);
        if tail > opts.tail_threshold {
            return Err(Error::Limit(format!(
                "memory kernel tail share {tail:.3e} beyond lag {:.3} exceeds {:.1e}; increase history_depth",
                jmax as f64 * big,
                opts.tail_threshold
            )));
        }
    }
    let steps = grid.steps();
    let jmax = jmax.min(steps.max(1));
    let (full, left) = history_weights(sys, kernel, m, jmax, big);

    let n = d * d;
    let row_e: Vec<f64> = (0..n).map(|r| sys.splitting(r / d, r % d)).collect();
    let phase: DVector<C64> =
        DVector::from_iterator(n, row_e.iter().map(|&e| C64::from_polar(1.0, -e * big)));
    let half = C64::new(0.5 * big, 0.0);
    let implicit = DMatrix::<C64>::identity(n, n) - &full[0] * half;
    let lu = implicit.lu();

    let mut traj = Trajectory::new(steps + 1);
    let times = grid.times();
    let mut history: VecDeque<DVector<C64>> = VecDeque::with_capacity(jmax + 1);
    let v0 = vectorize(rho0);
    history.push_front(v0.clone());
    traj.push(times[0], rho0.clone(), &cfg.tolerances);
    let mut current_i = DVector::<C64>::zeros(n);
    for (k, &t) in times.iter().enumerate().skip(1) {
        // History part of I at the new time (all lags j >= 1).
        let mut rest = DVector::<C64>::zeros(n);
        for (idx, v) in history.iter().enumerate() {
            let j = idx + 1;
            if j > jmax {
                break;
            }
            let w = if j == k || j == jmax {
                &left[j]
            } else {
                &full[j]
            };
            rest += w * v;
        }
        let prev = history.front().expect("history is never empty");
        let rhs = prev.component_mul(&phase) + (current_i.component_mul(&phase) + &rest) * half;
        let next = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Step("implicit memory step is singular".into()))?;
        current_i = &full[0] * &next + rest;
        traj.push(t, devectorize(&next, d)?, &cfg.tolerances);
        history.push_front(next);
        if history.len() > jmax {
            history.pop_back();
        }
    }
    Ok(traj)
}

/// Interior weights `W_j` (full hat) and boundary weights (left half-hat),
/// for `j = 0..=jmax`.
fn history_weights(
    sys: &SystemSpec,
    kernel: &MemoryKernel,
    m: usize,
    jmax: usize,
    big: f64,
) -> (Vec<DMatrix<C64>>, Vec<DMatrix<C64>>) {
    let d = sys.dim();
    let n = d * d;
    let h = kernel.step();
    let col_e: Vec<f64> = (0..n).map(|c| sys.splitting(c / d, c % d)).collect();
    let samples = kernel.samples();
    let zero = DMatrix::<C64>::zeros(n, n);
    // Half-hat integrals over [j D - D, j D] (left) and [j D, j D + D] (right).
    let mut left = vec![zero.clone(); jmax + 1];
    let mut right = vec![zero.clone(); jmax + 1];
    for seg in 0..jmax {
        // Segment [seg D, (seg + 1) D] feeds right[seg] and left[seg + 1].
        for i in 0..=m {
            let fine = seg * m + i;
            let s = fine as f64 * h;
            let trap = if i == 0 || i == m { 0.5 } else { 1.0 };
            let up = i as f64 / m as f64;
            let k = samples[fine].matrix();
            for c in 0..n {
                let e = C64::from_polar(trap * h, col_e[c] * s);
                for r in 0..n {
                    let v = k[(r, c)] * e;
                    right[seg][(r, c)] += v * (1.0 - up);
                    left[seg + 1][(r, c)] += v * up;
                }
            }
        }
    }
    let shift = |w: &mut DMatrix<C64>, j: usize| {
        for c in 0..n {
            let ph = C64::from_polar(1.0, -col_e[c] * j as f64 * big);
            for r in 0..n {
                w[(r, c)] *= ph;
            }
        }
    };
    let mut full = Vec::with_capacity(jmax + 1);
    for j in 0..=jmax {
        let mut w = &left[j] + &right[j];
        shift(&mut w, j);
        shift(&mut left[j], j);
        full.push(w);
    }
    (full, left)
}

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub pos: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            trace: 1e-10,
            pos: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let grid = Self { start, stop, step };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(invalid(format!(
                "time step must be positive, got {}",
                self.step
            )));
        }
        if !(self.stop >= self.start) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(invalid(format!(
                "time grid [{}, {}] is not increasing",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Number of steps; the last point is snapped onto `stop` when within
    /// 1e-9 of a step.
    pub fn steps(&self) -> usize {
        ((self.stop - self.start) / self.step - 1e-9)
            .ceil()
            .max(0.0) as usize
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps())
            .map(|k| self.start + k as f64 * self.step)
            .collect()
    }
}

/// Numerical settings shared by the kernel and dynamics modules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub time_grid: TimeGrid,
    pub tolerances: Tolerances,
    /// Kronecker width for the secular (RWA) energy selectors.
    pub energy_match_tol: f64,
    /// Half-width of the principal-value exclusion window.
    pub pv_exclusion: f64,
    /// Upper limit of spectral integrals; `None` picks the default from the bath.
    pub omega_cutoff: Option<f64>,
    /// Memory kept by the Volterra solver (time units).
    pub history_depth: f64,
    /// Integrator tolerance checked by step halving.
    pub ode_tol: f64,
    /// Keep the secular selectors (rotating-wave approximation).
    pub rwa: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            time_grid: TimeGrid {
                start: 0.0,
                stop: 10.0,
                step: 0.01,
            },
            tolerances: Tolerances::default(),
            energy_match_tol: 1e-9,
            pv_exclusion: 1e-3,
            omega_cutoff: None,
            history_depth: 20.0,
            ode_tol: 1e-9,
            rwa: true,
        }
    }
}

/// Minimum ratio between the spectral cutoff and the largest system splitting.
pub const CUTOFF_SPLITTING_FACTOR: f64 = 5.0;

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.time_grid.validate()?;
        let t = &self.tolerances;
        for (name, v) in [
            ("tol_herm", t.herm),
            ("tol_trace", t.trace),
            ("tol_pos", t.pos),
            ("energy_match_tol", self.energy_match_tol),
            ("pv_exclusion", self.pv_exclusion),
            ("history_depth", self.history_depth),
            ("ode_tol", self.ode_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(c) = self.omega_cutoff {
            if !(c > 0.0) || !c.is_finite() {
                return Err(invalid(format!("omega_cutoff must be positive, got {c}")));
            }
        }
        Ok(())
    }

    /// Checks the cutoff against the system's largest splitting.
    pub fn check_cutoff(&self, cutoff: f64, max_splitting: f64) -> Result<()> {
        if cutoff < CUTOFF_SPLITTING_FACTOR * max_splitting {
            return Err(invalid(format!(
                "omega_cutoff {cutoff} must exceed {CUTOFF_SPLITTING_FACTOR} x max |E_pq| = {}",
                CUTOFF_SPLITTING_FACTOR * max_splitting
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_steps_snap_to_stop() {
        let g = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.steps(), 10);
        assert!((g.times().last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(TimeGrid::new(1.0, 0.0, 0.1).is_err());
        let cfg = SimulationConfig {
            pv_exclusion: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        assert!(SimulationConfig::default().validate().is_ok());
        assert!(SimulationConfig::default().check_cutoff(4.0, 1.0).is_err());
    }
}

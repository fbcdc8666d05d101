use serde::Serialize;

use crate::config::Tolerances;
use crate::density::{DensityMatrix, DensityReport};

/// Time-ordered sequence of states with per-step diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub diagnostics: Vec<DensityReport>,
    /// Step-halving estimate of the global integration error, when computed.
    pub error_estimate: Option<f64>,
    /// Indices of steps whose minimum eigenvalue fell below `-tol_pos`.
    pub positivity_violations: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub steps: usize,
    pub max_trace_defect: f64,
    pub max_hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub error_estimate: Option<f64>,
    pub positivity_violations: usize,
}

impl Trajectory {
    pub(crate) fn new(capacity: usize) -> Self {
        Self {
            times: Vec::with_capacity(capacity),
            states: Vec::with_capacity(capacity),
            diagnostics: Vec::with_capacity(capacity),
            error_estimate: None,
            positivity_violations: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, t: f64, rho: DensityMatrix, tol: &Tolerances) {
        let report = rho.report();
        if report.min_eigenvalue < -tol.pos {
            self.positivity_violations.push(self.states.len());
        }
        self.times.push(t);
        self.states.push(rho);
        self.diagnostics.push(report);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    pub fn summary(&self) -> TrajectorySummary {
        let fold =
            |f: fn(&DensityReport) -> f64| self.diagnostics.iter().map(f).fold(0.0, f64::max);
        TrajectorySummary {
            steps: self.len(),
            max_trace_defect: fold(|r| r.trace_defect),
            max_hermiticity_defect: fold(|r| r.hermiticity_defect),
            min_eigenvalue: self
                .diagnostics
                .iter()
                .map(|r| r.min_eigenvalue)
                .fold(f64::INFINITY, f64::min),
            error_estimate: self.error_estimate,
            positivity_violations: self.positivity_violations.len(),
        }
    }

    /// Largest element-wise distance to another trajectory on the same grid.
    pub fn max_deviation(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| {
                (a.matrix() - b.matrix())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Largest population (diagonal) distance to another trajectory.
    pub fn max_population_deviation(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| {
                (0..a.dim())
                    .map(|p| (a.get(p, p) - b.get(p, p)).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

use crate::bath::BathCorrelation;
use crate::error::{invalid, Error, Result};
use crate::superop::Superoperator;
use crate::system::SystemSpec;

use super::born::born_kernel_time;

/// Born kernel sampled on the uniform grid `t_j = j * step`, `j = 0..len`.
#[derive(Debug, Clone)]
pub struct MemoryKernel {
    step: f64,
    samples: Vec<Superoperator>,
    energies: Vec<f64>,
}

impl MemoryKernel {
    /// Samples `K(t)` on `[0, depth]`.
    pub fn sample(sys: &SystemSpec, corr: &BathCorrelation, step: f64, depth: f64) -> Result<Self> {
        if !(step > 0.0) || !(depth >= step) || !depth.is_finite() {
            return Err(invalid(format!(
                "kernel grid needs 0 < step <= depth, got step {step}, depth {depth}"
            )));
        }
        let n = (depth / step).round() as usize + 1;
        let samples = (0..n)
            .map(|j| born_kernel_time(sys, corr, j as f64 * step))
            .collect();
        Ok(Self {
            step,
            samples,
            energies: sys.energies().to_vec(),
        })
    }

    pub fn from_samples(sys: &SystemSpec, step: f64, samples: Vec<Superoperator>) -> Result<Self> {
        if !(step > 0.0) || samples.len() < 2 {
            return Err(invalid(
                "kernel needs a positive step and at least two samples",
            ));
        }
        if let Some(s) = samples.iter().find(|s| s.dim() != sys.dim()) {
            return Err(Error::Dimension {
                expected: sys.dim(),
                actual: s.dim(),
            });
        }
        Ok(Self {
            step,
            samples,
            energies: sys.energies().to_vec(),
        })
    }

    /// All-zero kernel of the given length.
    pub fn zero(sys: &SystemSpec, step: f64, len: usize) -> Result<Self> {
        Self::from_samples(sys, step, vec![Superoperator::zeros(sys.dim()); len.max(2)])
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Longest lag covered by the samples.
    pub fn depth(&self) -> f64 {
        self.step * (self.samples.len() - 1) as f64
    }

    pub fn samples(&self) -> &[Superoperator] {
        &self.samples
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Share of `int |K|` carried by the second half of `[0, lag]`, a proxy
    /// for the weight discarded when the history is cut at `lag`.
    pub fn tail_fraction(&self, lag: f64) -> f64 {
        let n = ((lag / self.step).round() as usize).min(self.samples.len() - 1);
        if n < 2 {
            return 1.0;
        }
        let norms: Vec<f64> = self.samples[..=n].iter().map(|s| s.max_abs()).collect();
        let trap = |lo: usize, hi: usize| -> f64 {
            (lo..hi).map(|j| 0.5 * (norms[j] + norms[j + 1])).sum()
        };
        let total = trap(0, n);
        if total == 0.0 {
            return 0.0;
        }
        trap(n / 2, n) / total
    }

    pub fn max_trace_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.trace_defect())
            .fold(0.0, f64::max)
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.hermiticity_defect())
            .fold(0.0, f64::max)
    }
}

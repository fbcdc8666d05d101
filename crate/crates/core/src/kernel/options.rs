use crate::config::SimulationConfig;
use crate::error::{invalid, Result};
use crate::system::SystemSpec;

use super::assembly::Selector;

/// Settings shared by every kernel assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelOptions {
    /// Keep only elements with `E_pp' = E_qq'`.
    pub rwa: bool,
    /// Relative width of the energy selector, in units of the largest splitting.
    pub energy_match_tol: f64,
    /// Half-width of the principal-value exclusion window.
    pub pv_exclusion: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self::from(&SimulationConfig::default())
    }
}

impl From<&SimulationConfig> for KernelOptions {
    fn from(cfg: &SimulationConfig) -> Self {
        Self {
            rwa: cfg.rwa,
            energy_match_tol: cfg.energy_match_tol,
            pv_exclusion: cfg.pv_exclusion,
        }
    }
}

impl KernelOptions {
    pub fn without_rwa(mut self) -> Self {
        self.rwa = false;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.energy_match_tol > 0.0) || !(self.pv_exclusion > 0.0) {
            return Err(invalid(
                "energy_match_tol and pv_exclusion must be positive",
            ));
        }
        Ok(())
    }

    /// Absolute energy tolerance for `sys`.
    pub fn energy_tol(&self, sys: &SystemSpec) -> f64 {
        let scale = sys.max_splitting();
        self.energy_match_tol * if scale > 0.0 { scale } else { 1.0 }
    }

    pub(crate) fn selector(&self, sys: &SystemSpec) -> Selector {
        Selector {
            rwa: self.rwa,
            tol: self.energy_tol(sys),
        }
    }
}

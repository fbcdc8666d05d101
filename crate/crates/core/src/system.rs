//! Few-level system in its energy eigenbasis.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type CMatrix = DMatrix<C64>;

/// Bath operator a coupling channel multiplies in `H_SB = sum_a S^a B^a`.
///
/// Channel 1 couples to `B = sum_k lambda_k b_k`, channel 2 to `B^dagger`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Channel {
    Lower,
    Raise,
}

impl Channel {
    pub const ALL: [Channel; 2] = [Channel::Lower, Channel::Raise];

    pub fn index(self) -> usize {
        match self {
            Channel::Lower => 0,
            Channel::Raise => 1,
        }
    }

    /// 1-based label (1 for B, 2 for B^dagger).
    pub fn label(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_label(label: u8) -> Option<Self> {
        match label {
            1 => Some(Channel::Lower),
            2 => Some(Channel::Raise),
            _ => None,
        }
    }

    pub fn conjugate(self) -> Self {
        match self {
            Channel::Lower => Channel::Raise,
            Channel::Raise => Channel::Lower,
        }
    }
}

/// Tolerance used to check `S^(conj a) = (S^a)^dagger`.
const PAIR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    energies: Vec<f64>,
    couplings: [CMatrix; 2],
}

impl SystemSpec {
    /// Builds a system from its level energies and the channel-1 coupling
    /// operator `S`; channel 2 carries `S^dagger`.
    pub fn new(energies: Vec<f64>, coupling: CMatrix) -> Result<Self> {
        let adjoint = coupling.adjoint();
        Self::with_couplings(energies, [coupling, adjoint])
    }

    /// Builds a system from both channel operators, checking that they form a
    /// conjugate pair.
    pub fn with_couplings(energies: Vec<f64>, couplings: [CMatrix; 2]) -> Result<Self> {
        let d = energies.len();
        if d < 2 {
            return Err(invalid(format!("system dimension must be >= 2, got {d}")));
        }
        if let Some(e) = energies.iter().find(|e| !e.is_finite()) {
            return Err(invalid(format!("non-finite energy {e}")));
        }
        for (i, s) in couplings.iter().enumerate() {
            if s.nrows() != d || s.ncols() != d {
                return Err(invalid(format!(
                    "coupling {} is {}x{}, expected {d}x{d}",
                    i + 1,
                    s.nrows(),
                    s.ncols()
                )));
            }
            if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(invalid(format!(
                    "coupling {} has non-finite entries",
                    i + 1
                )));
            }
        }
        let scale = couplings[0].iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = (&couplings[1] - couplings[0].adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > PAIR_TOL * scale {
            return Err(invalid(format!(
                "couplings are not a conjugate pair (defect {defect:.3e})"
            )));
        }
        Ok(Self {
            energies,
            couplings,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `E_pq = E_p - E_q`.
    pub fn splitting(&self, p: usize, q: usize) -> f64 {
        self.energies[p] - self.energies[q]
    }

    pub fn coupling(&self, channel: Channel) -> &CMatrix {
        &self.couplings[channel.index()]
    }

    /// Involution on channel indices (`conjugate_pairs[a]` is the partner of `a`).
    pub fn conjugate_pairs(&self) -> [usize; 2] {
        [1, 0]
    }

    pub fn hamiltonian(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|&e| C64::new(e, 0.0)),
        ))
    }

    pub fn max_splitting(&self) -> f64 {
        let max = self
            .energies
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn is_uncoupled(&self) -> bool {
        self.couplings[0].iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}

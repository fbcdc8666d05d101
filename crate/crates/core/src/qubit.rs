//! Closed-form two-level system coupled through `sigma^+ B + sigma^- B^dag`.
//!
//! Basis index 0 is the excited level `+` (energy `omega0/2`), index 1 is `-`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::bath::{planck_occupation, spectral_density, BathCorrelation};
use crate::density::DensityMatrix;
use crate::error::{invalid, Result};
use crate::kernel::{gksl_builder, shift_at, JumpSet, KernelOptions};
use crate::superop::Superoperator;
use crate::system::{CMatrix, SystemSpec};

pub const PLUS: usize = 0;
pub const MINUS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitParams {
    pub omega0: f64,
    /// Spectral density at the splitting.
    pub g0: f64,
    /// Thermal occupation at the splitting.
    pub n0: f64,
    /// Lamb shift.
    pub delta: f64,
}

impl QubitParams {
    pub fn new(omega0: f64, g0: f64, n0: f64, delta: f64) -> Result<Self> {
        let p = Self {
            omega0,
            g0,
            n0,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0) || !self.omega0.is_finite() {
            return Err(invalid(format!(
                "omega0 must be positive, got {}",
                self.omega0
            )));
        }
        if !(self.g0 >= 0.0) || !self.g0.is_finite() {
            return Err(invalid(format!("g0 must be non-negative, got {}", self.g0)));
        }
        if !(self.n0 >= 0.0) || !self.n0.is_finite() {
            return Err(invalid(format!("n0 must be non-negative, got {}", self.n0)));
        }
        if !self.delta.is_finite() {
            return Err(invalid("delta must be finite"));
        }
        Ok(())
    }

    /// Reads `g0`, `n0` off the bath and computes the shift numerically.
    pub fn from_bath(omega0: f64, corr: &BathCorrelation, opts: &KernelOptions) -> Result<Self> {
        let spec = corr.spec();
        let g0 = spectral_density(spec, omega0)?;
        let n0 = planck_occupation(omega0, spec.beta)?;
        let sys = system(omega0)?;
        let delta = shift_at(&sys, corr, omega0, opts)?
            .get(PLUS, MINUS, PLUS, MINUS)
            .re;
        Self::new(omega0, g0, n0, delta)
    }

    /// Population relaxation rate `g0 (1 + 2 n0)`.
    pub fn relaxation_rate(&self) -> f64 {
        self.g0 * (1.0 + 2.0 * self.n0)
    }

    pub fn excited_population_limit(&self) -> f64 {
        self.n0 / (1.0 + 2.0 * self.n0)
    }

    /// Renormalised transition frequency `omega0 - delta`.
    pub fn shifted_frequency(&self) -> f64 {
        self.omega0 - self.delta
    }

    /// Coherence-sector resonance `omega0 - delta - i g0 (1 + 2 n0) / 2`.
    pub fn coherence_resonance(&self) -> C64 {
        C64::new(self.shifted_frequency(), -0.5 * self.relaxation_rate())
    }

    pub fn steady_state_purity(&self) -> f64 {
        let z = 1.0 / (1.0 + 2.0 * self.n0);
        0.5 * (1.0 + z * z)
    }
}

/// Qubit `SystemSpec` with channel-1 coupling `sigma^+`.
pub fn system(omega0: f64) -> Result<SystemSpec> {
    SystemSpec::new(vec![0.5 * omega0, -0.5 * omega0], sigma_plus())
}

pub fn sigma_plus() -> CMatrix {
    let mut m = DMatrix::zeros(2, 2);
    m[(PLUS, MINUS)] = C64::new(1.0, 0.0);
    m
}

pub fn sigma_minus() -> CMatrix {
    sigma_plus().transpose()
}

pub fn sigma_z() -> CMatrix {
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        C64::new(1.0, 0.0),
        C64::new(-1.0, 0.0),
    ]))
}

/// The non-vanishing elements of the dissipative kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitRates {
    pub pp_pp: f64,
    pub mm_pp: f64,
    pub pp_mm: f64,
    pub mm_mm: f64,
    pub pm_pm: f64,
    pub mp_mp: f64,
}

/// One rate entry: row pair, column pair, value.
pub type RateEntry = ((usize, usize), (usize, usize), f64);

impl QubitRates {
    /// `(row, column, value)` entries, rows and columns as `(p, p')` pairs.
    pub fn entries(&self) -> [RateEntry; 6] {
        [
            ((PLUS, PLUS), (PLUS, PLUS), self.pp_pp),
            ((MINUS, MINUS), (PLUS, PLUS), self.mm_pp),
            ((PLUS, PLUS), (MINUS, MINUS), self.pp_mm),
            ((MINUS, MINUS), (MINUS, MINUS), self.mm_mm),
            ((PLUS, MINUS), (PLUS, MINUS), self.pm_pm),
            ((MINUS, PLUS), (MINUS, PLUS), self.mp_mp),
        ]
    }

    pub fn to_superoperator(&self) -> Superoperator {
        let mut s = Superoperator::zeros(2);
        for ((p, pp), (q, qq), v) in self.entries() {
            s.add_to(p, pp, q, qq, C64::new(v, 0.0));
        }
        s
    }
}

pub fn qubit_rates(p: &QubitParams) -> QubitRates {
    let down = p.g0 * (1.0 + p.n0);
    let up = p.g0 * p.n0;
    let coh = -0.5 * p.relaxation_rate();
    QubitRates {
        pp_pp: -down,
        mm_pp: down,
        pp_mm: up,
        mm_mm: 0.0 - up,
        pm_pm: coh,
        mp_mp: coh,
    }
}

/// Exact solution of the qubit master equation at time `t`.
pub fn qubit_analytic(p: &QubitParams, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != 2 {
        return Err(crate::Error::Dimension {
            expected: 2,
            actual: rho0.dim(),
        });
    }
    let trace = rho0.trace().re;
    let decay = (-p.relaxation_rate() * t).exp();
    let limit = p.excited_population_limit() * trace;
    let excited = rho0.get(PLUS, PLUS).re * decay + limit * (1.0 - decay);
    let ground = rho0.get(MINUS, MINUS).re * decay + (trace - limit) * (1.0 - decay);
    let coherence = rho0.get(PLUS, MINUS)
        * C64::from_polar(
            (-0.5 * p.relaxation_rate() * t).exp(),
            -p.shifted_frequency() * t,
        );
    let mut m = DMatrix::zeros(2, 2);
    m[(PLUS, PLUS)] = C64::new(excited, 0.0);
    m[(MINUS, MINUS)] = C64::new(ground, 0.0);
    m[(PLUS, MINUS)] = coherence;
    m[(MINUS, PLUS)] = coherence.conj();
    Ok(DensityMatrix::from_raw(m))
}

/// GKSL generator with `H = (omega0 - delta) sigma_z / 2` and decay/excitation jumps.
pub fn qubit_lindblad_generator(p: &QubitParams) -> Result<Superoperator> {
    p.validate()?;
    let h = sigma_z() * C64::new(0.5 * p.shifted_frequency(), 0.0);
    let rate = |g: f64| DMatrix::from_element(1, 1, C64::new(g, 0.0));
    let jumps = [
        JumpSet {
            operators: vec![sigma_minus()],
            rates: rate(p.g0 * (1.0 + p.n0)),
        },
        JumpSet {
            operators: vec![sigma_plus()],
            rates: rate(p.g0 * p.n0),
        },
    ];
    gksl_builder(&h, &jumps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::Beta;
    use crate::config::{SimulationConfig, TimeGrid};
    use crate::dynamics::{evolve_markov, steady_state};
    use crate::kernel::qp_generator;
    use crate::testutil::ohmic;
    use approx::assert_abs_diff_eq;

    fn mixed_state() -> DensityMatrix {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.7, 0.0),
                C64::new(0.2, 0.25),
                C64::new(0.2, -0.25),
                C64::new(0.3, 0.0),
            ],
        );
        DensityMatrix::from_raw(m)
    }

    #[test]
    fn vacuum_rates() {
        let r = qubit_rates(&QubitParams::new(1.0, 1.0, 0.0, 0.0).unwrap());
        assert_eq!(r.pp_pp, -1.0);
        assert_eq!(r.pp_mm, 0.0);
        assert_eq!(r.pm_pm, -0.5);
    }

    #[test]
    fn zero_coupling_rates_vanish() {
        let r = qubit_rates(&QubitParams::new(1.0, 0.0, 3.0, 0.0).unwrap());
        assert!(r.entries().iter().all(|e| e.2 == 0.0));
    }

    #[test]
    fn rate_columns_conserve_trace() {
        for n0 in [0.0, 0.3, 2.0] {
            let r = qubit_rates(&QubitParams::new(1.0, 0.7, n0, 0.0).unwrap());
            assert_abs_diff_eq!(r.pp_pp + r.mm_pp, 0.0);
            assert_abs_diff_eq!(r.pp_mm + r.mm_mm, 0.0);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(QubitParams::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(QubitParams::new(1.0, -1.0, 0.0, 0.0).is_err());
        assert!(QubitParams::new(1.0, 1.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn analytic_initial_and_limit() {
        let p = QubitParams::new(1.0, 0.5, 1.0, 0.02).unwrap();
        let rho = mixed_state();
        let at0 = qubit_analytic(&p, &rho, 0.0).unwrap();
        assert_eq!(at0.matrix(), rho.matrix());
        let late = qubit_analytic(&p, &rho, 200.0).unwrap();
        assert_abs_diff_eq!(late.get(PLUS, PLUS).re, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(late.get(MINUS, MINUS).re, 2.0 / 3.0, epsilon = 1e-12);
        assert!(late.get(PLUS, MINUS).norm() < 1e-12);
    }

    #[test]
    fn vacuum_half_life() {
        let g0 = 0.4;
        let p = QubitParams::new(1.0, g0, 0.0, 0.0).unwrap();
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]);
        let half = qubit_analytic(&p, &rho, std::f64::consts::LN_2 / g0).unwrap();
        assert_abs_diff_eq!(half.get(PLUS, PLUS).re, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn generator_population_block_matches_rates() {
        for n0 in [0.0, 0.5, 2.0] {
            let p = QubitParams::new(1.3, 0.2, n0, 0.01).unwrap();
            let gen = qubit_lindblad_generator(&p).unwrap();
            let r = qubit_rates(&p);
            for ((a, b), (c, d), v) in r.entries() {
                assert_abs_diff_eq!(gen.get(a, b, c, d).re, v, epsilon = 1e-14);
            }
            let coh = gen.get(PLUS, MINUS, PLUS, MINUS);
            assert_abs_diff_eq!(coh.im, -p.shifted_frequency(), epsilon = 1e-14);
        }
    }

    #[test]
    fn vacuum_generator_has_no_excitation() {
        let p = QubitParams::new(1.0, 0.3, 0.0, 0.0).unwrap();
        let gen = qubit_lindblad_generator(&p).unwrap();
        assert_eq!(gen.get(PLUS, PLUS, MINUS, MINUS), C64::new(0.0, 0.0));
    }

    #[test]
    fn markov_integration_matches_closed_form() {
        for g0 in [0.1, 1.0] {
            for n0 in [0.0, 0.5, 2.0] {
                let p = QubitParams::new(1.0, g0, n0, 0.0).unwrap();
                let gen = qubit_lindblad_generator(&p).unwrap();
                let grid = TimeGrid::new(0.0, 10.0 / g0, 0.05).unwrap();
                let cfg = SimulationConfig::default();
                let traj = evolve_markov(&gen, &mixed_state(), &grid, &cfg).unwrap();
                for (t, rho) in traj.times.iter().zip(&traj.states) {
                    let exact = qubit_analytic(&p, &mixed_state(), *t).unwrap();
                    let dev = (rho.matrix() - exact.matrix())
                        .iter()
                        .map(|z| z.norm())
                        .fold(0.0, f64::max);
                    assert!(dev < 1e-8, "g0={g0} n0={n0} t={t}: {dev:e}");
                }
            }
        }
    }

    #[test]
    fn steady_state_detailed_balance_and_purity() {
        let beta = 1.7;
        let omega0 = 1.0;
        let n0 = planck_occupation(omega0, Beta::Finite(beta)).unwrap();
        let p = QubitParams::new(omega0, 0.2, n0, 0.0).unwrap();
        let rho = steady_state(&qubit_lindblad_generator(&p).unwrap()).unwrap();
        let ratio = rho.get(PLUS, PLUS).re / rho.get(MINUS, MINUS).re;
        assert_abs_diff_eq!(ratio, (-beta * omega0).exp(), epsilon = 1e-10);
        assert_abs_diff_eq!(rho.purity(), p.steady_state_purity(), epsilon = 1e-10);
        let thermal = QubitParams::new(1.0, 0.2, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(thermal.steady_state_purity(), 5.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn qp_generator_reproduces_rates() {
        let omega0 = 1.0;
        let sys = system(omega0).unwrap();
        for beta in [Beta::Infinite, Beta::Finite(0.7), Beta::Finite(3.0)] {
            for eta in [0.01, 0.2] {
                let corr = ohmic(eta, 4.0, beta, &sys);
                let opts = KernelOptions::default();
                let p = QubitParams::from_bath(omega0, &corr, &opts).unwrap();
                let qp = qp_generator(&sys, &corr, &opts).unwrap();
                for ((a, b), (c, d), v) in qubit_rates(&p).entries() {
                    let got = qp.dissipator.get(a, b, c, d).re;
                    assert!((got - v).abs() <= 1e-12 * v.abs().max(1e-3), "{got} vs {v}");
                }
                let coh = qp.generator().get(PLUS, MINUS, PLUS, MINUS);
                assert_abs_diff_eq!(coh.im, -p.shifted_frequency(), epsilon = 1e-12);
                assert_abs_diff_eq!(coh.re, -0.5 * p.relaxation_rate(), epsilon = 1e-12);
            }
        }
    }
}

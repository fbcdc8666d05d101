//! Fixtures shared by unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::bath::{BathCorrelation, BathSpec, Beta, Mode};
use crate::system::{CMatrix, SystemSpec};

pub fn sigma_plus() -> CMatrix {
    let mut m = DMatrix::zeros(2, 2);
    m[(0, 1)] = C64::new(1.0, 0.0);
    m
}

/// Qubit with `+` at index 0 and channel-1 coupling `sigma^+`.
pub fn qubit(omega0: f64) -> SystemSpec {
    SystemSpec::new(vec![0.5 * omega0, -0.5 * omega0], sigma_plus()).unwrap()
}

pub fn ohmic(eta: f64, cutoff: f64, beta: Beta, sys: &SystemSpec) -> BathCorrelation {
    let spec = BathSpec::ohmic(eta, cutoff, beta).unwrap();
    let lim = spec.default_cutoff(sys.max_splitting());
    BathCorrelation::new(spec, lim).unwrap()
}

pub fn single_mode(lambda: f64, omega: f64, beta: Beta) -> BathCorrelation {
    BathCorrelation::new(
        BathSpec::discrete(vec![Mode { lambda, omega }], beta).unwrap(),
        10.0 * omega,
    )
    .unwrap()
}

pub fn random_system(rng: &mut impl Rng, d: usize) -> SystemSpec {
    let energies: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let s = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
    });
    SystemSpec::new(energies, s).unwrap()
}

pub fn random_ohmic(rng: &mut impl Rng, sys: &SystemSpec) -> BathCorrelation {
    let beta = if rng.gen_bool(0.2) {
        Beta::Infinite
    } else {
        Beta::Finite(rng.gen_range(0.3..5.0))
    };
    ohmic(rng.gen_range(0.01..0.2), rng.gen_range(1.0..6.0), beta, sys)
}

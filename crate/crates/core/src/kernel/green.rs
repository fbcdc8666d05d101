//! Free retarded and advanced propagators in the energy basis.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::system::{CMatrix, SystemSpec};

/// Heaviside step with `eta(0) = 1/2`.
pub fn step(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        0.0
    } else {
        0.5
    }
}

/// `G_R(t) = -i eta(t) exp(-i H_S t)`.
pub fn retarded_green(sys: &SystemSpec, t: f64) -> CMatrix {
    diagonal(sys, t, C64::new(0.0, -step(t)))
}

/// `G_A(t) = +i eta(-t) exp(-i H_S t)`.
pub fn advanced_green(sys: &SystemSpec, t: f64) -> CMatrix {
    diagonal(sys, t, C64::new(0.0, step(-t)))
}

fn diagonal(sys: &SystemSpec, t: f64, prefactor: C64) -> CMatrix {
    let e = sys.energies();
    let mut m = DMatrix::zeros(e.len(), e.len());
    for (p, &ep) in e.iter().enumerate() {
        m[(p, p)] = prefactor * C64::from_polar(1.0, -ep * t);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit() -> SystemSpec {
        let mut s = DMatrix::zeros(2, 2);
        s[(0, 1)] = C64::new(1.0, 0.0);
        SystemSpec::new(vec![0.5, -0.5], s).unwrap()
    }

    #[test]
    fn equal_time_values() {
        let sys = qubit();
        assert_eq!(retarded_green(&sys, 0.0)[(0, 0)], C64::new(0.0, -0.5));
        assert_eq!(advanced_green(&sys, 0.0)[(1, 1)], C64::new(0.0, 0.5));
    }

    #[test]
    fn causality() {
        let sys = qubit();
        assert!(retarded_green(&sys, -1.0).iter().all(|z| z.norm() == 0.0));
        assert!(advanced_green(&sys, 1.0).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn advanced_is_adjoint_of_retarded() {
        let sys = qubit();
        let t = 0.7;
        let gr = retarded_green(&sys, t);
        let ga = advanced_green(&sys, -t);
        assert!((gr.adjoint() - ga).norm() < 1e-15);
    }
}

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::superop::Superoperator;
use crate::system::SystemSpec;

/// `T0(t)_{pp',qq'} = d_pq d_p'q' exp(-i E_pp' t)` for `t >= 0`, zero before.
pub fn free_transmission(sys: &SystemSpec, t: f64) -> Superoperator {
    let d = sys.dim();
    let mut out = Superoperator::zeros(d);
    if t < 0.0 {
        return out;
    }
    for p in 0..d {
        for pp in 0..d {
            out.add_to(
                p,
                pp,
                p,
                pp,
                C64::from_polar(1.0, -sys.splitting(p, pp) * t),
            );
        }
    }
    out
}

/// `T0~(w)^{-1} = -i (w - E_pp')` on the diagonal.
pub fn inverse_free_transmission(sys: &SystemSpec, omega: C64) -> Superoperator {
    let d = sys.dim();
    let mut out = Superoperator::zeros(d);
    for p in 0..d {
        for pp in 0..d {
            out.add_to(
                p,
                pp,
                p,
                pp,
                C64::new(0.0, -1.0) * (omega - sys.splitting(p, pp)),
            );
        }
    }
    out
}

/// Relative size of the smallest singular value below which a matrix is singular.
pub const SINGULAR_TOL: f64 = 1e-13;

/// `T~(w) = [T0~(w)^{-1} - K~(w)]^{-1}` as a function of `w`.
pub fn transmission_freq<'a, F>(
    sys: &'a SystemSpec,
    kernel_at: F,
) -> impl Fn(C64) -> Result<Superoperator> + 'a
where
    F: Fn(C64) -> Result<Superoperator> + 'a,
{
    move |omega| {
        let k = kernel_at(omega)?;
        let m = inverse_free_transmission(sys, omega).matrix() - k.matrix();
        let inv = invert(&m).ok_or_else(|| Error::Singular {
            omega: format!("{omega}"),
        })?;
        Superoperator::from_matrix(sys.dim(), inv)
    }
}

fn invert(m: &DMatrix<C64>) -> Option<DMatrix<C64>> {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= SINGULAR_TOL * max {
        return None;
    }
    m.clone().try_inverse()
}

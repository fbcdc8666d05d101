//! Second-order (Born) memory kernel in time and frequency.

use num_complex::Complex64 as C64;

use crate::bath::BathCorrelation;
use crate::error::{invalid, Result};
use crate::superop::Superoperator;
use crate::system::SystemSpec;

use super::assembly::{assemble, at_frequency, PAIRS};
use super::options::KernelOptions;

/// `K(t)` for `t >= 0` (right limit at zero); the kernel vanishes for `t < 0`.
///
/// ```text
/// K_{pp',qq'}(t) = sum_{ab} [ - d_{p'q'} sum_l S^a_{pl} S^b_{lq}   e^{-i E_lp' t} D^{ab}(t)
///                             + S^b_{pq} S^a_{q'p'}               e^{-i E_pq' t} D^{ab}(t)
///                             - d_{pq}  sum_l S^b_{q'l} S^a_{lp'} e^{-i E_pl t}  D^{ba}(-t)
///                             + S^a_{pq} S^b_{q'p'}               e^{-i E_qp' t} D^{ba}(-t) ]
/// ```
pub fn born_kernel_time(sys: &SystemSpec, corr: &BathCorrelation, t: f64) -> Superoperator {
    let d = sys.dim();
    let mut out = Superoperator::zeros(d);
    if t < 0.0 || sys.is_uncoupled() {
        return out;
    }
    let zero = C64::new(0.0, 0.0);
    let phase = |x: f64| C64::from_polar(1.0, -x * t);
    for (a, b) in PAIRS {
        let fwd = corr.time(a, b, t);
        let back = corr.time(b, a, -t);
        let (sa, sb) = (sys.coupling(a), sys.coupling(b));
        for p in 0..d {
            for pp in 0..d {
                for q in 0..d {
                    for qq in 0..d {
                        let mut acc = zero;
                        if pp == qq {
                            for l in 0..d {
                                let c = sa[(p, l)] * sb[(l, q)];
                                if c != zero {
                                    acc -= c * phase(sys.splitting(l, pp)) * fwd;
                                }
                            }
                        }
                        let c = sb[(p, q)] * sa[(qq, pp)];
                        if c != zero {
                            acc += c * phase(sys.splitting(p, qq)) * fwd;
                        }
                        if p == q {
                            for l in 0..d {
                                let c = sb[(qq, l)] * sa[(l, pp)];
                                if c != zero {
                                    acc -= c * phase(sys.splitting(p, l)) * back;
                                }
                            }
                        }
                        let c = sa[(p, q)] * sb[(qq, pp)];
                        if c != zero {
                            acc += c * phase(sys.splitting(q, pp)) * back;
                        }
                        if acc != zero {
                            out.add_to(p, pp, q, qq, acc);
                        }
                    }
                }
            }
        }
    }
    out
}

/// `K~(z) = int_0^inf K(t) e^{izt} dt` at complex `z`, continued analytically
/// into the lower half plane.
pub fn born_kernel_at(
    sys: &SystemSpec,
    corr: &BathCorrelation,
    z: C64,
    opts: &KernelOptions,
) -> Result<Superoperator> {
    opts.validate()?;
    assemble(
        sys,
        opts.selector(sys),
        at_frequency(sys, z),
        |a, b, x, refl| {
            if refl {
                corr.response_reflected(a, b, x)
            } else {
                corr.response(a, b, x)
            }
        },
    )
}

/// `K~(omega + i0)` from evaluations at `omega + i eps` and `omega + i eps/2`,
/// extrapolated linearly to `eps -> 0`.
pub fn born_kernel_freq(
    sys: &SystemSpec,
    corr: &BathCorrelation,
    omega: f64,
    eps: f64,
    opts: &KernelOptions,
) -> Result<Superoperator> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!(
            "regulator eps must be positive, got {eps}"
        )));
    }
    let coarse = born_kernel_at(sys, corr, C64::new(omega, eps), opts)?;
    let fine = born_kernel_at(sys, corr, C64::new(omega, 0.5 * eps), opts)?;
    Ok(&(&fine * C64::new(2.0, 0.0)) - &coarse)
}

/// Default regulator for [`born_kernel_freq`].
pub const DEFAULT_EPS: f64 = 1e-4;

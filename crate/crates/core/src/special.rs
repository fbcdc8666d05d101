//! Special functions needed by the ohmic bath closed forms.

use num_complex::Complex64 as C64;

/// Trigamma function psi'(z) for Re z > 0.
///
/// Recurrence up to |z| >= 12, then the asymptotic series.
pub fn trigamma(z: C64) -> C64 {
    debug_assert!(z.re > 0.0, "trigamma evaluated at Re z <= 0: {z}");
    let mut acc = C64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 12.0 {
        acc += (w * w).inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    // 1/w + 1/(2w^2) + sum B_{2k} / w^{2k+1}
    let series = inv
        * (1.0
            + inv * 0.5
            + inv2
                * (1.0 / 6.0
                    + inv2
                        * (-1.0 / 30.0
                            + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0 + inv2 * (5.0 / 66.0))))));
    acc + series
}

/// (e^z - 1) with a series branch near zero.
pub fn exp_m1(z: C64) -> C64 {
    if z.norm() < 1e-5 {
        z * (1.0 + z * (0.5 + z / 6.0))
    } else {
        z.exp() - 1.0
    }
}

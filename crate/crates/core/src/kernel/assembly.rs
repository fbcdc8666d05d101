//! Shared assembly of the four second-order terms of the kernel.
//!
//! For a response `R^{ab}(z) = int_0^inf D^{ab}(t) e^{izt} dt` and its
//! reflection `Rbar^{ab}(z) = int_0^inf D^{ab}(-t) e^{izt} dt`,
//!
//! ```text
//! K_{pp',qq'}(z) = sum_{ab} [ - d_{p'q'} sum_l S^a_{pl} S^b_{lq}   R^{ab}(z + E_p' - E_l)
//!                             + S^b_{pq} S^a_{q'p'}               R^{ab}(z + E_q' - E_p)
//!                             - d_{pq}  sum_l S^b_{q'l} S^a_{lp'} Rbar^{ba}(z + E_l - E_p)
//!                             + S^a_{pq} S^b_{q'p'}               Rbar^{ba}(z + E_p' - E_q) ]
//! ```
//!
//! Every argument has the form `z_row + E_a - E_b`; the caller decides how it
//! is formed so that locked evaluations can use exact Bohr frequencies.

use num_complex::Complex64 as C64;
use std::collections::HashMap;

use crate::error::Result;
use crate::superop::Superoperator;
use crate::system::{Channel, SystemSpec};

/// Channel pairs with a nonvanishing correlator.
pub(crate) const PAIRS: [(Channel, Channel); 2] = [
    (Channel::Lower, Channel::Raise),
    (Channel::Raise, Channel::Lower),
];

/// Kronecker selector for `E_pp' = E_qq'`, or always true without RWA.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Selector {
    pub rwa: bool,
    pub tol: f64,
}

impl Selector {
    pub fn keeps(&self, sys: &SystemSpec, p: usize, pp: usize, q: usize, qq: usize) -> bool {
        !self.rwa || (sys.splitting(p, pp) - sys.splitting(q, qq)).abs() < self.tol
    }
}

/// Assembles the kernel. `arg(p, p', a, b)` returns the argument for row
/// `(p, p')` and Bohr offset `E_a - E_b`; `resp(a, b, arg, reflected)`
/// evaluates `R^{ab}` or `Rbar^{ab}`. Responses are cached by argument.
pub(crate) fn assemble<A, F>(
    sys: &SystemSpec,
    sel: Selector,
    arg: A,
    mut resp: F,
) -> Result<Superoperator>
where
    A: Fn(usize, usize, usize, usize) -> C64,
    F: FnMut(Channel, Channel, C64, bool) -> Result<C64>,
{
    let d = sys.dim();
    let s = |ch: Channel| sys.coupling(ch);
    let mut cache: HashMap<(u8, u8, bool, u64, u64), C64> = HashMap::new();
    let mut eval = |a: Channel, b: Channel, z: C64, refl: bool| -> Result<C64> {
        let key = (a.label(), b.label(), refl, z.re.to_bits(), z.im.to_bits());
        if let Some(v) = cache.get(&key) {
            return Ok(*v);
        }
        let v = resp(a, b, z, refl)?;
        cache.insert(key, v);
        Ok(v)
    };
    let zero = C64::new(0.0, 0.0);
    let mut out = Superoperator::zeros(d);
    for p in 0..d {
        for pp in 0..d {
            for q in 0..d {
                for qq in 0..d {
                    if !sel.keeps(sys, p, pp, q, qq) {
                        continue;
                    }
                    let mut acc = zero;
                    for (a, b) in PAIRS {
                        let (sa, sb) = (s(a), s(b));
                        if pp == qq {
                            for l in 0..d {
                                let c = sa[(p, l)] * sb[(l, q)];
                                if c != zero {
                                    acc -= c * eval(a, b, arg(p, pp, pp, l), false)?;
                                }
                            }
                        }
                        let c = sb[(p, q)] * sa[(qq, pp)];
                        if c != zero {
                            acc += c * eval(a, b, arg(p, pp, qq, p), false)?;
                        }
                        if p == q {
                            for l in 0..d {
                                let c = sb[(qq, l)] * sa[(l, pp)];
                                if c != zero {
                                    acc -= c * eval(b, a, arg(p, pp, l, p), true)?;
                                }
                            }
                        }
                        let c = sa[(p, q)] * sb[(qq, pp)];
                        if c != zero {
                            acc += c * eval(b, a, arg(p, pp, pp, q), true)?;
                        }
                    }
                    if acc != zero {
                        out.add_to(p, pp, q, qq, acc);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Argument `z + E_a - E_b` at a fixed complex frequency.
pub(crate) fn at_frequency(
    sys: &SystemSpec,
    z: C64,
) -> impl Fn(usize, usize, usize, usize) -> C64 + '_ {
    move |_, _, a, b| z + sys.splitting(a, b)
}

/// Argument with `z` locked to `E_pp'` for each row, reduced to a single
/// Bohr frequency whenever the offset shares a level with the row.
pub(crate) fn locked(sys: &SystemSpec) -> impl Fn(usize, usize, usize, usize) -> C64 + '_ {
    move |p, pp, a, b| {
        let x = if a == pp {
            sys.splitting(p, b)
        } else if b == p {
            sys.splitting(a, pp)
        } else {
            sys.splitting(p, pp) + sys.splitting(a, b)
        };
        C64::new(x, 0.0)
    }
}

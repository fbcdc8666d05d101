//! Real-axis split of the kernel and the quasi-particle (Markov) generator.
//!
//! On the real axis `R(x + i0) = D~(x)/2 + i Phi(x)` and
//! `Rbar(x + i0) = D~(-x)/2 - i Phi(-x)`, so `K~ = L~ + i Delta~` where the
//! dissipator `L~` collects the `D~` parts and the shift `Delta~` the
//! principal values.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::bath::BathCorrelation;
use crate::error::Result;
use crate::superop::Superoperator;
use crate::system::SystemSpec;

use super::assembly::{assemble, at_frequency, locked, Selector};
use super::options::KernelOptions;

fn dissipator_with<A>(
    sys: &SystemSpec,
    corr: &BathCorrelation,
    sel: Selector,
    arg: A,
) -> Result<Superoperator>
where
    A: Fn(usize, usize, usize, usize) -> C64,
{
    assemble(sys, sel, arg, |a, b, x, refl| {
        let x = if refl { -x.re } else { x.re };
        Ok(C64::new(0.5 * corr.freq(a, b, x), 0.0))
    })
}

fn shift_with<A>(
    sys: &SystemSpec,
    corr: &BathCorrelation,
    sel: Selector,
    h: f64,
    arg: A,
) -> Result<Superoperator>
where
    A: Fn(usize, usize, usize, usize) -> C64,
{
    assemble(sys, sel, arg, |a, b, x, refl| {
        let v = if refl {
            -corr.principal_value(a, b, -x.re, h)?
        } else {
            corr.principal_value(a, b, x.re, h)?
        };
        Ok(C64::new(v, 0.0))
    })
}

/// Dissipative part `L~(omega)` of the kernel; no integrals involved.
pub fn dissipator_at(
    sys: &SystemSpec,
    corr: &BathCorrelation,
    omega: f64,
    opts: &KernelOptions,
) -> Result<Superoperator> {
    opts.validate()?;
    dissipator_with(
        sys,
        corr,
        opts.selector(sys),
        at_frequency(sys, C64::new(omega, 0.0)),
    )
}

/// Shift `Delta~(omega)`, built from principal-value integrals.
pub fn shift_at(
    sys: &SystemSpec,
    corr: &BathCorrelation,
    omega: f64,
    opts: &KernelOptions,
) -> Result<Superoperator> {
    opts.validate()?;
    shift_with(
        sys,
        corr,
        opts.selector(sys),
        opts.pv_exclusion,
        at_frequency(sys, C64::new(omega, 0.0)),
    )
}

/// Rows `(p, p')` sharing one unperturbed pole `E_pp'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sector {
    pub energy: f64,
    pub rows: Vec<(usize, usize)>,
}

/// Groups the rows by `E_pp'` within the energy tolerance, in order of energy.
pub fn sectors(sys: &SystemSpec, tol: f64) -> Vec<Sector> {
    let d = sys.dim();
    let mut rows: Vec<(f64, (usize, usize))> = (0..d)
        .flat_map(|p| (0..d).map(move |pp| (p, pp)))
        .map(|(p, pp)| (sys.splitting(p, pp), (p, pp)))
        .collect();
    rows.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut out: Vec<Sector> = Vec::new();
    for (e, row) in rows {
        match out.last_mut() {
            Some(s) if (e - s.energy).abs() < tol => s.rows.push(row),
            _ => out.push(Sector {
                energy: e,
                rows: vec![row],
            }),
        }
    }
    out
}

/// Constant generator obtained by locking the kernel frequency to `E_pp'`.
#[derive(Debug, Clone)]
pub struct QPGenerator {
    /// `-i E_pp'` on the diagonal.
    pub free: Superoperator,
    /// `Delta~` (enters the generator as `i Delta~`).
    pub shift: Superoperator,
    /// `L~`.
    pub dissipator: Superoperator,
    /// Coherence sectors containing more than one row.
    pub degenerate_sectors: Vec<Sector>,
}

impl QPGenerator {
    /// `-i E + i Delta~ + L~`.
    pub fn generator(&self) -> Superoperator {
        let i = C64::new(0.0, 1.0);
        &(&self.free + &(&self.shift * i)) + &self.dissipator
    }

    /// Locked kernel `i Delta~ + L~`.
    pub fn kernel(&self) -> Superoperator {
        &(&self.shift * C64::new(0.0, 1.0)) + &self.dissipator
    }

    pub fn dim(&self) -> usize {
        self.free.dim()
    }
}

/// Free generator `-i E_pp'` on the diagonal.
pub fn free_generator(sys: &SystemSpec) -> Superoperator {
    let d = sys.dim();
    let mut out = Superoperator::zeros(d);
    for p in 0..d {
        for pp in 0..d {
            out.add_to(p, pp, p, pp, C64::new(0.0, -sys.splitting(p, pp)));
        }
    }
    out
}

pub fn qp_generator(
    sys: &SystemSpec,
    corr: &BathCorrelation,
    opts: &KernelOptions,
) -> Result<QPGenerator> {
    opts.validate()?;
    let sel = opts.selector(sys);
    let dissipator = dissipator_with(sys, corr, sel, locked(sys))?;
    let shift = shift_with(sys, corr, sel, opts.pv_exclusion, locked(sys))?;
    let degenerate_sectors = sectors(sys, opts.energy_tol(sys))
        .into_iter()
        .filter(|s| s.rows.len() > 1 && s.rows.iter().any(|&(p, pp)| p != pp))
        .collect();
    Ok(QPGenerator {
        free: free_generator(sys),
        shift,
        dissipator,
        degenerate_sectors,
    })
}

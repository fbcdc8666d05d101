use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::sectors;
use crate::superop::Superoperator;
use crate::system::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResonanceMode {
    /// Newton iteration on `det[T~(w)^{-1}] = 0` within each sector.
    Full,
    /// Kernel locked at the unperturbed pole.
    Quasiparticle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceOptions {
    pub energy_tol: f64,
    pub root_tol: f64,
    pub max_iter: usize,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        Self {
            energy_tol: 1e-9,
            root_tol: 1e-10,
            max_iter: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resonance {
    pub sector: Vec<(usize, usize)>,
    pub unperturbed: f64,
    pub re: f64,
    pub im: f64,
    /// `|det[T~(w)^{-1}]|` restricted to the sector, at the root.
    pub residual: f64,
}

impl Resonance {
    pub fn omega(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonanceSet {
    pub mode: ResonanceMode,
    pub roots: Vec<Resonance>,
}

fn block(k: &Superoperator, rows: &[(usize, usize)]) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), rows.len(), |i, j| {
        let (p, pp) = rows[i];
        let (q, qq) = rows[j];
        k.get(p, pp, q, qq)
    })
}

/// `det[-i (w - E) - K_block(w)]`.
fn sector_det<F>(kernel_at: &F, rows: &[(usize, usize)], energy: f64, omega: C64) -> Result<C64>
where
    F: Fn(C64) -> Result<Superoperator>,
{
    let k = kernel_at(omega)?;
    let n = rows.len();
    let m = DMatrix::identity(n, n) * (C64::new(0.0, -1.0) * (omega - energy)) - block(&k, rows);
    Ok(m.determinant())
}

fn eigenvalues(m: DMatrix<C64>) -> Vec<C64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)]];
    }
    let schur = m.schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

/// Roots of the resonance condition, grouped by unperturbed pole `E_pp'`.
///
/// `quasiparticle` returns `E + i eig(K_block(E))`; `full` refines each of
/// these by complex Newton iteration on the sector determinant, deflating
/// roots already found in the same sector.
pub fn resonance_roots<F>(
    sys: &SystemSpec,
    kernel_at: F,
    mode: ResonanceMode,
    opts: &ResonanceOptions,
) -> Result<ResonanceSet>
where
    F: Fn(C64) -> Result<Superoperator>,
{
    let tol = opts.energy_tol * sys.max_splitting().max(f64::MIN_POSITIVE);
    let mut roots = Vec::new();
    for sector in sectors(sys, tol) {
        let e = sector.energy;
        let k0 = kernel_at(C64::new(e, 0.0))?;
        let guesses: Vec<C64> = eigenvalues(block(&k0, &sector.rows))
            .into_iter()
            .map(|lam| C64::new(e, 0.0) + C64::new(0.0, 1.0) * lam)
            .collect();
        let mut found: Vec<C64> = Vec::new();
        for guess in guesses {
            let omega = match mode {
                ResonanceMode::Quasiparticle => guess,
                ResonanceMode::Full => newton(&kernel_at, &sector.rows, e, guess, &found, opts)?,
            };
            let residual = sector_det(&kernel_at, &sector.rows, e, omega)?.norm();
            found.push(omega);
            roots.push(Resonance {
                sector: sector.rows.clone(),
                unperturbed: e,
                re: omega.re,
                im: omega.im,
                residual,
            });
        }
    }
    Ok(ResonanceSet { mode, roots })
}

fn newton<F>(
    kernel_at: &F,
    rows: &[(usize, usize)],
    energy: f64,
    start: C64,
    deflate: &[C64],
    opts: &ResonanceOptions,
) -> Result<C64>
where
    F: Fn(C64) -> Result<Superoperator>,
{
    let f = |w: C64| -> Result<C64> {
        let mut v = sector_det(kernel_at, rows, energy, w)?;
        for r in deflate {
            v /= w - r;
        }
        Ok(v)
    };
    if sector_det(kernel_at, rows, energy, start)? == C64::new(0.0, 0.0) {
        return Ok(start);
    }
    let scale = start.norm().max(energy.abs()).max(1.0);
    let h = 1e-6 * scale;
    let mut w = start;
    let mut last = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let fw = f(w)?;
        if fw == C64::new(0.0, 0.0) {
            return Ok(w);
        }
        let dh = C64::new(h, 0.0);
        let deriv = (f(w + dh)? - f(w - dh)?) / (dh * 2.0);
        if deriv.norm() == 0.0 || !deriv.re.is_finite() {
            break;
        }
        let step = fw / deriv;
        w -= step;
        last = step.norm();
        if last <= opts.root_tol * scale {
            return Ok(w);
        }
    }
    Err(Error::Newton {
        sector: format!("{rows:?}"),
        iterations: opts.max_iter,
        residual: last,
    })
}

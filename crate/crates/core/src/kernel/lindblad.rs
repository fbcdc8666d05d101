//! GKSL generators and the standard (Bohr-frequency projected) dissipator.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::bath::BathCorrelation;
use crate::error::{invalid, Result};
use crate::superop::Superoperator;
use crate::system::{CMatrix, Channel, SystemSpec};

use super::options::KernelOptions;

/// Jump operators `S^a` sharing a Hermitian rate matrix `gamma^{ab}`.
#[derive(Debug, Clone)]
pub struct JumpSet {
    pub operators: Vec<CMatrix>,
    pub rates: CMatrix,
}

const RATE_HERMITICITY_TOL: f64 = 1e-12;

/// Superoperator of
/// `-i[H, rho] + sum_k sum_ab gamma_k^{ab} (S^b rho S^a† - {S^a† S^b, rho}/2)`.
pub fn gksl_builder(h: &CMatrix, jumps: &[JumpSet]) -> Result<Superoperator> {
    let d = h.nrows();
    if h.ncols() != d {
        return Err(invalid("Hamiltonian must be square"));
    }
    let herm = (h - h.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if herm > RATE_HERMITICITY_TOL * scale {
        return Err(invalid(format!(
            "Hamiltonian is not Hermitian (defect {herm:.3e})"
        )));
    }
    let id = DMatrix::<C64>::identity(d, d);
    let minus_i = C64::new(0.0, -1.0);
    let mut out = &(&Superoperator::sandwich(h, &id) - &Superoperator::sandwich(&id, h)) * minus_i;
    for (k, set) in jumps.iter().enumerate() {
        let m = set.operators.len();
        if set.rates.nrows() != m || set.rates.ncols() != m {
            return Err(invalid(format!(
                "jump set {k}: rate matrix is {}x{}, expected {m}x{m}",
                set.rates.nrows(),
                set.rates.ncols()
            )));
        }
        if let Some(op) = set
            .operators
            .iter()
            .find(|s| s.nrows() != d || s.ncols() != d)
        {
            return Err(invalid(format!(
                "jump set {k}: operator is {}x{}, expected {d}x{d}",
                op.nrows(),
                op.ncols()
            )));
        }
        let g = &set.rates;
        let gscale = g.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
        let defect = (g - g.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > RATE_HERMITICITY_TOL * gscale {
            return Err(invalid(format!(
                "jump set {k}: rate matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        for a in 0..m {
            let sa_dag = set.operators[a].adjoint();
            for b in 0..m {
                let rate = g[(a, b)];
                if rate == C64::new(0.0, 0.0) {
                    continue;
                }
                let sb = &set.operators[b];
                let prod = &sa_dag * sb;
                let term = &(&Superoperator::sandwich(sb, &sa_dag)
                    - &(&Superoperator::sandwich(&prod, &id) * C64::new(0.5, 0.0)))
                    - &(&Superoperator::sandwich(&id, &prod) * C64::new(0.5, 0.0));
                out = &out + &(&term * rate);
            }
        }
    }
    Ok(out)
}

/// Bohr-frequency components `X(w) = sum_{E_q - E_p = w} X_pq |p><q|`, with
/// frequencies clustered within `tol`. Returned in increasing `w`.
pub fn bohr_projections(sys: &SystemSpec, x: &CMatrix, tol: f64) -> Vec<(f64, CMatrix)> {
    let d = sys.dim();
    let mut freqs: Vec<f64> = (0..d)
        .flat_map(|p| (0..d).map(move |q| (p, q)))
        .map(|(p, q)| sys.splitting(q, p))
        .collect();
    freqs.sort_by(f64::total_cmp);
    let mut clusters: Vec<f64> = Vec::new();
    for w in freqs {
        if clusters.last().is_none_or(|&c| (w - c).abs() >= tol) {
            clusters.push(w);
        }
    }
    clusters
        .into_iter()
        .filter_map(|w| {
            let m = DMatrix::from_fn(d, d, |p, q| {
                if (sys.splitting(q, p) - w).abs() < tol {
                    x[(p, q)]
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            m.iter().any(|z| z.norm() > 0.0).then_some((w, m))
        })
        .collect()
}

/// Secular dissipator assembled from projected coupling operators with
/// rates `gamma^{ab}(w) = diag(D~^{21}(w), D~^{12}(w))` for the channel
/// operators `(S^1(w), S^2(w))`.
pub fn standard_lindblad_dissipator(
    sys: &SystemSpec,
    corr: &BathCorrelation,
    opts: &KernelOptions,
) -> Result<Superoperator> {
    opts.validate()?;
    let d = sys.dim();
    let tol = opts.energy_tol(sys);
    let lower = bohr_projections(sys, sys.coupling(Channel::Lower), tol);
    let raise = bohr_projections(sys, sys.coupling(Channel::Raise), tol);
    let mut freqs: Vec<f64> = lower.iter().chain(raise.iter()).map(|(w, _)| *w).collect();
    freqs.sort_by(f64::total_cmp);
    freqs.dedup_by(|a, b| (*a - *b).abs() < tol);
    let pick = |list: &[(f64, CMatrix)], w: f64| {
        list.iter()
            .find(|(x, _)| (x - w).abs() < tol)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| DMatrix::zeros(d, d))
    };
    let jumps: Vec<JumpSet> = freqs
        .into_iter()
        .map(|w| {
            let mut rates = DMatrix::zeros(2, 2);
            rates[(0, 0)] = C64::new(corr.freq(Channel::Raise, Channel::Lower, w), 0.0);
            rates[(1, 1)] = C64::new(corr.freq(Channel::Lower, Channel::Raise, w), 0.0);
            JumpSet {
                operators: vec![pick(&lower, w), pick(&raise, w)],
                rates,
            }
        })
        .collect();
    gksl_builder(&DMatrix::zeros(d, d), &jumps)
}

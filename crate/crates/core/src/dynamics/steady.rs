use crate::density::{devectorize, DensityMatrix};
use crate::error::{invalid, Error, Result};
use crate::superop::Superoperator;

/// Singular values below this fraction of the largest count as zero.
pub const NULL_TOL: f64 = 1e-10;

/// Stationary state of a generator with a one-dimensional kernel.
pub fn steady_state(generator: &Superoperator) -> Result<DensityMatrix> {
    let d = generator.dim();
    let svd = generator.matrix().clone().svd(false, true);
    let sv = &svd.singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::DegenerateKernel(d * d));
    }
    let null = sv.iter().filter(|&&s| s <= NULL_TOL * max).count();
    if null != 1 {
        return Err(Error::DegenerateKernel(null));
    }
    let k = sv
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("non-empty spectrum");
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let v = v_t.row(k).adjoint();
    let rho = devectorize(&v, d)?;
    rho.normalized()
        .map_err(|_| invalid("stationary vector has zero trace"))
}

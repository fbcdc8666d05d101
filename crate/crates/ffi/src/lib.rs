//! C ABI for `oqs`.
//!
//! Objects are passed as opaque handles created by `*_new`-style functions
//! and released with the matching `*_free`. Every fallible function returns
//! an `OqsStatus`; on failure `oqs_last_error` describes the problem.
//! Matrices cross the boundary as row-major arrays of `OqsComplex`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use oqs::bath::{planck_occupation, BathCorrelation, BathSpec, Beta, Mode};
use oqs::config::{SimulationConfig, TimeGrid};
use oqs::density::DensityMatrix;
use oqs::dynamics::{evolve_markov, steady_state};
use oqs::kernel::{qp_generator, standard_lindblad_dissipator, KernelOptions};
use oqs::qubit::{qubit_rates, QubitParams};
use oqs::superop::Superoperator;
use oqs::system::{Channel, SystemSpec};
use oqs::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OqsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OqsComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for OqsComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<OqsComplex> for C64 {
    fn from(z: OqsComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

/// System Hamiltonian (diagonal) and coupling operators.
pub struct OqsSystem(SystemSpec);

/// Bath model and temperature.
pub struct OqsBath(BathSpec);

/// Superoperator acting on `dim x dim` density matrices.
pub struct OqsSuperop(Superoperator);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type FfiResult<T> = Result<T, Failure>;

/// Runs `f`, recording any failure or panic as the last error.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> OqsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            OqsStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(&format!("null pointer passed as {name}"));
            OqsStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(&msg);
            OqsStatus::InvalidArgument
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            if e.is_numerical() || matches!(e, Error::Limit(_)) {
                OqsStatus::Numerical
            } else {
                OqsStatus::InvalidArgument
            }
        }
        Err(_) => {
            set_error("internal panic");
            OqsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> FfiResult<&'a T> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn input<'a, T>(p: *const T, len: usize, name: &'static str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, name: &'static str) -> FfiResult<&'a mut [T]> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn store<T>(out: *mut *mut T, value: T, name: &'static str) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure::Null(name));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn square(data: &[OqsComplex], dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |r, c| data[r * dim + c].into())
}

fn write_square(m: &DMatrix<C64>, out: &mut [OqsComplex]) {
    let n = m.ncols();
    for r in 0..m.nrows() {
        for c in 0..n {
            out[r * n + c] = m[(r, c)].into();
        }
    }
}

fn beta_from(beta: f64) -> FfiResult<Beta> {
    let b = if beta == f64::INFINITY {
        Beta::Infinite
    } else {
        Beta::Finite(beta)
    };
    b.validate()?;
    Ok(b)
}

fn correlation(sys: &SystemSpec, bath: &BathSpec) -> FfiResult<BathCorrelation> {
    Ok(BathCorrelation::new(
        bath.clone(),
        bath.default_cutoff(sys.max_splitting()),
    )?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn oqs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failure on this thread; empty after success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn oqs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a system from `dim` level energies and the row-major
/// `dim x dim` operator coupled to the bath annihilator. The operator
/// coupled to the creator is its adjoint.
///
/// # Safety
/// `energies` must point to `dim` doubles, `coupling` to `dim * dim` values.
#[no_mangle]
pub unsafe extern "C" fn oqs_system_new(
    dim: usize,
    energies: *const f64,
    coupling: *const OqsComplex,
    out: *mut *mut OqsSystem,
) -> OqsStatus {
    guard(|| {
        if dim == 0 {
            return Err(Failure::Invalid("dimension must be positive".into()));
        }
        let e = input(energies, dim, "energies")?.to_vec();
        let s = square(input(coupling, dim * dim, "coupling")?, dim);
        store(out, OqsSystem(SystemSpec::new(e, s)?), "out")
    })
}

/// Two-level system with splitting `omega0`, coupled through `sigma^+`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn oqs_system_qubit(omega0: f64, out: *mut *mut OqsSystem) -> OqsStatus {
    guard(|| {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Failure::Invalid(format!(
                "omega0 must be positive, got {omega0}"
            )));
        }
        store(out, OqsSystem(oqs::qubit::system(omega0)?), "out")
    })
}

/// # Safety
/// `sys` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oqs_system_free(sys: *mut OqsSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oqs_system_dim(sys: *const OqsSystem, out: *mut usize) -> OqsStatus {
    guard(|| {
        let s = deref(sys, "sys")?;
        *output(out, 1, "out")?.first_mut().expect("one slot") = s.0.dim();
        Ok(())
    })
}

/// Ohmic bath `g(w) = eta w exp(-w / cutoff)`. Pass `INFINITY` as `beta`
/// for zero temperature.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn oqs_bath_ohmic(
    eta: f64,
    cutoff: f64,
    beta: f64,
    out: *mut *mut OqsBath,
) -> OqsStatus {
    guard(|| {
        store(
            out,
            OqsBath(BathSpec::ohmic(eta, cutoff, beta_from(beta)?)?),
            "out",
        )
    })
}

/// Bath of `n` discrete modes with couplings `lambdas` and frequencies `omegas`.
///
/// # Safety
/// `lambdas` and `omegas` must each point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn oqs_bath_discrete(
    n: usize,
    lambdas: *const f64,
    omegas: *const f64,
    beta: f64,
    out: *mut *mut OqsBath,
) -> OqsStatus {
    guard(|| {
        let l = input(lambdas, n, "lambdas")?;
        let w = input(omegas, n, "omegas")?;
        let modes = l
            .iter()
            .zip(w)
            .map(|(&lambda, &omega)| Mode { lambda, omega })
            .collect();
        store(
            out,
            OqsBath(BathSpec::discrete(modes, beta_from(beta)?)?),
            "out",
        )
    })
}

/// # Safety
/// `bath` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oqs_bath_free(bath: *mut OqsBath) {
    if !bath.is_null() {
        drop(Box::from_raw(bath));
    }
}

/// Frequency-domain correlation function between channels `a` and `b`
/// (1 for the annihilator, 2 for the creator).
///
/// # Safety
/// `bath` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oqs_bath_correlation_freq(
    bath: *const OqsBath,
    a: c_int,
    b: c_int,
    omega: f64,
    out: *mut f64,
) -> OqsStatus {
    guard(|| {
        let spec = &deref(bath, "bath")?.0;
        let channel = |x: c_int| {
            u8::try_from(x)
                .ok()
                .and_then(Channel::from_label)
                .ok_or_else(|| Failure::Invalid(format!("channel must be 1 or 2, got {x}")))
        };
        let (ca, cb) = (channel(a)?, channel(b)?);
        if !omega.is_finite() {
            return Err(Failure::Invalid("omega must be finite".into()));
        }
        let corr = BathCorrelation::new(spec.clone(), spec.default_cutoff(omega.abs()))?;
        output(out, 1, "out")?[0] = corr.freq(ca, cb, omega);
        Ok(())
    })
}

/// Mean occupation `1 / (exp(beta omega) - 1)`; `INFINITY` as `beta` gives 0.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oqs_planck_occupation(omega: f64, beta: f64, out: *mut f64) -> OqsStatus {
    guard(|| {
        output(out, 1, "out")?[0] = planck_occupation(omega, beta_from(beta)?)?;
        Ok(())
    })
}

/// Constant generator of the quasi-particle (Born-Markov) master equation.
///
/// # Safety
/// `sys` and `bath` must be live handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oqs_qp_generator(
    sys: *const OqsSystem,
    bath: *const OqsBath,
    rwa: c_int,
    out: *mut *mut OqsSuperop,
) -> OqsStatus {
    guard(|| {
        let s = &deref(sys, "sys")?.0;
        let corr = correlation(s, &deref(bath, "bath")?.0)?;
        let opts = KernelOptions {
            rwa: rwa != 0,
            ..Default::default()
        };
        let gen = qp_generator(s, &corr, &opts)?.generator();
        store(out, OqsSuperop(gen), "out")
    })
}

/// Dissipator built from Bohr-frequency projections of the coupling.
///
/// # Safety
/// `sys` and `bath` must be live handles; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oqs_standard_dissipator(
    sys: *const OqsSystem,
    bath: *const OqsBath,
    out: *mut *mut OqsSuperop,
) -> OqsStatus {
    guard(|| {
        let s = &deref(sys, "sys")?.0;
        let corr = correlation(s, &deref(bath, "bath")?.0)?;
        let l = standard_lindblad_dissipator(s, &corr, &KernelOptions::default())?;
        store(out, OqsSuperop(l), "out")
    })
}

/// Dimension `d` of the density matrices the superoperator acts on; its
/// matrix is `d^2 x d^2`.
///
/// # Safety
/// `op` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oqs_superop_dim(op: *const OqsSuperop, out: *mut usize) -> OqsStatus {
    guard(|| {
        output(out, 1, "out")?[0] = deref(op, "op")?.0.dim();
        Ok(())
    })
}

/// Copies the `d^2 x d^2` matrix, row-major, into `buf` of length `len`.
/// Row and column `p * d + q` address the element `rho_pq`.
///
/// # Safety
/// `op` must be a live handle; `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn oqs_superop_copy(
    op: *const OqsSuperop,
    buf: *mut OqsComplex,
    len: usize,
) -> OqsStatus {
    guard(|| {
        let m = deref(op, "op")?.0.matrix();
        let need = m.nrows() * m.ncols();
        if len < need {
            return Err(Failure::Invalid(format!(
                "buffer holds {len} values, need {need}"
            )));
        }
        write_square(m, output(buf, len, "buf")?);
        Ok(())
    })
}

/// # Safety
/// `op` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn oqs_superop_free(op: *mut OqsSuperop) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Unique stationary state of `generator`, written as a row-major `d x d` matrix.
///
/// # Safety
/// `generator` must be a live handle; `rho` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn oqs_steady_state(
    generator: *const OqsSuperop,
    rho: *mut OqsComplex,
    len: usize,
) -> OqsStatus {
    guard(|| {
        let g = &deref(generator, "generator")?.0;
        let d = g.dim();
        if len < d * d {
            return Err(Failure::Invalid(format!(
                "buffer holds {len} values, need {}",
                d * d
            )));
        }
        let state = steady_state(g)?;
        write_square(state.matrix(), output(rho, len, "rho")?);
        Ok(())
    })
}

/// Number of time points `0, step, ..., stop` produced by `oqs_evolve_markov`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn oqs_time_points(stop: f64, step: f64, out: *mut usize) -> OqsStatus {
    guard(|| {
        let grid = TimeGrid::new(0.0, stop, step)?;
        output(out, 1, "out")?[0] = grid.steps() + 1;
        Ok(())
    })
}

/// Integrates `d rho / dt = L rho` from `rho0` and writes the state at every
/// time point consecutively into `states` (`points * d * d` values).
///
/// # Safety
/// `generator` must be a live handle; `rho0` must point to `d * d` values and
/// `states` to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn oqs_evolve_markov(
    generator: *const OqsSuperop,
    rho0: *const OqsComplex,
    stop: f64,
    step: f64,
    states: *mut OqsComplex,
    len: usize,
) -> OqsStatus {
    guard(|| {
        let g = &deref(generator, "generator")?.0;
        let d = g.dim();
        let cfg = SimulationConfig::default();
        let rho = DensityMatrix::new(square(input(rho0, d * d, "rho0")?, d), &cfg.tolerances)?;
        let grid = TimeGrid::new(0.0, stop, step)?;
        let need = (grid.steps() + 1) * d * d;
        if len < need {
            return Err(Failure::Invalid(format!(
                "buffer holds {len} values, need {need}"
            )));
        }
        let traj = evolve_markov(g, &rho, &grid, &cfg)?;
        let out = output(states, len, "states")?;
        for (k, state) in traj.states.iter().enumerate() {
            write_square(state.matrix(), &mut out[k * d * d..(k + 1) * d * d]);
        }
        Ok(())
    })
}

/// Non-vanishing qubit kernel elements in the order
/// `(++,++), (--,++), (++,--), (--,--), (+-,+-), (-+,-+)`.
///
/// # Safety
/// `out` must point to 6 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn oqs_qubit_rates(
    omega0: f64,
    g0: f64,
    n0: f64,
    delta: f64,
    out: *mut f64,
) -> OqsStatus {
    guard(|| {
        let r = qubit_rates(&QubitParams::new(omega0, g0, n0, delta)?);
        output(out, 6, "out")?
            .copy_from_slice(&[r.pp_pp, r.mm_pp, r.pp_mm, r.mm_mm, r.pm_pm, r.mp_mp]);
        Ok(())
    })
}

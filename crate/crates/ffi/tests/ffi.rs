use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use oqs_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(oqs_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn c(re: f64) -> OqsComplex {
    OqsComplex { re, im: 0.0 }
}

fn qubit() -> *mut OqsSystem {
    let mut sys = ptr::null_mut();
    assert_eq!(unsafe { oqs_system_qubit(1.0, &mut sys) }, OqsStatus::Ok);
    sys
}

fn ohmic(beta: f64) -> *mut OqsBath {
    let mut bath = ptr::null_mut();
    assert_eq!(
        unsafe { oqs_bath_ohmic(0.05, 5.0, beta, &mut bath) },
        OqsStatus::Ok
    );
    bath
}

fn superop_matrix(op: *const OqsSuperop) -> (usize, Vec<OqsComplex>) {
    let mut d = 0;
    assert_eq!(unsafe { oqs_superop_dim(op, &mut d) }, OqsStatus::Ok);
    let mut buf = vec![OqsComplex::default(); d.pow(4)];
    assert_eq!(
        unsafe { oqs_superop_copy(op, buf.as_mut_ptr(), buf.len()) },
        OqsStatus::Ok
    );
    (d, buf)
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(oqs_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn qubit_rates_table() {
    let mut r = [0.0; 6];
    assert_eq!(
        unsafe { oqs_qubit_rates(1.0, 1.0, 0.0, 0.0, r.as_mut_ptr()) },
        OqsStatus::Ok
    );
    assert_eq!(r, [-1.0, 1.0, 0.0, 0.0, -0.5, -0.5]);
    assert_eq!(
        unsafe { oqs_qubit_rates(1.0, -1.0, 0.0, 0.0, r.as_mut_ptr()) },
        OqsStatus::InvalidArgument
    );
    assert!(last_error().contains("g0"));
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(
        unsafe { oqs_system_qubit(1.0, ptr::null_mut()) },
        OqsStatus::NullPointer
    );
    assert!(last_error().contains("out"));
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { oqs_qp_generator(ptr::null(), ptr::null(), 1, &mut out) },
        OqsStatus::NullPointer
    );
    assert!(out.is_null());
    unsafe {
        oqs_system_free(ptr::null_mut());
        oqs_bath_free(ptr::null_mut());
        oqs_superop_free(ptr::null_mut());
    }
}

#[test]
fn custom_system_matches_qubit_helper() {
    let energies = [0.5, -0.5];
    let coupling = [c(0.0), c(1.0), c(0.0), c(0.0)];
    let mut sys = ptr::null_mut();
    assert_eq!(
        unsafe { oqs_system_new(2, energies.as_ptr(), coupling.as_ptr(), &mut sys) },
        OqsStatus::Ok
    );
    let mut d = 0;
    assert_eq!(unsafe { oqs_system_dim(sys, &mut d) }, OqsStatus::Ok);
    assert_eq!(d, 2);
    let bath = ohmic(2.0);
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    let q = qubit();
    unsafe {
        assert_eq!(oqs_qp_generator(sys, bath, 1, &mut a), OqsStatus::Ok);
        assert_eq!(oqs_qp_generator(q, bath, 1, &mut b), OqsStatus::Ok);
    }
    assert_eq!(superop_matrix(a), superop_matrix(b));
    unsafe {
        oqs_superop_free(a);
        oqs_superop_free(b);
        oqs_system_free(sys);
        oqs_system_free(q);
        oqs_bath_free(bath);
    }
}

#[test]
fn standard_dissipator_matches_generator_rates() {
    let sys = qubit();
    let bath = ohmic(1.0);
    let mut st = ptr::null_mut();
    let mut rates = [0.0; 6];
    let mut n0 = 0.0;
    unsafe {
        assert_eq!(oqs_standard_dissipator(sys, bath, &mut st), OqsStatus::Ok);
        assert_eq!(oqs_planck_occupation(1.0, 1.0, &mut n0), OqsStatus::Ok);
    }
    let g0 = 0.05 * (-1.0f64 / 5.0).exp();
    unsafe { oqs_qubit_rates(1.0, g0, n0, 0.0, rates.as_mut_ptr()) };
    let (_, m) = superop_matrix(st);
    // (++,++) is entry (0, 0); (--,++) is row 3, column 0.
    assert!((m[0].re - rates[0]).abs() < 1e-12);
    assert!((m[3 * 4].re - rates[1]).abs() < 1e-12);
    assert!((m[5].re - rates[4]).abs() < 1e-12);
    unsafe {
        oqs_superop_free(st);
        oqs_system_free(sys);
        oqs_bath_free(bath);
    }
}

#[test]
fn steady_state_and_evolution() {
    let sys = qubit();
    let bath = ohmic(1.0);
    let mut gen = ptr::null_mut();
    unsafe { assert_eq!(oqs_qp_generator(sys, bath, 1, &mut gen), OqsStatus::Ok) };
    let mut rho = [OqsComplex::default(); 4];
    unsafe { assert_eq!(oqs_steady_state(gen, rho.as_mut_ptr(), 4), OqsStatus::Ok) };
    assert!((rho[0].re / rho[3].re - (-1.0f64).exp()).abs() < 1e-10);

    let mut points = 0;
    unsafe { assert_eq!(oqs_time_points(200.0, 0.5, &mut points), OqsStatus::Ok) };
    assert_eq!(points, 401);
    let rho0 = [c(1.0), c(0.0), c(0.0), c(0.0)];
    let mut states = vec![OqsComplex::default(); points * 4];
    let status = unsafe {
        oqs_evolve_markov(
            gen,
            rho0.as_ptr(),
            200.0,
            0.5,
            states.as_mut_ptr(),
            states.len(),
        )
    };
    assert_eq!(status, OqsStatus::Ok, "{}", last_error());
    assert_eq!(states[0], c(1.0));
    let last = &states[(points - 1) * 4..];
    assert!((last[0].re - rho[0].re).abs() < 1e-3);
    let short =
        unsafe { oqs_evolve_markov(gen, rho0.as_ptr(), 200.0, 0.5, states.as_mut_ptr(), 10) };
    assert_eq!(short, OqsStatus::InvalidArgument);
    unsafe {
        oqs_superop_free(gen);
        oqs_system_free(sys);
        oqs_bath_free(bath);
    }
}

#[test]
fn unitary_generator_has_no_unique_steady_state() {
    let sys = qubit();
    let mut bath = ptr::null_mut();
    let (l, w) = ([0.3], [-1.0]);
    unsafe {
        assert_eq!(
            oqs_bath_discrete(1, l.as_ptr(), w.as_ptr(), f64::INFINITY, &mut bath),
            OqsStatus::InvalidArgument
        );
    }
    assert!(bath.is_null());
    let energies = [0.5, -0.5];
    let zero = [c(0.0); 4];
    let mut free = ptr::null_mut();
    let bath = ohmic(1.0);
    let mut gen = ptr::null_mut();
    let mut rho = [OqsComplex::default(); 4];
    unsafe {
        assert_eq!(
            oqs_system_new(2, energies.as_ptr(), zero.as_ptr(), &mut free),
            OqsStatus::Ok
        );
        assert_eq!(oqs_qp_generator(free, bath, 1, &mut gen), OqsStatus::Ok);
        assert_eq!(
            oqs_steady_state(gen, rho.as_mut_ptr(), 4),
            OqsStatus::Numerical
        );
        oqs_superop_free(gen);
        oqs_system_free(free);
        oqs_system_free(sys);
        oqs_bath_free(bath);
    }
}

#[test]
fn bath_correlation_detailed_balance() {
    let bath = ohmic(1.3);
    let (mut emit, mut absorb) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            oqs_bath_correlation_freq(bath, 1, 2, 0.7, &mut emit),
            OqsStatus::Ok
        );
        assert_eq!(
            oqs_bath_correlation_freq(bath, 2, 1, -0.7, &mut absorb),
            OqsStatus::Ok
        );
        assert_eq!(
            oqs_bath_correlation_freq(bath, 3, 1, 0.7, &mut absorb),
            OqsStatus::InvalidArgument
        );
        oqs_bath_free(bath);
    }
    assert!(emit > 0.0);
    let mut n = 0.0;
    unsafe { oqs_planck_occupation(0.7, 1.3, &mut n) };
    assert!(n > 0.0);
}

#[test]
fn header_declares_the_api() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/oqs.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "oqs_version",
        "oqs_last_error",
        "oqs_system_new",
        "oqs_qp_generator",
        "oqs_evolve_markov",
        "OQS_STATUS_NUMERICAL",
        "typedef struct OqsSystem OqsSystem",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
    // Compile the header as C when a compiler is available.
    if let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-x", "c"])
        .arg(&header)
        .output()
    {
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

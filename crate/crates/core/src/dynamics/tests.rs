use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bath::Beta;
use crate::config::{SimulationConfig, TimeGrid};
use crate::density::DensityMatrix;
use crate::error::Error;
use crate::kernel::{born_kernel_at, qp_generator, KernelOptions, MemoryKernel};
use crate::qubit::{qubit_analytic, system, QubitParams, MINUS, PLUS};
use crate::superop::Superoperator;
use crate::testutil::{ohmic, random_system, single_mode};

fn coherent_state() -> DensityMatrix {
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.6, 0.0),
            C64::new(0.3, 0.3),
            C64::new(0.3, -0.3),
            C64::new(0.4, 0.0),
        ],
    );
    DensityMatrix::from_raw(m)
}

fn max_entry(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn free_transmission_identity_and_semigroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sys = random_system(&mut rng, 3);
    let id = Superoperator::identity(3);
    assert_eq!(free_transmission(&sys, 0.0).matrix(), id.matrix());
    let (t, s) = (0.7, 1.9);
    let prod = free_transmission(&sys, t).matrix() * free_transmission(&sys, s).matrix();
    assert!(max_entry(&(prod - free_transmission(&sys, t + s).matrix())) < 1e-14);
    assert_eq!(max_entry(free_transmission(&sys, -0.1).matrix()), 0.0);
}

#[test]
fn free_transmission_qubit_coherence_phase() {
    let sys = system(1.3).unwrap();
    let t = 2.2;
    let z = free_transmission(&sys, t).get(PLUS, MINUS, PLUS, MINUS);
    assert!((z - C64::from_polar(1.0, -1.3 * t)).norm() < 1e-15);
}

#[test]
fn zero_kernel_gives_free_resolvent() {
    let sys = system(1.0).unwrap();
    let zero = |_: C64| Ok(Superoperator::zeros(2));
    let t = transmission_freq(&sys, zero);
    let w = C64::new(0.4, 0.2);
    let got = t(w).unwrap();
    for p in 0..2 {
        for pp in 0..2 {
            let want = C64::new(0.0, 1.0) / (w - sys.splitting(p, pp));
            assert!((got.get(p, pp, p, pp) - want).norm() < 1e-14);
        }
    }
    assert!(matches!(t(C64::new(1.0, 0.0)), Err(Error::Singular { .. })));
}

#[test]
fn coherence_block_decouples_from_populations() {
    let sys = system(1.0).unwrap();
    let corr = ohmic(0.05, 5.0, Beta::Finite(2.0), &sys);
    let opts = KernelOptions::default();
    let t = transmission_freq(&sys, |z| born_kernel_at(&sys, &corr, z, &opts));
    let m = t(C64::new(0.8, 0.1)).unwrap();
    for (p, pp) in [(PLUS, PLUS), (MINUS, MINUS)] {
        for (q, qq) in [(PLUS, MINUS), (MINUS, PLUS)] {
            assert!(m.get(p, pp, q, qq).norm() < 1e-14);
            assert!(m.get(q, qq, p, pp).norm() < 1e-14);
        }
    }
}

#[test]
fn markov_qp_generator_matches_closed_form() {
    let omega0 = 1.0;
    let sys = system(omega0).unwrap();
    let corr = ohmic(0.05, 5.0, Beta::Finite(1.5), &sys);
    let opts = KernelOptions::default();
    let gen = qp_generator(&sys, &corr, &opts).unwrap().generator();
    let p = QubitParams::from_bath(omega0, &corr, &opts).unwrap();
    let grid = TimeGrid::new(0.0, 10.0 / p.g0, 0.1).unwrap();
    let traj = evolve_markov(&gen, &coherent_state(), &grid, &SimulationConfig::default()).unwrap();
    assert_eq!(traj.len(), grid.steps() + 1);
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let exact = qubit_analytic(&p, &coherent_state(), *t).unwrap();
        assert!(max_entry(&(rho.matrix() - exact.matrix())) < 1e-8, "t={t}");
    }
    assert!(traj.error_estimate.unwrap() <= 1e-9);
    assert!(traj.positivity_violations.is_empty());
}

#[test]
fn markov_rejects_dimension_mismatch() {
    let gen = Superoperator::zeros(3);
    let grid = TimeGrid::new(0.0, 1.0, 0.1).unwrap();
    let err = evolve_markov(&gen, &coherent_state(), &grid, &SimulationConfig::default());
    assert!(matches!(err, Err(Error::Dimension { .. })));
}

#[test]
fn steady_state_thermal_and_ground() {
    let omega0 = 1.0;
    let sys = system(omega0).unwrap();
    let opts = KernelOptions::default();
    let corr = ohmic(0.1, 5.0, Beta::Finite(1.0), &sys);
    let p = QubitParams::from_bath(omega0, &corr, &opts).unwrap();
    let rho = steady_state(&qp_generator(&sys, &corr, &opts).unwrap().generator()).unwrap();
    let n = p.n0;
    assert_abs_diff_eq!(rho.get(PLUS, PLUS).re, n / (1.0 + 2.0 * n), epsilon = 1e-10);
    assert_abs_diff_eq!(
        rho.get(MINUS, MINUS).re,
        (1.0 + n) / (1.0 + 2.0 * n),
        epsilon = 1e-10
    );
    assert_abs_diff_eq!(
        rho.get(PLUS, PLUS).re / rho.get(MINUS, MINUS).re,
        (-1.0f64).exp(),
        epsilon = 1e-10
    );

    let cold = ohmic(0.1, 5.0, Beta::Infinite, &sys);
    let rho = steady_state(&qp_generator(&sys, &cold, &opts).unwrap().generator()).unwrap();
    assert_abs_diff_eq!(rho.get(MINUS, MINUS).re, 1.0, epsilon = 1e-12);
}

#[test]
fn steady_state_of_unitary_generator_is_degenerate() {
    let sys = system(1.0).unwrap();
    let gen = crate::kernel::free_generator(&sys);
    assert!(matches!(steady_state(&gen), Err(Error::DegenerateKernel(n)) if n > 1));
}

#[test]
fn memory_with_zero_kernel_is_free_evolution() {
    let sys = system(1.0).unwrap();
    let kernel = MemoryKernel::zero(&sys, 0.01, 501).unwrap();
    let grid = TimeGrid::new(0.0, 8.0, 0.05).unwrap();
    let traj = evolve_memory(
        &sys,
        &kernel,
        &coherent_state(),
        &grid,
        &SimulationConfig::default(),
    )
    .unwrap();
    let free = free_transmission(&sys, 0.0);
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let want = free_transmission(&sys, *t)
            .apply(&coherent_state())
            .unwrap();
        assert!(max_entry(&(rho.matrix() - want.matrix())) < 1e-13, "t={t}");
    }
    assert_eq!(free.dim(), 2);
}

#[test]
fn memory_rejects_incommensurate_step() {
    let sys = system(1.0).unwrap();
    let kernel = MemoryKernel::zero(&sys, 0.01, 101).unwrap();
    let grid = TimeGrid::new(0.0, 1.0, 0.015).unwrap();
    let err = evolve_memory(
        &sys,
        &kernel,
        &coherent_state(),
        &grid,
        &SimulationConfig::default(),
    );
    assert!(matches!(err, Err(Error::InvalidInput(_))));
}

#[test]
fn memory_rejects_heavy_truncated_tail() {
    let sys = system(1.0).unwrap();
    let corr = single_mode(0.1, 0.8, Beta::Infinite);
    let kernel = MemoryKernel::sample(&sys, &corr, 0.01, 4.0).unwrap();
    let grid = TimeGrid::new(0.0, 10.0, 0.05).unwrap();
    let err = evolve_memory(
        &sys,
        &kernel,
        &coherent_state(),
        &grid,
        &SimulationConfig::default(),
    );
    assert!(matches!(err, Err(Error::Limit(_))), "{err:?}");
}

fn memory_vs_markov(corr: &crate::bath::BathCorrelation, depth: f64, stop: f64) -> f64 {
    let sys = system(1.0).unwrap();
    let cfg = SimulationConfig {
        history_depth: depth,
        ..SimulationConfig::default()
    };
    let rho0 = DensityMatrix::diagonal(&[1.0, 0.0]);
    let grid = TimeGrid::new(0.0, stop, 0.05).unwrap();
    let kernel = MemoryKernel::sample(&sys, corr, 0.005, depth).unwrap();
    let mem = evolve_memory(&sys, &kernel, &rho0, &grid, &cfg).unwrap();
    let gen = qp_generator(&sys, corr, &KernelOptions::default())
        .unwrap()
        .generator();
    let markov = evolve_markov(&gen, &rho0, &grid, &cfg).unwrap();
    mem.max_population_deviation(&markov)
}

#[test]
fn broadband_memory_tracks_markov_but_single_mode_does_not() {
    let sys = system(1.0).unwrap();
    let broad = ohmic(0.02, 10.0, Beta::Infinite, &sys);
    let dev_broad = memory_vs_markov(&broad, 30.0, 60.0);
    assert!(dev_broad < 1e-2, "broadband deviation {dev_broad:e}");
    let mode = single_mode(0.1, 1.0, Beta::Infinite);
    let dev_mode = memory_vs_markov(&mode, 60.0, 60.0);
    assert!(
        dev_mode > 10.0 * dev_broad,
        "single mode {dev_mode:e} vs broadband {dev_broad:e}"
    );
}

#[test]
fn memory_preserves_trace_and_hermiticity() {
    let sys = system(1.0).unwrap();
    let corr = ohmic(0.05, 4.0, Beta::Finite(1.0), &sys);
    let kernel = MemoryKernel::sample(&sys, &corr, 0.01, 15.0).unwrap();
    let grid = TimeGrid::new(0.0, 10.0, 0.05).unwrap();
    let traj = evolve_memory(
        &sys,
        &kernel,
        &coherent_state(),
        &grid,
        &SimulationConfig::default(),
    )
    .unwrap();
    for d in &traj.diagnostics {
        assert!(d.trace_defect < 1e-10);
        assert!(d.hermiticity_defect < 1e-10);
    }
}

#[test]
fn memory_step_halving_estimate_is_small() {
    let sys = system(1.0).unwrap();
    let corr = ohmic(0.05, 4.0, Beta::Finite(1.0), &sys);
    let kernel = MemoryKernel::sample(&sys, &corr, 0.01, 15.0).unwrap();
    let grid = TimeGrid::new(0.0, 10.0, 0.1).unwrap();
    let opts = MemoryOptions {
        check_halving: true,
        ..MemoryOptions::default()
    };
    let traj = evolve_memory_with(
        &sys,
        &kernel,
        &coherent_state(),
        &grid,
        &SimulationConfig::default(),
        &opts,
    )
    .unwrap();
    let est = traj.error_estimate.unwrap();
    assert!(est > 0.0 && est < 1e-3, "{est:e}");
}

#[test]
fn quasiparticle_root_matches_qubit_formula() {
    let omega0 = 1.0;
    let sys = system(omega0).unwrap();
    let corr = ohmic(0.02, 5.0, Beta::Finite(2.0), &sys);
    let opts = KernelOptions::default();
    let p = QubitParams::from_bath(omega0, &corr, &opts).unwrap();
    let set = resonance_roots(
        &sys,
        |z| crate::kernel::born_kernel_freq(&sys, &corr, z.re, crate::kernel::DEFAULT_EPS, &opts),
        ResonanceMode::Quasiparticle,
        &ResonanceOptions::default(),
    )
    .unwrap();
    let want = p.coherence_resonance();
    let root = set
        .roots
        .iter()
        .find(|r| (r.unperturbed - omega0).abs() < 1e-12)
        .expect("coherence sector");
    assert!(
        (root.omega() - want).norm() < 1e-6 * p.g0,
        "{:?} vs {want}",
        root.omega()
    );
}

#[test]
fn zero_coupling_roots_are_bohr_frequencies() {
    let sys = system(1.0).unwrap();
    let zero = |_: C64| Ok(Superoperator::zeros(2));
    for mode in [ResonanceMode::Quasiparticle, ResonanceMode::Full] {
        let set = resonance_roots(&sys, zero, mode, &ResonanceOptions::default()).unwrap();
        assert_eq!(set.roots.len(), 4);
        for r in &set.roots {
            assert_eq!(r.omega(), C64::new(r.unperturbed, 0.0));
        }
    }
}

fn full_residual(g_ratio: f64) -> f64 {
    let omega0 = 1.0;
    let sys = system(omega0).unwrap();
    let cutoff: f64 = 5.0;
    let eta = g_ratio / (-1.0 / cutoff).exp();
    let corr = ohmic(eta, cutoff, Beta::Finite(2.0), &sys);
    let opts = KernelOptions::default();
    let p = QubitParams::from_bath(omega0, &corr, &opts).unwrap();
    assert_abs_diff_eq!(p.g0, g_ratio, epsilon = 1e-12);
    let set = resonance_roots(
        &sys,
        |z| born_kernel_at(&sys, &corr, z, &opts),
        ResonanceMode::Full,
        &ResonanceOptions::default(),
    )
    .unwrap();
    let root = set
        .roots
        .iter()
        .find(|r| (r.unperturbed - omega0).abs() < 1e-12)
        .expect("coherence sector");
    assert!(root.residual < 1e-10);
    (root.omega() - p.coherence_resonance()).norm()
}

#[test]
fn full_root_deviation_is_second_order() {
    let big = full_residual(0.02);
    let small = full_residual(0.01);
    assert!(big / small > 3.5, "{big:e} / {small:e}");
}

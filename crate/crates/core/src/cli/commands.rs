//! Subcommand bodies. Each turns a validated configuration into a `Report`.

use num_complex::Complex64 as C64;
use serde_json::Value;

use crate::bath::BathCorrelation;
use crate::config::{SimulationConfig, TimeGrid};
use crate::density::DensityMatrix;
use crate::dynamics::{
    evolve_markov, evolve_memory, resonance_roots, ResonanceMode, ResonanceOptions, Trajectory,
};
use crate::error::{Error, Result};
use crate::kernel::{
    born_kernel_at, born_kernel_freq, dissipator_at, qp_generator, shift_at, KernelOptions,
    MemoryKernel,
};
use crate::qubit::{qubit_analytic, qubit_lindblad_generator, qubit_rates, MINUS, PLUS};
use crate::superop::Superoperator;
use crate::system::SystemSpec;
use crate::wick::{verify_wick_with, FockOracle, WickCheckOptions};

use super::config::{RunConfig, SimMode};
use super::output::{num, Report};

/// Result of a subcommand: the report plus non-fatal warnings.
pub struct Outcome {
    pub report: Report,
    pub warnings: Vec<String>,
}

struct Setup {
    sys: SystemSpec,
    corr: BathCorrelation,
    cfg: SimulationConfig,
}

fn setup(rc: &RunConfig) -> Result<Setup> {
    let sys = rc
        .system
        .as_ref()
        .ok_or_else(|| Error::Config("missing [system] block".into()))?
        .build()?;
    let cfg = rc.simulation.build()?;
    let bath = rc
        .bath
        .as_ref()
        .ok_or_else(|| Error::Config("missing [bath] block".into()))?;
    let corr = bath.correlation(cfg.omega_cutoff, sys.max_splitting())?;
    cfg.check_cutoff(corr.omega_cutoff(), sys.max_splitting())?;
    Ok(Setup { sys, corr, cfg })
}

fn initial_state(rc: &RunConfig, dim: usize, cfg: &SimulationConfig) -> Result<DensityMatrix> {
    match &rc.initial {
        Some(b) => b.build(dim, &cfg.tolerances),
        None => {
            let mut pops = vec![0.0; dim];
            pops[0] = 1.0;
            Ok(DensityMatrix::diagonal(&pops))
        }
    }
}

fn rho_columns(dim: usize) -> Vec<String> {
    let mut cols = Vec::with_capacity(2 * dim * dim);
    for p in 0..dim {
        for q in 0..dim {
            cols.push(format!("rho_{p}_{q}_re"));
            cols.push(format!("rho_{p}_{q}_im"));
        }
    }
    cols
}

fn rho_cells(rho: &DensityMatrix, row: &mut Vec<Value>) {
    let d = rho.dim();
    for p in 0..d {
        for q in 0..d {
            let z = rho.get(p, q);
            row.push(num(z.re));
            row.push(num(z.im));
        }
    }
}

pub fn simulate(rc: &RunConfig) -> Result<Outcome> {
    let Setup { sys, corr, cfg } = setup(rc)?;
    let rho0 = initial_state(rc, sys.dim(), &cfg)?;
    let traj: Trajectory = match rc.simulation.mode {
        SimMode::Markov => {
            let gen = qp_generator(&sys, &corr, &KernelOptions::from(&cfg))?.generator();
            evolve_markov(&gen, &rho0, &cfg.time_grid, &cfg)?
        }
        SimMode::Memory => {
            let span = cfg.time_grid.stop - cfg.time_grid.start;
            let depth = cfg.history_depth.min(span).max(rc.simulation.step);
            let kernel = MemoryKernel::sample(&sys, &corr, rc.simulation.kernel_step(), depth)?;
            evolve_memory(&sys, &kernel, &rho0, &cfg.time_grid, &cfg)?
        }
    };
    let mut warnings = Vec::new();
    if !traj.positivity_violations.is_empty() {
        let msg = format!(
            "{} states have eigenvalues below -{:e}; first at t = {}",
            traj.positivity_violations.len(),
            cfg.tolerances.pos,
            traj.times[traj.positivity_violations[0]]
        );
        if rc.simulation.fail_on_positivity {
            return Err(Error::Step(format!("positivity violated: {msg}")));
        }
        warnings.push(msg);
    }
    let mut report = Report::new("simulate");
    report.meta("mode", rc.simulation.mode);
    report.meta("rwa", cfg.rwa);
    report.meta("summary", traj.summary());
    let with_rho = rc.output.wants("rho");
    let with_diag = rc.output.wants("diagnostics");
    report.columns.push("time".into());
    if with_rho {
        report.columns.extend(rho_columns(sys.dim()));
    }
    if with_diag {
        report.columns.extend(
            [
                "hermiticity_defect",
                "trace_defect",
                "min_eigenvalue",
                "purity",
            ]
            .map(String::from),
        );
    }
    for ((t, rho), diag) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        let mut row = vec![num(*t)];
        if with_rho {
            rho_cells(rho, &mut row);
        }
        if with_diag {
            row.extend(
                [
                    diag.hermiticity_defect,
                    diag.trace_defect,
                    diag.min_eigenvalue,
                    diag.purity,
                ]
                .map(num),
            );
        }
        report.rows.push(row);
    }
    Ok(Outcome { report, warnings })
}

fn superop_columns(prefix: &str, dim: usize) -> Vec<String> {
    let mut cols = Vec::new();
    for r in 0..dim * dim {
        for c in 0..dim * dim {
            let (p, pp, q, qq) = (r / dim, r % dim, c / dim, c % dim);
            cols.push(format!("{prefix}_{p}{pp}_{q}{qq}_re"));
            cols.push(format!("{prefix}_{p}{pp}_{q}{qq}_im"));
        }
    }
    cols
}

fn superop_cells(s: &Superoperator, row: &mut Vec<Value>) {
    // Row-major over the flattened superoperator, matching `superop_columns`.
    let m = s.matrix();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            row.push(num(m[(r, c)].re));
            row.push(num(m[(r, c)].im));
        }
    }
}

pub fn kernel_scan(rc: &RunConfig) -> Result<Outcome> {
    let Setup { sys, corr, cfg } = setup(rc)?;
    let scan = &rc.scan;
    let span = 2.0 * sys.max_splitting().max(1e-3);
    let lo = scan.omega_min.unwrap_or(-span);
    let hi = scan.omega_max.unwrap_or(span);
    if !(hi > lo) || scan.points < 2 {
        return Err(Error::Config(format!(
            "scan needs omega_min < omega_max and at least 2 points, got [{lo}, {hi}] with {}",
            scan.points
        )));
    }
    let opts = KernelOptions::from(&cfg);
    let fields: Vec<&str> = ["kernel", "shift", "dissipator"]
        .into_iter()
        .filter(|f| rc.output.wants(f))
        .collect();
    let mut report = Report::new("kernel-scan");
    report.meta("eps", scan.eps);
    report.meta("rwa", cfg.rwa);
    report.columns.push("omega".into());
    for f in &fields {
        report.columns.extend(superop_columns(f, sys.dim()));
    }
    for k in 0..scan.points {
        let w = lo + (hi - lo) * k as f64 / (scan.points - 1) as f64;
        let mut row = vec![num(w)];
        for f in &fields {
            let s = match *f {
                "kernel" => born_kernel_freq(&sys, &corr, w, scan.eps, &opts)?,
                "shift" => shift_at(&sys, &corr, w, &opts)?,
                _ => dissipator_at(&sys, &corr, w, &opts)?,
            };
            superop_cells(&s, &mut row);
        }
        report.rows.push(row);
    }
    Ok(Outcome {
        report,
        warnings: Vec::new(),
    })
}

pub fn resonances(rc: &RunConfig) -> Result<Outcome> {
    let Setup { sys, corr, cfg } = setup(rc)?;
    let opts = KernelOptions::from(&cfg);
    let ropts = ResonanceOptions {
        energy_tol: cfg.energy_match_tol,
        root_tol: rc.resonances.root_tol,
        max_iter: rc.resonances.max_iter,
    };
    let mode = rc.resonances.mode;
    let set = match mode {
        ResonanceMode::Full => resonance_roots(
            &sys,
            |z| born_kernel_at(&sys, &corr, z, &opts),
            mode,
            &ropts,
        )?,
        ResonanceMode::Quasiparticle => resonance_roots(
            &sys,
            |z: C64| born_kernel_freq(&sys, &corr, z.re, rc.scan.eps, &opts),
            mode,
            &ropts,
        )?,
    };
    let mut report = Report::new("resonances");
    report.meta("mode", mode);
    report.columns = ["sector", "unperturbed", "re", "im", "residual"]
        .map(String::from)
        .to_vec();
    for r in &set.roots {
        let sector: Vec<String> = r.sector.iter().map(|(p, q)| format!("{p}{q}")).collect();
        report.rows.push(vec![
            Value::String(sector.join(" ")),
            num(r.unperturbed),
            num(r.re),
            num(r.im),
            num(r.residual),
        ]);
    }
    Ok(Outcome {
        report,
        warnings: Vec::new(),
    })
}

pub fn wick_check(rc: &RunConfig) -> Result<Outcome> {
    let bath = rc
        .bath
        .as_ref()
        .ok_or_else(|| Error::Config("missing [bath] block".into()))?;
    let modes = bath.modes()?;
    let spec = bath.spec()?;
    let top = modes.iter().map(|m| m.omega).fold(0.0, f64::max);
    let corr = BathCorrelation::new(spec.clone(), spec.default_cutoff(top))?;
    let oracle = FockOracle::new(modes, rc.wick.n_max, spec.beta)?;
    let opts = WickCheckOptions {
        strings_per_length: rc.wick.strings_per_length,
        time_span: rc.wick.time_span,
        seed: rc.wick.seed,
    };
    let rep = verify_wick_with(&oracle, &corr, rc.wick.max_n, opts)?;
    let mut report = Report::new("wick-check");
    report.meta("n_max", rep.n_max);
    report.meta("truncation_error", rep.truncation_error);
    report.meta("max_deviation", rep.max_deviation);
    report.meta("seed", rc.wick.seed);
    report.columns = ["length", "strings", "matchings", "max_deviation"]
        .map(String::from)
        .to_vec();
    for l in &rep.lengths {
        report.rows.push(vec![
            Value::from(l.length),
            Value::from(l.strings),
            Value::from(l.matchings),
            num(l.max_deviation),
        ]);
    }
    Ok(Outcome {
        report,
        warnings: Vec::new(),
    })
}

pub fn qubit_demo(rc: &RunConfig) -> Result<Outcome> {
    let p = rc.qubit.params()?;
    let rates = qubit_rates(&p);
    let cfg = rc.simulation.build()?;
    let stop = match rc.qubit.stop {
        Some(s) => s,
        None if p.g0 > 0.0 => 10.0 / p.g0,
        None => 10.0 / p.omega0,
    };
    let grid = TimeGrid::new(0.0, stop, rc.qubit.step)?;
    let rho0 = match &rc.initial {
        Some(b) => b.build(2, &cfg.tolerances)?,
        None => DensityMatrix::pure(&[C64::new(0.75f64.sqrt(), 0.0), C64::new(0.5, 0.0)])?,
    };
    let gen = qubit_lindblad_generator(&p)?;
    let traj = evolve_markov(&gen, &rho0, &grid, &cfg)?;
    let mut report = Report::new("qubit-demo");
    report.meta("params", p);
    report.meta("rates", rates);
    report.meta("shifted_frequency", p.shifted_frequency());
    report.columns = [
        "time",
        "analytic_pp",
        "numeric_pp",
        "analytic_pm_re",
        "analytic_pm_im",
        "numeric_pm_re",
        "numeric_pm_im",
        "max_abs_deviation",
    ]
    .map(String::from)
    .to_vec();
    let mut worst = 0.0f64;
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let exact = qubit_analytic(&p, &rho0, *t)?;
        let dev = (rho.matrix() - exact.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        let (a, n) = (exact.get(PLUS, MINUS), rho.get(PLUS, MINUS));
        report.rows.push(vec![
            num(*t),
            num(exact.get(PLUS, PLUS).re),
            num(rho.get(PLUS, PLUS).re),
            num(a.re),
            num(a.im),
            num(n.re),
            num(n.im),
            num(dev),
        ]);
    }
    report.meta("max_abs_deviation", worst);
    Ok(Outcome {
        report,
        warnings: Vec::new(),
    })
}

//! Run configuration: a versioned TOML document with nested blocks.

use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bath::{BathCorrelation, BathSpec, Beta, Mode};
use crate::config::{SimulationConfig, TimeGrid, Tolerances};
use crate::density::DensityMatrix;
use crate::dynamics::ResonanceMode;
use crate::error::{Error, Result};
use crate::kernel::DEFAULT_EPS;
use crate::qubit::QubitParams;
use crate::system::{CMatrix, SystemSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub system: Option<SystemBlock>,
    #[serde(default)]
    pub bath: Option<BathBlock>,
    #[serde(default)]
    pub simulation: SimulationBlock,
    #[serde(default)]
    pub initial: Option<InitialBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub scan: ScanBlock,
    #[serde(default)]
    pub resonances: ResonanceBlock,
    #[serde(default)]
    pub wick: WickBlock,
    #[serde(default)]
    pub qubit: QubitBlock,
}

/// Complex matrix given as separate real and imaginary row lists.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrix {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl ComplexMatrix {
    pub fn to_matrix(&self, name: &str) -> Result<CMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if rows == 0 || self.re.iter().any(|r| r.len() != cols) {
            return Err(config(format!(
                "{name}.re must be a non-empty rectangular array"
            )));
        }
        let im = match &self.im {
            Some(im) => {
                if im.len() != rows || im.iter().any(|r| r.len() != cols) {
                    return Err(config(format!(
                        "{name}.im must have the same shape as {name}.re"
                    )));
                }
                im.clone()
            }
            None => vec![vec![0.0; cols]; rows],
        };
        Ok(DMatrix::from_fn(rows, cols, |i, j| {
            C64::new(self.re[i][j], im[i][j])
        }))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub energies: Vec<f64>,
    /// Operator coupled to the bath annihilator (channel 1).
    pub coupling: ComplexMatrix,
    /// Operator coupled to the bath creator (channel 2); defaults to the adjoint.
    #[serde(default)]
    pub coupling_raise: Option<ComplexMatrix>,
}

impl SystemBlock {
    pub fn build(&self) -> Result<SystemSpec> {
        let s1 = self.coupling.to_matrix("system.coupling")?;
        match &self.coupling_raise {
            Some(m) => SystemSpec::with_couplings(
                self.energies.clone(),
                [s1, m.to_matrix("system.coupling_raise")?],
            ),
            None => SystemSpec::new(self.energies.clone(), s1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BathKind {
    Ohmic,
    Discrete,
}

/// Inverse temperature: a positive number or `"inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BetaValue {
    Number(f64),
    Name(String),
}

impl BetaValue {
    pub fn to_beta(&self) -> Result<Beta> {
        let beta = match self {
            BetaValue::Number(b) if *b == f64::INFINITY => Beta::Infinite,
            BetaValue::Number(b) => Beta::Finite(*b),
            BetaValue::Name(s) if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity") => {
                Beta::Infinite
            }
            BetaValue::Name(s) => {
                return Err(config(format!(
                    "bath.beta: expected a number or \"inf\", got {s:?}"
                )))
            }
        };
        beta.validate()?;
        Ok(beta)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeBlock {
    pub lambda: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathBlock {
    pub model: BathKind,
    pub beta: BetaValue,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub cutoff: Option<f64>,
    #[serde(default)]
    pub modes: Option<Vec<ModeBlock>>,
}

impl BathBlock {
    pub fn spec(&self) -> Result<BathSpec> {
        let beta = self.beta.to_beta()?;
        match self.model {
            BathKind::Ohmic => {
                let eta = self
                    .eta
                    .ok_or_else(|| config("bath.eta is required for the ohmic model"))?;
                let cutoff = self
                    .cutoff
                    .ok_or_else(|| config("bath.cutoff is required for the ohmic model"))?;
                BathSpec::ohmic(eta, cutoff, beta)
            }
            BathKind::Discrete => {
                let modes = self
                    .modes
                    .as_ref()
                    .ok_or_else(|| config("bath.modes is required for the discrete model"))?;
                BathSpec::discrete(self.modes_vec(modes), beta)
            }
        }
    }

    pub fn modes(&self) -> Result<Vec<Mode>> {
        match (&self.model, &self.modes) {
            (BathKind::Discrete, Some(m)) => Ok(self.modes_vec(m)),
            _ => Err(config("a discrete bath with bath.modes is required")),
        }
    }

    fn modes_vec(&self, modes: &[ModeBlock]) -> Vec<Mode> {
        modes
            .iter()
            .map(|m| Mode {
                lambda: m.lambda,
                omega: m.omega,
            })
            .collect()
    }

    /// Correlation functions with the configured or default spectral cutoff.
    pub fn correlation(
        &self,
        omega_cutoff: Option<f64>,
        max_splitting: f64,
    ) -> Result<BathCorrelation> {
        let spec = self.spec()?;
        let cutoff = omega_cutoff.unwrap_or_else(|| spec.default_cutoff(max_splitting));
        BathCorrelation::new(spec, cutoff)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    #[default]
    Markov,
    Memory,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationBlock {
    pub mode: SimMode,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub rwa: bool,
    pub energy_match_tol: f64,
    pub pv_exclusion: f64,
    pub omega_cutoff: Option<f64>,
    pub history_depth: f64,
    pub ode_tol: f64,
    /// Sampling step of the memory kernel; defaults to a tenth of `step`.
    pub kernel_step: Option<f64>,
    pub tol_herm: f64,
    pub tol_trace: f64,
    pub tol_pos: f64,
    /// Treat negative eigenvalues beyond `tol_pos` as a failure.
    pub fail_on_positivity: bool,
}

impl Default for SimulationBlock {
    fn default() -> Self {
        let c = SimulationConfig::default();
        Self {
            mode: SimMode::Markov,
            start: c.time_grid.start,
            stop: c.time_grid.stop,
            step: c.time_grid.step,
            rwa: c.rwa,
            energy_match_tol: c.energy_match_tol,
            pv_exclusion: c.pv_exclusion,
            omega_cutoff: c.omega_cutoff,
            history_depth: c.history_depth,
            ode_tol: c.ode_tol,
            kernel_step: None,
            tol_herm: c.tolerances.herm,
            tol_trace: c.tolerances.trace,
            tol_pos: c.tolerances.pos,
            fail_on_positivity: false,
        }
    }
}

impl SimulationBlock {
    pub fn build(&self) -> Result<SimulationConfig> {
        let cfg = SimulationConfig {
            time_grid: TimeGrid {
                start: self.start,
                stop: self.stop,
                step: self.step,
            },
            tolerances: Tolerances {
                herm: self.tol_herm,
                trace: self.tol_trace,
                pos: self.tol_pos,
            },
            energy_match_tol: self.energy_match_tol,
            pv_exclusion: self.pv_exclusion,
            omega_cutoff: self.omega_cutoff,
            history_depth: self.history_depth,
            ode_tol: self.ode_tol,
            rwa: self.rwa,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kernel_step(&self) -> f64 {
        self.kernel_step.unwrap_or(0.1 * self.step)
    }
}

/// Initial state: either populations of the energy levels or a full matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialBlock {
    #[serde(default)]
    pub populations: Option<Vec<f64>>,
    #[serde(default)]
    pub matrix: Option<ComplexMatrix>,
}

impl InitialBlock {
    pub fn build(&self, dim: usize, tol: &Tolerances) -> Result<DensityMatrix> {
        let rho = match (&self.populations, &self.matrix) {
            (Some(p), None) => DensityMatrix::new(DensityMatrix::diagonal(p).into_matrix(), tol)?,
            (None, Some(m)) => DensityMatrix::new(m.to_matrix("initial.matrix")?, tol)?,
            _ => return Err(config("initial needs exactly one of populations or matrix")),
        };
        if rho.dim() != dim {
            return Err(Error::Dimension {
                expected: dim,
                actual: rho.dim(),
            });
        }
        Ok(rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub format: Format,
    pub path: Option<PathBuf>,
    /// Column groups to emit; empty means all.
    pub fields: Vec<String>,
}

impl OutputBlock {
    pub fn wants(&self, field: &str) -> bool {
        self.fields.is_empty() || self.fields.iter().any(|f| f == field)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanBlock {
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub points: usize,
    pub eps: f64,
}

impl Default for ScanBlock {
    fn default() -> Self {
        Self {
            omega_min: None,
            omega_max: None,
            points: 50,
            eps: DEFAULT_EPS,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonanceBlock {
    pub mode: ResonanceMode,
    pub root_tol: f64,
    pub max_iter: usize,
}

impl Default for ResonanceBlock {
    fn default() -> Self {
        let o = crate::dynamics::ResonanceOptions::default();
        Self {
            mode: ResonanceMode::Full,
            root_tol: o.root_tol,
            max_iter: o.max_iter,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WickBlock {
    pub max_n: usize,
    pub n_max: usize,
    pub strings_per_length: usize,
    pub time_span: f64,
    pub seed: u64,
}

impl Default for WickBlock {
    fn default() -> Self {
        let o = crate::wick::WickCheckOptions::default();
        Self {
            max_n: 4,
            n_max: 40,
            strings_per_length: o.strings_per_length,
            time_span: o.time_span,
            seed: o.seed,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QubitBlock {
    pub omega0: f64,
    pub g0: f64,
    pub n0: f64,
    pub delta: f64,
    /// End of the comparison window; defaults to `10 / g0`.
    pub stop: Option<f64>,
    pub step: f64,
}

impl Default for QubitBlock {
    fn default() -> Self {
        Self {
            omega0: 1.0,
            g0: 0.1,
            n0: 0.0,
            delta: 0.0,
            stop: None,
            step: 0.05,
        }
    }
}

impl QubitBlock {
    pub fn params(&self) -> Result<QubitParams> {
        QubitParams::new(self.omega0, self.g0, self.n0, self.delta)
    }
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parsed configuration plus the digest of its effective (overridden) form.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub sha256: String,
}

/// Parses `text`, applies `key=value` overrides and validates the schema version.
pub fn load(text: &str, overrides: &[String]) -> Result<LoadedConfig> {
    // Parse the file as written first so errors point at its lines.
    let _: RunConfig = toml::from_str(text).map_err(|e| config(e.to_string()))?;
    let mut table: toml::Table = toml::from_str(text).map_err(|e| config(e.to_string()))?;
    for item in overrides {
        apply_override(&mut table, item)?;
    }
    let canonical = toml::to_string(&table).map_err(|e| config(e.to_string()))?;
    let config_value: RunConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| config(format!("after overrides: {}", e.message())))?;
    if config_value.schema_version != SCHEMA_VERSION {
        return Err(config(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            config_value.schema_version
        )));
    }
    Ok(LoadedConfig {
        config: config_value,
        sha256: hex::encode(Sha256::digest(canonical.as_bytes())),
    })
}

/// Sets a dotted key, creating intermediate tables. Values are read as TOML
/// literals, falling back to a bare string.
pub fn apply_override(table: &mut toml::Table, item: &str) -> Result<()> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| config(format!("override {item:?} is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(config(format!("override key {key:?} is malformed")));
    }
    let value = parse_value(raw.trim());
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| config(format!("override key {key:?}: {p} is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT: &str = r#"
schema_version = 1

[system]
energies = [0.5, -0.5]
coupling = { re = [[0.0, 1.0], [0.0, 0.0]] }

[bath]
model = "ohmic"
eta = 0.05
cutoff = 5.0
beta = 2.0
"#;

    #[test]
    fn parses_minimal_config() {
        let c = load(QUBIT, &[]).unwrap();
        let sys = c.config.system.unwrap().build().unwrap();
        assert_eq!(sys.dim(), 2);
        assert_eq!(c.config.simulation.mode, SimMode::Markov);
        assert_eq!(c.sha256.len(), 64);
    }

    #[test]
    fn overrides_change_hash_and_values() {
        let a = load(QUBIT, &[]).unwrap();
        let b = load(
            QUBIT,
            &["simulation.stop=3.5".into(), "bath.beta=inf".into()],
        )
        .unwrap();
        assert_ne!(a.sha256, b.sha256);
        assert_eq!(b.config.simulation.stop, 3.5);
        assert!(b.config.bath.unwrap().beta.to_beta().unwrap().is_infinite());
        assert_eq!(a.sha256, load(QUBIT, &[]).unwrap().sha256);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = QUBIT.replace("eta = 0.05", "eta = \"x\"");
        let err = load(&bad, &[]).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn rejects_unknown_schema_and_fields() {
        assert!(load(
            &QUBIT.replace("schema_version = 1", "schema_version = 7"),
            &[]
        )
        .is_err());
        assert!(load(&format!("{QUBIT}\nbogus = 1\n"), &[]).is_err());
        assert!(load(QUBIT, &["nokey".into()]).is_err());
    }

    #[test]
    fn initial_state_validation() {
        let tol = Tolerances::default();
        let block = InitialBlock {
            populations: Some(vec![0.5, 0.5]),
            matrix: None,
        };
        assert_eq!(block.build(2, &tol).unwrap().dim(), 2);
        assert!(block.build(3, &tol).is_err());
        let bad = InitialBlock {
            populations: Some(vec![1.5, -0.5]),
            matrix: None,
        };
        assert!(bad.build(2, &tol).is_err());
    }
}

//! Experiment configuration files.
//!
//! One experiment per TOML file. Angles in `[grid]` are given in units of π.

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use surflearn::fermion::{Boundary, Chord};
use surflearn::statevector::layout::{CodeLayout, MAX_DISTANCE};
use surflearn::statevector::coherent::MAX_EXHAUSTIVE_QUBITS;

/// Largest chain accepted by the fermion engine.
pub const MAX_SITES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    EntropyScan,
    CoherentInfo,
    Ensemble,
    FloquetScan,
    DualityTable,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::EntropyScan => "entropy_scan",
            Kind::CoherentInfo => "coherent_info",
            Kind::Ensemble => "ensemble",
            Kind::FloquetScan => "floquet_scan",
            Kind::DualityTable => "duality_table",
        }
    }
}

/// Cartesian grid; each axis is a list of multiples of π.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    #[serde(default = "projective_t")]
    pub t: Vec<f64>,
}

fn projective_t() -> Vec<f64> {
    vec![0.25]
}

/// One grid point in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub theta: f64,
    pub phi: f64,
    pub t: f64,
}

impl Grid {
    /// Points in `theta`-major, then `phi`, then `t` order.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.theta.len() * self.phi.len() * self.t.len());
        for &th in &self.theta {
            for &ph in &self.phi {
                for &t in &self.t {
                    out.push(GridPoint {
                        theta: th * PI,
                        phi: ph * PI,
                        t: t * PI,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FermionParams {
    #[serde(rename = "L")]
    pub sites: usize,
    /// Defaults to `L`.
    pub depth: Option<usize>,
    #[serde(default)]
    pub boundary: Boundary,
    pub trajectories: usize,
    /// Cut-origin stride of translation-averaged profiles (periodic only).
    pub profile_stride: Option<usize>,
    /// Defaults to the chord matching the boundary.
    pub chord: Option<Chord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    Exhaustive,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatevectorParams {
    pub d: usize,
    #[serde(default = "exhaustive")]
    pub plan: PlanKind,
    /// Monte Carlo samples.
    pub samples: Option<usize>,
}

fn exhaustive() -> PlanKind {
    PlanKind::Exhaustive
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleParams {
    pub d: usize,
    pub samples: usize,
    #[serde(default = "default_order")]
    pub order: u32,
    /// Prefix sizes at which the divergence is also reported.
    #[serde(default)]
    pub kl_samples: Vec<usize>,
}

fn default_order() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloquetParams {
    pub momenta: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub grid: Grid,
    pub fermion: Option<FermionParams>,
    pub statevector: Option<StatevectorParams>,
    pub ensemble: Option<EnsembleParams>,
    pub floquet: Option<FloquetParams>,
}

#[derive(Debug)]
pub enum ConfigError {
    /// Malformed file or invalid field; carries the field path.
    Invalid(String),
    /// Well-formed request beyond the engines' limits.
    Capacity(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
            ConfigError::Capacity(m) => write!(f, "capacity exceeded: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(path: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid(format!("{path}: {msg}"))
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
}

/// Dry-run resource estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub kind: &'static str,
    pub grid_points: usize,
    pub tasks: usize,
    /// Statevector amplitudes per task (data qubits plus the reference).
    pub amplitudes: Option<u64>,
    /// Covariance entries per trajectory.
    pub covariance_reals: Option<u64>,
    pub memory_bytes: u64,
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "kind: {}", self.kind)?;
        writeln!(f, "grid points: {}", self.grid_points)?;
        writeln!(f, "tasks: {}", self.tasks)?;
        if let Some(a) = self.amplitudes {
            writeln!(f, "amplitudes per task: 2^{} = {a}", a.trailing_zeros())?;
        }
        if let Some(c) = self.covariance_reals {
            writeln!(f, "covariance reals per trajectory: {c}")?;
        }
        write!(f, "peak memory per task: {} bytes", self.memory_bytes)
    }
}

impl ExperimentConfig {
    pub fn tasks(&self) -> usize {
        let n = self.grid.points().len();
        match self.kind {
            Kind::EntropyScan => n * self.fermion.as_ref().map_or(0, |f| f.trajectories),
            _ => n,
        }
    }

    /// Checks required fields and capacity, returning the resource estimate.
    pub fn validate(&self) -> Result<Report, ConfigError> {
        let g = &self.grid;
        for (name, axis) in [("grid.theta", &g.theta), ("grid.phi", &g.phi), ("grid.t", &g.t)] {
            if axis.is_empty() {
                return Err(invalid(name, "empty axis"));
            }
            if let Some(x) = axis.iter().find(|x| !x.is_finite()) {
                return Err(invalid(name, format!("non-finite value {x}")));
            }
        }
        if let Some(x) = g.theta.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(invalid("grid.theta", format!("{x} outside [0, 1]")));
        }
        if let Some(x) = g.t.iter().find(|x| !(0.0..=0.25).contains(*x)) {
            return Err(invalid("grid.t", format!("{x} outside [0, 0.25]")));
        }
        let points = g.points().len();
        let mut report = Report {
            kind: self.kind.name(),
            grid_points: points,
            tasks: self.tasks(),
            amplitudes: None,
            covariance_reals: None,
            memory_bytes: 0,
        };
        let projective_only = |what: &str| {
            if g.t.iter().any(|&t| t != 0.25) {
                Err(invalid("grid.t", format!("{what} needs t = 0.25 only")))
            } else {
                Ok(())
            }
        };
        match self.kind {
            Kind::EntropyScan => {
                let f = self.fermion.as_ref().ok_or_else(|| invalid("fermion", "missing section"))?;
                if f.sites < 4 || f.sites % 2 == 1 {
                    return Err(invalid("fermion.L", format!("{} must be even and ≥ 4", f.sites)));
                }
                if f.sites > MAX_SITES {
                    return Err(ConfigError::Capacity(format!(
                        "fermion.L = {} exceeds {MAX_SITES}",
                        f.sites
                    )));
                }
                if f.trajectories == 0 {
                    return Err(invalid("fermion.trajectories", "must be positive"));
                }
                if f.depth == Some(0) {
                    return Err(invalid("fermion.depth", "must be positive"));
                }
                if let Some(s) = f.profile_stride {
                    if s == 0 {
                        return Err(invalid("fermion.profile_stride", "must be positive"));
                    }
                    if f.boundary != Boundary::Periodic {
                        return Err(invalid("fermion.profile_stride", "needs a periodic boundary"));
                    }
                }
                projective_only("entropy_scan")?;
                let n = 2 * f.sites as u64;
                report.covariance_reals = Some(n * n);
                report.memory_bytes = 8 * n * n;
            }
            Kind::CoherentInfo => {
                let s = self
                    .statevector
                    .as_ref()
                    .ok_or_else(|| invalid("statevector", "missing section"))?;
                let qubits = statevector_qubits(s.d, "statevector.d")?;
                match s.plan {
                    PlanKind::Exhaustive if qubits > MAX_EXHAUSTIVE_QUBITS => {
                        return Err(ConfigError::Capacity(format!(
                            "exhaustive enumeration over {qubits} qubits exceeds {MAX_EXHAUSTIVE_QUBITS}"
                        )))
                    }
                    PlanKind::MonteCarlo if s.samples.unwrap_or(0) < 2 => {
                        return Err(invalid("statevector.samples", "Monte Carlo needs ≥ 2 samples"))
                    }
                    _ => {}
                }
                let amps = 1u64 << (qubits + 1);
                report.amplitudes = Some(amps);
                report.memory_bytes = 16 * amps;
            }
            Kind::Ensemble => {
                let e = self.ensemble.as_ref().ok_or_else(|| invalid("ensemble", "missing section"))?;
                let qubits = statevector_qubits(e.d, "ensemble.d")?;
                if e.samples == 0 {
                    return Err(invalid("ensemble.samples", "must be positive"));
                }
                if e.order > surflearn::ensemble::MAX_ORDER {
                    return Err(invalid("ensemble.order", format!("{} > {}", e.order, surflearn::ensemble::MAX_ORDER)));
                }
                if let Some(k) = e.kl_samples.iter().find(|&&k| k == 0 || k > e.samples) {
                    return Err(invalid("ensemble.kl_samples", format!("{k} outside 1..={}", e.samples)));
                }
                projective_only("ensemble")?;
                let amps = 1u64 << (qubits + 1);
                report.amplitudes = Some(amps);
                report.memory_bytes = 16 * amps;
            }
            Kind::FloquetScan => {
                let f = self.floquet.as_ref().ok_or_else(|| invalid("floquet", "missing section"))?;
                if f.momenta < 2 {
                    return Err(invalid("floquet.momenta", "need at least 2 momenta"));
                }
                projective_only("floquet_scan")?;
                report.memory_bytes = 64 * f.momenta as u64;
            }
            Kind::DualityTable => {}
        }
        Ok(report)
    }
}

fn statevector_qubits(d: usize, path: &str) -> Result<usize, ConfigError> {
    if d < 2 {
        return Err(invalid(path, format!("distance {d} must be ≥ 2")));
    }
    if d > MAX_DISTANCE {
        return Err(ConfigError::Capacity(format!("{path} = {d} exceeds {MAX_DISTANCE}")));
    }
    Ok(CodeLayout::qubit_count(d))
}

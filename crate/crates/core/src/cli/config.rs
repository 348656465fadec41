//! Run configuration: a TOML file with dotted sections (`grid.R = 20`),
//! overridden by command-line flags. Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use super::CliError;
use crate::grid::{critical_exponent, RadialGrid};
use crate::nonlinearity::Nonlinearity;
use crate::solver::SolverConfig;
use crate::testfields::DEFAULT_SEED;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dimension: Option<usize>,
    nonlinearity: Option<String>,
    power_mass: Option<RawPowerMass>,
    grid: Option<RawGrid>,
    solver: Option<RawSolver>,
    output: Option<PathBuf>,
    format: Option<String>,
    seed: Option<u64>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPowerMass {
    p: Option<f64>,
    mu: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    #[serde(rename = "R")]
    radius: Option<f64>,
    n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    max_iterations: Option<usize>,
    tolerance: Option<f64>,
    epsilon_schedule: Option<Vec<f64>>,
    backtracking: Option<f64>,
    armijo: Option<f64>,
    amplitudes: Option<Vec<f64>>,
    preconditioner_shift: Option<f64>,
    newton_iterations: Option<usize>,
    residual_tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    items: Option<Vec<SweepItem>>,
}

/// One sweep entry. Validated only when the item runs, so that a bad entry
/// fails its own row instead of the whole sweep.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepItem {
    pub dimension: usize,
    pub nonlinearity: String,
    pub p: Option<f64>,
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelSpec {
    Log,
    PowerMass { p: f64, mu: f64 },
}

impl ModelSpec {
    pub fn label(&self) -> &'static str {
        match self {
            ModelSpec::Log => "log",
            ModelSpec::PowerMass { .. } => "power_mass",
        }
    }

    pub fn build(&self, dimension: usize) -> crate::Result<Nonlinearity> {
        match *self {
            ModelSpec::Log => Nonlinearity::logarithmic(dimension),
            ModelSpec::PowerMass { p, mu } => Nonlinearity::power_mass(dimension, p, mu),
        }
    }
}

/// `p = 4` where it is subcritical, otherwise the midpoint of `(2, 2**)`.
pub fn default_power(dimension: usize) -> f64 {
    let crit = critical_exponent(dimension);
    if 4.0 < crit {
        4.0
    } else {
        0.5 * (2.0 + crit)
    }
}

pub fn parse_model(
    name: &str,
    dimension: usize,
    p: Option<f64>,
    mu: Option<f64>,
) -> Result<ModelSpec, String> {
    match name {
        "log" => {
            if p.is_some() || mu.is_some() {
                return Err("p and mu apply only to nonlinearity = \"power_mass\"".into());
            }
            Ok(ModelSpec::Log)
        }
        "power_mass" => Ok(ModelSpec::PowerMass {
            p: p.unwrap_or_else(|| default_power(dimension)),
            mu: mu.unwrap_or(1.0),
        }),
        other => Err(format!(
            "unknown nonlinearity \"{other}\" (expected \"log\" or \"power_mass\")"
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dimension: usize,
    pub model: ModelSpec,
    pub radius: f64,
    pub nodes: usize,
    pub solver: SolverConfig,
    pub output: PathBuf,
    pub format: ReportFormat,
    pub seed: u64,
    pub sweep: Vec<SweepItem>,
}

pub const DEFAULT_OUTPUT: &str = "out";

fn default_sweep() -> Vec<SweepItem> {
    let mut items = Vec::new();
    for n in [5, 6, 8] {
        for model in ["log", "power_mass"] {
            items.push(SweepItem {
                dimension: n,
                nonlinearity: model.to_string(),
                p: None,
                mu: None,
            });
        }
    }
    items
}

impl RunConfig {
    /// Reads `path` (or uses the defaults when `None`) and applies overrides.
    pub fn load(
        path: Option<&Path>,
        out: Option<&Path>,
        seed: Option<u64>,
    ) -> Result<Self, CliError> {
        let raw = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Config(format!("cannot read config {}: {e}", p.display()))
                })?;
                toml::from_str::<RawConfig>(&text).map_err(|e| {
                    CliError::Config(format!("cannot parse config {}: {e}", p.display()))
                })?
            }
            None => RawConfig::default(),
        };
        let mut cfg = Self::from_raw(raw).map_err(CliError::Config)?;
        if let Some(o) = out {
            cfg.output = o.to_path_buf();
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw = toml::from_str::<RawConfig>(text)
            .map_err(|e| CliError::Config(format!("cannot parse config: {e}")))?;
        Self::from_raw(raw).map_err(CliError::Config)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, String> {
        let dimension = raw.dimension.unwrap_or(5);
        if dimension < 5 {
            return Err(format!(
                "dimension must be at least 5 (the critical exponent 2N/(N-4) needs N > 4), got {dimension}"
            ));
        }
        let pm = raw.power_mass.unwrap_or_default();
        let model = parse_model(
            raw.nonlinearity.as_deref().unwrap_or("log"),
            dimension,
            pm.p,
            pm.mu,
        )?;
        model.build(dimension).map_err(|e| e.to_string())?;

        let grid = raw.grid.unwrap_or_default();
        let radius = grid.radius.unwrap_or(RadialGrid::DEFAULT_RADIUS);
        let nodes = grid.n.unwrap_or(RadialGrid::DEFAULT_NODES);
        RadialGrid::new(dimension, radius, nodes).map_err(|e| e.to_string())?;

        let mut solver = SolverConfig::default();
        if let Some(s) = raw.solver {
            macro_rules! take {
                ($($f:ident),*) => { $( if let Some(v) = s.$f { solver.$f = v; } )* };
            }
            take!(
                max_iterations,
                tolerance,
                epsilon_schedule,
                backtracking,
                armijo,
                amplitudes,
                preconditioner_shift,
                newton_iterations,
                residual_tolerance
            );
        }
        solver.validate().map_err(|e| e.to_string())?;

        let format = match raw.format.as_deref().unwrap_or("json") {
            "json" => ReportFormat::Json,
            "csv" => ReportFormat::Csv,
            other => return Err(format!("unknown format \"{other}\" (expected json or csv)")),
        };
        Ok(Self {
            dimension,
            model,
            radius,
            nodes,
            solver,
            output: raw.output.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
            format,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            sweep: raw
                .sweep
                .and_then(|s| s.items)
                .unwrap_or_else(default_sweep),
        })
    }

    pub fn grid(&self) -> Result<Arc<RadialGrid>, CliError> {
        self.grid_for(self.dimension)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn grid_for(&self, dimension: usize) -> crate::Result<Arc<RadialGrid>> {
        RadialGrid::new(dimension, self.radius, self.nodes).map(Arc::new)
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity, CliError> {
        self.model
            .build(self.dimension)
            .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.dimension, 5);
        assert_eq!(c.model, ModelSpec::Log);
        assert_eq!((c.radius, c.nodes), (20.0, 2001));
        assert_eq!(c.seed, 42);
        assert_eq!(c.format, ReportFormat::Json);
        assert_eq!(c.sweep.len(), 6);
        assert_eq!(c.solver, SolverConfig::default());
    }

    #[test]
    fn dotted_keys() {
        let c = RunConfig::parse(
            "dimension = 6\nnonlinearity = \"power_mass\"\npower_mass.mu = 2.0\n\
             grid.R = 30\ngrid.n = 3001\nsolver.tolerance = 1e-9\nformat = \"csv\"\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(c.model, ModelSpec::PowerMass { p: 4.0, mu: 2.0 });
        assert_eq!((c.radius, c.nodes), (30.0, 3001));
        assert_eq!(c.solver.tolerance, 1e-9);
        assert_eq!(c.format, ReportFormat::Csv);
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn default_power_is_subcritical() {
        assert_eq!(default_power(5), 4.0);
        assert_eq!(default_power(8), 3.0);
        assert!(default_power(12) < critical_exponent(12));
    }

    #[test]
    fn rejections() {
        for text in [
            "dimension = 4",
            "grid.radius = 20",
            "nonlinearity = \"cubic\"",
            "nonlinearity = \"power_mass\"\npower_mass.p = 12",
            "solver.backtracking = 1.5",
            "grid.n = 3",
            "format = \"xml\"",
            "dimension = ",
        ] {
            assert!(
                matches!(RunConfig::parse(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn sweep_items() {
        let c = RunConfig::parse(
            "[[sweep.items]]\ndimension = 5\nnonlinearity = \"log\"\n\
             [[sweep.items]]\ndimension = 8\nnonlinearity = \"power_mass\"\np = 3.5\n",
        )
        .unwrap();
        assert_eq!(c.sweep.len(), 2);
        assert_eq!(c.sweep[1].p, Some(3.5));
    }
}

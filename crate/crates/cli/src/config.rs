//! TOML run configuration and command-line overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use xyinfo::chain::ChainSpecRaw;
use xyinfo::transfer::scan::linear_grid;
use xyinfo::{BlochVector, ChainSpec, Classification, DirectionSet, Parallelism, RestStateKind, Tolerances};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chain: Option<ChainSpecRaw>,
    pub rest: Option<RestStateKind>,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub measurement: MeasurementConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { t_min: 0.0, t_max: 10.0, points: 1001 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementConfig {
    pub directions: Option<[[f64; 3]; 3]>,
    /// Sender Bloch parameters `(x1, x2, x3)`.
    pub sender: Option<[f64; 3]>,
    pub t1: Option<f64>,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub seed: u64,
    pub expect: Option<Classification>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub det: Option<f64>,
    pub rank: Option<f64>,
    pub pst: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .message()
                .split('`')
                .nth(1)
                .filter(|_| e.message().contains("field"))
                .unwrap_or("config")
                .to_string();
            CliError::config(field, e.to_string().trim_end())
        })
    }

    pub fn chain(&self) -> CliResult<ChainSpec> {
        let raw = self.chain.clone().ok_or_else(|| CliError::config("chain", "missing [chain] section"))?;
        ChainSpec::try_from(raw).map_err(|e| CliError::from_core("chain", e))
    }

    /// Explicit `[rest]`, else thermal when the chain carries `beta`, else ground.
    pub fn rest_kind(&self, spec: &ChainSpec) -> CliResult<RestStateKind> {
        let kind = match (self.rest, spec.beta()) {
            (Some(kind), _) => kind,
            (None, Some(beta)) => RestStateKind::Thermal { beta },
            (None, None) => RestStateKind::Ground,
        };
        if let RestStateKind::Thermal { beta } = kind {
            if !(beta >= 0.0 && beta.is_finite()) {
                return Err(CliError::config("rest.beta", format!("must be finite and non-negative, got {beta}")));
            }
        }
        Ok(kind)
    }

    pub fn grid(&self) -> CliResult<Vec<f64>> {
        let t = &self.time;
        if !(t.t_min.is_finite() && t.t_max.is_finite()) {
            return Err(CliError::config("time.t_min", "time bounds must be finite"));
        }
        if !(t.t_min < t.t_max) {
            return Err(CliError::config("time.t_max", format!("t_max ({}) must exceed t_min ({})", t.t_max, t.t_min)));
        }
        if t.points < 2 {
            return Err(CliError::config("time.points", format!("need at least 2 points, got {}", t.points)));
        }
        Ok(linear_grid(t.t_min, t.t_max, t.points))
    }

    pub fn tolerances(&self) -> CliResult<Tolerances> {
        let d = Tolerances::default();
        let tol = Tolerances {
            det: self.tolerances.det.unwrap_or(d.det),
            rank: self.tolerances.rank.unwrap_or(d.rank),
            pst: self.tolerances.pst.unwrap_or(d.pst),
        };
        tol.validate().map_err(|e| CliError::from_core("tolerances", e))?;
        Ok(tol)
    }

    pub fn parallelism(&self) -> Parallelism {
        Parallelism::from_workers(self.output.workers.unwrap_or(1))
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn directions(&self) -> CliResult<DirectionSet> {
        match self.measurement.directions {
            Some(rows) => DirectionSet::new(rows).map_err(|e| CliError::from_core("measurement", e)),
            None => Ok(DirectionSet::identity()),
        }
    }

    pub fn sender(&self) -> CliResult<BlochVector> {
        let x = self.measurement.sender.ok_or_else(|| CliError::config("measurement.sender", "sender Bloch parameters are required"))?;
        BlochVector::new(x[0], x[1], x[2]).map_err(|e| CliError::from_core("measurement", e))
    }

    pub fn t1(&self) -> CliResult<f64> {
        match self.measurement.t1 {
            Some(t) if t.is_finite() => Ok(t),
            Some(t) => Err(CliError::config("measurement.t1", format!("must be finite, got {t}"))),
            None => Err(CliError::config("measurement.t1", "measurement time is required")),
        }
    }

    pub fn sigma(&self) -> CliResult<f64> {
        let s = self.measurement.sigma;
        if !(s >= 0.0 && s.is_finite()) {
            return Err(CliError::config("measurement.sigma", format!("must be finite and non-negative, got {s}")));
        }
        Ok(s)
    }
}

//! Experiment configuration: one JSON file per run, scalar fields overridable by flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use fbreg_core::{BoundaryData, Grid2, OperatorSpec};

use crate::checks::Check;

fn default_tol() -> f64 {
    1e-8
}

fn default_max_iters() -> usize {
    1_000_000
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub name: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: OperatorSpec,
    pub grid: Grid2,
    pub boundary: BoundaryData,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Bound on `|D²u|` off the positivity set, carried into reports only.
    #[serde(default)]
    pub k_bound: f64,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

/// Scalar overrides from the command line.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Overrides {
    /// Replace the grid's cells per side.
    #[arg(long)]
    pub n_cells: Option<usize>,
    /// Replace the grid's half-width.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Replace the boundary descriptor.
    #[arg(long)]
    pub boundary: Option<BoundaryData>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.apply(overrides)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) -> Result<()> {
        if o.n_cells.is_some() || o.half_width.is_some() {
            self.grid = Grid2::new(
                o.half_width.unwrap_or(self.grid.half_width()),
                o.n_cells.unwrap_or(self.grid.n_cells()),
            )?;
        }
        if let Some(b) = &o.boundary {
            self.boundary = b.clone();
        }
        if let Some(t) = o.tol {
            self.tol = t;
        }
        if let Some(m) = o.max_iters {
            self.max_iters = m;
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            bail!("tol must be positive, got {}", self.tol);
        }
        if self.k_bound.is_nan() || self.k_bound < 0.0 {
            bail!("k_bound must be non-negative, got {}", self.k_bound);
        }
        if let BoundaryData::File(p) = &self.boundary {
            if !p.is_file() {
                bail!("boundary file {} does not exist", p.display());
            }
        }
        self.parsed_checks()?;
        Ok(())
    }

    /// The check list resolved against the registry.
    pub fn parsed_checks(&self) -> Result<Vec<Check>> {
        self.checks.iter().map(Check::from_spec).collect()
    }
}

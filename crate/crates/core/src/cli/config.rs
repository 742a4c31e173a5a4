//! Run configuration: one strict JSON document per run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::discretization::{ChannelSpec, PotentialSpec, RadialGrid};
use crate::error::{GapError, Result};
use crate::solver::Side;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Sweep,
    Check,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Check => "check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Block operator with `-nu/r` coupling; `channels` lists `l` values.
    Pauli { nu: f64, channels: Vec<u32> },
    /// Radial Dirac operator with a scalar potential.
    Dirac { potential: PotentialSpec, kappas: Vec<i32> },
    #[serde(rename = "matrix-file", alias = "matrix_file")]
    MatrixFile { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r_max: f64,
    pub n: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.r_max, self.n)
    }
}

/// Declared continuum edges: `b_minus` above the gap, `b_plus` below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub b_minus: f64,
    pub b_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSpec {
    List(Vec<f64>),
    /// `steps + 1` equally spaced values from 0 to `max`.
    Range { max: f64, steps: usize },
}

impl TauSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            TauSpec::List(v) => v.clone(),
            TauSpec::Range { max, steps } => crate::continuation::tau_grid(*max, (*steps).max(1)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationConfig {
    /// Pauli only: `tau` is added to the coupling `nu`.
    Coupling,
    /// Dirac only: scalar potential on both components.
    Potential { potential: PotentialSpec },
    /// Matrix-file models only; same text format and splitting.
    #[serde(rename = "matrix-file", alias = "matrix_file")]
    MatrixFile { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredBounds {
    pub a_minus: f64,
    pub a_plus: f64,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub tau: TauSpec,
    pub perturbation: PerturbationConfig,
    /// Uniform `a+-` bounds; defaults to the profile at `tau = 0`.
    #[serde(default)]
    pub declared: Option<DeclaredBounds>,
    #[serde(default = "yes")]
    pub dense_diagnostics: bool,
}

fn both_sides() -> Vec<Side> {
    vec![Side::Plus, Side::Minus]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the subcommand when given.
    #[serde(default)]
    pub command: Option<Command>,
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub window: Option<Window>,
    /// Levels per side and channel.
    pub levels: usize,
    #[serde(default = "both_sides")]
    pub sides: Vec<Side>,
    #[serde(default)]
    pub tol: Option<f64>,
    /// Tolerance of `check`; defaults to ten times `tol`.
    #[serde(default)]
    pub check_tol: Option<f64>,
    #[serde(default)]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GapError::Config(e.to_string()))
    }

    /// Read, parse, resolve relative paths against the file's directory and
    /// validate.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| GapError::Io { path: path.to_path_buf(), source })?;
        let mut config = Self::parse(&text)
            .map_err(|e| GapError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base)?;
        config.validate()?;
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) -> Result<()> {
        match &mut self.model {
            ModelConfig::MatrixFile { path } => *path = base.join(&*path),
            ModelConfig::Dirac { potential, .. } => potential.resolve_files(base)?,
            ModelConfig::Pauli { .. } => {}
        }
        if let Some(sweep) = &mut self.sweep {
            match &mut sweep.perturbation {
                PerturbationConfig::MatrixFile { path } => *path = base.join(&*path),
                PerturbationConfig::Potential { potential } => potential.resolve_files(base)?,
                PerturbationConfig::Coupling => {}
            }
        }
        if let Some(out) = &mut self.output {
            *out = base.join(&*out);
        }
        Ok(())
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self.model, ModelConfig::MatrixFile { .. })
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(if self.is_builtin() {
            crate::solver::DEFAULT_PDE_TOL
        } else {
            crate::solver::DEFAULT_MATRIX_TOL
        })
    }

    pub fn check_tol(&self) -> f64 {
        self.check_tol.unwrap_or(10.0 * self.tol())
    }

    /// The declared edges; `+-1` for the built-in models, unbounded for
    /// matrices.
    pub fn window(&self) -> Window {
        self.window.unwrap_or(if self.is_builtin() {
            Window { b_minus: 1.0, b_plus: -1.0 }
        } else {
            Window { b_minus: f64::INFINITY, b_plus: f64::NEG_INFINITY }
        })
    }

    pub fn channels(&self) -> Result<Vec<ChannelSpec>> {
        match &self.model {
            ModelConfig::Pauli { nu, channels } => Ok(channels.iter().map(|&l| ChannelSpec::pauli(*nu, l)).collect()),
            ModelConfig::Dirac { potential, kappas } => {
                let nu = potential.coulomb_strength();
                kappas.iter().map(|&k| ChannelSpec::dirac(nu, k)).collect()
            }
            ModelConfig::MatrixFile { .. } => Ok(Vec::new()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GapError::Config(msg));
        if self.levels == 0 {
            return bad("levels must be >= 1".into());
        }
        if self.sides.is_empty() {
            return bad("sides must not be empty".into());
        }
        let mut sides = self.sides.clone();
        sides.sort();
        sides.dedup();
        if sides.len() != self.sides.len() {
            return bad("sides contains duplicates".into());
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("tol must be positive, got {t}"));
            }
        }
        if let Some(t) = self.check_tol {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("check_tol must be positive, got {t}"));
            }
        }
        let w = self.window();
        if w.b_minus.is_nan() || w.b_plus.is_nan() || w.b_plus >= w.b_minus {
            return bad(format!("window needs b_plus < b_minus, got [{}, {}]", w.b_plus, w.b_minus));
        }
        match &self.model {
            ModelConfig::Pauli { nu, channels } => {
                if !(nu.is_finite() && *nu >= 0.0) {
                    return bad(format!("pauli nu must be finite and >= 0, got {nu}"));
                }
                if channels.is_empty() {
                    return bad("pauli model needs at least one channel".into());
                }
            }
            ModelConfig::Dirac { potential, kappas } => {
                potential.validate()?;
                if kappas.is_empty() {
                    return bad("dirac model needs at least one kappa".into());
                }
                if kappas.contains(&0) {
                    return Err(GapError::InvalidQuantumNumber("kappa=0".into()));
                }
            }
            ModelConfig::MatrixFile { .. } => {
                if self.grid.is_some() {
                    return bad("grid does not apply to matrix-file models".into());
                }
            }
        }
        if self.is_builtin() {
            let Some(grid) = self.grid else {
                return bad("built-in models need a grid".into());
            };
            grid.build()?;
            if !(w.b_minus.is_finite() && w.b_plus.is_finite()) {
                return bad("window must be finite for built-in models".into());
            }
        }
        if let Some(sweep) = &self.sweep {
            let ok = matches!(
                (&self.model, &sweep.perturbation),
                (ModelConfig::Pauli { .. }, PerturbationConfig::Coupling)
                    | (ModelConfig::Dirac { .. }, PerturbationConfig::Potential { .. })
                    | (ModelConfig::MatrixFile { .. }, PerturbationConfig::MatrixFile { .. })
            );
            if !ok {
                return bad("sweep perturbation kind does not fit the model".into());
            }
            if let PerturbationConfig::Potential { potential } = &sweep.perturbation {
                potential.validate()?;
            }
            if let TauSpec::Range { max, steps } = sweep.tau {
                if !(max.is_finite() && max > 0.0) || steps == 0 {
                    return bad("tau range needs max > 0 and steps >= 1".into());
                }
            }
        }
        Ok(())
    }
}

//! Scenario files. Every physics parameter must be spelled out; only the
//! numerical controls and the optional study sections have defaults.

use std::path::{Path, PathBuf};

use cslfield::clump_states::{ClumpPair, ClumpProfile};
use cslfield::fock_oracle::OracleOptions;
use cslfield::units_modes::{build_mode_grid, ModeGrid, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    Decoherence,
    Production,
    Kernel,
    FieldExponent,
    OracleCheck,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Decoherence => "decoherence",
            Study::Production => "production",
            Study::Kernel => "kernel",
            Study::FieldExponent => "field-exponent",
            Study::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub study: Study,
    pub model: ModelSection,
    pub clumps: ClumpSection,
    pub times: TimeSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub m: f64,
    pub lambda: f64,
    pub box_length: f64,
    pub k_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClumpSection {
    pub n_particles: f64,
    pub sigma: f64,
    pub left_center: f64,
    pub right_center: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_final: f64,
    pub samples: usize,
    /// Sample multiples of the period instead of a uniform grid from 0.
    pub stroboscopic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    /// Basis ceiling for the oracle; 0 picks one from the parameters.
    pub n_max: usize,
    /// Largest oracle step.
    pub dt: f64,
    pub grow_tol: f64,
    pub band_tol: f64,
    pub tail_limit: f64,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let o = OracleOptions::new(0, 1e-2);
        NumericsSection { n_max: 0, dt: o.dt, grow_tol: o.grow_tol, band_tol: o.band_tol, tail_limit: o.tail_limit }
    }
}

/// The single oscillator used by the kernel and oracle-check studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    /// Mode momentum; the oscillator frequency is `ω(k)`.
    pub k: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// The `(X, X′)` lattice spans `[-x_extent, x_extent]`.
    pub x_extent: f64,
    pub points: usize,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection { k: 0.0, gamma1: 0.5, gamma2: 0.1, x_extent: 2.0, points: 9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: PathBuf::from("out"), formats: vec![Format::Csv] }
    }
}

/// Objects rebuilt from a config, with every library invariant checked.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub params: ModelParams,
    pub pair: ClumpPair,
    pub grid: ModeGrid,
    pub warnings: Vec<String>,
}

pub fn parse(text: &str) -> Result<ScenarioConfig, SimError> {
    toml::from_str(text).map_err(|e| SimError::Config(e.to_string().trim_end().to_string()))
}

pub fn load(path: &Path) -> Result<ScenarioConfig, SimError> {
    let text = std::fs::read_to_string(path).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

impl ScenarioConfig {
    /// Re-validate everything and build the library objects. Problems are
    /// collected rather than stopping at the first.
    pub fn build(&self) -> Result<Scenario, Vec<String>> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        let m = &self.model;
        let params = ModelParams::new(m.m, m.lambda, m.box_length, m.k_max).map_err(|e| e.to_string());
        let c = &self.clumps;
        let left = ClumpProfile::new(c.n_particles, c.sigma, c.left_center);
        let right = ClumpProfile::new(c.n_particles, c.sigma, c.right_center);
        let pair = match (left, right) {
            (Ok(l), Ok(r)) => ClumpPair::new(l, r).map_err(|e| e.to_string()),
            (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
        };
        let grid = params.as_ref().map_err(Clone::clone).and_then(|p| build_mode_grid(p).map_err(|e| e.to_string()));

        let t = &self.times;
        if !(t.t_final.is_finite() && t.t_final > 0.0) {
            errors.push(format!("invalid `t_final`: must be positive, got {}", t.t_final));
        }
        if t.samples < 2 {
            errors.push(format!("invalid `samples`: need at least 2, got {}", t.samples));
        }
        let n = &self.numerics;
        for (name, v) in
            [("dt", n.dt), ("grow_tol", n.grow_tol), ("band_tol", n.band_tol), ("tail_limit", n.tail_limit)]
        {
            if !(v.is_finite() && v > 0.0) {
                errors.push(format!("invalid `{name}`: must be positive, got {v}"));
            }
        }
        let k = &self.kernel;
        if !(k.k.is_finite() && k.k >= 0.0) {
            errors.push(format!("invalid `k`: must be non-negative, got {}", k.k));
        }
        for (name, v) in [("gamma1", k.gamma1), ("gamma2", k.gamma2)] {
            if !v.is_finite() {
                errors.push(format!("invalid `{name}`: must be finite, got {v}"));
            }
        }
        if !(k.x_extent.is_finite() && k.x_extent > 0.0) {
            errors.push(format!("invalid `x_extent`: must be positive, got {}", k.x_extent));
        }
        if k.points < 2 {
            errors.push(format!("invalid `points`: need at least 2, got {}", k.points));
        }
        if self.output.formats.is_empty() {
            errors.push("invalid `formats`: list at least one of \"csv\", \"json\"".into());
        }
        if matches!(self.study, Study::Kernel | Study::FieldExponent) && !t.stroboscopic {
            errors.push(format!(
                "study `{}` evaluates the solution at multiples of the period; set `stroboscopic = true`",
                self.study.name()
            ));
        }

        for r in [params.as_ref().err(), pair.as_ref().err(), grid.as_ref().err()].into_iter().flatten() {
            if !errors.contains(r) {
                errors.push(r.clone());
            }
        }
        if let (Ok(p), Ok(pr)) = (&params, &pair) {
            if let Some(w) = pr.left.width_warning(p.m) {
                warnings.push(format!("{w} (the model assumes width sigma >> 1/m)"));
            }
            if !p.cutoff_above_mass() {
                warnings.push(format!("k_max = {} is not above m = {}", p.k_max, p.m));
            }
        }
        match (params, pair, grid) {
            (Ok(params), Ok(pair), Ok(grid)) if errors.is_empty() => {
                Ok(Scenario { config: self.clone(), params, pair, grid, warnings })
            }
            _ => Err(errors),
        }
    }
}

//! JSON run configuration.
//!
//! A config file is either a bare potential document
//!
//! ```json
//! {"kind": "radial-sk", "dim": 3, "params": {"a": 1, "b": 2}}
//! ```
//!
//! or a run document that wraps one under `"potential"` and adds run
//! settings. Command-line flags override file values.

use std::collections::BTreeMap;
use std::path::PathBuf;

use ngp_cert_core::{GridSpec, KernelKind, PotentialModel, PotentialSpec};
use serde::Deserialize;

use crate::CliError;

/// Dimension used when a potential document omits `dim`.
pub const DEFAULT_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDoc {
    pub kind: String,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// `[[r, rho], ...]` for `custom-radial`.
    #[serde(default)]
    pub table: Option<Vec<(f64, f64)>>,
}

impl PotentialDoc {
    pub fn to_spec(&self) -> Result<PotentialSpec, CliError> {
        let kind = KernelKind::from_name(&self.kind)
            .ok_or_else(|| CliError::Config(format!("unknown kernel kind `{}`", self.kind)))?;
        let mut spec = PotentialSpec::new(kind, self.dim.unwrap_or(DEFAULT_DIM));
        spec.params = self.params.clone();
        spec.table = self.table.clone();
        spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Sweep,
    Trace,
    Reproduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Md,
    Csv,
}

impl Format {
    pub fn parse(name: &str) -> Result<Self, CliError> {
        match name.trim() {
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Md),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Config(format!("unknown format `{other}` (expected json, md or csv)"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub n_r: Option<usize>,
    pub n_dir: Option<usize>,
    pub exclusion_radius: Option<f64>,
}

impl GridOverrides {
    pub fn is_empty(&self) -> bool {
        *self == GridOverrides::default()
    }

    /// Default grid for `model` with the overrides applied.
    pub fn resolve(&self, model: &PotentialModel) -> Result<GridSpec, CliError> {
        let d = GridSpec::default_for(model);
        GridSpec::new(
            d.dim,
            self.r_min.unwrap_or(d.r_min),
            self.r_max.unwrap_or(d.r_max),
            self.n_r.unwrap_or(d.n_r),
            self.n_dir.unwrap_or(d.n_dir),
            self.exclusion_radius.unwrap_or(d.exclusion_radius),
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CRange {
    pub c_min: f64,
    pub c_max: f64,
    pub steps: usize,
}

impl CRange {
    /// `steps` evenly spaced speeds from `c_min` to `c_max` inclusive.
    pub fn grid(&self) -> Vec<f64> {
        let h = (self.c_max - self.c_min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| if i + 1 == self.steps { self.c_max } else { self.c_min + h * i as f64 }).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputDoc {
    /// Directory receiving `report.json`, `report.md` and `trace.csv`.
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunDoc {
    potential: PotentialDoc,
    command: Option<Command>,
    c: Option<f64>,
    c_range: Option<CRange>,
    axis: Option<usize>,
    #[serde(default)]
    grid: GridOverrides,
    #[serde(default)]
    output: OutputDoc,
    #[serde(default)]
    allow_hypothesis_failure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub command: Option<Command>,
    pub c: Option<f64>,
    pub c_range: Option<CRange>,
    pub axis: Option<usize>,
    pub grid: GridOverrides,
    pub output: OutputDoc,
    pub allow_hypothesis_failure: bool,
}

/// Parses a potential document or a run document.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
    let doc: RunDoc = if value.get("potential").is_some() {
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("invalid run document: {e}")))?
    } else {
        let potential: PotentialDoc = serde_json::from_value(value)
            .map_err(|e| CliError::Config(format!("invalid potential document: {e}")))?;
        RunDoc {
            potential,
            command: None,
            c: None,
            c_range: None,
            axis: None,
            grid: GridOverrides::default(),
            output: OutputDoc::default(),
            allow_hypothesis_failure: false,
        }
    };
    Ok(RunConfig {
        potential: doc.potential.to_spec()?,
        command: doc.command,
        c: doc.c,
        c_range: doc.c_range,
        axis: doc.axis,
        grid: doc.grid,
        output: doc.output,
        allow_hypothesis_failure: doc.allow_hypothesis_failure,
    })
}

impl RunConfig {
    /// Checks the fields `command` needs.
    pub fn validate_for(&self, command: Command) -> Result<(), CliError> {
        if let Some(file_cmd) = self.command {
            if file_cmd != command {
                return Err(CliError::Config(format!("config is for `{file_cmd:?}`, not `{command:?}`")));
            }
        }
        let finite_c = |c: f64| c.is_finite();
        match command {
            Command::Analyze => match self.c {
                Some(c) if finite_c(c) && c >= 0.0 => Ok(()),
                Some(c) => Err(CliError::Config(format!("c = {c} must be finite and >= 0"))),
                None => Err(CliError::Config("analyze requires c".into())),
            },
            Command::Sweep => {
                let r = self.c_range.ok_or_else(|| CliError::Config("sweep requires c_min, c_max and c_steps".into()))?;
                if !(r.c_min >= 0.0 && finite_c(r.c_max) && r.c_min <= r.c_max) {
                    return Err(CliError::Config(format!("need 0 <= c_min <= c_max, got [{}, {}]", r.c_min, r.c_max)));
                }
                if r.steps < 2 {
                    return Err(CliError::Config("c_steps must be at least 2".into()));
                }
                Ok(())
            }
            Command::Trace => {
                match self.c {
                    Some(c) if finite_c(c) && c > 0.0 => {}
                    Some(c) => return Err(CliError::Config(format!("trace requires c > 0, got {c}"))),
                    None => return Err(CliError::Config("trace requires c".into())),
                }
                match self.axis {
                    Some(j) if (2..=self.potential.dim).contains(&j) => Ok(()),
                    Some(j) => Err(CliError::Config(format!("axis {j} outside 2..={}", self.potential.dim))),
                    None => Err(CliError::Config("trace requires axis".into())),
                }
            }
            Command::Reproduce => Ok(()),
        }
    }
}

//! Run configuration: flat `key = value` lines grouped in sections.
//!
//! ```toml
//! [run]
//! example = 4
//! scheme = "1"
//!
//! [grid]
//! cells = 100
//!
//! [time]
//! t_final = 1.5
//! steady_time = 500
//!
//! [physics]
//! manning = 0.15
//!
//! [boundary]
//! left = "free, fixed:4.42"
//!
//! [output]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::examples::{ExampleRequest, Overrides};
use super::HarnessError;
use crate::mesh::BoundaryKind;
use crate::scheme::{GhostPolicy, SchemeVariant};

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub physics: PhysicsSection,
    #[serde(default)]
    pub boundary: BoundarySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub example: u8,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default = "default_true")]
    pub perturbed: bool,
    pub ghosts: Option<String>,
    pub corrections: Option<bool>,
    pub first_order: Option<bool>,
}

fn default_scheme() -> String {
    "1".into()
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub cells: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_final: Option<f64>,
    pub cfl: Option<f64>,
    pub max_steps: Option<usize>,
    pub steady_time: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub g: Option<f64>,
    pub manning: Option<f64>,
    pub r: Option<f64>,
}

/// Boundary kinds as comma-separated per-component lists; a single entry
/// applies to every component.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    pub left: Option<String>,
    pub right: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// Number of conserved components in each example.
pub fn example_dim(example: u8) -> Option<usize> {
    match example {
        1..=4 => Some(2),
        5 | 6 | 8 => Some(4),
        7 => Some(3),
        _ => None,
    }
}

fn parse_side(text: &str, dim: usize) -> Result<Vec<BoundaryKind>, HarnessError> {
    let kinds = text
        .split(',')
        .map(|s| s.trim().parse::<BoundaryKind>().map_err(|e| HarnessError::Config(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    match kinds.len() {
        1 => Ok(vec![kinds[0]; dim]),
        n if n == dim => Ok(kinds),
        n => Err(HarnessError::Config(format!("boundary lists {n} kinds for {dim} components"))),
    }
}

fn check_positive(name: &str, v: Option<f64>) -> Result<(), HarnessError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(HarnessError::Config(format!("{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Validated request plus the output directory, if any.
    pub fn to_request(&self) -> Result<(ExampleRequest, Option<PathBuf>), HarnessError> {
        let dim = example_dim(self.run.example)
            .ok_or_else(|| HarnessError::Config(format!("unknown example {} (expected 1-8)", self.run.example)))?;
        let scheme: SchemeVariant = self.run.scheme.parse().map_err(|e: crate::scheme::UnknownScheme| HarnessError::Config(e.to_string()))?;
        let ghosts = self
            .run
            .ghosts
            .as_deref()
            .map(|s| s.parse::<GhostPolicy>().map_err(HarnessError::Config))
            .transpose()?;
        if let Some(c) = self.time.cfl {
            if !(c > 0.0 && c <= 1.0) {
                return Err(HarnessError::Config(format!("cfl must lie in (0, 1], got {c}")));
            }
        }
        check_positive("t_final", self.time.t_final)?;
        check_positive("steady_time", self.time.steady_time)?;
        check_positive("gamma", self.physics.gamma)?;
        check_positive("kappa", self.physics.kappa)?;
        check_positive("g", self.physics.g)?;
        check_positive("r", self.physics.r)?;
        if let Some(n) = self.physics.manning {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(HarnessError::Config(format!("manning must be non-negative, got {n}")));
            }
        }
        if self.grid.cells == Some(0) {
            return Err(HarnessError::Config("cells must be positive".into()));
        }
        let overrides = Overrides {
            nx: self.grid.cells,
            t_final: self.time.t_final,
            cfl: self.time.cfl,
            max_steps: self.time.max_steps,
            steady_time: self.time.steady_time,
            gamma: self.physics.gamma,
            kappa: self.physics.kappa,
            g: self.physics.g,
            manning: self.physics.manning,
            r: self.physics.r,
            left: self.boundary.left.as_deref().map(|s| parse_side(s, dim)).transpose()?,
            right: self.boundary.right.as_deref().map(|s| parse_side(s, dim)).transpose()?,
            ghosts,
            corrections: self.run.corrections,
            first_order: self.run.first_order,
        };
        Ok((
            ExampleRequest {
                example: self.run.example,
                scheme,
                perturbed: self.run.perturbed,
                overrides,
            },
            self.output.dir.clone(),
        ))
    }
}

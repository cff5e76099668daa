//! Semi-discrete A-WENO scheme on global fluxes.
//!
//! Pipeline per line: ghost filling, running integrals, interface states
//! for the selected variant, accumulation of the global flux `K = F - R`,
//! central-upwind fluxes, high-order corrections, divided differences.

mod ghosts;
mod line;
mod problem;

pub use ghosts::{fill_line_ghosts, GhostPolicy};
pub use line::{
    aweno_flux, build_line, central_upwind, correction_terms, line_fluxes, InterfaceState,
    LineStates,
};
pub use problem::{Problem1D, Problem2D};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::mesh::MeshError;
use crate::systems::{Geom, RecoveryError, StateError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeVariant {
    /// Characteristic decomposition of E with the basis of `C = (∂E/∂U) M`.
    LcdEquilibrium,
    /// Component-wise interpolation of E.
    PlainEquilibrium,
    /// Characteristic interpolation of rest variables with the basis of
    /// `∂F/∂U - B`, no equilibrium recovery.
    LcdConservative,
    /// As `LcdEquilibrium` but with the basis of `∂F/∂U - B`.
    LcdEquilibriumViaA,
}

impl SchemeVariant {
    pub fn label(self) -> &'static str {
        match self {
            SchemeVariant::LcdEquilibrium => "1",
            SchemeVariant::PlainEquilibrium => "2",
            SchemeVariant::LcdConservative => "3",
            SchemeVariant::LcdEquilibriumViaA => "A",
        }
    }
}

impl fmt::Display for SchemeVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unknown scheme `{0}` (expected 1, 2, 3 or A)")]
pub struct UnknownScheme(pub String);

impl FromStr for SchemeVariant {
    type Err = UnknownScheme;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "1" | "lcd-equilibrium" => Ok(SchemeVariant::LcdEquilibrium),
            "2" | "plain-equilibrium" => Ok(SchemeVariant::PlainEquilibrium),
            "3" | "lcd-conservative" => Ok(SchemeVariant::LcdConservative),
            "A" | "a" | "lcd-equilibrium-a" => Ok(SchemeVariant::LcdEquilibriumViaA),
            other => Err(UnknownScheme(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeOptions {
    pub variant: SchemeVariant,
    /// Apply the fourth- and sixth-order correction terms.
    pub corrections: bool,
    /// Piecewise-constant interface values; with `corrections = false`
    /// this is the first-order central-upwind scheme.
    pub first_order: bool,
    /// Multiplier on the `Û⁺ - Û⁻` diffusion term.
    pub diffusion_scale: f64,
}

impl SchemeOptions {
    pub fn new(variant: SchemeVariant) -> Self {
        SchemeOptions {
            variant,
            corrections: true,
            first_order: false,
            diffusion_scale: 1.0,
        }
    }

    pub fn first_order(variant: SchemeVariant) -> Self {
        SchemeOptions {
            variant,
            corrections: false,
            first_order: true,
            diffusion_scale: 1.0,
        }
    }
}

/// Counters for local fallbacks taken during a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Cells interpolated component-wise because the basis matrix had complex eigenvalues.
    pub hyperbolicity_fallbacks: u64,
    /// Cells interpolated component-wise because the decomposition failed.
    pub basis_failures: u64,
    /// Recoveries that returned the nearest admissible state.
    pub recovery_fallbacks: u64,
    /// Interface or quarter-point states replaced by the cell value.
    pub state_fallbacks: u64,
}

impl Diagnostics {
    pub fn merge(&mut self, other: &Diagnostics) {
        self.hyperbolicity_fallbacks += other.hyperbolicity_fallbacks;
        self.basis_failures += other.basis_failures;
        self.recovery_fallbacks += other.recovery_fallbacks;
        self.state_fallbacks += other.state_fallbacks;
    }

    pub fn total(&self) -> u64 {
        self.hyperbolicity_fallbacks + self.basis_failures + self.recovery_fallbacks + self.state_fallbacks
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("{stage}: invalid state at index {index}: {source}")]
    State {
        stage: &'static str,
        index: usize,
        source: StateError,
    },
    #[error("{stage}: recovery failed at index {index}: {source}")]
    Recovery {
        stage: &'static str,
        index: usize,
        source: RecoveryError,
    },
    #[error("{stage}: non-finite value at index {index}")]
    NonFinite { stage: &'static str, index: usize },
    #[error("ghost filling: {0}")]
    Mesh(#[from] MeshError),
    #[error("{0}")]
    Setup(String),
}

/// Geometry along one storage-indexed line. `faces`, when present, holds
/// exact face values (face `k` is the left face of cell `k`); otherwise
/// face values are interpolated from the cell values.
#[derive(Clone, Debug, PartialEq)]
pub struct LineGeometry {
    pub cells: Vec<Geom>,
    pub faces: Option<Vec<f64>>,
}

impl LineGeometry {
    pub fn constant(value: f64, len: usize) -> Self {
        LineGeometry {
            cells: vec![Geom::flat(value); len],
            faces: None,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

//! Example reproduction, steady-state builders, metrics, CSV output and
//! convergence studies.

pub mod config;
pub mod convergence;
pub mod examples;
pub mod metrics;
pub mod output;
pub mod steady;

use std::time::Instant;

use thiserror::Error;

use crate::mesh::GHOST_WIDTH;
use crate::scheme::{Diagnostics, Problem1D, Problem2D, SchemeError};
use crate::time::{compute_dt_1d, compute_dt_2d, integrate, RunSummary, TimeControls, TimeError};
use crate::vars::Vars;

pub use examples::{build_example, run_example, ExampleRequest, Overrides};
pub use metrics::{oscillation_count, MetricsReport};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{context}: {source}")]
    Scheme {
        context: String,
        source: SchemeError,
    },
    #[error("time integration: {0}")]
    Time(#[from] TimeError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("steady state builder: {0}")]
    Builder(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<SchemeError> for HarnessError {
    fn from(source: SchemeError) -> Self {
        HarnessError::Scheme {
            context: "scheme".into(),
            source,
        }
    }
}

impl HarnessError {
    pub fn with_context(self, context: impl Into<String>) -> Self {
        match self {
            HarnessError::Scheme { context: inner, source } => HarnessError::Scheme {
                context: format!("{}: {inner}", context.into()),
                source,
            },
            other => other,
        }
    }
}

pub enum Solver {
    OneD(Problem1D),
    TwoD(Problem2D),
}

impl Solver {
    pub fn rhs(&self, u: &[Vars], diag: &mut Diagnostics) -> Result<Vec<Vars>, SchemeError> {
        match self {
            Solver::OneD(p) => p.rhs(u, diag),
            Solver::TwoD(p) => p.rhs(u, diag),
        }
    }

    pub fn time_step(&self, u: &[Vars], controls: &TimeControls) -> Result<f64, SchemeError> {
        match self {
            Solver::OneD(p) => Ok(compute_dt_1d(p.max_speed(u)?, p.grid.dx, controls)),
            Solver::TwoD(p) => Ok(compute_dt_2d(p.max_speeds(u)?, p.grid.x.dx, p.grid.y.dx, controls)),
        }
    }

    pub fn model_dim(&self) -> usize {
        match self {
            Solver::OneD(p) => p.model.dim(),
            Solver::TwoD(p) => p.model.dim(),
        }
    }

    pub fn conserved_names(&self) -> &'static [&'static str] {
        match self {
            Solver::OneD(p) => p.model.conserved_names(),
            Solver::TwoD(p) => p.model.conserved_names(),
        }
    }

    pub fn equilibrium_names(&self) -> &'static [&'static str] {
        match self {
            Solver::OneD(p) => p.model.equilibrium_names(),
            Solver::TwoD(p) => p.model.equilibrium_names(),
        }
    }

    /// Cell-center coordinates; `y` is `None` in one dimension.
    pub fn coordinates(&self) -> (Vec<f64>, Option<Vec<f64>>) {
        let g = GHOST_WIDTH;
        match self {
            Solver::OneD(p) => ((0..p.grid.n_cells).map(|j| p.grid.center(j + g)).collect(), None),
            Solver::TwoD(p) => {
                let (nx, ny) = (p.nx(), p.ny());
                let mut xs = Vec::with_capacity(nx * ny);
                let mut ys = Vec::with_capacity(nx * ny);
                for k in 0..ny {
                    for j in 0..nx {
                        xs.push(p.grid.x.center(j + g));
                        ys.push(p.grid.y.center(k + g));
                    }
                }
                (xs, Some(ys))
            }
        }
    }

    /// Cell widths `(dx, dy)`, with `dy = 1` in one dimension.
    pub fn spacing(&self) -> (f64, f64) {
        match self {
            Solver::OneD(p) => (p.grid.dx, 1.0),
            Solver::TwoD(p) => (p.grid.x.dx, p.grid.y.dx),
        }
    }

    /// Grid shape `(nx, ny)`, with `ny = 1` in one dimension.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Solver::OneD(p) => (p.grid.n_cells, 1),
            Solver::TwoD(p) => (p.nx(), p.ny()),
        }
    }
}

/// A configured run: solver, current state, optional reference steady state.
pub struct Run {
    pub name: String,
    pub solver: Solver,
    pub state: Vec<Vars>,
    pub steady: Option<Vec<Vars>>,
    pub controls: TimeControls,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub runtime_seconds: f64,
}

impl Run {
    /// Integrates the current state over `[0, controls.t_final]`.
    pub fn advance(&mut self) -> Result<RunOutcome, HarnessError> {
        let start = Instant::now();
        let solver = &self.solver;
        let controls = self.controls;
        let mut diag = Diagnostics::default();
        let result = integrate(
            &mut self.state,
            &controls,
            |u| solver.time_step(u, &controls).map_err(HarnessError::from),
            |u| solver.rhs(u, &mut diag).map_err(HarnessError::from),
        );
        self.diagnostics.merge(&diag);
        let summary = result.map_err(|e| e.with_context(self.name.clone()))?;
        Ok(RunOutcome {
            summary,
            runtime_seconds: start.elapsed().as_secs_f64(),
        })
    }

    /// Equilibrium variables of the current state (one-dimensional runs).
    pub fn equilibrium_field(&self) -> Result<Option<Vec<Vars>>, HarnessError> {
        match &self.solver {
            Solver::OneD(p) => {
                let mut diag = Diagnostics::default();
                Ok(Some(p.equilibrium_field(&self.state, &mut diag)?))
            }
            Solver::TwoD(_) => Ok(None),
        }
    }

    /// `state - steady`, or the state itself without a steady state.
    pub fn difference(&self) -> Vec<Vars> {
        match &self.steady {
            Some(s) => self.state.iter().zip(s).map(|(u, e)| *u - *e).collect(),
            None => self.state.clone(),
        }
    }

    pub fn metrics(&self, outcome: &RunOutcome) -> MetricsReport {
        let (nx, ny) = self.solver.shape();
        let (dx, dy) = self.solver.spacing();
        MetricsReport::new(
            &self.difference(),
            self.solver.conserved_names(),
            (nx, ny),
            dx * dy,
            outcome,
            &self.diagnostics,
        )
    }
}

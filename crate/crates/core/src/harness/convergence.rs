//! Grid-refinement studies on smooth periodic problems.
//!
//! Meshes are refined by an odd factor so that coarse cell centers coincide
//! with fine ones. Orders come from differences between successive meshes;
//! the advection preset also reports errors against its exact solution.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use super::output::number;
use super::{HarnessError, Run, Solver};
use crate::mesh::{BoundaryCondition, BoundaryKind, Grid1D, GHOST_WIDTH};
use crate::scheme::{LineGeometry, Problem1D, SchemeOptions, SchemeVariant};
use crate::systems::{Geom, LinearAdvection, ShallowWater};
use crate::time::{StepRule, TimeControls};
use crate::vars::Vars;

/// Time steps scale like `dx^(5/3)` so that third-order time errors stay
/// below fifth-order space errors.
pub const STEP_EXPONENT: f64 = 5.0 / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceModel {
    /// `sin(2 pi x)` advected once around half of the unit period.
    Advection,
    /// Frictionless shallow water over a smooth periodic bottom.
    ShallowWater,
}

impl FromStr for ConvergenceModel {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "advection" => Ok(ConvergenceModel::Advection),
            "sw" | "shallow-water" | "shallow_water" => Ok(ConvergenceModel::ShallowWater),
            other => Err(HarnessError::Config(format!(
                "unknown convergence model '{other}' (expected advection or sw)"
            ))),
        }
    }
}

impl ConvergenceModel {
    pub fn default_final_time(self) -> f64 {
        match self {
            ConvergenceModel::Advection => 0.5,
            ConvergenceModel::ShallowWater => 0.1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ConvergenceModel::Advection => "advection",
            ConvergenceModel::ShallowWater => "sw",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRequest {
    pub model: ConvergenceModel,
    pub variant: SchemeVariant,
    pub meshes: Vec<usize>,
    pub first_order: bool,
    pub t_final: f64,
    pub cfl: f64,
}

impl ConvergenceRequest {
    pub fn new(model: ConvergenceModel, meshes: Vec<usize>) -> Self {
        ConvergenceRequest {
            model,
            variant: SchemeVariant::LcdEquilibrium,
            meshes,
            first_order: false,
            t_final: model.default_final_time(),
            cfl: 0.5,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if self.meshes.len() < 2 {
            return Err(HarnessError::Config("a convergence study needs at least two meshes".into()));
        }
        for w in self.meshes.windows(2) {
            if w[0] == 0 || w[1] != 3 * w[0] {
                return Err(HarnessError::Config(format!(
                    "meshes must grow by a factor of 3, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    /// Max-norm difference to the next finer mesh at shared centers.
    pub difference: Option<f64>,
    pub order: Option<f64>,
    /// Max-norm error against the exact solution, when one is known.
    pub exact_error: Option<f64>,
    pub exact_order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub model: ConvergenceModel,
    pub variant: SchemeVariant,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(number).unwrap_or_default();
        let mut out = String::from("model,scheme,cells,difference,order,exact_error,exact_order\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.model.name(),
                self.variant.label(),
                r.cells,
                opt(r.difference),
                opt(r.order),
                opt(r.exact_error),
                opt(r.exact_order)
            );
        }
        out
    }

    /// Smallest observed order from successive differences.
    pub fn min_order(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.order).reduce(f64::min)
    }

    pub fn min_exact_order(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.exact_order).reduce(f64::min)
    }
}

fn advection_profile(x: f64) -> f64 {
    (2.0 * PI * x).sin()
}

fn bottom(x: f64) -> Geom {
    Geom::new(0.02 * (2.0 * PI * x).sin(), 0.04 * PI * (2.0 * PI * x).cos())
}

fn sw_state(x: f64) -> Vars {
    let h = 1.0 - bottom(x).value + 0.05 * (2.0 * PI * x).cos();
    Vars::from_slice(&[h, 0.5 + 0.02 * (2.0 * PI * x).sin()])
}

/// Configured run of a convergence preset on `cells` cells of `[0, 1]`.
pub fn build_convergence_run(req: &ConvergenceRequest, cells: usize) -> Result<Run, HarnessError> {
    let grid = Grid1D::new(0.0, 1.0, cells).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut options = if req.first_order {
        SchemeOptions::first_order(req.variant)
    } else {
        SchemeOptions::new(req.variant)
    };
    options.corrections = !req.first_order;
    let xs: Vec<f64> = (0..cells).map(|j| grid.center(j + GHOST_WIDTH)).collect();
    let (problem, state) = match req.model {
        ConvergenceModel::Advection => {
            let geometry = LineGeometry::constant(0.0, grid.len_with_ghosts());
            let bc = BoundaryCondition::uniform(BoundaryKind::Periodic, 1);
            let state = xs.iter().map(|x| Vars::from_slice(&[advection_profile(*x)])).collect();
            let p = Problem1D::new(Box::new(LinearAdvection::default()), grid, geometry, bc, options)?;
            (p, state)
        }
        ConvergenceModel::ShallowWater => {
            let geometry = LineGeometry {
                cells: grid.centers().into_iter().map(bottom).collect(),
                faces: None,
            };
            let bc = BoundaryCondition::uniform(BoundaryKind::Periodic, 2);
            let state = xs.iter().map(|x| sw_state(*x)).collect();
            let p = Problem1D::new(Box::new(ShallowWater::new(9.812, 0.0)), grid, geometry, bc, options)?;
            (p, state)
        }
    };
    let mut controls = TimeControls::new(req.t_final);
    controls.cfl = req.cfl;
    if !req.first_order {
        controls.rule = StepRule::Scaled {
            exponent: STEP_EXPONENT,
        };
    }
    Ok(Run {
        name: format!("{}-scheme{}-n{cells}", req.model.name(), req.variant.label()),
        solver: Solver::OneD(problem),
        state,
        steady: None,
        controls,
        diagnostics: Default::default(),
    })
}

fn exact_solution(req: &ConvergenceRequest, cells: usize) -> Option<Vec<f64>> {
    match req.model {
        ConvergenceModel::Advection => {
            let dx = 1.0 / cells as f64;
            Some(
                (0..cells)
                    .map(|j| advection_profile((j as f64 + 0.5) * dx - req.t_final))
                    .collect(),
            )
        }
        ConvergenceModel::ShallowWater => None,
    }
}

fn max_difference(coarse: &[Vars], fine: &[Vars]) -> f64 {
    coarse
        .iter()
        .enumerate()
        .map(|(j, u)| (*u - fine[3 * j + 1]).max_abs())
        .fold(0.0, f64::max)
}

fn rate(a: f64, b: f64) -> f64 {
    (a / b).ln() / 3f64.ln()
}

pub fn run_convergence(req: &ConvergenceRequest) -> Result<ConvergenceTable, HarnessError> {
    req.validate()?;
    let mut solutions = Vec::with_capacity(req.meshes.len());
    for &n in &req.meshes {
        let mut run = build_convergence_run(req, n)?;
        run.advance()?;
        solutions.push(run.state);
    }
    let differences: Vec<f64> = solutions
        .windows(2)
        .map(|w| max_difference(&w[0], &w[1]))
        .collect();
    let exact: Vec<Option<f64>> = req
        .meshes
        .iter()
        .zip(&solutions)
        .map(|(&n, u)| {
            exact_solution(req, n).map(|e| u.iter().zip(e).map(|(v, w)| (v[0] - w).abs()).fold(0.0, f64::max))
        })
        .collect();
    let rows = req
        .meshes
        .iter()
        .enumerate()
        .map(|(i, &cells)| {
            let difference = differences.get(i).copied();
            let next = differences.get(i + 1).copied();
            let exact_error = exact[i];
            let exact_next = exact.get(i + 1).copied().flatten();
            ConvergenceRow {
                cells,
                difference,
                order: difference.zip(next).map(|(a, b)| rate(a, b)),
                exact_error,
                exact_order: exact_error.zip(exact_next).map(|(a, b)| rate(a, b)),
            }
        })
        .collect();
    Ok(ConvergenceTable {
        model: req.model,
        variant: req.variant,
        rows,
    })
}

//! Presets for Examples 1-8.

use super::steady::{hydrostatic_field_2d, interior_2d, nozzle_steady, two_layer_steady};
use super::{HarnessError, MetricsReport, Run, RunOutcome, Solver};
use crate::mesh::{BoundaryCondition, BoundaryKind, Grid1D, Grid2D, GHOST_WIDTH};
use crate::scheme::{GhostPolicy, LineGeometry, Problem1D, Problem2D, SchemeOptions, SchemeVariant};
use crate::systems::{BalanceLaw, Euler1D, EulerSweep2D, Geom, Nozzle, ShallowWater, TwoLayer};
use crate::time::TimeControls;
use crate::vars::Vars;

pub const EXAMPLE_IDS: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

/// Optional replacements for preset parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    /// Cells per direction.
    pub nx: Option<usize>,
    pub t_final: Option<f64>,
    pub cfl: Option<f64>,
    pub max_steps: Option<usize>,
    /// Length of the relaxation phase in Example 4.
    pub steady_time: Option<f64>,
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub g: Option<f64>,
    pub manning: Option<f64>,
    pub r: Option<f64>,
    pub left: Option<Vec<BoundaryKind>>,
    pub right: Option<Vec<BoundaryKind>>,
    pub ghosts: Option<GhostPolicy>,
    pub corrections: Option<bool>,
    pub first_order: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExampleRequest {
    pub example: u8,
    pub scheme: SchemeVariant,
    /// Add the preset perturbation. Without it Examples 1, 2, 5 and 8 start
    /// from their steady states and Example 4 runs only its relaxation phase.
    pub perturbed: bool,
    pub overrides: Overrides,
}

impl ExampleRequest {
    pub fn new(example: u8, scheme: SchemeVariant) -> Self {
        ExampleRequest {
            example,
            scheme,
            perturbed: true,
            overrides: Overrides::default(),
        }
    }

    pub fn unperturbed(mut self) -> Self {
        self.perturbed = false;
        self
    }

    pub fn with_cells(mut self, n: usize) -> Self {
        self.overrides.nx = Some(n);
        self
    }

    pub fn with_final_time(mut self, t: f64) -> Self {
        self.overrides.t_final = Some(t);
        self
    }

    fn options(&self) -> SchemeOptions {
        let mut o = SchemeOptions::new(self.scheme);
        if let Some(c) = self.overrides.corrections {
            o.corrections = c;
        }
        if let Some(f) = self.overrides.first_order {
            o.first_order = f;
        }
        o
    }

    fn controls(&self, t_final: f64) -> TimeControls {
        let mut c = TimeControls::new(self.overrides.t_final.unwrap_or(t_final));
        if let Some(cfl) = self.overrides.cfl {
            c.cfl = cfl;
        }
        if let Some(m) = self.overrides.max_steps {
            c.max_steps = m;
        }
        c
    }

    fn bc(&self, left: Vec<BoundaryKind>, right: Vec<BoundaryKind>, odd: Vec<bool>) -> BoundaryCondition {
        BoundaryCondition {
            left: self.overrides.left.clone().unwrap_or(left),
            right: self.overrides.right.clone().unwrap_or(right),
            odd,
        }
    }

    fn name(&self) -> String {
        format!("example{}-scheme{}", self.example, self.scheme.label())
    }
}

/// Result of a completed example run.
pub struct ExampleResult {
    pub run: Run,
    pub outcome: RunOutcome,
    pub metrics: MetricsReport,
    pub equilibrium: Option<Vec<Vars>>,
}

fn in_range(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn interior_centers(grid: &Grid1D) -> Vec<f64> {
    (0..grid.n_cells).map(|j| grid.center(j + GHOST_WIDTH)).collect()
}

fn line_geometry(grid: &Grid1D, geom: impl Fn(f64) -> Geom) -> LineGeometry {
    LineGeometry {
        cells: grid.centers().into_iter().map(geom).collect(),
        faces: None,
    }
}

fn problem_1d(
    req: &ExampleRequest,
    model: Box<dyn BalanceLaw>,
    grid: Grid1D,
    geometry: LineGeometry,
    bc: BoundaryCondition,
    ghosts: GhostPolicy,
) -> Result<Problem1D, HarnessError> {
    let p = Problem1D::new(model, grid, geometry, bc, req.options())
        .map_err(|e| HarnessError::from(e).with_context(req.name()))?;
    Ok(p.with_ghosts(req.overrides.ghosts.unwrap_or(ghosts), None))
}

fn free(dim: usize) -> Vec<BoundaryKind> {
    vec![BoundaryKind::Free; dim]
}

fn grid_1d(req: &ExampleRequest, lo: f64, hi: f64, n: usize) -> Result<Grid1D, HarnessError> {
    Grid1D::new(lo, hi, req.overrides.nx.unwrap_or(n)).map_err(|e| HarnessError::Config(e.to_string()))
}

fn nozzle_example(req: &ExampleRequest, sign: f64, energy: f64, bump: f64, t_final: f64) -> Result<Run, HarnessError> {
    let model = Nozzle::new(req.overrides.gamma.unwrap_or(1.4), req.overrides.kappa.unwrap_or(1.0));
    let grid = grid_1d(req, 0.0, 10.0, 200)?;
    let sigma = move |x: f64| 0.976 + sign * 0.748 * (0.8 * x - 4.0).tanh();
    let slope = move |x: f64| sign * 0.748 * 0.8 / (0.8 * x - 4.0).cosh().powi(2);
    let geometry = line_geometry(&grid, |x| Geom::new(sigma(x), slope(x)));
    let xs = interior_centers(&grid);
    let sig: Vec<f64> = xs.iter().map(|x| sigma(*x)).collect();
    let discharge = 8.0;
    let steady = nozzle_steady(&model, &sig, discharge, energy, true)?;
    let state = steady
        .iter()
        .zip(&xs)
        .zip(&sig)
        .map(|((u, x), s)| {
            if req.perturbed && in_range(*x, 0.5, 1.5) {
                let rho_eq = u[0] / s;
                let rho = rho_eq + bump;
                Vars::from_slice(&[s * rho, discharge * rho / rho_eq])
            } else {
                *u
            }
        })
        .collect();
    let bc = req.bc(free(2), free(2), model.odd_components());
    let problem = problem_1d(req, Box::new(model), grid, geometry, bc, GhostPolicy::Equilibrium)?;
    Ok(Run {
        name: req.name(),
        solver: Solver::OneD(problem),
        state,
        steady: Some(steady),
        controls: req.controls(t_final),
        diagnostics: Default::default(),
    })
}

fn example3(req: &ExampleRequest) -> Result<Run, HarnessError> {
    let model = ShallowWater::new(req.overrides.g.unwrap_or(9.812), req.overrides.manning.unwrap_or(0.4));
    let grid = grid_1d(req, -0.1, 0.3, 100)?;
    let geometry = line_geometry(&grid, |x| Geom::flat(if x < 0.0 { 1.0 } else { 1.9 }));
    let state = interior_centers(&grid)
        .into_iter()
        .map(|x| {
            if x < 0.0 {
                Vars::from_slice(&[1.0, 2.0])
            } else {
                Vars::from_slice(&[0.8, 0.8 * 4.0])
            }
        })
        .collect();
    let bc = req.bc(free(2), free(2), model.odd_components());
    let problem = problem_1d(req, Box::new(model), grid, geometry, bc, GhostPolicy::Conservative)?;
    Ok(Run {
        name: req.name(),
        solver: Solver::OneD(problem),
        state,
        steady: None,
        controls: req.controls(0.03),
        diagnostics: Default::default(),
    })
}

fn example4(req: &ExampleRequest) -> Result<Run, HarnessError> {
    let make = || -> Result<(Problem1D, Vec<f64>), HarnessError> {
        let model = ShallowWater::new(req.overrides.g.unwrap_or(9.812), req.overrides.manning.unwrap_or(0.15));
        let grid = grid_1d(req, 0.0, 25.0, 100)?;
        let bottom = |x: f64| if in_range(x, 8.0, 12.0) { 0.2 } else { 0.0 };
        let geometry = line_geometry(&grid, |x| Geom::flat(bottom(x)));
        let xs = interior_centers(&grid);
        let bc = req.bc(
            vec![BoundaryKind::Free, BoundaryKind::FixedValue(4.42)],
            vec![BoundaryKind::FixedValue(2.0), BoundaryKind::Free],
            model.odd_components(),
        );
        let zs = xs.iter().map(|x| bottom(*x)).collect();
        Ok((problem_1d(req, Box::new(model), grid, geometry, bc, GhostPolicy::Equilibrium)?, zs))
    };
    let (problem, zs) = make()?;
    let rest: Vec<Vars> = zs.iter().map(|z: &f64| Vars::from_slice(&[2.0 - z, 0.0])).collect();
    let mut relax = TimeControls::new(req.overrides.steady_time.unwrap_or(500.0));
    relax.cfl = req.overrides.cfl.unwrap_or(relax.cfl);
    if let Some(m) = req.overrides.max_steps {
        relax.max_steps = m;
    }
    let mut run = Run {
        name: format!("{}-relaxation", req.name()),
        solver: Solver::OneD(problem),
        state: rest,
        steady: None,
        controls: relax,
        diagnostics: Default::default(),
    };
    if !req.perturbed {
        return Ok(run);
    }
    run.advance()?;
    let steady = run.state.clone();
    let xs = match &run.solver {
        Solver::OneD(p) => interior_centers(&p.grid),
        Solver::TwoD(_) => unreachable!("example 4 is one-dimensional"),
    };
    run.state = steady
        .iter()
        .zip(&xs)
        .map(|(u, x)| {
            let mut v = *u;
            if in_range(*x, 9.5, 10.5) {
                v[0] += 1e-4;
            }
            v
        })
        .collect();
    run.steady = Some(steady);
    run.name = req.name();
    run.controls = req.controls(1.5);
    Ok(run)
}

const EXAMPLE5_LEFT: [f64; 4] = [1.22373355048230, 12.0, 0.968329515483846, 10.0];
const EXAMPLE5_RIGHT: [f64; 4] = [1.44970064153589, 12.0, 1.12439026921484, 10.0];

fn two_layer_model(req: &ExampleRequest) -> TwoLayer {
    TwoLayer::new(req.overrides.g.unwrap_or(10.0), req.overrides.r.unwrap_or(0.98))
}

fn example5(req: &ExampleRequest) -> Result<Run, HarnessError> {
    let model = two_layer_model(req);
    let grid = grid_1d(req, -1.0, 1.0, 200)?;
    let bottom = |x: f64| if x < 0.0 { -2.0 } else { -1.0 };
    let geometry = line_geometry(&grid, |x| Geom::flat(bottom(x)));
    let xs = interior_centers(&grid);
    let zs: Vec<f64> = xs.iter().map(|x| bottom(*x)).collect();
    let steady = two_layer_steady(
        &model,
        &zs,
        Vars::from_slice(&EXAMPLE5_LEFT),
        -2.0,
        Vars::from_slice(&EXAMPLE5_RIGHT),
    )?;
    let state = steady
        .iter()
        .zip(&xs)
        .map(|(u, x)| {
            let mut v = *u;
            if req.perturbed && in_range(*x, -0.9, -0.8) {
                v[0] += 0.12;
            }
            v
        })
        .collect();
    let bc = req.bc(free(4), free(4), model.odd_components());
    let problem = problem_1d(req, Box::new(model), grid, geometry, bc, GhostPolicy::Equilibrium)?;
    Ok(Run {
        name: req.name(),
        solver: Solver::OneD(problem),
        state,
        steady: Some(steady),
        controls: req.controls(0.08),
        diagnostics: Default::default(),
    })
}

fn example6(req: &ExampleRequest) -> Result<Run, HarnessError> {
    let model = two_layer_model(req);
    let grid = grid_1d(req, -1.0, 1.0, 100)?;
    let geometry = line_geometry(&grid, |x| Geom::flat(if x < 0.0 { -2.0 } else { -1.5 }));
    let state = interior_centers(&grid)
        .into_iter()
        .map(|x| {
            if x < 0.0 {
                Vars::from_slice(&[1.0, 1.5, 1.0, 1.0])
            } else {
                Vars::from_slice(&[0.8, 1.2, 1.2, 1.8])
            }
        })
        .collect();
    let bc = req.bc(free(4), free(4), model.odd_components());
    let problem = problem_1d(req, Box::new(model), grid, geometry, bc, GhostPolicy::Conservative)?;
    Ok(Run {
        name: req.name(),
        solver: Solver::OneD(problem),
        state,
        steady: None,
        controls: req.controls(0.1),
        diagnostics: Default::default(),
    })
}

fn example7(req: &ExampleRequest) -> Result<Run, HarnessError> {
    let model = Euler1D::new(req.overrides.gamma.unwrap_or(1.4));
    let grid = grid_1d(req, 0.0, 1.0, 50)?;
    let geometry = LineGeometry {
        cells: grid.centers().into_iter().map(|x| Geom::new(x, 1.0)).collect(),
        faces: Some(grid.faces()),
    };
    let state = interior_centers(&grid)
        .into_iter()
        .map(|x| {
            let g = Geom::new(x, 1.0);
            if x <= 0.5 {
                model.conserved(1.0, 0.0, 1.0, &g)
            } else {
                model.conserved(0.125, 0.0, 0.1, &g)
            }
        })
        .collect();
    let reflect = vec![BoundaryKind::Reflecting; 3];
    let bc = req.bc(reflect.clone(), reflect, model.odd_components());
    let problem = problem_1d(req, Box::new(model), grid, geometry, bc, GhostPolicy::Conservative)?;
    Ok(Run {
        name: req.name(),
        solver: Solver::OneD(problem),
        state,
        steady: None,
        controls: req.controls(0.2),
        diagnostics: Default::default(),
    })
}

/// Isothermal rate of the hydrostatic state in Example 8.
pub const EXAMPLE8_RATE: f64 = 1.21;

fn example8(req: &ExampleRequest) -> Result<Run, HarnessError> {
    let model = EulerSweep2D::new(req.overrides.gamma.unwrap_or(1.4));
    let n = req.overrides.nx.unwrap_or(80);
    let axis = Grid1D::new(0.0, 1.0, n).map_err(|e| HarnessError::Config(e.to_string()))?;
    let grid = Grid2D::new(axis.clone(), axis.clone());
    let phi = |x: f64, y: f64| x + y;
    let rows = (0..n)
        .map(|k| {
            let y = axis.center(k + GHOST_WIDTH);
            LineGeometry {
                cells: axis.centers().into_iter().map(|x| Geom::new(phi(x, y), 1.0)).collect(),
                faces: Some(axis.faces().into_iter().map(|x| phi(x, y)).collect()),
            }
        })
        .collect();
    let cols = (0..n)
        .map(|j| {
            let x = axis.center(j + GHOST_WIDTH);
            LineGeometry {
                cells: axis.centers().into_iter().map(|y| Geom::new(phi(x, y), 1.0)).collect(),
                faces: Some(axis.faces().into_iter().map(|y| phi(x, y)).collect()),
            }
        })
        .collect();
    let background = hydrostatic_field_2d(&model, &grid, EXAMPLE8_RATE)?;
    let steady = interior_2d(&background, &grid);
    let mut state = steady.clone();
    if req.perturbed {
        for k in 0..n {
            for j in 0..n {
                let (x, y) = (axis.center(j + GHOST_WIDTH), axis.center(k + GHOST_WIDTH));
                if x * x + y * y <= 0.15 * 0.15 {
                    // Raising p at fixed density and velocity adds dp/(γ-1) to the energy.
                    state[j + n * k][3] += 0.5 / (model.gamma - 1.0);
                }
            }
        }
    }
    let odd = model.odd_components();
    let bc_x = req.bc(free(4), free(4), odd.clone());
    let bc_y = BoundaryCondition {
        left: free(4),
        right: free(4),
        odd,
    };
    let problem = Problem2D::new(Box::new(model), grid, rows, cols, bc_x, bc_y, (1, 2), req.options())
        .map_err(|e| HarnessError::from(e).with_context(req.name()))?
        .with_ghosts(req.overrides.ghosts.unwrap_or(GhostPolicy::Background), Some(&background));
    Ok(Run {
        name: req.name(),
        solver: Solver::TwoD(problem),
        state,
        steady: Some(steady),
        controls: req.controls(0.12),
        diagnostics: Default::default(),
    })
}

/// Configures an example; Example 4 with a perturbation first runs its
/// relaxation phase to obtain the scheme's own steady state.
pub fn build_example(req: &ExampleRequest) -> Result<Run, HarnessError> {
    match req.example {
        1 => nozzle_example(req, 1.0, 21.9230562619897, 1e-2, 0.8),
        2 => nozzle_example(req, -1.0, 58.3367745090349, 0.3, 0.5),
        3 => example3(req),
        4 => example4(req),
        5 => example5(req),
        6 => example6(req),
        7 => example7(req),
        8 => example8(req),
        other => Err(HarnessError::Config(format!("unknown example {other} (expected 1-8)"))),
    }
}

pub fn run_example(req: &ExampleRequest) -> Result<ExampleResult, HarnessError> {
    let mut run = build_example(req)?;
    let outcome = run.advance()?;
    let metrics = run.metrics(&outcome);
    let equilibrium = run.equilibrium_field()?;
    Ok(ExampleResult {
        run,
        outcome,
        metrics,
        equilibrium,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_builds_with_small_grids() {
        for id in EXAMPLE_IDS {
            let mut req = ExampleRequest::new(id, SchemeVariant::LcdEquilibrium).with_cells(24);
            req.overrides.steady_time = Some(0.01);
            let run = build_example(&req).unwrap();
            assert!(run.state.iter().all(|u| u.is_finite()), "example {id}");
        }
        assert!(build_example(&ExampleRequest::new(9, SchemeVariant::LcdEquilibrium)).is_err());
    }

    #[test]
    fn example_steady_states_match_printed_constants() {
        let run = build_example(&ExampleRequest::new(1, SchemeVariant::LcdEquilibrium).unperturbed()).unwrap();
        let e = run.equilibrium_field().unwrap().unwrap();
        for v in &e {
            assert!((v[0] - 8.0).abs() < 1e-14 && (v[1] - 21.9230562619897).abs() < 1e-12);
        }
        let run = build_example(&ExampleRequest::new(5, SchemeVariant::LcdEquilibrium).unperturbed()).unwrap();
        let steady = run.steady.as_ref().unwrap();
        let right = steady.last().unwrap();
        for k in 0..4 {
            assert!((right[k] - EXAMPLE5_RIGHT[k]).abs() < 1e-12);
        }
    }
}

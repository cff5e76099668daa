//! One- and two-dimensional semi-discretizations built from line fluxes.

use rayon::prelude::*;

use super::{fill_line_ghosts, line_fluxes, Diagnostics, GhostPolicy, LineGeometry, SchemeError, SchemeOptions};
use crate::mesh::{BoundaryCondition, Grid1D, Grid2D, GHOST_WIDTH};
use crate::quadrature::RunningIntegrals;
use crate::systems::BalanceLaw;
use crate::vars::Vars;

fn max_abs_speed(model: &dyn BalanceLaw, u: &[Vars], geom: &LineGeometry) -> Result<f64, SchemeError> {
    let mut s: f64 = 0.0;
    for (i, v) in u.iter().enumerate().skip(GHOST_WIDTH).take(u.len() - 2 * GHOST_WIDTH) {
        let (lo, hi) = model.speeds(v, &geom.cells[i]).map_err(|source| SchemeError::State {
            stage: "time step",
            index: i,
            source,
        })?;
        s = s.max(lo.abs()).max(hi.abs());
    }
    Ok(s)
}

fn check_geometry(geom: &LineGeometry, len: usize) -> Result<(), SchemeError> {
    if geom.len() != len || geom.faces.as_ref().is_some_and(|f| f.len() != len + 1) {
        return Err(SchemeError::Setup(format!(
            "line geometry has {} cells, expected {len}",
            geom.len()
        )));
    }
    Ok(())
}

pub struct Problem1D {
    pub model: Box<dyn BalanceLaw>,
    pub grid: Grid1D,
    /// Geometry on the ghost-extended line.
    pub geometry: LineGeometry,
    pub bc: BoundaryCondition,
    pub ghosts: GhostPolicy,
    pub background: Option<Vec<Vars>>,
    pub options: SchemeOptions,
}

impl Problem1D {
    pub fn new(
        model: Box<dyn BalanceLaw>,
        grid: Grid1D,
        geometry: LineGeometry,
        bc: BoundaryCondition,
        options: SchemeOptions,
    ) -> Result<Self, SchemeError> {
        check_geometry(&geometry, grid.len_with_ghosts())?;
        if bc.dim() != model.dim() {
            return Err(SchemeError::Setup(format!(
                "boundary condition has {} components, model has {}",
                bc.dim(),
                model.dim()
            )));
        }
        bc.validate()?;
        Ok(Problem1D {
            model,
            grid,
            geometry,
            bc,
            ghosts: GhostPolicy::Conservative,
            background: None,
            options,
        })
    }

    pub fn with_ghosts(mut self, policy: GhostPolicy, background: Option<Vec<Vars>>) -> Self {
        self.ghosts = policy;
        self.background = background;
        self
    }

    /// Interior state copied into a ghost-filled line.
    pub fn extend(&self, interior: &[Vars], diag: &mut Diagnostics) -> Result<Vec<Vars>, SchemeError> {
        let g = GHOST_WIDTH;
        if interior.len() != self.grid.n_cells {
            return Err(SchemeError::Setup(format!(
                "state has {} cells, grid has {}",
                interior.len(),
                self.grid.n_cells
            )));
        }
        let mut line = vec![Vars::ZERO; interior.len() + 2 * g];
        line[g..g + interior.len()].copy_from_slice(interior);
        fill_line_ghosts(
            self.model.as_ref(),
            &mut line,
            &self.geometry,
            &self.bc,
            self.ghosts,
            self.background.as_deref(),
            self.grid.dx,
            diag,
        )?;
        Ok(line)
    }

    /// Fluxes at the `n + 1` interior faces.
    pub fn fluxes(&self, interior: &[Vars], diag: &mut Diagnostics) -> Result<Vec<Vars>, SchemeError> {
        let line = self.extend(interior, diag)?;
        line_fluxes(self.model.as_ref(), &self.options, self.grid.dx, &line, &self.geometry, diag)
    }

    pub fn rhs(&self, interior: &[Vars], diag: &mut Diagnostics) -> Result<Vec<Vars>, SchemeError> {
        let flux = self.fluxes(interior, diag)?;
        let inv = 1.0 / self.grid.dx;
        Ok(flux.windows(2).map(|w| (w[1] - w[0]) * (-inv)).collect())
    }

    /// Equilibrium variables of the interior cells, with running integrals
    /// taken on the ghost-filled line.
    pub fn equilibrium_field(&self, interior: &[Vars], diag: &mut Diagnostics) -> Result<Vec<Vars>, SchemeError> {
        let line = self.extend(interior, diag)?;
        let model = self.model.as_ref();
        let ints = if model.has_integrand() {
            let f: Vec<f64> = line.iter().zip(&self.geometry.cells).map(|(u, g)| model.integrand(u, g)).collect();
            RunningIntegrals::from_integrand(&f, self.grid.dx)
        } else {
            RunningIntegrals::zero(line.len())
        };
        Ok((GHOST_WIDTH..GHOST_WIDTH + interior.len())
            .map(|i| model.equilibrium(&line[i], &self.geometry.cells[i], ints.center[i]))
            .collect())
    }

    pub fn max_speed(&self, interior: &[Vars]) -> Result<f64, SchemeError> {
        let mut diag = Diagnostics::default();
        let line = self.extend(interior, &mut diag)?;
        max_abs_speed(self.model.as_ref(), &line, &self.geometry)
    }
}

/// Dimension-by-dimension problem. The y sweep reuses the x-direction model
/// on states with the two momentum components swapped.
pub struct Problem2D {
    pub model: Box<dyn BalanceLaw>,
    pub grid: Grid2D,
    /// Ghost-extended geometry along each row (`ny` lines of `nx + 2G`).
    pub rows: Vec<LineGeometry>,
    /// Ghost-extended geometry along each column (`nx` lines of `ny + 2G`).
    pub cols: Vec<LineGeometry>,
    pub bc_x: BoundaryCondition,
    /// Stored in swapped component order.
    bc_y: BoundaryCondition,
    pub swap: (usize, usize),
    pub ghosts: GhostPolicy,
    pub background_rows: Option<Vec<Vec<Vars>>>,
    /// Stored in swapped component order.
    background_cols: Option<Vec<Vec<Vars>>>,
    pub options: SchemeOptions,
}

fn swap_bc(bc: &BoundaryCondition, (a, b): (usize, usize)) -> BoundaryCondition {
    let mut out = bc.clone();
    out.left.swap(a, b);
    out.right.swap(a, b);
    out.odd.swap(a, b);
    out
}

impl Problem2D {
    /// Cells are stored row-major with `x` fastest: index `j + nx * k`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        model: Box<dyn BalanceLaw>,
        grid: Grid2D,
        rows: Vec<LineGeometry>,
        cols: Vec<LineGeometry>,
        bc_x: BoundaryCondition,
        bc_y: BoundaryCondition,
        swap: (usize, usize),
        options: SchemeOptions,
    ) -> Result<Self, SchemeError> {
        let (nx, ny) = (grid.x.n_cells, grid.y.n_cells);
        if rows.len() != ny || cols.len() != nx {
            return Err(SchemeError::Setup(format!(
                "need {ny} row and {nx} column geometries, got {} and {}",
                rows.len(),
                cols.len()
            )));
        }
        for r in &rows {
            check_geometry(r, grid.x.len_with_ghosts())?;
        }
        for c in &cols {
            check_geometry(c, grid.y.len_with_ghosts())?;
        }
        let d = model.dim();
        if swap.0 >= d || swap.1 >= d || bc_x.dim() != d || bc_y.dim() != d {
            return Err(SchemeError::Setup("component count mismatch".into()));
        }
        bc_x.validate()?;
        bc_y.validate()?;
        Ok(Problem2D {
            model,
            grid,
            rows,
            cols,
            bc_x,
            bc_y: swap_bc(&bc_y, swap),
            swap,
            ghosts: GhostPolicy::Conservative,
            background_rows: None,
            background_cols: None,
            options,
        })
    }

    /// Sets the ghost policy; `background` is the full ghost-extended field
    /// as `(nx + 2G) x (ny + 2G)` row-major storage.
    pub fn with_ghosts(mut self, policy: GhostPolicy, background: Option<&[Vars]>) -> Self {
        self.ghosts = policy;
        if let Some(bg) = background {
            let g = GHOST_WIDTH;
            let (nx, ny) = (self.grid.x.n_cells, self.grid.y.n_cells);
            let w = nx + 2 * g;
            let h = ny + 2 * g;
            let rows = (0..ny).map(|k| bg[(k + g) * w..(k + g + 1) * w].to_vec()).collect();
            let cols = (0..nx)
                .map(|j| (0..h).map(|k| bg[k * w + j + g].swapped(self.swap.0, self.swap.1)).collect())
                .collect();
            self.background_rows = Some(rows);
            self.background_cols = Some(cols);
        }
        self
    }

    pub fn nx(&self) -> usize {
        self.grid.x.n_cells
    }

    pub fn ny(&self) -> usize {
        self.grid.y.n_cells
    }

    fn row_line(&self, u: &[Vars], k: usize, diag: &mut Diagnostics) -> Result<Vec<Vars>, SchemeError> {
        let (g, nx) = (GHOST_WIDTH, self.nx());
        let mut line = vec![Vars::ZERO; nx + 2 * g];
        line[g..g + nx].copy_from_slice(&u[k * nx..(k + 1) * nx]);
        let bg = self.background_rows.as_ref().map(|b| b[k].as_slice());
        fill_line_ghosts(self.model.as_ref(), &mut line, &self.rows[k], &self.bc_x, self.ghosts, bg, self.grid.x.dx, diag)?;
        Ok(line)
    }

    fn col_line(&self, u: &[Vars], j: usize, diag: &mut Diagnostics) -> Result<Vec<Vars>, SchemeError> {
        let (g, nx, ny) = (GHOST_WIDTH, self.nx(), self.ny());
        let mut line = vec![Vars::ZERO; ny + 2 * g];
        for k in 0..ny {
            line[g + k] = u[j + nx * k].swapped(self.swap.0, self.swap.1);
        }
        let bg = self.background_cols.as_ref().map(|b| b[j].as_slice());
        fill_line_ghosts(self.model.as_ref(), &mut line, &self.cols[j], &self.bc_y, self.ghosts, bg, self.grid.y.dx, diag)?;
        Ok(line)
    }

    fn check_len(&self, u: &[Vars]) -> Result<(), SchemeError> {
        if u.len() != self.nx() * self.ny() {
            return Err(SchemeError::Setup(format!(
                "state has {} cells, grid has {}",
                u.len(),
                self.nx() * self.ny()
            )));
        }
        Ok(())
    }

    pub fn rhs(&self, u: &[Vars], diag: &mut Diagnostics) -> Result<Vec<Vars>, SchemeError> {
        self.check_len(u)?;
        let (nx, ny) = (self.nx(), self.ny());
        let model = self.model.as_ref();
        let (a, b) = self.swap;

        let rows: Vec<(Vec<Vars>, Diagnostics)> = (0..ny)
            .into_par_iter()
            .map(|k| {
                let mut d = Diagnostics::default();
                let line = self.row_line(u, k, &mut d)?;
                let f = line_fluxes(model, &self.options, self.grid.x.dx, &line, &self.rows[k], &mut d)?;
                Ok((f, d))
            })
            .collect::<Result<_, SchemeError>>()?;
        let cols: Vec<(Vec<Vars>, Diagnostics)> = (0..nx)
            .into_par_iter()
            .map(|j| {
                let mut d = Diagnostics::default();
                let line = self.col_line(u, j, &mut d)?;
                let f = line_fluxes(model, &self.options, self.grid.y.dx, &line, &self.cols[j], &mut d)?;
                Ok((f.into_iter().map(|v| v.swapped(a, b)).collect(), d))
            })
            .collect::<Result<_, SchemeError>>()?;

        let (ix, iy) = (1.0 / self.grid.x.dx, 1.0 / self.grid.y.dx);
        let mut out = vec![Vars::ZERO; nx * ny];
        for (k, (f, d)) in rows.iter().enumerate() {
            diag.merge(d);
            for j in 0..nx {
                out[j + nx * k] = (f[j + 1] - f[j]) * (-ix);
            }
        }
        for (j, (f, d)) in cols.iter().enumerate() {
            diag.merge(d);
            for k in 0..ny {
                out[j + nx * k] -= (f[k + 1] - f[k]) * iy;
            }
        }
        Ok(out)
    }

    /// Largest wave speeds along x and along y.
    pub fn max_speeds(&self, u: &[Vars]) -> Result<(f64, f64), SchemeError> {
        self.check_len(u)?;
        let model = self.model.as_ref();
        let mut diag = Diagnostics::default();
        let mut sx: f64 = 0.0;
        let mut sy: f64 = 0.0;
        for k in 0..self.ny() {
            let line = self.row_line(u, k, &mut diag)?;
            sx = sx.max(max_abs_speed(model, &line, &self.rows[k])?);
        }
        for j in 0..self.nx() {
            let line = self.col_line(u, j, &mut diag)?;
            sy = sy.max(max_abs_speed(model, &line, &self.cols[j])?);
        }
        Ok((sx, sy))
    }
}

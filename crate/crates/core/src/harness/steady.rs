//! Discrete steady states for the examples.

use nalgebra::{DMatrix, DVector};

use super::HarnessError;
use crate::mesh::{Grid1D, Grid2D, GHOST_WIDTH};
use crate::quadrature::RunningIntegrals;
use crate::systems::{BalanceLaw, EulerSweep2D, Geom, Nozzle, TwoLayer};
use crate::vars::Vars;

/// Nozzle states with constant discharge and energy on one branch.
pub fn nozzle_steady(
    model: &Nozzle,
    sigma: &[f64],
    discharge: f64,
    energy: f64,
    supersonic: bool,
) -> Result<Vec<Vars>, HarnessError> {
    sigma
        .iter()
        .enumerate()
        .map(|(j, s)| {
            model
                .density_for(discharge, energy, *s, supersonic)
                .map(|rho| Vars::from_slice(&[s * rho, discharge]))
                .map_err(|_| HarnessError::Builder(format!("no nozzle density at cell {j} (sigma = {s})")))
        })
        .collect()
}

/// Two-layer steady state that matches `left` on the left part of the
/// domain and shares its equilibrium values elsewhere. States right of the
/// bottom jump are recovered starting from `right_guess`.
pub fn two_layer_steady(
    model: &TwoLayer,
    bottom: &[f64],
    left: Vars,
    left_bottom: f64,
    right_guess: Vars,
) -> Result<Vec<Vars>, HarnessError> {
    let e = model.equilibrium(&left, &Geom::flat(left_bottom), 0.0);
    bottom
        .iter()
        .enumerate()
        .map(|(j, z)| {
            if *z == left_bottom {
                return Ok(left);
            }
            model
                .recover(&e, &Geom::flat(*z), 0.0, &right_guess)
                .map_err(|err| HarnessError::Builder(format!("two-layer recovery at cell {j}: {err}")))
        })
        .collect()
}

/// Discrete isothermal profile `P` on the ghost-extended line with
/// `P_i + I_i = P(x̂)`, where `I` is the center ladder of `rate * P` and `x̂`
/// its anchor. Cells outside the ladder range keep exact samples of
/// `exp(-rate x)`. Solved by a chord iteration.
pub fn hydrostatic_profile(grid: &Grid1D, rate: f64) -> Result<Vec<f64>, HarnessError> {
    let len = grid.len_with_ghosts();
    let exact = |x: f64| (-rate * x).exp();
    let mut p: Vec<f64> = (0..len).map(|i| exact(grid.center(i))).collect();
    let anchor = exact(grid.face(crate::quadrature::FIRST_INTEGRAL));
    let (lo, hi) = (crate::quadrature::FIRST_INTEGRAL, len - 3);
    let m = hi - lo + 1;
    let residual = |p: &[f64]| -> Vec<f64> {
        let f: Vec<f64> = p.iter().map(|v| rate * v).collect();
        let ints = RunningIntegrals::from_integrand(&f, grid.dx);
        (lo..=hi).map(|i| p[i] + ints.center[i] - anchor).collect()
    };
    let size = |r: &[f64]| r.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let mut base = residual(&p);
    let mut jac = DMatrix::zeros(m, m);
    for j in 0..m {
        let mut probe = p.clone();
        probe[lo + j] += 1.0;
        for (r, v) in residual(&probe).iter().enumerate() {
            jac[(r, j)] = v - base[r];
        }
    }
    let lu = jac.lu();
    for _ in 0..100 {
        if size(&base) <= 1e-15 * anchor {
            break;
        }
        let step = lu
            .solve(&DVector::from_vec(base.clone()))
            .ok_or_else(|| HarnessError::Builder("singular hydrostatic system".into()))?;
        let mut next = p.clone();
        for j in 0..m {
            next[lo + j] -= step[j];
        }
        let r = residual(&next);
        if size(&r) >= size(&base) {
            break;
        }
        p = next;
        base = r;
    }
    let worst = size(&base);
    if worst > 1e-13 * anchor {
        return Err(HarnessError::Builder(format!("hydrostatic residual {worst:e}")));
    }
    Ok(p)
}

/// Hydrostatic state `p = P(x) Q(y)`, `rho = rate p`, at rest, over the
/// ghost-extended grid in row-major storage.
pub fn hydrostatic_field_2d(model: &EulerSweep2D, grid: &Grid2D, rate: f64) -> Result<Vec<Vars>, HarnessError> {
    let px = hydrostatic_profile(&grid.x, rate)?;
    let py = hydrostatic_profile(&grid.y, rate)?;
    let mut out = Vec::with_capacity(px.len() * py.len());
    for (k, qy) in py.iter().enumerate() {
        for (i, qx) in px.iter().enumerate() {
            let p = qx * qy;
            let phi = grid.x.center(i) + grid.y.center(k);
            out.push(model.conserved(rate * p, 0.0, 0.0, p, &Geom::flat(phi)));
        }
    }
    Ok(out)
}

/// Interior part of a ghost-extended 2-D field.
pub fn interior_2d(field: &[Vars], grid: &Grid2D) -> Vec<Vars> {
    let g = GHOST_WIDTH;
    let w = grid.x.len_with_ghosts();
    let mut out = Vec::with_capacity(grid.x.n_cells * grid.y.n_cells);
    for k in 0..grid.y.n_cells {
        out.extend_from_slice(&field[(k + g) * w + g..(k + g) * w + g + grid.x.n_cells]);
    }
    out
}

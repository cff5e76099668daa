//! Ghost-cell policies for one storage-indexed line.

use std::str::FromStr;

use super::{Diagnostics, LineGeometry, SchemeError};
use crate::mesh::{fill_ghosts, BoundaryCondition, BoundaryKind, GHOST_WIDTH};
use crate::quadrature::{RunningIntegrals, FIRST_INTEGRAL};
use crate::systems::BalanceLaw;
use crate::vars::Vars;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GhostPolicy {
    /// Copy, mirror, wrap or fix conserved variables.
    Conservative,
    /// Hold the equilibrium variables of the boundary cell across the
    /// ghost layer and recover states from the ghost geometry. Reflecting
    /// and periodic sides fall back to the conservative rule.
    Equilibrium,
    /// Extrapolate the deviation from a stored background state.
    Background,
}

impl FromStr for GhostPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "conservative" => Ok(GhostPolicy::Conservative),
            "equilibrium" => Ok(GhostPolicy::Equilibrium),
            "background" => Ok(GhostPolicy::Background),
            other => Err(format!("unknown ghost policy `{other}`")),
        }
    }
}

const MAX_SWEEPS: usize = 30;

/// Fills the ghost layers of `line` in place.
#[allow(clippy::too_many_arguments)]
pub fn fill_line_ghosts(
    model: &dyn BalanceLaw,
    line: &mut [Vars],
    geom: &LineGeometry,
    bc: &BoundaryCondition,
    policy: GhostPolicy,
    background: Option<&[Vars]>,
    dx: f64,
    diag: &mut Diagnostics,
) -> Result<(), SchemeError> {
    let g = GHOST_WIDTH;
    match policy {
        GhostPolicy::Conservative => Ok(fill_ghosts(line, g, bc)?),
        GhostPolicy::Background => {
            let bg = background.ok_or_else(|| SchemeError::Setup("background policy without a background state".into()))?;
            if bg.len() != line.len() {
                return Err(SchemeError::Setup("background length mismatch".into()));
            }
            let mut dev: Vec<Vars> = line.iter().zip(bg).map(|(u, b)| *u - *b).collect();
            let relative = BoundaryCondition {
                left: bc.left.iter().map(|k| strip_fixed(*k)).collect(),
                right: bc.right.iter().map(|k| strip_fixed(*k)).collect(),
                odd: bc.odd.clone(),
            };
            fill_ghosts(&mut dev, g, &relative)?;
            let n = line.len() - 2 * g;
            for i in (0..g).chain(g + n..line.len()) {
                line[i] = bg[i] + dev[i];
            }
            apply_fixed(line, bc);
            Ok(())
        }
        GhostPolicy::Equilibrium => {
            fill_ghosts(line, g, bc)?;
            if bc.is_periodic() || bc.has_reflecting() {
                return Ok(());
            }
            equilibrium_ghosts(model, line, geom, bc, dx, diag)
        }
    }
}

fn strip_fixed(k: BoundaryKind) -> BoundaryKind {
    match k {
        BoundaryKind::FixedValue(_) => BoundaryKind::Free,
        other => other,
    }
}

fn apply_fixed(line: &mut [Vars], bc: &BoundaryCondition) {
    let g = GHOST_WIDTH;
    let len = line.len();
    for c in 0..bc.dim() {
        if let BoundaryKind::FixedValue(v) = bc.left[c] {
            line[..g].iter_mut().for_each(|u| u[c] = v);
        }
        if let BoundaryKind::FixedValue(v) = bc.right[c] {
            line[len - g..].iter_mut().for_each(|u| u[c] = v);
        }
    }
}

/// Boundary cell with prescribed components substituted.
fn target(u: Vars, side: &[BoundaryKind]) -> Vars {
    let mut t = u;
    for (c, k) in side.iter().enumerate() {
        if let BoundaryKind::FixedValue(v) = k {
            t[c] = *v;
        }
    }
    t
}

fn equilibrium_ghosts(
    model: &dyn BalanceLaw,
    line: &mut [Vars],
    geom: &LineGeometry,
    bc: &BoundaryCondition,
    dx: f64,
    diag: &mut Diagnostics,
) -> Result<(), SchemeError> {
    let g = GHOST_WIDTH;
    let len = line.len();
    let (first, last) = (g, len - g - 1);
    let left_target = target(line[first], &bc.left);
    let right_target = target(line[last], &bc.right);
    let sweeps = if model.has_integrand() { MAX_SWEEPS } else { 1 };
    let mut local = Diagnostics::default();
    for _ in 0..sweeps {
        local = Diagnostics::default();
        let ints = if model.has_integrand() {
            let f: Vec<f64> = line.iter().zip(&geom.cells).map(|(u, gm)| model.integrand(u, gm)).collect();
            if f.iter().any(|v| !v.is_finite()) {
                return Err(SchemeError::NonFinite { stage: "ghost integrand", index: 0 });
            }
            RunningIntegrals::from_integrand(&f, dx)
        } else {
            RunningIntegrals::zero(len)
        };
        let integral_at = |i: usize| -> f64 {
            let (lo, hi) = (FIRST_INTEGRAL, len - 1 - FIRST_INTEGRAL);
            let c = &ints.center;
            if i < lo {
                c[lo] - (lo - i) as f64 * (c[lo + 1] - c[lo])
            } else if i > hi {
                c[hi] + (i - hi) as f64 * (c[hi] - c[hi - 1])
            } else {
                c[i]
            }
        };
        let e_left = model.equilibrium(&left_target, &geom.cells[first], integral_at(first));
        let e_right = model.equilibrium(&right_target, &geom.cells[last], integral_at(last));
        let mut moved: f64 = 0.0;
        let sides = [(0..first, e_left, left_target), (last + 1..len, e_right, right_target)];
        for (range, e, reference) in sides {
            for i in range {
                let gm = geom.cells[i];
                let next = match model.recover(&e, &gm, integral_at(i), &reference) {
                    Ok(u) => u,
                    Err(err) => match err.fallback() {
                        Some(f) => {
                            local.recovery_fallbacks += 1;
                            f
                        }
                        None => {
                            return Err(SchemeError::Recovery {
                                stage: "equilibrium ghost",
                                index: i,
                                source: err,
                            })
                        }
                    },
                };
                let next = if model.check_state(&next, &gm).is_ok() {
                    next
                } else {
                    local.state_fallbacks += 1;
                    reference
                };
                let scale = line[i].max_abs().max(1e-300);
                moved = moved.max((next - line[i]).max_abs() / scale);
                line[i] = next;
            }
        }
        if moved <= 1e-14 {
            break;
        }
    }
    diag.merge(&local);
    Ok(())
}

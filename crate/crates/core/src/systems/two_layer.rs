//! Two-layer shallow water over bottom Z(x).
//!
//! State `(h1, q1, h2, q2)` with the lighter layer on top and density
//! ratio `r`. Equilibrium `(q1, E1, q2, E2)` with
//! `E1 = u1²/2 + g(h1 + h2 + Z)` and `E2 = u2²/2 + g(r h1 + h2 + Z)`.

use super::{spectral_bounds, BalanceLaw, Geom, RecoveryError, StateError};
use crate::lcd::Matrix;
use crate::quadrature::product_derivative_integral;
use crate::vars::Vars;

#[derive(Clone, Debug, PartialEq)]
pub struct TwoLayer {
    pub g: f64,
    pub r: f64,
}

impl Default for TwoLayer {
    fn default() -> Self {
        TwoLayer { g: 10.0, r: 0.98 }
    }
}

impl TwoLayer {
    pub fn new(g: f64, r: f64) -> Self {
        TwoLayer { g, r }
    }

    fn residual(&self, h1: f64, h2: f64, e: &Vars, z: f64) -> (f64, f64) {
        let g = self.g;
        (
            e[0] * e[0] / (2.0 * h1 * h1) + g * (h1 + h2 + z) - e[1],
            e[2] * e[2] / (2.0 * h2 * h2) + g * (self.r * h1 + h2 + z) - e[3],
        )
    }
}

impl BalanceLaw for TwoLayer {
    fn dim(&self) -> usize {
        4
    }

    fn name(&self) -> &'static str {
        "two-layer"
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &["h1", "q1", "h2", "q2"]
    }

    fn equilibrium_names(&self) -> &'static [&'static str] {
        &["q1", "E1", "q2", "E2"]
    }

    fn odd_components(&self) -> Vec<bool> {
        vec![false, true, false, true]
    }

    fn check_state(&self, u: &Vars, _g: &Geom) -> Result<(), StateError> {
        if !u.is_finite() {
            return Err(StateError::NonFinite);
        }
        for (k, what) in [(0, "upper depth"), (2, "lower depth")] {
            if !(u[k] > 0.0) {
                return Err(StateError::NonPositive { what, value: u[k] });
            }
        }
        Ok(())
    }

    fn flux(&self, u: &Vars, _g: &Geom) -> Vars {
        let g = self.g;
        Vars::from_slice(&[
            u[1],
            u[1] * u[1] / u[0] + 0.5 * g * u[0] * u[0],
            u[3],
            u[3] * u[3] / u[2] + 0.5 * g * u[2] * u[2],
        ])
    }

    fn speeds(&self, u: &Vars, geom: &Geom) -> Result<(f64, f64), StateError> {
        self.check_state(u, geom)?;
        Ok(spectral_bounds(&self.quasilinear_matrix(u, geom)))
    }

    fn equilibrium(&self, u: &Vars, geom: &Geom, _integral: f64) -> Vars {
        let g = self.g;
        let u1 = u[1] / u[0];
        let u2 = u[3] / u[2];
        Vars::from_slice(&[
            u[1],
            0.5 * u1 * u1 + g * (u[0] + u[2] + geom.value),
            u[3],
            0.5 * u2 * u2 + g * (self.r * u[0] + u[2] + geom.value),
        ])
    }

    /// Damped Newton on the depths starting from the reference depths.
    fn recover(
        &self,
        e: &Vars,
        geom: &Geom,
        _integral: f64,
        reference: &Vars,
    ) -> Result<Vars, RecoveryError> {
        if !e.is_finite() {
            return Err(StateError::NonFinite.into());
        }
        if !(reference[0] > 0.0 && reference[2] > 0.0) {
            return Err(StateError::NonPositive {
                what: "reference depth",
                value: reference[0].min(reference[2]),
            }
            .into());
        }
        let g = self.g;
        let z = geom.value;
        let pack = |h1: f64, h2: f64| Vars::from_slice(&[h1, e[0], h2, e[2]]);
        // With both layers at rest the system is linear.
        if e[0] == 0.0 && e[2] == 0.0 {
            let a = e[1] / g - z;
            let b = e[3] / g - z;
            let h1 = (a - b) / (1.0 - self.r);
            let h2 = a - h1;
            if h1 > 0.0 && h2 > 0.0 {
                return Ok(pack(h1, h2));
            }
            return Err(RecoveryError::NoRoot {
                fallback: pack(reference[0], reference[2]),
            });
        }
        let (mut h1, mut h2) = (reference[0], reference[2]);
        let scale = e[1].abs().max(e[3].abs()).max(g);
        for _ in 0..200 {
            let (r1, r2) = self.residual(h1, h2, e, z);
            let j11 = g - e[0] * e[0] / (h1 * h1 * h1);
            let j12 = g;
            let j21 = self.r * g;
            let j22 = g - e[2] * e[2] / (h2 * h2 * h2);
            let det = j11 * j22 - j12 * j21;
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let d1 = (r1 * j22 - j12 * r2) / det;
            let d2 = (j11 * r2 - j21 * r1) / det;
            let mut step = 1.0;
            while h1 - step * d1 <= 0.0 || h2 - step * d2 <= 0.0 {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
            let (n1, n2) = (h1 - step * d1, h2 - step * d2);
            if !(n1 > 0.0 && n2 > 0.0) {
                break;
            }
            let moved = (n1 - h1).abs() / n1 + (n2 - h2).abs() / n2;
            h1 = n1;
            h2 = n2;
            if moved <= 1e-13 {
                let (r1, r2) = self.residual(h1, h2, e, z);
                if r1.abs().max(r2.abs()) <= 1e-10 * scale {
                    return Ok(pack(h1, h2));
                }
            }
        }
        let (r1, r2) = self.residual(h1, h2, e, z);
        if h1 > 0.0 && h2 > 0.0 && r1.abs().max(r2.abs()) <= 1e-12 * scale {
            return Ok(pack(h1, h2));
        }
        Err(RecoveryError::Diverged {
            fallback: pack(reference[0], reference[2]),
        })
    }

    fn c_matrix(&self, u: &Vars, _g: &Geom) -> Matrix {
        let g = self.g;
        let u1 = u[1] / u[0];
        let u2 = u[3] / u[2];
        Matrix::from_rows(&[
            &[u1, u[0], 0.0, 0.0],
            &[g, u1, g, 0.0],
            &[0.0, 0.0, u2, u[2]],
            &[self.r * g, 0.0, g, u2],
        ])
    }

    fn quasilinear_matrix(&self, u: &Vars, _g: &Geom) -> Matrix {
        let g = self.g;
        let u1 = u[1] / u[0];
        let u2 = u[3] / u[2];
        Matrix::from_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[g * u[0] - u1 * u1, 2.0 * u1, g * u[0], 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[self.r * g * u[2], 0.0, g * u[2] - u2 * u2, 2.0 * u2],
        ])
    }

    fn cell_increment(&self, u_nodes: &[Vars; 5], e_nodes: &[Vars; 5], flux_jump: &Vars) -> Vars {
        let mut out = *flux_jump;
        for (h, q) in [(0usize, 1usize), (2, 3)] {
            let vel = u_nodes.map(|u| u[q] / u[h]);
            let depth = u_nodes.map(|u| u[h]);
            let disch = e_nodes.map(|e| e[h]);
            let energy = e_nodes.map(|e| e[q]);
            out[q] = product_derivative_integral(vel, disch) + product_derivative_integral(depth, energy);
        }
        out
    }

    fn needs_quarter_states(&self) -> bool {
        true
    }

    /// Straight-line path integral of the layer-coupling terms.
    fn path_term(&self, left: &Vars, right: &Vars) -> Vars {
        let g = self.g;
        let h1 = 0.5 * (left[0] + right[0]);
        let h2 = 0.5 * (left[2] + right[2]);
        Vars::from_slice(&[
            0.0,
            -g * h1 * (right[2] - left[2]),
            0.0,
            -self.r * g * h2 * (right[0] - left[0]),
        ])
    }

    fn rest_variables(&self, u: &Vars, geom: &Geom) -> Vars {
        Vars::from_slice(&[u[0], u[1], u[2] + geom.value, u[3]])
    }

    fn from_rest_variables(&self, v: &Vars, geom: &Geom) -> Vars {
        Vars::from_slice(&[v[0], v[1], v[2] - geom.value, v[3]])
    }
}

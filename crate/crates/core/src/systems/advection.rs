//! Scalar linear advection `u_t + a u_x = 0`, the degenerate model used by
//! convergence studies. The equilibrium variable is `u` itself.

use super::{BalanceLaw, Geom, RecoveryError, StateError};
use crate::lcd::{CharBasis, LcdError, Matrix};
use crate::vars::Vars;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearAdvection {
    pub velocity: f64,
}

impl Default for LinearAdvection {
    fn default() -> Self {
        LinearAdvection { velocity: 1.0 }
    }
}

impl BalanceLaw for LinearAdvection {
    fn dim(&self) -> usize {
        1
    }

    fn name(&self) -> &'static str {
        "advection"
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &["u"]
    }

    fn equilibrium_names(&self) -> &'static [&'static str] {
        &["u"]
    }

    fn odd_components(&self) -> Vec<bool> {
        vec![false]
    }

    fn check_state(&self, u: &Vars, _g: &Geom) -> Result<(), StateError> {
        if u[0].is_finite() {
            Ok(())
        } else {
            Err(StateError::NonFinite)
        }
    }

    fn flux(&self, u: &Vars, _g: &Geom) -> Vars {
        Vars::from_slice(&[self.velocity * u[0]])
    }

    fn speeds(&self, u: &Vars, g: &Geom) -> Result<(f64, f64), StateError> {
        self.check_state(u, g)?;
        Ok((self.velocity, self.velocity))
    }

    fn equilibrium(&self, u: &Vars, _g: &Geom, _integral: f64) -> Vars {
        *u
    }

    fn recover(
        &self,
        e: &Vars,
        _g: &Geom,
        _integral: f64,
        _reference: &Vars,
    ) -> Result<Vars, RecoveryError> {
        Ok(*e)
    }

    fn c_matrix(&self, _u: &Vars, _g: &Geom) -> Matrix {
        Matrix::from_rows(&[&[self.velocity]])
    }

    fn char_basis(&self, _u: &Vars, _g: &Geom) -> Result<CharBasis, LcdError> {
        let mut b = CharBasis::identity(1);
        b.eigenvalues[0] = self.velocity;
        Ok(b)
    }

    fn quasilinear_matrix(&self, _u: &Vars, _g: &Geom) -> Matrix {
        Matrix::from_rows(&[&[self.velocity]])
    }

    fn cell_increment(&self, _u_nodes: &[Vars; 5], _e_nodes: &[Vars; 5], flux_jump: &Vars) -> Vars {
        *flux_jump
    }
}

//! Quasi-one-dimensional flow through a nozzle of cross-section σ(x).
//!
//! State `(σρ, σρu)`, pressure `p = κ ρ^γ`, equilibrium `(q, E)` with
//! `E = u²/2 + κγ/(γ-1) ρ^(γ-1)`.

use super::{solve_energy_branch, BalanceLaw, Geom, RecoveryError, StateError};
use crate::lcd::{CharBasis, LcdError, Matrix};
use crate::quadrature::product_derivative_integral;
use crate::vars::Vars;

#[derive(Clone, Debug, PartialEq)]
pub struct Nozzle {
    pub gamma: f64,
    pub kappa: f64,
}

impl Default for Nozzle {
    fn default() -> Self {
        Nozzle {
            gamma: 1.4,
            kappa: 1.0,
        }
    }
}

impl Nozzle {
    pub fn new(gamma: f64, kappa: f64) -> Self {
        Nozzle { gamma, kappa }
    }

    fn enthalpy_coef(&self) -> f64 {
        self.kappa * self.gamma / (self.gamma - 1.0)
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.kappa * rho.powf(self.gamma)
    }

    pub fn sound_speed(&self, rho: f64) -> f64 {
        (self.kappa * self.gamma * rho.powf(self.gamma - 1.0)).sqrt()
    }

    /// Density with the given discharge and energy, on the supersonic
    /// branch when `supersonic`.
    pub fn density_for(
        &self,
        q: f64,
        energy: f64,
        sigma: f64,
        supersonic: bool,
    ) -> Result<f64, f64> {
        let a = q * q / (2.0 * sigma * sigma);
        solve_energy_branch(a, self.enthalpy_coef(), self.gamma - 1.0, energy, supersonic)
    }

    pub fn sonic_density(&self, q: f64, sigma: f64) -> f64 {
        (q * q / (sigma * sigma * self.kappa * self.gamma)).powf(1.0 / (self.gamma + 1.0))
    }
}

impl BalanceLaw for Nozzle {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &'static str {
        "nozzle"
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &["sigma_rho", "sigma_rho_u"]
    }

    fn equilibrium_names(&self) -> &'static [&'static str] {
        &["q", "E"]
    }

    fn odd_components(&self) -> Vec<bool> {
        vec![false, true]
    }

    fn check_state(&self, u: &Vars, g: &Geom) -> Result<(), StateError> {
        if !u[0].is_finite() || !u[1].is_finite() {
            return Err(StateError::NonFinite);
        }
        if !(u[0] > 0.0) {
            return Err(StateError::NonPositive {
                what: "sigma*rho",
                value: u[0],
            });
        }
        if !(g.value > 0.0) {
            return Err(StateError::NonPositive {
                what: "cross-section",
                value: g.value,
            });
        }
        Ok(())
    }

    fn flux(&self, u: &Vars, g: &Geom) -> Vars {
        let rho = u[0] / g.value;
        Vars::from_slice(&[u[1], u[1] * u[1] / u[0] + g.value * self.pressure(rho)])
    }

    fn speeds(&self, u: &Vars, g: &Geom) -> Result<(f64, f64), StateError> {
        self.check_state(u, g)?;
        let vel = u[1] / u[0];
        let c = self.sound_speed(u[0] / g.value);
        Ok((vel - c, vel + c))
    }

    fn equilibrium(&self, u: &Vars, g: &Geom, _integral: f64) -> Vars {
        let rho = u[0] / g.value;
        let vel = u[1] / u[0];
        Vars::from_slice(&[u[1], 0.5 * vel * vel + self.enthalpy_coef() * rho.powf(self.gamma - 1.0)])
    }

    fn recover(
        &self,
        e: &Vars,
        g: &Geom,
        _integral: f64,
        reference: &Vars,
    ) -> Result<Vars, RecoveryError> {
        if !(g.value > 0.0) {
            return Err(StateError::NonPositive {
                what: "cross-section",
                value: g.value,
            }
            .into());
        }
        if !e[0].is_finite() || !e[1].is_finite() {
            return Err(StateError::NonFinite.into());
        }
        let q = e[0];
        let sigma = g.value;
        let rho_s = self.sonic_density(q, sigma);
        let ref_rho = reference[0] / sigma;
        let supersonic = ref_rho < rho_s;
        match self.density_for(q, e[1], sigma, supersonic) {
            Ok(rho) => Ok(Vars::from_slice(&[sigma * rho, q])),
            Err(rs) => Err(RecoveryError::NoRoot {
                fallback: Vars::from_slice(&[sigma * rs.max(f64::MIN_POSITIVE), q]),
            }),
        }
    }

    fn c_matrix(&self, u: &Vars, g: &Geom) -> Matrix {
        let rho = u[0] / g.value;
        let vel = u[1] / u[0];
        let c2 = self.kappa * self.gamma * rho.powf(self.gamma - 1.0);
        Matrix::from_rows(&[&[vel, u[0]], &[c2 / u[0], vel]])
    }

    fn char_basis(&self, u: &Vars, g: &Geom) -> Result<CharBasis, LcdError> {
        let a = u[0];
        let rho = a / g.value;
        let vel = u[1] / a;
        let c = self.sound_speed(rho);
        let s = 1.0 / (2.0 * c * a);
        Ok(CharBasis {
            q: Matrix::from_rows(&[&[a, a], &[-c, c]]),
            q_inv: Matrix::from_rows(&[&[c * s, -a * s], &[c * s, a * s]]),
            eigenvalues: Vars::from_slice(&[vel - c, vel + c]),
        })
    }

    fn quasilinear_matrix(&self, u: &Vars, g: &Geom) -> Matrix {
        let vel = u[1] / u[0];
        let c2 = self.sound_speed(u[0] / g.value).powi(2);
        Matrix::from_rows(&[&[0.0, 1.0], &[c2 - vel * vel, 2.0 * vel]])
    }

    fn cell_increment(&self, u_nodes: &[Vars; 5], e_nodes: &[Vars; 5], flux_jump: &Vars) -> Vars {
        let vel = u_nodes.map(|u| u[1] / u[0]);
        let area_rho = u_nodes.map(|u| u[0]);
        let q = e_nodes.map(|e| e[0]);
        let energy = e_nodes.map(|e| e[1]);
        let momentum = product_derivative_integral(vel, q) + product_derivative_integral(area_rho, energy);
        Vars::from_slice(&[flux_jump[0], momentum])
    }

    fn needs_quarter_states(&self) -> bool {
        true
    }

    fn rest_variables(&self, u: &Vars, g: &Geom) -> Vars {
        Vars::from_slice(&[u[0] / g.value, u[1]])
    }

    fn from_rest_variables(&self, v: &Vars, g: &Geom) -> Vars {
        Vars::from_slice(&[v[0] * g.value, v[1]])
    }
}

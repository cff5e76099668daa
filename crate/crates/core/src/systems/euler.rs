//! Compressible Euler equations with a gravitational potential φ.
//!
//! `𝓔 = E + ρφ` is the total energy including potential energy. The
//! equilibrium variables along the sweep are the momenta, `K = ρu² + p +
//! ∫ρφ_x` and `L = (𝓔 + p)/ρ`.

use super::{BalanceLaw, Geom, RecoveryError, StateError};
use crate::lcd::{CharBasis, LcdError, Matrix};
use crate::vars::Vars;

/// Solves `(γ-1)(L-φ)ρ² - γ(K-I)ρ + (γ+1)m²/2 - (γ-1)n²/2 = 0` for the root
/// nearest `rho_ref`, returning `(ρ, 𝓔)`.
fn recover_density_energy(
    gamma: f64,
    m: f64,
    n: f64,
    k: f64,
    l: f64,
    phi: f64,
    integral: f64,
    rho_ref: f64,
) -> Result<(f64, f64), RecoveryError> {
    let head = l - phi;
    if !(head > 0.0) {
        return Err(StateError::NonPositive {
            what: "L - phi",
            value: head,
        }
        .into());
    }
    let a = (gamma - 1.0) * head;
    let b = -gamma * (k - integral);
    let c = 0.5 * (gamma + 1.0) * m * m - 0.5 * (gamma - 1.0) * n * n;
    let finish = |rho: f64| {
        let p = (gamma - 1.0) / gamma * (rho * head - 0.5 * (m * m + n * n) / rho);
        (rho, rho * l - p, p)
    };
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        let (rho, energy, _) = finish(-b / (2.0 * a));
        return Err(RecoveryError::NoRoot {
            fallback: Vars::from_slice(&[rho, energy]),
        });
    }
    let sq = disc.sqrt();
    let t = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
    let mut roots = [f64::NAN, f64::NAN];
    if t != 0.0 {
        roots = [t / a, c / t];
    } else if a != 0.0 {
        roots = [0.0, 0.0];
    }
    let pick = roots
        .iter()
        .cloned()
        .filter(|r| *r > 0.0 && r.is_finite())
        .min_by(|x, y| {
            (x - rho_ref)
                .abs()
                .partial_cmp(&(y - rho_ref).abs())
                .expect("finite roots")
        });
    match pick {
        Some(rho) => {
            let (rho, energy, p) = finish(rho);
            if p > 0.0 {
                Ok((rho, energy))
            } else {
                Err(RecoveryError::NoRoot {
                    fallback: Vars::from_slice(&[rho, energy]),
                })
            }
        }
        None => Err(RecoveryError::NoRoot {
            fallback: Vars::from_slice(&[rho_ref, f64::NAN]),
        }),
    }
}

fn check_gas(rho: f64, p: f64, all_finite: bool) -> Result<(), StateError> {
    if !all_finite {
        return Err(StateError::NonFinite);
    }
    if !(rho > 0.0) {
        return Err(StateError::NonPositive {
            what: "density",
            value: rho,
        });
    }
    if !(p > 0.0) {
        return Err(StateError::NonPositive {
            what: "pressure",
            value: p,
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Euler1D {
    pub gamma: f64,
}

impl Default for Euler1D {
    fn default() -> Self {
        Euler1D { gamma: 1.4 }
    }
}

impl Euler1D {
    pub fn new(gamma: f64) -> Self {
        Euler1D { gamma }
    }

    pub fn pressure(&self, u: &Vars, g: &Geom) -> f64 {
        (self.gamma - 1.0) * (u[2] - u[0] * g.value - 0.5 * u[1] * u[1] / u[0])
    }

    /// Conserved state from primitive `(ρ, u, p)`.
    pub fn conserved(&self, rho: f64, vel: f64, p: f64, g: &Geom) -> Vars {
        Vars::from_slice(&[rho, rho * vel, p / (self.gamma - 1.0) + 0.5 * rho * vel * vel + rho * g.value])
    }
}

impl BalanceLaw for Euler1D {
    fn dim(&self) -> usize {
        3
    }

    fn name(&self) -> &'static str {
        "euler-1d"
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &["rho", "m", "energy"]
    }

    fn equilibrium_names(&self) -> &'static [&'static str] {
        &["m", "K", "L"]
    }

    fn odd_components(&self) -> Vec<bool> {
        vec![false, true, false]
    }

    fn check_state(&self, u: &Vars, g: &Geom) -> Result<(), StateError> {
        check_gas(u[0], self.pressure(u, g), u.is_finite())
    }

    fn flux(&self, u: &Vars, g: &Geom) -> Vars {
        let p = self.pressure(u, g);
        let vel = u[1] / u[0];
        Vars::from_slice(&[u[1], u[1] * vel + p, vel * (u[2] + p)])
    }

    fn speeds(&self, u: &Vars, g: &Geom) -> Result<(f64, f64), StateError> {
        let p = self.pressure(u, g);
        check_gas(u[0], p, u.is_finite())?;
        let vel = u[1] / u[0];
        let c = (self.gamma * p / u[0]).sqrt();
        Ok((vel - c, vel + c))
    }

    fn has_integrand(&self) -> bool {
        true
    }

    fn integrand(&self, u: &Vars, g: &Geom) -> f64 {
        u[0] * g.slope
    }

    fn equilibrium(&self, u: &Vars, g: &Geom, integral: f64) -> Vars {
        let p = self.pressure(u, g);
        Vars::from_slice(&[u[1], u[1] * u[1] / u[0] + p + integral, (u[2] + p) / u[0]])
    }

    fn recover(
        &self,
        e: &Vars,
        g: &Geom,
        integral: f64,
        reference: &Vars,
    ) -> Result<Vars, RecoveryError> {
        if !e.is_finite() {
            return Err(StateError::NonFinite.into());
        }
        let out = recover_density_energy(self.gamma, e[0], 0.0, e[1], e[2], g.value, integral, reference[0]);
        match out {
            Ok((rho, energy)) => Ok(Vars::from_slice(&[rho, e[0], energy])),
            Err(RecoveryError::NoRoot { fallback }) => Err(RecoveryError::NoRoot {
                fallback: Vars::from_slice(&[fallback[0], e[0], fallback[1]]),
            }),
            Err(other) => Err(other),
        }
    }

    fn c_matrix(&self, u: &Vars, g: &Geom) -> Matrix {
        let gm = self.gamma;
        let rho = u[0];
        let m = u[1];
        let vel = m / rho;
        let c2 = gm * self.pressure(u, g) / rho;
        Matrix::from_rows(&[
            &[0.0, 1.0, 0.0],
            &[(gm - 2.0) * vel * vel + c2, (3.0 - gm) * vel, (gm - 1.0) * m],
            &[((gm - 1.0) * vel * vel + c2) / rho, (1.0 - gm) * vel / rho, gm * vel],
        ])
    }

    fn char_basis(&self, u: &Vars, g: &Geom) -> Result<CharBasis, LcdError> {
        let gm = self.gamma;
        let rho = u[0];
        let m = u[1];
        let v = m / rho;
        let c = (gm * self.pressure(u, g) / rho).sqrt();
        let c2 = c * c;
        // Columns ordered by eigenvalue: u - c, u, u + c.
        let q = Matrix::from_rows(&[
            &[-rho / c, (1.0 - gm) * m / c2, rho / c],
            &[rho - m / c, (1.0 - gm) * m * m / (c2 * rho), rho + m / c],
            &[1.0, 1.0, 1.0],
        ]);
        let q_inv = Matrix::from_rows(&[
            &[
                (1.0 - gm) * v * v / (2.0 * c * rho) - (v + c) / (2.0 * rho),
                (gm - 1.0) * v / (2.0 * c * rho) + 1.0 / (2.0 * rho),
                (1.0 - gm) * v / (2.0 * c),
            ],
            &[v / rho, -1.0 / rho, 1.0],
            &[
                (gm - 1.0) * v * v / (2.0 * c * rho) - (v - c) / (2.0 * rho),
                (1.0 - gm) * v / (2.0 * c * rho) + 1.0 / (2.0 * rho),
                (gm - 1.0) * v / (2.0 * c),
            ],
        ]);
        Ok(CharBasis {
            q,
            q_inv,
            eigenvalues: Vars::from_slice(&[v - c, v, v + c]),
        })
    }

    fn quasilinear_matrix(&self, u: &Vars, g: &Geom) -> Matrix {
        let gm = self.gamma;
        let rho = u[0];
        let vel = u[1] / rho;
        let p = self.pressure(u, g);
        let h = (u[2] + p) / rho;
        let p_rho = (gm - 1.0) * (0.5 * vel * vel - g.value);
        let p_m = -(gm - 1.0) * vel;
        let p_e = gm - 1.0;
        Matrix::from_rows(&[
            &[0.0, 1.0, 0.0],
            &[-vel * vel + p_rho, 2.0 * vel + p_m, p_e],
            &[-vel * h + vel * p_rho, h + vel * p_m, vel * (1.0 + p_e)],
        ])
    }

    fn cell_increment(&self, _u_nodes: &[Vars; 5], e_nodes: &[Vars; 5], flux_jump: &Vars) -> Vars {
        Vars::from_slice(&[flux_jump[0], e_nodes[4][1] - e_nodes[0][1], flux_jump[2]])
    }
}

/// Two-dimensional Euler seen along one sweep. State `(ρ, m, n, 𝓔)` with
/// `m` the momentum along the sweep and `n` the transverse one; y-sweeps
/// swap the momenta before and after.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerSweep2D {
    pub gamma: f64,
}

impl Default for EulerSweep2D {
    fn default() -> Self {
        EulerSweep2D { gamma: 1.4 }
    }
}

impl EulerSweep2D {
    pub fn new(gamma: f64) -> Self {
        EulerSweep2D { gamma }
    }

    pub fn pressure(&self, u: &Vars, g: &Geom) -> f64 {
        (self.gamma - 1.0) * (u[3] - u[0] * g.value - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0])
    }

    pub fn conserved(&self, rho: f64, vel: f64, vel_t: f64, p: f64, g: &Geom) -> Vars {
        Vars::from_slice(&[
            rho,
            rho * vel,
            rho * vel_t,
            p / (self.gamma - 1.0) + 0.5 * rho * (vel * vel + vel_t * vel_t) + rho * g.value,
        ])
    }

    /// Jacobian of the local part `(m, n, ρu² + p, L)` of the equilibrium variables.
    pub fn local_jacobian(&self, u: &Vars, g: &Geom) -> Matrix {
        let gm = self.gamma;
        let rho = u[0];
        let vel = u[1] / rho;
        let vt = u[2] / rho;
        Matrix::from_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[
                (1.0 - gm) * g.value + 0.5 * (gm - 3.0) * vel * vel + 0.5 * (gm - 1.0) * vt * vt,
                (3.0 - gm) * vel,
                (1.0 - gm) * vt,
                gm - 1.0,
            ],
            &[
                (gm - 1.0) * (vel * vel + vt * vt) / rho - gm * u[3] / (rho * rho),
                (1.0 - gm) * vel / rho,
                (1.0 - gm) * vt / rho,
                gm / rho,
            ],
        ])
    }

    /// Matrix `M` with `M E_x = F_x - S` at steady states.
    pub fn steady_matrix(&self, u: &Vars, g: &Geom) -> Matrix {
        let gm = self.gamma;
        let rho = u[0];
        let (m, n) = (u[1], u[2]);
        let vel = m / rho;
        let vt = n / rho;
        let l = (u[3] + self.pressure(u, g)) / rho;
        let psi = 2.0 * m * n / ((gm - 1.0) * (2.0 * rho * rho * l + n * n) - (gm + 1.0) * m * m);
        Matrix::from_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[
                vt + (gm + 1.0) * vel * psi,
                vel + (1.0 - gm) * vt * psi,
                -gm * psi,
                (gm - 1.0) * rho * psi,
            ],
            &[l, 0.0, 0.0, m],
        ])
    }
}

impl BalanceLaw for EulerSweep2D {
    fn dim(&self) -> usize {
        4
    }

    fn name(&self) -> &'static str {
        "euler-2d"
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &["rho", "m", "n", "energy"]
    }

    fn equilibrium_names(&self) -> &'static [&'static str] {
        &["m", "n", "K", "L"]
    }

    fn odd_components(&self) -> Vec<bool> {
        vec![false, true, false, false]
    }

    fn check_state(&self, u: &Vars, g: &Geom) -> Result<(), StateError> {
        check_gas(u[0], self.pressure(u, g), u.is_finite())
    }

    fn flux(&self, u: &Vars, g: &Geom) -> Vars {
        let p = self.pressure(u, g);
        let vel = u[1] / u[0];
        Vars::from_slice(&[u[1], u[1] * vel + p, u[2] * vel, vel * (u[3] + p)])
    }

    fn speeds(&self, u: &Vars, g: &Geom) -> Result<(f64, f64), StateError> {
        let p = self.pressure(u, g);
        check_gas(u[0], p, u.is_finite())?;
        let vel = u[1] / u[0];
        let c = (self.gamma * p / u[0]).sqrt();
        Ok((vel - c, vel + c))
    }

    fn has_integrand(&self) -> bool {
        true
    }

    fn integrand(&self, u: &Vars, g: &Geom) -> f64 {
        u[0] * g.slope
    }

    fn equilibrium(&self, u: &Vars, g: &Geom, integral: f64) -> Vars {
        let p = self.pressure(u, g);
        Vars::from_slice(&[u[1], u[2], u[1] * u[1] / u[0] + p + integral, (u[3] + p) / u[0]])
    }

    fn recover(
        &self,
        e: &Vars,
        g: &Geom,
        integral: f64,
        reference: &Vars,
    ) -> Result<Vars, RecoveryError> {
        if !e.is_finite() {
            return Err(StateError::NonFinite.into());
        }
        let out = recover_density_energy(self.gamma, e[0], e[1], e[2], e[3], g.value, integral, reference[0]);
        match out {
            Ok((rho, energy)) => Ok(Vars::from_slice(&[rho, e[0], e[1], energy])),
            Err(RecoveryError::NoRoot { fallback }) => Err(RecoveryError::NoRoot {
                fallback: Vars::from_slice(&[fallback[0], e[0], e[1], fallback[1]]),
            }),
            Err(other) => Err(other),
        }
    }

    fn c_matrix(&self, u: &Vars, g: &Geom) -> Matrix {
        self.local_jacobian(u, g).mul(&self.steady_matrix(u, g))
    }

    fn quasilinear_matrix(&self, u: &Vars, g: &Geom) -> Matrix {
        let gm = self.gamma;
        let rho = u[0];
        let vel = u[1] / rho;
        let vt = u[2] / rho;
        let p = self.pressure(u, g);
        let h = (u[3] + p) / rho;
        let p_rho = (gm - 1.0) * (0.5 * (vel * vel + vt * vt) - g.value);
        let p_m = -(gm - 1.0) * vel;
        let p_n = -(gm - 1.0) * vt;
        let p_e = gm - 1.0;
        Matrix::from_rows(&[
            &[0.0, 1.0, 0.0, 0.0],
            &[-vel * vel + p_rho, 2.0 * vel + p_m, p_n, p_e],
            &[-vel * vt, vt, vel, 0.0],
            &[-vel * h + vel * p_rho, h + vel * p_m, vel * p_n, vel * (1.0 + p_e)],
        ])
    }

    fn cell_increment(&self, _u_nodes: &[Vars; 5], e_nodes: &[Vars; 5], flux_jump: &Vars) -> Vars {
        Vars::from_slice(&[flux_jump[0], e_nodes[4][2] - e_nodes[0][2], flux_jump[2], flux_jump[3]])
    }
}

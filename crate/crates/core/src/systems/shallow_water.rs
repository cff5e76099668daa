//! Saint-Venant system with Manning friction over bottom Z(x).
//!
//! State `(h, q)`, equilibrium `(q, E)` with
//! `E = u²/2 + g(h + Z) + ∫ g n² q|q| h^(-10/3)`.

use std::f64::consts::PI;

use super::{solve_energy_branch, BalanceLaw, Geom, RecoveryError, StateError};
use crate::lcd::{CharBasis, LcdError, Matrix};
use crate::quadrature::product_derivative_integral;
use crate::vars::Vars;

#[derive(Clone, Debug, PartialEq)]
pub struct ShallowWater {
    pub g: f64,
    pub manning: f64,
}

impl Default for ShallowWater {
    fn default() -> Self {
        ShallowWater {
            g: 9.812,
            manning: 0.0,
        }
    }
}

impl ShallowWater {
    pub fn new(g: f64, manning: f64) -> Self {
        ShallowWater { g, manning }
    }

    pub fn critical_depth(&self, q: f64) -> f64 {
        (q * q / self.g).cbrt()
    }

    /// Depth solving `g h³ + (gZ + I - E) h² + q²/2 = 0` on the branch of
    /// `reference_depth` relative to the critical depth.
    pub fn depth_for(
        &self,
        q: f64,
        energy: f64,
        bottom: f64,
        integral: f64,
        reference_depth: f64,
    ) -> Result<f64, f64> {
        let head = energy - self.g * bottom - integral;
        if q == 0.0 {
            return if head > 0.0 { Ok(head / self.g) } else { Err(f64::MIN_POSITIVE) };
        }
        let hc = self.critical_depth(q);
        let shallow = reference_depth < hc;
        let a = 0.5 * q * q;
        let fmin = a / (hc * hc) + self.g * hc;
        if head < fmin {
            return Err(hc);
        }
        if let Some(h) = self.cubic_root(q, head, hc, shallow) {
            return Ok(h);
        }
        solve_energy_branch(a, self.g, 1.0, head, shallow)
    }

    /// Trigonometric solution of the cubic followed by Newton polishing.
    fn cubic_root(&self, q: f64, head: f64, hc: f64, shallow: bool) -> Option<f64> {
        let a2 = -head / self.g;
        let c0 = 0.5 * q * q / self.g;
        let p = -a2 * a2 / 3.0;
        let r = 2.0 * a2 * a2 * a2 / 27.0 + c0;
        if !(p < 0.0) {
            return None;
        }
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * r / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let roots = [0.0, 1.0, 2.0].map(|k| m * (theta - 2.0 * PI * k / 3.0).cos() - a2 / 3.0);
        let positive = roots.iter().copied().filter(|h| *h > 0.0);
        // The shallow root suffers cancellation when q is tiny; polishing
        // below restores it.
        let mut h = if shallow {
            positive.fold(f64::INFINITY, f64::min).min(hc)
        } else {
            positive.fold(0.0, f64::max).max(hc)
        };
        if !(h > 0.0 && h.is_finite()) {
            return None;
        }
        let f = |h: f64| self.g * h * h * h - head * h * h + c0 * self.g;
        let df = |h: f64| 3.0 * self.g * h * h - 2.0 * head * h;
        for _ in 0..50 {
            let d = df(h);
            if d == 0.0 {
                break;
            }
            let next = h - f(h) / d;
            if !(next > 0.0) || ((next < hc) != shallow) {
                break;
            }
            let done = (next - h).abs() <= 1e-16 * h;
            h = next;
            if done {
                break;
            }
        }
        if (h < hc) != shallow && h != hc {
            return None;
        }
        Some(h)
    }
}

impl BalanceLaw for ShallowWater {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &'static str {
        "shallow-water"
    }

    fn conserved_names(&self) -> &'static [&'static str] {
        &["h", "q"]
    }

    fn equilibrium_names(&self) -> &'static [&'static str] {
        &["q", "E"]
    }

    fn odd_components(&self) -> Vec<bool> {
        vec![false, true]
    }

    fn check_state(&self, u: &Vars, _g: &Geom) -> Result<(), StateError> {
        if !u[0].is_finite() || !u[1].is_finite() {
            return Err(StateError::NonFinite);
        }
        if !(u[0] > 0.0) {
            return Err(StateError::NonPositive {
                what: "depth",
                value: u[0],
            });
        }
        Ok(())
    }

    fn flux(&self, u: &Vars, _g: &Geom) -> Vars {
        Vars::from_slice(&[u[1], u[1] * u[1] / u[0] + 0.5 * self.g * u[0] * u[0]])
    }

    fn speeds(&self, u: &Vars, g: &Geom) -> Result<(f64, f64), StateError> {
        self.check_state(u, g)?;
        let vel = u[1] / u[0];
        let c = (self.g * u[0]).sqrt();
        Ok((vel - c, vel + c))
    }

    fn has_integrand(&self) -> bool {
        self.manning != 0.0
    }

    fn integrand(&self, u: &Vars, _g: &Geom) -> f64 {
        let n2 = self.manning * self.manning;
        self.g * n2 * u[1] * u[1].abs() * u[0].powf(-10.0 / 3.0)
    }

    fn equilibrium(&self, u: &Vars, g: &Geom, integral: f64) -> Vars {
        let vel = u[1] / u[0];
        Vars::from_slice(&[u[1], 0.5 * vel * vel + self.g * (u[0] + g.value) + integral])
    }

    fn recover(
        &self,
        e: &Vars,
        g: &Geom,
        integral: f64,
        reference: &Vars,
    ) -> Result<Vars, RecoveryError> {
        if !e[0].is_finite() || !e[1].is_finite() || !integral.is_finite() {
            return Err(StateError::NonFinite.into());
        }
        match self.depth_for(e[0], e[1], g.value, integral, reference[0]) {
            Ok(h) => Ok(Vars::from_slice(&[h, e[0]])),
            Err(hc) => Err(RecoveryError::NoRoot {
                fallback: Vars::from_slice(&[hc.max(1e-12), e[0]]),
            }),
        }
    }

    fn c_matrix(&self, u: &Vars, _g: &Geom) -> Matrix {
        let vel = u[1] / u[0];
        Matrix::from_rows(&[&[vel, u[0]], &[self.g, vel]])
    }

    fn char_basis(&self, u: &Vars, _g: &Geom) -> Result<CharBasis, LcdError> {
        let h = u[0];
        let vel = u[1] / h;
        let sh = h.sqrt();
        let sg = self.g.sqrt();
        let s = 1.0 / (2.0 * (self.g * h).sqrt());
        Ok(CharBasis {
            q: Matrix::from_rows(&[&[sh, sh], &[-sg, sg]]),
            q_inv: Matrix::from_rows(&[&[sg * s, -sh * s], &[sg * s, sh * s]]),
            eigenvalues: Vars::from_slice(&[vel - sh * sg, vel + sh * sg]),
        })
    }

    fn quasilinear_matrix(&self, u: &Vars, _g: &Geom) -> Matrix {
        let vel = u[1] / u[0];
        Matrix::from_rows(&[&[0.0, 1.0], &[self.g * u[0] - vel * vel, 2.0 * vel]])
    }

    fn cell_increment(&self, u_nodes: &[Vars; 5], e_nodes: &[Vars; 5], flux_jump: &Vars) -> Vars {
        let vel = u_nodes.map(|u| u[1] / u[0]);
        let depth = u_nodes.map(|u| u[0]);
        let q = e_nodes.map(|e| e[0]);
        let energy = e_nodes.map(|e| e[1]);
        let momentum = product_derivative_integral(vel, q) + product_derivative_integral(depth, energy);
        Vars::from_slice(&[flux_jump[0], momentum])
    }

    fn needs_quarter_states(&self) -> bool {
        true
    }

    fn rest_variables(&self, u: &Vars, g: &Geom) -> Vars {
        Vars::from_slice(&[u[0] + g.value, u[1]])
    }

    fn from_rest_variables(&self, v: &Vars, g: &Geom) -> Vars {
        Vars::from_slice(&[v[0] - g.value, v[1]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn still_water_depth() {
        let m = ShallowWater::default();
        let u = m
            .recover(&Vars::from_slice(&[0.0, 2.0 * m.g]), &Geom::flat(0.0), 0.0, &Vars::from_slice(&[1.0, 0.0]))
            .unwrap();
        assert_eq!(u[0], 2.0);
        let u = m
            .recover(&Vars::from_slice(&[0.0, 3.0]), &Geom::flat(0.1), 0.2, &Vars::from_slice(&[1.0, 0.0]))
            .unwrap();
        assert!((u[0] - (3.0 - 0.2 - m.g * 0.1) / m.g).abs() < 1e-15);
    }

    #[test]
    fn moving_water_round_trip_on_both_branches() {
        let m = ShallowWater::new(9.812, 0.15);
        for (h, q) in [(2.0, 4.42), (0.4, 4.42), (1.1, -0.3), (0.05, 2.0)] {
            let u = Vars::from_slice(&[h, q]);
            let geom = Geom::flat(0.2);
            let e = m.equilibrium(&u, &geom, 0.37);
            let back = m.recover(&e, &geom, 0.37, &u).unwrap();
            assert!((back[0] - h).abs() <= 1e-12 * h, "{} vs {h}", back[0]);
        }
    }

    #[test]
    fn round_off_discharge_stays_on_deep_branch() {
        let m = ShallowWater::default();
        for q in [1e-17, -3e-15, 1e-12, 1e-9] {
            let u = m
                .recover(&Vars::from_slice(&[q, m.g * 1.3]), &Geom::flat(0.0), 0.0, &Vars::from_slice(&[1.2, 0.0]))
                .unwrap();
            assert!((u[0] - 1.3).abs() < 1e-12, "q = {q}: h = {}", u[0]);
        }
    }

    #[test]
    fn hydrostatic_jump_balances() {
        let m = ShallowWater::default();
        // Lake at rest over a step: the averaged bottom gives equal hatted depths.
        let e = Vars::from_slice(&[0.0, m.g * 2.0]);
        let zbar = Geom::flat(0.5 * (1.0 + 1.9));
        let l = m.recover(&e, &zbar, 0.0, &Vars::from_slice(&[1.0, 0.0])).unwrap();
        let r = m.recover(&e, &zbar, 0.0, &Vars::from_slice(&[0.1, 0.0])).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn example_cases_from_contract() {
        let m = ShallowWater::default();
        let g = Geom::flat(0.0);
        let u = m.recover(&Vars::from_slice(&[0.0, m.g * 2.0]), &g, 0.0, &Vars::from_slice(&[1.0, 0.0])).unwrap();
        assert_eq!(u[0], 2.0);
        let (lo, hi) = m.speeds(&Vars::from_slice(&[1.0, 0.0]), &g).unwrap();
        assert!((hi - m.g.sqrt()).abs() < 1e-15 && lo == -hi);
        let f = m.flux(&Vars::from_slice(&[1.0, 0.0]), &g);
        assert_eq!(f, Vars::from_slice(&[0.0, 0.5 * m.g]));
    }

    #[test]
    fn c_matrix_and_basis() {
        let m = ShallowWater::new(1.0, 0.0);
        let u = Vars::from_slice(&[1.0, 2.0]);
        let c = m.c_matrix(&u, &Geom::flat(0.0));
        assert_eq!(c, Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]));
        let b = m.char_basis(&u, &Geom::flat(0.0)).unwrap();
        assert_eq!(b.eigenvalues[0], 1.0);
        assert_eq!(b.eigenvalues[1], 3.0);
        assert!(b.invariant_defect(&c) <= 1.0);
    }
}

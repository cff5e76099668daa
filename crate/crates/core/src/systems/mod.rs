//! Model systems of balance laws written in equilibrium variables.
//!
//! Each model exposes its flux, wave speeds, the forward map `U -> E`, the
//! inverse recovery map, the matrix driving the characteristic
//! decomposition, and the per-cell global-flux increment built from the
//! identity `K_x = M(U) E_x`.

mod advection;
mod euler;
mod nozzle;
mod shallow_water;
mod two_layer;

pub use advection::LinearAdvection;
pub use euler::{Euler1D, EulerSweep2D};
pub use nozzle::Nozzle;
pub use shallow_water::ShallowWater;
pub use two_layer::TwoLayer;

use thiserror::Error;

use crate::lcd::{eigendecompose, CharBasis, LcdError, Matrix};
use crate::vars::Vars;

/// Time-independent geometry at one point: `value` is σ, Z or φ and
/// `slope` its derivative along the sweep direction (used by integrands).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Geom {
    pub value: f64,
    pub slope: f64,
}

impl Geom {
    pub fn new(value: f64, slope: f64) -> Self {
        Geom { value, slope }
    }

    pub fn flat(value: f64) -> Self {
        Geom { value, slope: 0.0 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("non-finite state component")]
    NonFinite,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecoveryError {
    /// The equilibrium values admit no state on the requested branch; the
    /// fallback is the nearest admissible (sonic or critical) state.
    #[error("no admissible root for the equilibrium values")]
    NoRoot { fallback: Vars },
    #[error("recovery iteration diverged")]
    Diverged { fallback: Vars },
    #[error("invalid recovery input: {0}")]
    BadInput(#[from] StateError),
}

impl RecoveryError {
    pub fn fallback(&self) -> Option<Vars> {
        match self {
            RecoveryError::NoRoot { fallback } | RecoveryError::Diverged { fallback } => {
                Some(*fallback)
            }
            RecoveryError::BadInput(_) => None,
        }
    }
}

pub trait BalanceLaw: Send + Sync {
    fn dim(&self) -> usize;

    fn name(&self) -> &'static str;

    fn conserved_names(&self) -> &'static [&'static str];

    fn equilibrium_names(&self) -> &'static [&'static str];

    /// Components that change sign under reflection.
    fn odd_components(&self) -> Vec<bool>;

    fn check_state(&self, u: &Vars, g: &Geom) -> Result<(), StateError>;

    fn flux(&self, u: &Vars, g: &Geom) -> Vars;

    /// Smallest and largest characteristic speeds.
    fn speeds(&self, u: &Vars, g: &Geom) -> Result<(f64, f64), StateError>;

    /// Whether the equilibrium variables contain a running integral.
    fn has_integrand(&self) -> bool {
        false
    }

    /// Pointwise integrand of the running integral.
    fn integrand(&self, _u: &Vars, _g: &Geom) -> f64 {
        0.0
    }

    fn equilibrium(&self, u: &Vars, g: &Geom, integral: f64) -> Vars;

    /// Inverts [`BalanceLaw::equilibrium`], picking the root in the same
    /// flow regime as `reference`.
    fn recover(
        &self,
        e: &Vars,
        g: &Geom,
        integral: f64,
        reference: &Vars,
    ) -> Result<Vars, RecoveryError>;

    /// `(∂E/∂U) M` with the local part of E.
    fn c_matrix(&self, u: &Vars, g: &Geom) -> Matrix;

    /// Basis for the characteristic decomposition of E.
    fn char_basis(&self, u: &Vars, g: &Geom) -> Result<CharBasis, LcdError> {
        eigendecompose(&self.c_matrix(u, g))
    }

    /// `∂F/∂U - B`.
    fn quasilinear_matrix(&self, u: &Vars, g: &Geom) -> Matrix;

    /// `K^-_{j+1/2} - K^+_{j-1/2}` over one cell from the five quarter-cell
    /// nodes; `flux_jump` is `F(U^-_{j+1/2}) - F(U^+_{j-1/2})`.
    fn cell_increment(&self, u_nodes: &[Vars; 5], e_nodes: &[Vars; 5], flux_jump: &Vars) -> Vars;

    /// Whether `cell_increment` reads the quarter-point states.
    fn needs_quarter_states(&self) -> bool {
        false
    }

    /// Nonconservative path integral between two hatted interface states.
    fn path_term(&self, _left: &Vars, _right: &Vars) -> Vars {
        Vars::ZERO
    }

    /// Variables that are constant at rest, interpolated by the
    /// conservative-variable scheme.
    fn rest_variables(&self, u: &Vars, _g: &Geom) -> Vars {
        *u
    }

    fn from_rest_variables(&self, v: &Vars, _g: &Geom) -> Vars {
        *v
    }
}

/// Real eigenvalue extremes of a model matrix, widened by any imaginary part.
pub(crate) fn spectral_bounds(m: &Matrix) -> (f64, f64) {
    let dm = nalgebra::DMatrix::from_fn(m.dim, m.dim, |r, c| m.a[r][c]);
    let eig = dm.complex_eigenvalues();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for z in eig.iter() {
        lo = lo.min(z.re - z.im.abs());
        hi = hi.max(z.re + z.im.abs());
    }
    (lo, hi)
}

/// Solves `a / x^2 + b x^k = target` for `x > 0` on one monotone branch of
/// the convex left-hand side. The minimum sits at
/// `x_s = (2a / (k b))^(1/(k+2))`; `low_branch` selects `x < x_s`.
/// Returns `Err(x_s)` when the target lies below the minimum.
pub(crate) fn solve_energy_branch(
    a: f64,
    b: f64,
    k: f64,
    target: f64,
    low_branch: bool,
) -> Result<f64, f64> {
    let phi = |x: f64| a / (x * x) + b * x.powf(k);
    let dphi = |x: f64| -2.0 * a / (x * x * x) + k * b * x.powf(k - 1.0);
    if a == 0.0 {
        if target <= 0.0 {
            return Err(f64::MIN_POSITIVE);
        }
        return Ok((target / b).powf(1.0 / k));
    }
    let xs = (2.0 * a / (k * b)).powf(1.0 / (k + 2.0));
    let fmin = phi(xs);
    if target < fmin {
        return Err(xs);
    }
    if target == fmin {
        return Ok(xs);
    }
    let (mut lo, mut hi) = if low_branch {
        let mut lo = 0.5 * xs;
        while phi(lo) < target {
            lo *= 0.5;
        }
        (lo, xs)
    } else {
        let mut hi = 2.0 * xs;
        while phi(hi) < target {
            hi *= 2.0;
        }
        (xs, hi)
    };
    // Bisection-safeguarded Newton on g(x) = phi(x) - target.
    let mut x = if low_branch {
        // a / x^2 dominates far down the low branch.
        (a / target).sqrt().clamp(lo, hi)
    } else {
        (target / b).powf(1.0 / k).clamp(lo, hi)
    };
    for _ in 0..200 {
        let g = phi(x) - target;
        if g == 0.0 {
            return Ok(x);
        }
        let inside_low = if low_branch { g > 0.0 } else { g < 0.0 };
        if inside_low {
            lo = x;
        } else {
            hi = x;
        }
        let d = dphi(x);
        let mut next = x - g / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x {
            return Ok(next);
        }
        x = next;
        if hi - lo <= 4e-16 * hi {
            return Ok(x);
        }
    }
    Ok(x)
}

//! Fixed-capacity state vectors shared by all model systems.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

/// Largest state dimension of any supported system.
pub const MAX_VARS: usize = 4;

/// A state, flux or equilibrium vector. Components past the model
/// dimension are kept at zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vars(pub [f64; MAX_VARS]);

impl Vars {
    pub const ZERO: Vars = Vars([0.0; MAX_VARS]);

    pub fn from_slice(values: &[f64]) -> Self {
        let mut out = [0.0; MAX_VARS];
        out[..values.len()].copy_from_slice(values);
        Vars(out)
    }

    pub fn splat(value: f64, dim: usize) -> Self {
        let mut out = Vars::ZERO;
        for k in 0..dim {
            out.0[k] = value;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Swaps two components, used to run y-sweeps through x-sweep code.
    pub fn swapped(mut self, a: usize, b: usize) -> Self {
        self.0.swap(a, b);
        self
    }
}

impl Index<usize> for Vars {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl IndexMut<usize> for Vars {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.0[k]
    }
}

impl Add for Vars {
    type Output = Vars;
    fn add(mut self, rhs: Vars) -> Vars {
        self += rhs;
        self
    }
}

impl AddAssign for Vars {
    fn add_assign(&mut self, rhs: Vars) {
        for k in 0..MAX_VARS {
            self.0[k] += rhs.0[k];
        }
    }
}

impl Sub for Vars {
    type Output = Vars;
    fn sub(mut self, rhs: Vars) -> Vars {
        self -= rhs;
        self
    }
}

impl SubAssign for Vars {
    fn sub_assign(&mut self, rhs: Vars) {
        for k in 0..MAX_VARS {
            self.0[k] -= rhs.0[k];
        }
    }
}

impl Mul<f64> for Vars {
    type Output = Vars;
    fn mul(mut self, s: f64) -> Vars {
        for v in self.0.iter_mut() {
            *v *= s;
        }
        self
    }
}

impl Neg for Vars {
    type Output = Vars;
    fn neg(self) -> Vars {
        self * -1.0
    }
}

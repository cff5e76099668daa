//! Fifth-order running integrals of pointwise integrands along a line.
//!
//! Works on storage-indexed lines (see [`crate::mesh`]). The anchor is the
//! face three cells left of the first interior cell; the center ladder is
//! defined on storage cells `2..=len-3` and the face ladder on faces
//! `2..=len-3`. Entries outside those ranges are NaN.

use crate::aiweno::interpolate_all;

/// Lowest storage index carrying a running integral.
pub const FIRST_INTEGRAL: usize = 2;

/// Integral over the left half of a cell from five equispaced samples
/// covering the whole cell.
pub fn seed_integral(dx: f64, f: [f64; 5]) -> f64 {
    dx / 360.0 * (29.0 * f[0] + 124.0 * f[1] + 24.0 * f[2] + 4.0 * f[3] - f[4])
}

/// Boole's rule over an interval of width `dx` sampled at five equispaced points.
pub fn boole(dx: f64, f: [f64; 5]) -> f64 {
    dx / 90.0 * (7.0 * f[0] + 32.0 * f[1] + 12.0 * f[2] + 32.0 * f[3] + 7.0 * f[4])
}

/// Steps the center ladder over `[x_{j-1}, x_j]`; samples at
/// `x_{j-1}, x_{j-3/4}, x_{j-1/2}, x_{j-1/4}, x_j`.
pub fn advance_center(prev: f64, dx: f64, f: [f64; 5]) -> f64 {
    prev + boole(dx, f)
}

/// Steps the face ladder over cell `j`; samples at
/// `x_{j-1/2}^+, x_{j-1/4}, x_j, x_{j+1/4}, x_{j+1/2}^-`.
pub fn advance_interface(prev: f64, dx: f64, f: [f64; 5]) -> f64 {
    prev + boole(dx, f)
}

/// One-sided and central five-point first-derivative rows on quarter-cell
/// nodes, in units of `1 / (12 h)`.
const NODE_DERIVATIVE: [[f64; 5]; 5] = [
    [-25.0, 48.0, -36.0, 16.0, -3.0],
    [-3.0, -10.0, 18.0, -6.0, 1.0],
    [1.0, -8.0, 0.0, 8.0, -1.0],
    [-1.0, 6.0, -18.0, 10.0, 3.0],
    [3.0, -16.0, 36.0, -48.0, 25.0],
];

/// Boole approximation of the integral of `a * db/dx` over one cell, from
/// values at the five quarter-cell nodes. The cell width cancels.
pub fn product_derivative_integral(a: [f64; 5], b: [f64; 5]) -> f64 {
    const W: [f64; 5] = [7.0, 32.0, 12.0, 32.0, 7.0];
    let mut acc = 0.0;
    for k in 0..5 {
        let mut d = 0.0;
        for l in 0..5 {
            if l != 2 {
                d += NODE_DERIVATIVE[k][l] * (b[l] - b[2]);
            }
        }
        acc += W[k] * a[k] * d;
    }
    acc * 4.0 / (90.0 * 12.0)
}

/// Integrand samples on one line: centers plus Ai-WENO values at the four
/// in-cell offsets for every cell with a full stencil.
#[derive(Clone, Debug)]
pub struct IntegrandSamples {
    pub center: Vec<f64>,
    /// `[f(-1/2), f(-1/4), f(+1/4), f(+1/2)]` per storage cell.
    pub offsets: Vec<[f64; 4]>,
}

impl IntegrandSamples {
    pub fn new(center: &[f64]) -> Self {
        let n = center.len();
        let mut offsets = vec![[f64::NAN; 4]; n];
        for i in 2..n.saturating_sub(2) {
            let st = [center[i - 2], center[i - 1], center[i], center[i + 1], center[i + 2]];
            offsets[i] = interpolate_all(&st);
        }
        IntegrandSamples {
            center: center.to_vec(),
            offsets,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunningIntegrals {
    /// Center ladder, storage-indexed.
    pub center: Vec<f64>,
    /// Face ladder, face-indexed (`len + 1` entries).
    pub face: Vec<f64>,
}

impl RunningIntegrals {
    /// All-zero ladders for integrand-free models.
    pub fn zero(len: usize) -> Self {
        RunningIntegrals {
            center: vec![0.0; len],
            face: vec![0.0; len + 1],
        }
    }

    pub fn from_samples(s: &IntegrandSamples, dx: f64) -> Self {
        let n = s.center.len();
        let mut center = vec![f64::NAN; n];
        let mut face = vec![f64::NAN; n + 1];
        let lo = FIRST_INTEGRAL;
        let hi = n - 3;
        let o = &s.offsets;
        let f = &s.center;
        center[lo] = seed_integral(dx, [o[lo][0], o[lo][1], f[lo], o[lo][2], o[lo][3]]);
        for i in lo + 1..=hi {
            let half = 0.5 * (o[i - 1][3] + o[i][0]);
            center[i] = advance_center(center[i - 1], dx, [f[i - 1], o[i - 1][2], half, o[i][1], f[i]]);
        }
        face[lo] = 0.0;
        for i in lo..hi {
            face[i + 1] = advance_interface(face[i], dx, [o[i][0], o[i][1], f[i], o[i][2], o[i][3]]);
        }
        RunningIntegrals { center, face }
    }

    pub fn from_integrand(f: &[f64], dx: f64) -> Self {
        Self::from_samples(&IntegrandSamples::new(f), dx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn product_integral_is_exact_for_low_degree() {
        let dx = 0.2;
        let x0 = 1.1;
        let nodes = [0.0, 0.25, 0.5, 0.75, 1.0].map(|t| x0 + t * dx);
        let a = nodes.map(|x| 2.0 + x);
        let b = nodes.map(|x| x * x);
        // integral of (2 + x) * 2x
        let prim = |x: f64| 2.0 * x * x + 2.0 * x.powi(3) / 3.0;
        let exact = prim(x0 + dx) - prim(x0);
        assert!((product_derivative_integral(a, b) - exact).abs() < 1e-14);
        assert_eq!(product_derivative_integral(a, [3.0; 5]), 0.0);
    }

    #[test]
    fn weight_sums() {
        assert_eq!(seed_integral(1.0, [1.0; 5]), 0.5);
        assert_eq!(boole(1.0, [1.0; 5]), 1.0);
        assert_eq!(seed_integral(0.3, [0.0; 5]), 0.0);
    }

    #[test]
    fn quartic_exactness() {
        let a = 0.4;
        let dx = 0.3;
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x + 3.0 * x.powi(4);
        let prim = |x: f64| x - x * x + 0.125 * x.powi(4) + 0.6 * x.powi(5);
        let nodes = [0.0, 0.25, 0.5, 0.75, 1.0].map(|t| p(a + t * dx));
        assert!(rel(seed_integral(dx, nodes), prim(a + 0.5 * dx) - prim(a)) < 1e-13);
        assert!(rel(boole(dx, nodes), prim(a + dx) - prim(a)) < 1e-13);
    }

    #[test]
    fn ladders_on_smooth_integrand() {
        let n = 60;
        let dx = 1.0 / n as f64;
        let len = n + 10;
        let x = |i: usize| (i as f64 - 5.0 + 0.5) * dx;
        let f: Vec<f64> = (0..len).map(|i| x(i).cos()).collect();
        let ladders = RunningIntegrals::from_integrand(&f, dx);
        let anchor = x(2) - 0.5 * dx;
        for i in 2..len - 2 {
            let exact = x(i).sin() - anchor.sin();
            assert!((ladders.center[i] - exact).abs() < 1e-10, "center {i}");
            let exact_face = (x(i) - 0.5 * dx).sin() - anchor.sin();
            assert!((ladders.face[i] - exact_face).abs() < 1e-10, "face {i}");
        }
        assert!(ladders.center[1].is_nan());
        assert!(ladders.face[len - 1].is_nan());
    }

    #[test]
    fn zero_and_unit_integrands() {
        let len = 20;
        let z = RunningIntegrals::from_integrand(&vec![0.0; len], 0.1);
        assert!(z.face[2..len - 2].iter().all(|v| *v == 0.0));
        let one = RunningIntegrals::from_integrand(&vec![1.0; len], 0.1);
        for k in 3..len - 2 {
            assert!((one.face[k] - one.face[k - 1] - 0.1).abs() < 1e-15);
        }
    }

    #[test]
    fn nondecreasing_for_positive_integrand() {
        let len = 30;
        let f: Vec<f64> = (0..len).map(|i| if i < 15 { 0.1 } else { 2.0 }).collect();
        let l = RunningIntegrals::from_integrand(&f, 0.05);
        for i in 3..len - 2 {
            assert!(l.center[i] >= l.center[i - 1]);
        }
    }
}

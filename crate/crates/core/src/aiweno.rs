//! Fifth-order affine-invariant WENO-Z interpolation of point values.
//!
//! A five-point stencil `f[0..5]` sits at offsets `-2..=2` (in cell widths)
//! around the center cell. Values are produced at `s = ±1/2` and `s = ±1/4`.

use std::sync::OnceLock;

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

const WENO_EPS: f64 = 1e-12;
const FLAT_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error("non-finite value in interpolation stencil")]
    NonFinite,
    #[error("unsupported interpolation offset {0}")]
    UnsupportedOffset(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Offset {
    MinusHalf,
    MinusQuarter,
    PlusQuarter,
    PlusHalf,
}

impl Offset {
    /// Order used by [`interpolate_all`].
    pub const ALL: [Offset; 4] = [
        Offset::MinusHalf,
        Offset::MinusQuarter,
        Offset::PlusQuarter,
        Offset::PlusHalf,
    ];

    pub fn value(self) -> f64 {
        match self {
            Offset::MinusHalf => -0.5,
            Offset::MinusQuarter => -0.25,
            Offset::PlusQuarter => 0.25,
            Offset::PlusHalf => 0.5,
        }
    }

    pub fn from_value(s: f64) -> Result<Self, InterpError> {
        Offset::ALL
            .into_iter()
            .find(|o| o.value() == s)
            .ok_or(InterpError::UnsupportedOffset(s))
    }

    fn slot(self) -> usize {
        self as usize
    }
}

struct Tables {
    /// Quadratic sub-stencil weights: `sub[offset][stencil][k]` multiplies `f[stencil + k]`.
    sub: [[[f64; 3]; 3]; 4],
    /// Degree-4 interpolant weights on the full stencil.
    full: [[f64; 5]; 4],
    linear: [[f64; 3]; 4],
}

fn lagrange_weights<const N: usize>(nodes: [f64; N], s: f64) -> [f64; N] {
    let mut w = [0.0; N];
    for (a, wa) in w.iter_mut().enumerate() {
        let mut p = 1.0;
        for b in 0..N {
            if b != a {
                p *= (s - nodes[b]) / (nodes[a] - nodes[b]);
            }
        }
        *wa = p;
    }
    w
}

/// Solves for the weights that make the sub-stencil blend reproduce the
/// cubic and quartic monomials at `s`, which pins the blend to the
/// degree-4 interpolant.
fn moment_matching(sub: &[[f64; 3]; 3], s: f64) -> [f64; 3] {
    let blend = |i: usize, power: i32| -> f64 {
        (0..3)
            .map(|k| sub[i][k] * ((i + k) as f64 - 2.0).powi(power))
            .sum()
    };
    let a = Matrix3::new(
        1.0,
        1.0,
        1.0,
        blend(0, 3),
        blend(1, 3),
        blend(2, 3),
        blend(0, 4),
        blend(1, 4),
        blend(2, 4),
    );
    let b = Vector3::new(1.0, s.powi(3), s.powi(4));
    let g = a.lu().solve(&b).expect("moment matching system is regular");
    [g[0], g[1], g[2]]
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut sub = [[[0.0; 3]; 3]; 4];
        let mut full = [[0.0; 5]; 4];
        let mut linear = [[0.0; 3]; 4];
        for o in Offset::ALL {
            let s = o.value();
            for i in 0..3 {
                let base = i as f64 - 2.0;
                sub[o.slot()][i] = lagrange_weights([base, base + 1.0, base + 2.0], s);
            }
            full[o.slot()] = lagrange_weights([-2.0, -1.0, 0.0, 1.0, 2.0], s);
            linear[o.slot()] = moment_matching(&sub[o.slot()], s);
        }
        Tables { sub, full, linear }
    })
}

/// Linear weights of the three quadratic sub-stencils at `s`.
pub fn linear_weights(s: Offset) -> [f64; 3] {
    tables().linear[s.slot()]
}

/// Weights of the degree-4 interpolant through all five points.
pub fn full_weights(s: Offset) -> [f64; 5] {
    tables().full[s.slot()]
}

/// Jiang–Shu smoothness indicators of the three sub-stencils.
pub fn smoothness_indicators(f: &[f64; 5]) -> [f64; 3] {
    let sq = |v: f64| v * v;
    [
        13.0 / 12.0 * sq(f[0] - 2.0 * f[1] + f[2]) + 0.25 * sq(f[0] - 4.0 * f[1] + 3.0 * f[2]),
        13.0 / 12.0 * sq(f[1] - 2.0 * f[2] + f[3]) + 0.25 * sq(f[1] - f[3]),
        13.0 / 12.0 * sq(f[2] - 2.0 * f[3] + f[4]) + 0.25 * sq(3.0 * f[2] - 4.0 * f[3] + f[4]),
    ]
}

/// Degree-4 interpolant, written around the center value so that constant
/// stencils come back bit-exact.
pub fn linear_interpolant(f: &[f64; 5], s: Offset) -> f64 {
    let c = &tables().full[s.slot()];
    let center = f[2];
    let mut acc = 0.0;
    for k in 0..5 {
        if k != 2 {
            acc += c[k] * (f[k] - center);
        }
    }
    center + acc
}

struct Normalized {
    mean: f64,
    scale: f64,
    z: [f64; 5],
    beta: [f64; 3],
}

fn normalize(f: &[f64; 5]) -> Option<Normalized> {
    let center = f[2];
    let mean = center + f.iter().map(|v| v - center).sum::<f64>() / 5.0;
    let scale = f.iter().fold(0.0_f64, |m, v| m.max((v - mean).abs()));
    if scale <= FLAT_TOL * (1.0 + mean.abs()) {
        return None;
    }
    let mut z = [0.0; 5];
    for k in 0..5 {
        z[k] = (f[k] - mean) / scale;
    }
    let beta = smoothness_indicators(&z);
    Some(Normalized { mean, scale, z, beta })
}

fn weights_from(beta: &[f64; 3], s: Offset) -> [f64; 3] {
    let gamma = &tables().linear[s.slot()];
    let tau = (beta[0] - beta[2]).abs();
    let mut w = [0.0; 3];
    let mut total = 0.0;
    for i in 0..3 {
        let r = tau / (beta[i] + WENO_EPS);
        w[i] = gamma[i] * (1.0 + r * r);
        total += w[i];
    }
    for wi in w.iter_mut() {
        *wi /= total;
    }
    w
}

fn blend(n: &Normalized, s: Offset) -> f64 {
    let t = tables();
    let w = weights_from(&n.beta, s);
    let sub = &t.sub[s.slot()];
    let mut acc = 0.0;
    for i in 0..3 {
        let p = sub[i][0] * n.z[i] + sub[i][1] * n.z[i + 1] + sub[i][2] * n.z[i + 2];
        acc += w[i] * p;
    }
    n.mean + n.scale * acc
}

/// Nonlinear weights used at `s`; the linear weights on flat stencils.
pub fn nonlinear_weights(f: &[f64; 5], s: Offset) -> [f64; 3] {
    match normalize(f) {
        Some(n) => weights_from(&n.beta, s),
        None => linear_weights(s),
    }
}

pub fn interpolate(f: &[f64; 5], s: Offset) -> Result<f64, InterpError> {
    if !f.iter().all(|v| v.is_finite()) {
        return Err(InterpError::NonFinite);
    }
    Ok(match normalize(f) {
        Some(n) => blend(&n, s),
        None => linear_interpolant(f, s),
    })
}

/// Values at all four offsets in [`Offset::ALL`] order, sharing the
/// normalization and smoothness work. Input must be finite.
pub fn interpolate_all(f: &[f64; 5]) -> [f64; 4] {
    match normalize(f) {
        Some(n) => Offset::ALL.map(|s| blend(&n, s)),
        None => Offset::ALL.map(|s| linear_interpolant(f, s)),
    }
}

/// Values at `s = -1/2` and `s = +1/2` only.
pub fn interpolate_faces(f: &[f64; 5]) -> [f64; 2] {
    match normalize(f) {
        Some(n) => [blend(&n, Offset::MinusHalf), blend(&n, Offset::PlusHalf)],
        None => [
            linear_interpolant(f, Offset::MinusHalf),
            linear_interpolant(f, Offset::PlusHalf),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn half_point_weights() {
        let w = linear_weights(Offset::PlusHalf);
        for (a, b) in w.iter().zip([1.0 / 16.0, 10.0 / 16.0, 5.0 / 16.0]) {
            assert!(close(*a, b, 1e-15), "{w:?}");
        }
        let w = linear_weights(Offset::MinusHalf);
        for (a, b) in w.iter().zip([5.0 / 16.0, 10.0 / 16.0, 1.0 / 16.0]) {
            assert!(close(*a, b, 1e-15), "{w:?}");
        }
    }

    #[test]
    fn quarter_point_weights_are_mirrored() {
        let p = linear_weights(Offset::PlusQuarter);
        let m = linear_weights(Offset::MinusQuarter);
        for i in 0..3 {
            assert!(close(p[i], m[2 - i], 1e-15));
        }
        assert!(close(p.iter().sum::<f64>(), 1.0, 1e-15));
        for (a, b) in p.iter().zip([7.0 / 64.0, 42.0 / 64.0, 15.0 / 64.0]) {
            assert!(close(*a, b, 1e-15), "{p:?}");
        }
    }

    #[test]
    fn linear_blend_is_the_quartic_interpolant() {
        let f = [0.3, -1.2, 2.5, 0.7, 4.1];
        for s in Offset::ALL {
            let t = tables();
            let g = linear_weights(s);
            let mut blend = 0.0;
            for i in 0..3 {
                blend += g[i] * (0..3).map(|k| t.sub[s.slot()][i][k] * f[i + k]).sum::<f64>();
            }
            assert!(close(blend, linear_interpolant(&f, s), 1e-13));
        }
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(smoothness_indicators(&[2.0; 5]), [0.0; 3]);
        let b = smoothness_indicators(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        for v in b {
            assert!(close(v, 1.0, 1e-15));
        }
        let b = smoothness_indicators(&[0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(close(b[0], 13.0 / 12.0 + 9.0 / 4.0, 1e-15));
        assert!(close(b[1], 13.0 / 3.0, 1e-15));
        assert!(close(b[2], 13.0 / 12.0 + 9.0 / 4.0, 1e-15));
    }

    #[test]
    fn constants_and_lines() {
        for s in Offset::ALL {
            assert_eq!(interpolate(&[3.7; 5], s).unwrap(), 3.7);
        }
        let x0 = 1.3;
        let dx = 0.1;
        let f = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k: f64| x0 + k * dx);
        assert!(close(interpolate(&f, Offset::PlusHalf).unwrap(), x0 + 0.5 * dx, 1e-15));
    }

    #[test]
    fn quartic_samples_on_fine_stencil() {
        let x0 = 0.7;
        let dx = 1e-3;
        let f = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k: f64| (x0 + k * dx).powi(4));
        let exact = (x0 + 0.25 * dx).powi(4);
        let got = interpolate(&f, Offset::PlusQuarter).unwrap();
        assert!(close(got, exact, 1e-12), "{got} vs {exact}");
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            interpolate(&[0.0, f64::NAN, 0.0, 0.0, 0.0], Offset::PlusHalf),
            Err(InterpError::NonFinite)
        );
        assert_eq!(Offset::from_value(0.3), Err(InterpError::UnsupportedOffset(0.3)));
        assert_eq!(Offset::from_value(-0.25), Ok(Offset::MinusQuarter));
    }

    #[test]
    fn spike_pushes_weight_away() {
        let f = [0.0, 0.0, 0.0, 0.0, 1.0];
        let w = nonlinear_weights(&f, Offset::PlusHalf);
        assert!(w[2] < 1e-6, "{w:?}");
    }

    #[test]
    fn all_matches_single() {
        let f = [0.1, 0.4, -0.3, 2.0, 1.9];
        let all = interpolate_all(&f);
        for (k, s) in Offset::ALL.iter().enumerate() {
            assert_eq!(all[k], interpolate(&f, *s).unwrap());
        }
        let faces = interpolate_faces(&f);
        assert_eq!(faces[0], all[0]);
        assert_eq!(faces[1], all[3]);
    }

    #[test]
    fn fifth_order_on_sine() {
        let mut errs = vec![];
        for n in [20, 40, 80, 160] {
            let dx = 1.0 / n as f64;
            let mut e: f64 = 0.0;
            for j in 0..n {
                let x = j as f64 * dx;
                let f = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k: f64| (x + k * dx).sin());
                let v = interpolate(&f, Offset::PlusHalf).unwrap();
                e = e.max((v - (x + 0.5 * dx).sin()).abs());
            }
            errs.push(e);
        }
        for w in errs.windows(2) {
            let r = w[0] / w[1];
            assert!((25.0..=40.0).contains(&r), "{errs:?}");
        }
    }

    proptest! {
        #[test]
        fn affine_equivariance(
            f in prop::array::uniform5(-10.0f64..10.0),
            scale_pow in prop::sample::select(vec![-8i32, 0, 8]),
            shift in -5.0f64..5.0,
        ) {
            let lam = 10f64.powi(scale_pow);
            let g = f.map(|v| lam * v + shift);
            for s in Offset::ALL {
                let a = interpolate(&f, s).unwrap();
                let b = interpolate(&g, s).unwrap();
                let expect = lam * a + shift;
                let tol = 1e-12 * (expect.abs() + lam * f.iter().fold(0.0f64, |m, v| m.max(v.abs())) + shift.abs());
                prop_assert!((b - expect).abs() <= tol, "{} vs {}", b, expect);
            }
        }

        #[test]
        fn quadratics_are_exact(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
            let p = |x: f64| a + b * x + c * x * x;
            let f = [-2.0, -1.0, 0.0, 1.0, 2.0].map(p);
            for s in Offset::ALL {
                let v = interpolate(&f, s).unwrap();
                prop_assert!((v - p(s.value())).abs() <= 1e-12 * (1.0 + a.abs() + b.abs() + c.abs()) * 10.0);
            }
        }

        #[test]
        fn bounded_output(f in prop::array::uniform5(-1e3f64..1e3)) {
            let lo = f.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let span = hi - lo;
            for s in Offset::ALL {
                let v = interpolate(&f, s).unwrap();
                prop_assert!(v.is_finite());
                prop_assert!(v >= lo - span && v <= hi + span);
            }
        }
    }
}

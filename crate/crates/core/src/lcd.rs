//! Local characteristic decomposition of equilibrium-variable stencils.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::vars::{Vars, MAX_VARS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LcdError {
    #[error("complex eigenvalues (imaginary part {imag:e})")]
    HyperbolicityLost { imag: f64 },
    #[error("eigendecomposition failed: {0}")]
    Numerical(&'static str),
}

/// Small dense square matrix stored in fixed capacity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    pub a: [[f64; MAX_VARS]; MAX_VARS],
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            a: [[0.0; MAX_VARS]; MAX_VARS],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.a[k][k] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), rows.len(), "matrix must be square");
            m.a[r][..row.len()].copy_from_slice(row);
        }
        m
    }

    pub fn mul_vec(&self, v: &Vars) -> Vars {
        let mut out = Vars::ZERO;
        for r in 0..self.dim {
            let mut acc = 0.0;
            for c in 0..self.dim {
                acc += self.a[r][c] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.a[r][c] = (0..self.dim).map(|k| self.a[r][k] * other.a[k][c]).sum();
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                m = m.max(self.a[r][c].abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| self.a[r][c].is_finite()))
    }

    fn to_dmatrix(self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.a[r][c])
    }

    fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let mut out = Matrix::zeros(m.nrows());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                out.a[r][c] = m[(r, c)];
            }
        }
        out
    }
}

/// Right eigenvectors (columns of `q`), their inverse and the eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharBasis {
    pub q: Matrix,
    pub q_inv: Matrix,
    pub eigenvalues: Vars,
}

impl CharBasis {
    pub fn identity(dim: usize) -> Self {
        CharBasis {
            q: Matrix::identity(dim),
            q_inv: Matrix::identity(dim),
            eigenvalues: Vars::ZERO,
        }
    }

    pub fn dim(&self) -> usize {
        self.q.dim
    }

    /// Largest violation of `Q Q^-1 = I` and `C = Q Λ Q^-1`, each scaled by
    /// its tolerance, so a value `<= 1` means both invariants hold.
    pub fn invariant_defect(&self, c: &Matrix) -> f64 {
        let d = self.dim();
        let qq = self.q.mul(&self.q_inv);
        let mut inv_err: f64 = 0.0;
        for r in 0..d {
            for col in 0..d {
                let target = if r == col { 1.0 } else { 0.0 };
                inv_err = inv_err.max((qq.a[r][col] - target).abs());
            }
        }
        let inv_tol = 1e-12 * (self.q.max_abs() * self.q_inv.max_abs()).max(1.0);
        let mut lam_qinv = self.q_inv;
        for r in 0..d {
            for col in 0..d {
                lam_qinv.a[r][col] *= self.eigenvalues[r];
            }
        }
        let rebuilt = self.q.mul(&lam_qinv);
        let mut rec_err: f64 = 0.0;
        for r in 0..d {
            for col in 0..d {
                rec_err = rec_err.max((rebuilt.a[r][col] - c.a[r][col]).abs());
            }
        }
        let rec_tol = 1e-10 * (1.0 + c.max_abs());
        (inv_err / inv_tol).max(rec_err / rec_tol)
    }
}

/// Real eigendecomposition with eigenvalues ascending and unit max-norm
/// eigenvector columns.
///
/// Eigenvalues come from the real Schur form. Each eigenvector is the right
/// singular vector of `C - λI` for its smallest singular value; a cluster
/// of `k` (numerically) repeated eigenvalues takes the `k` smallest.
pub fn eigendecompose(c: &Matrix) -> Result<CharBasis, LcdError> {
    let d = c.dim;
    if !c.is_finite() {
        return Err(LcdError::Numerical("non-finite matrix"));
    }
    let dm = c.to_dmatrix();
    let schur = dm
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or(LcdError::Numerical("Schur iteration did not converge"))?;
    let eig = schur.complex_eigenvalues();
    let radius = eig.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
    let imag = eig.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
    if imag > 1e-8 * (1.0 + radius) {
        return Err(LcdError::HyperbolicityLost { imag });
    }
    let mut lam: Vec<f64> = eig.iter().map(|z| z.re).collect();
    lam.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let scale = 1.0 + radius;
    let cluster_tol = 1e-7 * scale;
    let mut q = DMatrix::<f64>::zeros(d, d);
    let mut col = 0;
    while col < d {
        let mut end = col + 1;
        while end < d && lam[end] - lam[end - 1] <= cluster_tol {
            end += 1;
        }
        let k = end - col;
        let mean = lam[col..end].iter().sum::<f64>() / k as f64;
        let shifted = &dm - DMatrix::<f64>::identity(d, d) * mean;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.ok_or(LcdError::Numerical("SVD without right vectors"))?;
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|a, b| {
            svd.singular_values[*a]
                .partial_cmp(&svd.singular_values[*b])
                .expect("finite singular values")
        });
        for (slot, idx) in order.iter().take(k).enumerate() {
            let v = v_t.row(*idx).transpose();
            let norm = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            // Sign fixed by the largest entry so results do not depend on SVD sign choices.
            let pivot = v.iter().cloned().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
            let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
            for r in 0..d {
                q[(r, col + slot)] = sign * v[r] / norm;
            }
        }
        for slot in 0..k {
            lam[col + slot] = if k == 1 { lam[col] } else { mean };
        }
        col = end;
    }
    let q_inv = q
        .clone()
        .try_inverse()
        .ok_or(LcdError::Numerical("eigenvector matrix is singular"))?;
    let mut eigenvalues = Vars::ZERO;
    for (k, v) in lam.iter().enumerate() {
        eigenvalues[k] = *v;
    }
    let basis = CharBasis {
        q: Matrix::from_dmatrix(&q),
        q_inv: Matrix::from_dmatrix(&q_inv),
        eigenvalues,
    };
    if !(basis.invariant_defect(c) <= 1.0) {
        return Err(LcdError::Numerical("decomposition misses its accuracy targets"));
    }
    Ok(basis)
}

/// Projects each stencil entry onto the characteristic basis.
pub fn to_characteristic(basis: &CharBasis, stencil: &[Vars; 5]) -> [Vars; 5] {
    stencil.map(|e| basis.q_inv.mul_vec(&e))
}

/// Maps interpolated characteristic values at the two faces back.
pub fn from_characteristic(basis: &CharBasis, minus: &Vars, plus: &Vars) -> (Vars, Vars) {
    (basis.q.mul_vec(minus), basis.q.mul_vec(plus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aiweno::{interpolate_all, Offset};
    use rand::{Rng, SeedableRng};

    #[test]
    fn diagonal_matrix() {
        let c = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 1.0]]);
        let b = eigendecompose(&c).unwrap();
        assert_eq!(b.eigenvalues[0], 1.0);
        assert_eq!(b.eigenvalues[1], 2.0);
        assert!(b.q.a[1][0].abs() == 1.0 && b.q.a[0][0] == 0.0);
    }

    #[test]
    fn shallow_water_still_state() {
        let c = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let b = eigendecompose(&c).unwrap();
        assert!((b.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((b.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_known_spectrum() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let mut q = Matrix::zeros(4);
            for r in 0..4 {
                for c in 0..4 {
                    q.a[r][c] = rng.gen_range(-1.0..1.0) + if r == c { 2.0 } else { 0.0 };
                }
            }
            let q_inv = Matrix::from_dmatrix(&q.to_dmatrix().try_inverse().unwrap());
            let lam = [-3.0, -0.5, 1.0, 4.0];
            let mut l = Matrix::zeros(4);
            for k in 0..4 {
                l.a[k][k] = lam[k];
            }
            let c = q.mul(&l).mul(&q_inv);
            let b = eigendecompose(&c).unwrap();
            assert!(b.invariant_defect(&c) <= 1.0);
            for k in 0..4 {
                assert!((b.eigenvalues[k] - lam[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn repeated_eigenvalue() {
        let c = Matrix::from_rows(&[
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.5, 0.2, 3.0],
        ]);
        let b = eigendecompose(&c).unwrap();
        assert!(b.invariant_defect(&c) <= 1.0);
    }

    #[test]
    fn rotation_has_no_real_basis() {
        let c = Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!(matches!(
            eigendecompose(&c),
            Err(LcdError::HyperbolicityLost { .. })
        ));
    }

    #[test]
    fn identity_basis_is_transparent() {
        let b = CharBasis::identity(3);
        let st = [Vars::from_slice(&[1.0, 2.0, 3.0]); 5];
        assert_eq!(to_characteristic(&b, &st), st);
        let two = CharBasis {
            q: Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 2.0]]),
            q_inv: Matrix::from_rows(&[&[0.5, 0.0], &[0.0, 0.5]]),
            eigenvalues: Vars::ZERO,
        };
        let (e, _) = from_characteristic(&two, &Vars::from_slice(&[1.0, 1.0]), &Vars::ZERO);
        assert_eq!(e, Vars::from_slice(&[2.0, 2.0]));
        let swap = CharBasis {
            q: Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
            q_inv: Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
            eigenvalues: Vars::ZERO,
        };
        let g = to_characteristic(&swap, &[Vars::from_slice(&[1.0, 2.0]); 5]);
        assert_eq!(g[0], Vars::from_slice(&[2.0, 1.0]));
    }

    #[test]
    fn constant_stencil_round_trip() {
        let c = Matrix::from_rows(&[
            &[0.3, 1.2, 0.0, 0.1],
            &[9.0, 0.3, 9.0, 0.0],
            &[0.0, 0.0, 0.25, 1.1],
            &[8.8, 0.0, 9.0, 0.25],
        ]);
        let b = eigendecompose(&c).unwrap();
        let e = Vars::from_slice(&[12.0, 49.7, 10.0, 48.9]);
        let g = to_characteristic(&b, &[e; 5]);
        let mut lo = Vars::ZERO;
        let mut hi = Vars::ZERO;
        for k in 0..4 {
            let v = interpolate_all(&[g[0][k], g[1][k], g[2][k], g[3][k], g[4][k]]);
            lo[k] = v[0];
            hi[k] = v[3];
        }
        let (em, ep) = from_characteristic(&b, &lo, &hi);
        for k in 0..4 {
            assert!((em[k] - e[k]).abs() <= 1e-13 * e[k].abs());
            assert!((ep[k] - e[k]).abs() <= 1e-13 * e[k].abs());
        }
        let _ = Offset::ALL;
    }

    #[test]
    fn dense_multiply_oracle() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let mut q = Matrix::zeros(3);
        for r in 0..3 {
            for c in 0..3 {
                q.a[r][c] = rng.gen_range(-2.0..2.0);
            }
        }
        let b = CharBasis {
            q,
            q_inv: Matrix::identity(3),
            eigenvalues: Vars::ZERO,
        };
        let g = Vars::from_slice(&[0.3, -1.0, 2.0]);
        let (e, _) = from_characteristic(&b, &g, &g);
        for r in 0..3 {
            let expect: f64 = (0..3).map(|c| q.a[r][c] * g[c]).sum();
            assert_eq!(e[r], expect);
        }
    }
}

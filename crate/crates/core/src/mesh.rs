//! Uniform cell-centered grids with ghost layers.
//!
//! Storage index `i` runs over `0..n_cells + 2 * GHOST_WIDTH`; the interior
//! occupies `GHOST_WIDTH..GHOST_WIDTH + n_cells`. Face `k` separates storage
//! cells `k - 1` and `k`.

use std::ops::Range;
use std::str::FromStr;

use thiserror::Error;

use crate::vars::Vars;

/// Ghost cells per side: five-point stencils plus the correction stencils.
pub const GHOST_WIDTH: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("grid needs x_max > x_min, got [{0}, {1}]")]
    BadExtent(f64, f64),
    #[error("grid needs at least one cell")]
    NoCells,
    #[error("unknown boundary kind `{0}`")]
    UnknownBoundary(String),
    #[error("boundary condition covers {given} components, field has {needed}")]
    ComponentMismatch { given: usize, needed: usize },
    #[error("field of length {len} cannot hold {ghost} ghost cells per side")]
    TooShort { len: usize, ghost: usize },
    #[error("periodic boundaries must be set on both sides")]
    HalfPeriodic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self, MeshError> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(MeshError::BadExtent(x_min, x_max));
        }
        if n_cells == 0 {
            return Err(MeshError::NoCells);
        }
        Ok(Grid1D {
            x_min,
            x_max,
            n_cells,
            dx: (x_max - x_min) / n_cells as f64,
        })
    }

    pub fn ghost_width(&self) -> usize {
        GHOST_WIDTH
    }

    pub fn len_with_ghosts(&self) -> usize {
        self.n_cells + 2 * GHOST_WIDTH
    }

    pub fn interior(&self) -> Range<usize> {
        GHOST_WIDTH..GHOST_WIDTH + self.n_cells
    }

    /// Center of storage cell `i` (ghosts included).
    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 - GHOST_WIDTH as f64 + 0.5) * self.dx
    }

    /// Position of face `k`, the left face of storage cell `k`.
    pub fn face(&self, k: usize) -> f64 {
        self.x_min + (k as f64 - GHOST_WIDTH as f64) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.len_with_ghosts()).map(|i| self.center(i)).collect()
    }

    pub fn faces(&self) -> Vec<f64> {
        (0..=self.len_with_ghosts()).map(|k| self.face(k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Grid2D { x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryKind {
    /// Zero-order extrapolation.
    Free,
    /// Mirror across the wall; components flagged odd change sign.
    Reflecting,
    /// Every ghost cell holds the given value.
    FixedValue(f64),
    /// Wrap around to the opposite end. Used by the convergence presets.
    Periodic,
}

impl FromStr for BoundaryKind {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "free" => return Ok(BoundaryKind::Free),
            "reflecting" => return Ok(BoundaryKind::Reflecting),
            "periodic" => return Ok(BoundaryKind::Periodic),
            _ => {}
        }
        if let Some(v) = t.strip_prefix("fixed:").or_else(|| t.strip_prefix("fixed=")) {
            if let Ok(value) = v.trim().parse::<f64>() {
                if value.is_finite() {
                    return Ok(BoundaryKind::FixedValue(value));
                }
            }
        }
        Err(MeshError::UnknownBoundary(s.to_string()))
    }
}

/// Boundary kinds per side and per component.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition {
    pub left: Vec<BoundaryKind>,
    pub right: Vec<BoundaryKind>,
    /// Components that flip sign under reflection (momenta).
    pub odd: Vec<bool>,
}

impl BoundaryCondition {
    pub fn uniform(kind: BoundaryKind, dim: usize) -> Self {
        BoundaryCondition {
            left: vec![kind; dim],
            right: vec![kind; dim],
            odd: vec![false; dim],
        }
    }

    pub fn free(dim: usize) -> Self {
        Self::uniform(BoundaryKind::Free, dim)
    }

    pub fn with_odd(mut self, odd: &[bool]) -> Self {
        self.odd = odd.to_vec();
        self
    }

    pub fn dim(&self) -> usize {
        self.left.len()
    }

    pub fn is_periodic(&self) -> bool {
        self.left.iter().chain(&self.right).any(|k| *k == BoundaryKind::Periodic)
    }

    pub fn has_reflecting(&self) -> bool {
        self.left.iter().chain(&self.right).any(|k| *k == BoundaryKind::Reflecting)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        if self.right.len() != self.left.len() || self.odd.len() != self.left.len() {
            return Err(MeshError::ComponentMismatch {
                given: self.right.len().min(self.odd.len()),
                needed: self.left.len(),
            });
        }
        let periodic = |side: &[BoundaryKind]| side.iter().all(|k| *k == BoundaryKind::Periodic);
        if self.is_periodic() && !(periodic(&self.left) && periodic(&self.right)) {
            return Err(MeshError::HalfPeriodic);
        }
        Ok(())
    }
}

/// Fills `ghost` cells at each end of `cells` from the interior.
pub fn fill_ghosts(
    cells: &mut [Vars],
    ghost: usize,
    bc: &BoundaryCondition,
) -> Result<(), MeshError> {
    bc.validate()?;
    let len = cells.len();
    if len < 2 * ghost + 1 {
        return Err(MeshError::TooShort { len, ghost });
    }
    let n = len - 2 * ghost;
    if bc.is_periodic() && n < ghost {
        return Err(MeshError::TooShort { len, ghost });
    }
    let first = ghost;
    let last = ghost + n - 1;
    for c in 0..bc.dim() {
        for g in 0..ghost {
            let left = first - 1 - g;
            cells[left][c] = match bc.left[c] {
                BoundaryKind::Free => cells[first][c],
                BoundaryKind::FixedValue(v) => v,
                BoundaryKind::Reflecting => mirror(cells[(first + g).min(last)][c], bc.odd[c]),
                BoundaryKind::Periodic => cells[last - g][c],
            };
            let right = last + 1 + g;
            cells[right][c] = match bc.right[c] {
                BoundaryKind::Free => cells[last][c],
                BoundaryKind::FixedValue(v) => v,
                BoundaryKind::Reflecting => mirror(cells[last.saturating_sub(g).max(first)][c], bc.odd[c]),
                BoundaryKind::Periodic => cells[first + g][c],
            };
        }
    }
    Ok(())
}

fn mirror(v: f64, odd: bool) -> f64 {
    if odd {
        -v
    } else {
        v
    }
}

/// Copies an interior-only field into a new buffer with ghost layers filled.
pub fn extend_with_ghosts(
    interior: &[Vars],
    ghost: usize,
    bc: &BoundaryCondition,
) -> Result<Vec<Vars>, MeshError> {
    let mut out = vec![Vars::ZERO; interior.len() + 2 * ghost];
    out[ghost..ghost + interior.len()].copy_from_slice(interior);
    fill_ghosts(&mut out, ghost, bc)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(values: &[f64]) -> Vec<Vars> {
        values.iter().map(|v| Vars::from_slice(&[*v])).collect()
    }

    fn first(values: &[Vars]) -> Vec<f64> {
        values.iter().map(|v| v[0]).collect()
    }

    #[test]
    fn spacing_and_positions() {
        let g = Grid1D::new(0.0, 10.0, 200).unwrap();
        assert_eq!(g.dx, 0.05);
        assert!((g.center(GHOST_WIDTH) - 0.025).abs() < 1e-15);
        assert!((g.face(GHOST_WIDTH) - 0.0).abs() < 1e-15);
        assert!((g.face(GHOST_WIDTH + 200) - 10.0).abs() < 1e-12);
        assert_eq!(g.len_with_ghosts(), 210);
        assert!(Grid1D::new(1.0, 1.0, 3).is_err());
        assert!(Grid1D::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn free_copies_the_boundary_cell() {
        let out = extend_with_ghosts(&scalar(&[1.0, 2.0, 3.0]), 2, &BoundaryCondition::free(1)).unwrap();
        assert_eq!(first(&out), vec![1.0, 1.0, 1.0, 2.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn reflecting_mirrors_with_parity() {
        let interior: Vec<Vars> = [(1.0, 0.5), (2.0, 0.7), (3.0, 0.9)]
            .iter()
            .map(|(r, m)| Vars::from_slice(&[*r, *m]))
            .collect();
        let bc = BoundaryCondition::uniform(BoundaryKind::Reflecting, 2).with_odd(&[false, true]);
        let out = extend_with_ghosts(&interior, 2, &bc).unwrap();
        assert_eq!(first(&out), vec![2.0, 1.0, 1.0, 2.0, 3.0, 3.0, 2.0]);
        let m: Vec<f64> = out.iter().map(|v| v[1]).collect();
        assert_eq!(m, vec![-0.7, -0.5, 0.5, 0.7, 0.9, -0.9, -0.7]);
    }

    #[test]
    fn fixed_value_and_free_mix() {
        let interior: Vec<Vars> = [(1.5, 0.0), (1.6, 0.1)]
            .iter()
            .map(|(h, q)| Vars::from_slice(&[*h, *q]))
            .collect();
        let mut bc = BoundaryCondition::free(2);
        bc.left[1] = BoundaryKind::FixedValue(4.42);
        let out = extend_with_ghosts(&interior, 3, &bc).unwrap();
        for g in 0..3 {
            assert_eq!(out[g][1], 4.42);
            assert_eq!(out[g][0], 1.5);
        }
    }

    #[test]
    fn periodic_wraps() {
        let out = extend_with_ghosts(
            &scalar(&[1.0, 2.0, 3.0, 4.0]),
            2,
            &BoundaryCondition::uniform(BoundaryKind::Periodic, 1),
        )
        .unwrap();
        assert_eq!(first(&out), vec![3.0, 4.0, 1.0, 2.0, 3.0, 4.0, 1.0, 2.0]);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("free".parse::<BoundaryKind>().unwrap(), BoundaryKind::Free);
        assert_eq!("Reflecting".parse::<BoundaryKind>().unwrap(), BoundaryKind::Reflecting);
        assert_eq!(
            "fixed:4.42".parse::<BoundaryKind>().unwrap(),
            BoundaryKind::FixedValue(4.42)
        );
        assert!(matches!(
            "sponge".parse::<BoundaryKind>(),
            Err(MeshError::UnknownBoundary(_))
        ));
    }

    #[test]
    fn refill_leaves_interior_alone() {
        let mut out = extend_with_ghosts(&scalar(&[5.0, -1.0, 2.0]), 5, &BoundaryCondition::free(1)).unwrap();
        let before = out.clone();
        fill_ghosts(&mut out, 5, &BoundaryCondition::free(1)).unwrap();
        assert_eq!(out, before);
    }
}

//! Uniform cell-centered grids in one and two dimensions.

use thiserror::Error;

use crate::eos::EosError;
use crate::regularization::RegularizationError;

/// How a grid axis is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    /// Constant state outside the domain: ghost cells are clamped to the
    /// initial edge values and never updated (solutions are expected to keep
    /// their features away from the boundary).
    FarField,
}

/// A uniform grid of cell centers. One-dimensional problems use `ny = 1`;
/// every operator then sees a y-direction with zero variation and the scheme
/// collapses to its 1D form without special cases.
#[derive(Debug, Clone)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
    pub bc_x: BoundaryKind,
    pub bc_y: BoundaryKind,
}

/// Ghost-cell depth carried by padded arrays. Two rings: one consumed by each
/// of the (at most) two nested derivative passes in a right-hand side.
pub const HALO: usize = 2;

impl Grid {
    pub fn new_1d(nx: usize, x0: f64, x1: f64, bc: BoundaryKind) -> Result<Self, SolverError> {
        if nx < 4 {
            return Err(SolverError::BadSetup(format!(
                "need at least 4 cells per axis, got nx = {nx}"
            )));
        }
        if !(x1 > x0) {
            return Err(SolverError::BadSetup(format!("empty extent: [{x0}, {x1}]")));
        }
        Ok(Grid {
            nx,
            ny: 1,
            dx: (x1 - x0) / nx as f64,
            dy: 1.0,
            x0,
            y0: 0.0,
            bc_x: bc,
            bc_y: BoundaryKind::Periodic,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new_2d(
        nx: usize,
        ny: usize,
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
        bc_x: BoundaryKind,
        bc_y: BoundaryKind,
    ) -> Result<Self, SolverError> {
        if nx < 4 || ny < 4 {
            return Err(SolverError::BadSetup(format!(
                "need at least 4 cells per axis, got nx = {nx}, ny = {ny}"
            )));
        }
        if !(x1 > x0) || !(y1 > y0) {
            return Err(SolverError::BadSetup(format!(
                "empty extent: [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Grid {
            nx,
            ny,
            dx: (x1 - x0) / nx as f64,
            dy: (y1 - y0) / ny as f64,
            x0,
            y0,
            bc_x,
            bc_y,
        })
    }

    #[must_use]
    pub fn dim(&self) -> usize {
        if self.ny == 1 {
            1
        } else {
            2
        }
    }

    /// x-coordinate of the center of cell column i.
    #[must_use]
    pub fn xc(&self, i: usize) -> f64 {
        self.x0 + (i as f64 + 0.5) * self.dx
    }

    /// y-coordinate of the center of cell row j.
    #[must_use]
    pub fn yc(&self, j: usize) -> f64 {
        self.y0 + (j as f64 + 0.5) * self.dy
    }

    /// Smallest cell spacing over the active axes.
    #[must_use]
    pub fn h_min(&self) -> f64 {
        if self.dim() == 1 {
            self.dx
        } else {
            self.dx.min(self.dy)
        }
    }

    /// Cell volume (dx in 1D, dx·dy in 2D).
    #[must_use]
    pub fn cell_volume(&self) -> f64 {
        if self.dim() == 1 {
            self.dx
        } else {
            self.dx * self.dy
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("bad solver setup: {0}")]
    BadSetup(String),
    #[error("non-admissible state at t = {t}: {detail}")]
    NonAdmissible { t: f64, detail: String },
    #[error("step failure at t = {t} (step {step}): {reason}")]
    StepFailure { t: f64, step: usize, reason: String },
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error(transparent)]
    Regularization(#[from] RegularizationError),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_construction_and_coordinates() {
        let g = Grid::new_1d(10, -1.0, 1.0, BoundaryKind::Periodic).unwrap();
        assert_eq!(g.dim(), 1);
        assert!((g.dx - 0.2).abs() < 1e-15);
        assert!((g.xc(0) + 0.9).abs() < 1e-15);
        assert!((g.xc(9) - 0.9).abs() < 1e-15);

        // odd cell count puts a cell center exactly at the midpoint
        let g = Grid::new_1d(201, -1.0, 1.0, BoundaryKind::FarField).unwrap();
        assert!(g.xc(100).abs() < 1e-13);
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new_1d(3, 0.0, 1.0, BoundaryKind::Periodic).is_err());
        assert!(Grid::new_1d(8, 1.0, 1.0, BoundaryKind::Periodic).is_err());
        assert!(Grid::new_2d(
            8,
            3,
            0.0,
            1.0,
            0.0,
            1.0,
            BoundaryKind::Periodic,
            BoundaryKind::Periodic
        )
        .is_err());
    }
}

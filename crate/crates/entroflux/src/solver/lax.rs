//! The classic first-order central scheme with built-in grid viscosity.

use crate::eos::EosModel;
use crate::solver::field::{BoundaryValues, ConservedField};
use crate::solver::grid::{Grid, SolverError, HALO};
use crate::solver::rhs::prep_stage;

/// One step of the central scheme
/// `U_i <- (U_{i+1} + U_{i-1}) / 2 - dt (F_{i+1} - F_{i-1}) / (2 dx)`:
/// equivalent to a forward-Euler step of the parabolic regularization with
/// viscosity `dx^2 / (2 dt)`. One-dimensional grids only.
pub fn lax_step(
    field: &ConservedField,
    grid: &Grid,
    bv: &BoundaryValues,
    eos: &EosModel,
    dt: f64,
) -> Result<ConservedField, SolverError> {
    if grid.dim() != 1 {
        return Err(SolverError::BadSetup(
            "the central scheme is one-dimensional".into(),
        ));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SolverError::BadSetup(format!("bad time step {dt}")));
    }
    let prep = prep_stage(field, bv, grid, eos)?;
    let p = &prep.padded;
    let d = &prep.derived;
    let lam = 0.5 * dt / grid.dx;
    let mut out = ConservedField::zeros(grid);
    out.t = field.t + dt;
    let j = HALO;
    for i in 0..grid.nx {
        let l = (i + HALO - 1, j);
        let r = (i + HALO + 1, j);
        out.rho[(i, 0)] = 0.5 * (p.rho[r] + p.rho[l]) - lam * (p.mx[r] - p.mx[l]);
        out.mx[(i, 0)] = 0.5 * (p.mx[r] + p.mx[l])
            - lam * ((d.ux[r] * p.mx[r] + d.p[r]) - (d.ux[l] * p.mx[l] + d.p[l]));
        out.my[(i, 0)] = 0.5 * (p.my[r] + p.my[l]) - lam * (d.ux[r] * p.my[r] - d.ux[l] * p.my[l]);
        out.en[(i, 0)] = 0.5 * (p.en[r] + p.en[l])
            - lam * (d.ux[r] * (p.en[r] + d.p[r]) - d.ux[l] * (p.en[l] + d.p[l]));
    }
    Ok(out)
}

//! Conserved fields, ghost-cell padding, and pointwise derived quantities.

use ndarray::Array2;

use crate::eos::EosModel;
use crate::solver::grid::{BoundaryKind, Grid, SolverError, HALO};

/// Cell averages of the conserved variables (density, momentum, total
/// energy), stamped with the simulation time they belong to. Arrays are
/// indexed `(i, j)` with `i` along x; one-dimensional fields have `ny = 1`.
#[derive(Debug, Clone)]
pub struct ConservedField {
    pub rho: Array2<f64>,
    pub mx: Array2<f64>,
    pub my: Array2<f64>,
    pub en: Array2<f64>,
    pub t: f64,
}

impl ConservedField {
    #[must_use]
    pub fn zeros(grid: &Grid) -> Self {
        let shape = (grid.nx, grid.ny);
        ConservedField {
            rho: Array2::zeros(shape),
            mx: Array2::zeros(shape),
            my: Array2::zeros(shape),
            en: Array2::zeros(shape),
            t: 0.0,
        }
    }

    /// Totals of each conserved variable scaled by the cell volume.
    #[must_use]
    pub fn totals(&self, grid: &Grid) -> [f64; 4] {
        let v = grid.cell_volume();
        [
            self.rho.sum() * v,
            self.mx.sum() * v,
            self.my.sum() * v,
            self.en.sum() * v,
        ]
    }

    /// `self + dt * rhs`, stamped with `t + dt`.
    #[must_use]
    pub fn stepped(&self, rhs: &Tendency, dt: f64) -> Self {
        ConservedField {
            rho: &self.rho + &(dt * &rhs.rho),
            mx: &self.mx + &(dt * &rhs.mx),
            my: &self.my + &(dt * &rhs.my),
            en: &self.en + &(dt * &rhs.en),
            t: self.t + dt,
        }
    }

    /// Convex blend `w0 * a + w1 * b` of two states, stamped with time `t`.
    #[must_use]
    pub fn blended(w0: f64, a: &Self, w1: f64, b: &Self, t: f64) -> Self {
        ConservedField {
            rho: &(w0 * &a.rho) + &(w1 * &b.rho),
            mx: &(w0 * &a.mx) + &(w1 * &b.mx),
            my: &(w0 * &a.my) + &(w1 * &b.my),
            en: &(w0 * &a.en) + &(w1 * &b.en),
            t,
        }
    }
}

/// Time derivative of each conserved variable on the interior cells.
#[derive(Debug, Clone)]
pub struct Tendency {
    pub rho: Array2<f64>,
    pub mx: Array2<f64>,
    pub my: Array2<f64>,
    pub en: Array2<f64>,
}

impl Tendency {
    #[must_use]
    pub fn zeros(grid: &Grid) -> Self {
        let shape = (grid.nx, grid.ny);
        Tendency {
            rho: Array2::zeros(shape),
            mx: Array2::zeros(shape),
            my: Array2::zeros(shape),
            en: Array2::zeros(shape),
        }
    }
}

/// Frozen far-field ghost values. For each far-field axis the ghost ring of
/// the padded arrays is filled once, from the initial state's edge cells, and
/// reused for the rest of the run; periodic axes ignore it and wrap instead.
#[derive(Debug, Clone)]
pub struct BoundaryValues {
    rho: Array2<f64>,
    mx: Array2<f64>,
    my: Array2<f64>,
    en: Array2<f64>,
}

impl BoundaryValues {
    /// Capture ghost templates from an initial state by edge replication.
    #[must_use]
    pub fn from_initial(initial: &ConservedField, grid: &Grid) -> Self {
        BoundaryValues {
            rho: padded_template(&initial.rho, grid),
            mx: padded_template(&initial.mx, grid),
            my: padded_template(&initial.my, grid),
            en: padded_template(&initial.en, grid),
        }
    }
}

/// Build a padded array whose ghost ring replicates the nearest edge cell.
fn padded_template(interior: &Array2<f64>, grid: &Grid) -> Array2<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut out = Array2::zeros((nx + 2 * HALO, ny + 2 * HALO));
    for i in 0..nx + 2 * HALO {
        let ic = i.saturating_sub(HALO).min(nx - 1);
        for j in 0..ny + 2 * HALO {
            let jc = j.saturating_sub(HALO).min(ny - 1);
            out[(i, j)] = interior[(ic, jc)];
        }
    }
    out
}

/// Copy `interior` into the middle of `template` and wrap periodic axes.
/// Far-field axes keep the template's frozen ghost values. Periodic wrapping
/// runs after the far-field fill so corner ghosts stay consistent.
fn pad_one(interior: &Array2<f64>, template: &Array2<f64>, grid: &Grid) -> Array2<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut out = template.clone();
    for i in 0..nx {
        for j in 0..ny {
            out[(i + HALO, j + HALO)] = interior[(i, j)];
        }
    }
    // Ghost sources are always taken from the (already final) interior
    // band; the modular index handles axes shorter than the halo (ny = 1).
    if grid.bc_x == BoundaryKind::Periodic {
        for g in 0..HALO {
            let lo = (g + nx * HALO - HALO) % nx + HALO;
            let hi = g % nx + HALO;
            for j in 0..ny + 2 * HALO {
                out[(g, j)] = out[(lo, j)];
                out[(nx + HALO + g, j)] = out[(hi, j)];
            }
        }
    }
    if grid.bc_y == BoundaryKind::Periodic {
        for g in 0..HALO {
            let lo = (g + ny * HALO - HALO) % ny + HALO;
            let hi = g % ny + HALO;
            for i in 0..nx + 2 * HALO {
                out[(i, g)] = out[(i, lo)];
                out[(i, ny + HALO + g)] = out[(i, hi)];
            }
        }
    }
    out
}

/// The conserved variables on the padded index range.
#[derive(Debug, Clone)]
pub struct PaddedState {
    pub rho: Array2<f64>,
    pub mx: Array2<f64>,
    pub my: Array2<f64>,
    pub en: Array2<f64>,
}

#[must_use]
pub fn pad_state(field: &ConservedField, bv: &BoundaryValues, grid: &Grid) -> PaddedState {
    PaddedState {
        rho: pad_one(&field.rho, &bv.rho, grid),
        mx: pad_one(&field.mx, &bv.mx, grid),
        my: pad_one(&field.my, &bv.my, grid),
        en: pad_one(&field.en, &bv.en, grid),
    }
}

/// Pointwise primitive and thermodynamic fields on the padded index range.
#[derive(Debug, Clone)]
pub struct DerivedFields {
    pub ux: Array2<f64>,
    pub uy: Array2<f64>,
    pub e: Array2<f64>,
    pub p: Array2<f64>,
    /// s_rho / s_e, the entropy-gradient ratio entering the heat-like flux.
    pub srho_over_se: Array2<f64>,
    /// Squared sound speed.
    pub c2: Array2<f64>,
}

/// Evaluate primitives and the thermodynamic closures cell by cell. Fails if
/// any cell has non-positive density or internal energy, or loses
/// hyperbolicity (c^2 <= 0); the error reports the first offending cell.
pub fn derive_fields(
    padded: &PaddedState,
    eos: &EosModel,
    t: f64,
) -> Result<DerivedFields, SolverError> {
    let shape = padded.rho.dim();
    let mut ux = Array2::zeros(shape);
    let mut uy = Array2::zeros(shape);
    let mut e = Array2::zeros(shape);
    let mut p = Array2::zeros(shape);
    let mut srho_over_se = Array2::zeros(shape);
    let mut c2 = Array2::zeros(shape);
    for i in 0..shape.0 {
        for j in 0..shape.1 {
            let rho = padded.rho[(i, j)];
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(SolverError::NonAdmissible {
                    t,
                    detail: format!("rho = {rho} at padded cell ({i}, {j})"),
                });
            }
            let vx = padded.mx[(i, j)] / rho;
            let vy = padded.my[(i, j)] / rho;
            let eint = padded.en[(i, j)] / rho - 0.5 * (vx * vx + vy * vy);
            if !(eint > 0.0 && eint.is_finite()) {
                return Err(SolverError::NonAdmissible {
                    t,
                    detail: format!("internal energy = {eint} at padded cell ({i}, {j})"),
                });
            }
            let d = eos.entropy_derivs(rho, eint)?;
            if !(d.s_e > 0.0) {
                return Err(SolverError::NonAdmissible {
                    t,
                    detail: format!("s_e = {} at padded cell ({i}, {j})", d.s_e),
                });
            }
            let se2 = d.s_e * d.s_e;
            let pres = -rho * rho * d.s_rho / d.s_e;
            let p_e = rho * rho / se2 * (d.s_rho * d.s_ee - d.s_e * d.s_rhoe);
            let p_rho = (rho * rho * d.s_rho * d.s_rhoe - d.s_e * d.d_rho_rho2_s_rho(rho)) / se2;
            let cc = p_rho - d.s_rho / d.s_e * p_e;
            if !(cc > 0.0 && cc.is_finite()) {
                return Err(SolverError::NonAdmissible {
                    t,
                    detail: format!("squared sound speed = {cc} at padded cell ({i}, {j})"),
                });
            }
            ux[(i, j)] = vx;
            uy[(i, j)] = vy;
            e[(i, j)] = eint;
            p[(i, j)] = pres;
            srho_over_se[(i, j)] = d.s_rho / d.s_e;
            c2[(i, j)] = cc;
        }
    }
    Ok(DerivedFields {
        ux,
        uy,
        e,
        p,
        srho_over_se,
        c2,
    })
}

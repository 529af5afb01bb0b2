//! Initial-condition builders: sampled primitive profiles converted to
//! conserved cell values through the equation of state.

use std::fmt;
use std::sync::Arc;

use crate::eos::{energy_from_pressure, EosModel};
use crate::solver::field::ConservedField;
use crate::solver::grid::{Grid, SolverError};
use crate::solver::mms;

/// A primitive state: density, velocity, pressure.
#[derive(Debug, Clone, Copy)]
pub struct Prim {
    pub rho: f64,
    pub ux: f64,
    pub uy: f64,
    pub p: f64,
}

impl Prim {
    #[must_use]
    pub fn new_1d(rho: f64, u: f64, p: f64) -> Self {
        Prim {
            rho,
            ux: u,
            uy: 0.0,
            p,
        }
    }
}

/// Supported initial data. All built-in profiles vary along x only; in two
/// dimensions they extend constantly along y.
#[derive(Clone)]
pub enum InitialCondition {
    /// Two constant states separated at `x_split`.
    Riemann {
        left: Prim,
        right: Prim,
        x_split: f64,
    },
    /// A density jump moving with uniform velocity and pressure: an isolated
    /// contact wave.
    Contact {
        rho_left: f64,
        rho_right: f64,
        u: f64,
        p: f64,
        x_split: f64,
    },
    /// Smooth periodic profiles on unit wavelength:
    /// `rho = rho_mean + rho_amp sin(2 pi x)`, `u = u_mean + u_amp cos(2 pi x)`,
    /// `p = p_mean + p_amp cos(2 pi x)`.
    Smooth {
        rho_mean: f64,
        rho_amp: f64,
        u_mean: f64,
        u_amp: f64,
        p_mean: f64,
        p_amp: f64,
    },
    /// The manufactured traveling wave at time zero (ideal gas only); pair
    /// with [`mms::source`] to drive an exact-solution convergence study.
    ManufacturedWave,
    /// Arbitrary pointwise primitive state.
    Custom(Arc<dyn Fn(f64, f64) -> Prim + Send + Sync>),
}

impl fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::Riemann {
                left,
                right,
                x_split,
            } => f
                .debug_struct("Riemann")
                .field("left", left)
                .field("right", right)
                .field("x_split", x_split)
                .finish(),
            InitialCondition::Contact {
                rho_left,
                rho_right,
                u,
                p,
                x_split,
            } => f
                .debug_struct("Contact")
                .field("rho_left", rho_left)
                .field("rho_right", rho_right)
                .field("u", u)
                .field("p", p)
                .field("x_split", x_split)
                .finish(),
            InitialCondition::Smooth { .. } => f.write_str("Smooth { .. }"),
            InitialCondition::ManufacturedWave => f.write_str("ManufacturedWave"),
            InitialCondition::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Sample the initial condition at every cell center and convert to
/// conserved variables. The returned field is stamped with `t = 0`.
pub fn initial_condition(
    ic: &InitialCondition,
    grid: &Grid,
    eos: &EosModel,
) -> Result<ConservedField, SolverError> {
    let mut field = ConservedField::zeros(grid);
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let x = grid.xc(i);
            let y = grid.yc(j);
            let prim = sample(ic, x, y, eos)?;
            if !(prim.rho > 0.0 && prim.rho.is_finite()) {
                return Err(SolverError::BadSetup(format!(
                    "initial density must be positive, got {} at x = {x}",
                    prim.rho
                )));
            }
            let e = energy_from_pressure(eos, prim.rho, prim.p)?;
            let ke = 0.5 * (prim.ux * prim.ux + prim.uy * prim.uy);
            field.rho[(i, j)] = prim.rho;
            field.mx[(i, j)] = prim.rho * prim.ux;
            field.my[(i, j)] = prim.rho * prim.uy;
            field.en[(i, j)] = prim.rho * (e + ke);
        }
    }
    Ok(field)
}

fn sample(ic: &InitialCondition, x: f64, y: f64, eos: &EosModel) -> Result<Prim, SolverError> {
    match ic {
        InitialCondition::Riemann {
            left,
            right,
            x_split,
        } => Ok(if x < *x_split { *left } else { *right }),
        InitialCondition::Contact {
            rho_left,
            rho_right,
            u,
            p,
            x_split,
        } => Ok(Prim {
            rho: if x < *x_split { *rho_left } else { *rho_right },
            ux: *u,
            uy: 0.0,
            p: *p,
        }),
        InitialCondition::Smooth {
            rho_mean,
            rho_amp,
            u_mean,
            u_amp,
            p_mean,
            p_amp,
        } => {
            let phase = 2.0 * std::f64::consts::PI * x;
            Ok(Prim {
                rho: rho_mean + rho_amp * phase.sin(),
                ux: u_mean + u_amp * phase.cos(),
                uy: 0.0,
                p: p_mean + p_amp * phase.cos(),
            })
        }
        InitialCondition::ManufacturedWave => {
            if !matches!(eos, EosModel::IdealGas { .. }) {
                return Err(SolverError::BadSetup(
                    "the manufactured wave is defined for ideal gases only".into(),
                ));
            }
            let (rho, u, p) = mms::exact_prim(x, 0.0);
            Ok(Prim::new_1d(rho, u, p))
        }
        InitialCondition::Custom(f) => Ok(f(x, y)),
    }
}

//! Semi-discrete right-hand sides: centered second-order flux divergences
//! for the convective part, compact conservative stencils for every
//! diffusion-like term.

use ndarray::Array2;

use crate::eos::EosModel;
use crate::regularization::{MomentumForm, RegularizationCoeffs};
use crate::solver::field::{
    derive_fields, pad_state, BoundaryValues, ConservedField, DerivedFields, PaddedState, Tendency,
};
use crate::solver::grid::{Grid, SolverError};
use crate::solver::stencil::{ddx, ddy, div_k_grad, laplacian};

/// Which writing of the regularized system to discretize. Both are
/// equivalent at the PDE level; the mass-velocity form advects with
/// `u - a grad(rho)/rho` and carries the pressure term outside the
/// momentum flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularizedForm {
    Conservative,
    /// Mass-velocity (bivelocity) writing of the same system.
    Brenner,
}

/// Padded state plus its pointwise derived fields: everything a stage
/// evaluation needs.
pub(crate) struct StagePrep {
    pub padded: PaddedState,
    pub derived: DerivedFields,
}

pub(crate) fn prep_stage(
    field: &ConservedField,
    bv: &BoundaryValues,
    grid: &Grid,
    eos: &EosModel,
) -> Result<StagePrep, SolverError> {
    let padded = pad_state(field, bv, grid);
    let derived = derive_fields(&padded, eos, field.t)?;
    Ok(StagePrep { padded, derived })
}

/// Accumulate `scale * src` into `dst`, aligning centers (src may carry any
/// number of leftover ghost rings).
fn acc(dst: &mut Array2<f64>, src: &Array2<f64>, scale: f64) {
    let (dn0, dn1) = dst.dim();
    let (sn0, sn1) = src.dim();
    let r0 = (sn0 - dn0) / 2;
    let r1 = (sn1 - dn1) / 2;
    for i in 0..dn0 {
        for j in 0..dn1 {
            dst[(i, j)] += scale * src[(i + r0, j + r1)];
        }
    }
}

/// Largest `|u| + c` over the padded cells, per axis maximum.
#[must_use]
pub(crate) fn max_signal_speed(derived: &DerivedFields) -> f64 {
    let mut beta: f64 = 0.0;
    for ((i, j), c2) in derived.c2.indexed_iter() {
        let c = c2.sqrt();
        beta = beta
            .max(derived.ux[(i, j)].abs() + c)
            .max(derived.uy[(i, j)].abs() + c);
    }
    beta
}

/// Momentum-diffusion contribution `div(G)` for component `u_comp`, written
/// into `out` (interior shape). `arho` is `a * rho` on the padded range.
fn add_div_g(
    out: &mut Array2<f64>,
    comp: usize,
    gform: &MomentumForm,
    prep: &StagePrep,
    arho: &Array2<f64>,
    grid: &Grid,
) {
    let d = &prep.derived;
    let u_comp = if comp == 0 { &d.ux } else { &d.uy };
    match gform {
        MomentumForm::Parabolic => {
            acc(out, &div_k_grad(arho, u_comp, grid.dx, grid.dy), 1.0);
        }
        MomentumForm::Symmetric { mu, lambda_visc } => {
            let murho = prep.padded.rho.mapv(|r| mu * r);
            // grad-u part: sum_i d_i(mu rho d_i u_j)
            acc(out, &div_k_grad(&murho, u_comp, grid.dx, grid.dy), 1.0);
            // transpose part: sum_i d_i(mu rho d_j u_i)
            let murho1 = crate::solver::stencil::shrink(&murho, 1);
            let dj = |w: &Array2<f64>| {
                if comp == 0 {
                    ddx(w, grid.dx)
                } else {
                    ddy(w, grid.dy)
                }
            };
            let w1 = &murho1 * &dj(&d.ux);
            let w2 = &murho1 * &dj(&d.uy);
            acc(out, &ddx(&w1, grid.dx), 1.0);
            acc(out, &ddy(&w2, grid.dy), 1.0);
            // dilatation part: d_j(lambda rho div u)
            let divu = &ddx(&d.ux, grid.dx) + &ddy(&d.uy, grid.dy);
            let lamrho1 =
                crate::solver::stencil::shrink(&prep.padded.rho, 1).mapv(|r| lambda_visc * r);
            let w3 = &lamrho1 * &divu;
            acc(out, &dj(&w3), 1.0);
        }
        MomentumForm::Zero => {}
    }
}

/// Energy contribution `div(G u)`, written into `out` (interior shape).
fn add_div_gu(
    out: &mut Array2<f64>,
    gform: &MomentumForm,
    prep: &StagePrep,
    arho: &Array2<f64>,
    grid: &Grid,
) {
    let d = &prep.derived;
    match gform {
        MomentumForm::Parabolic => {
            // sum_j div(a rho u_j grad u_j)
            for u_comp in [&d.ux, &d.uy] {
                let k = arho * u_comp;
                acc(out, &div_k_grad(&k, u_comp, grid.dx, grid.dy), 1.0);
            }
        }
        MomentumForm::Symmetric { mu, lambda_visc } => {
            let murho = prep.padded.rho.mapv(|r| mu * r);
            // grad-u part contracts to mu rho grad(|u|^2 / 2)
            let half_u2 = ke_density(d);
            acc(out, &div_k_grad(&murho, &half_u2, grid.dx, grid.dy), 1.0);
            // transpose part: W_i = sum_j mu rho u_j d_j u_i
            let murho1 = crate::solver::stencil::shrink(&murho, 1);
            let ux1 = crate::solver::stencil::shrink(&d.ux, 1);
            let uy1 = crate::solver::stencil::shrink(&d.uy, 1);
            let wx = &murho1 * &(&(&ux1 * &ddx(&d.ux, grid.dx)) + &(&uy1 * &ddy(&d.ux, grid.dy)));
            let wy = &murho1 * &(&(&ux1 * &ddx(&d.uy, grid.dx)) + &(&uy1 * &ddy(&d.uy, grid.dy)));
            acc(out, &ddx(&wx, grid.dx), 1.0);
            acc(out, &ddy(&wy, grid.dy), 1.0);
            // dilatation part: div(lambda rho (div u) u)
            let divu = &ddx(&d.ux, grid.dx) + &ddy(&d.uy, grid.dy);
            let lamrho1 =
                crate::solver::stencil::shrink(&prep.padded.rho, 1).mapv(|r| lambda_visc * r);
            let vx = &(&lamrho1 * &divu) * &ux1;
            let vy = &(&lamrho1 * &divu) * &uy1;
            acc(out, &ddx(&vx, grid.dx), 1.0);
            acc(out, &ddy(&vy, grid.dy), 1.0);
        }
        MomentumForm::Zero => {}
    }
}

fn ke_density(d: &DerivedFields) -> Array2<f64> {
    let mut out = Array2::zeros(d.ux.dim());
    for ((i, j), v) in out.indexed_iter_mut() {
        let ux = d.ux[(i, j)];
        let uy = d.uy[(i, j)];
        *v = 0.5 * (ux * ux + uy * uy);
    }
    out
}

/// Regularized right-hand side from precomputed stage data and coefficient
/// arrays (`a_arr`, `d_arr` on the padded range).
pub(crate) fn tendency_regularized(
    prep: &StagePrep,
    a_arr: &Array2<f64>,
    d_arr: &Array2<f64>,
    gform: &MomentumForm,
    grid: &Grid,
    form: RegularizedForm,
) -> Tendency {
    match form {
        RegularizedForm::Conservative => tendency_conservative(prep, a_arr, d_arr, gform, grid),
        RegularizedForm::Brenner => tendency_brenner(prep, a_arr, d_arr, gform, grid),
    }
}

fn tendency_conservative(
    prep: &StagePrep,
    a_arr: &Array2<f64>,
    d_arr: &Array2<f64>,
    gform: &MomentumForm,
    grid: &Grid,
) -> Tendency {
    let p = &prep.padded;
    let d = &prep.derived;
    let (dx, dy) = (grid.dx, grid.dy);
    let mut out = Tendency {
        rho: Array2::zeros((grid.nx, grid.ny)),
        mx: Array2::zeros((grid.nx, grid.ny)),
        my: Array2::zeros((grid.nx, grid.ny)),
        en: Array2::zeros((grid.nx, grid.ny)),
    };

    // convective fluxes
    acc(&mut out.rho, &ddx(&p.mx, dx), -1.0);
    acc(&mut out.rho, &ddy(&p.my, dy), -1.0);
    acc(&mut out.mx, &ddx(&(&(&d.ux * &p.mx) + &d.p), dx), -1.0);
    acc(&mut out.mx, &ddy(&(&d.uy * &p.mx), dy), -1.0);
    acc(&mut out.my, &ddx(&(&d.ux * &p.my), dx), -1.0);
    acc(&mut out.my, &ddy(&(&(&d.uy * &p.my) + &d.p), dy), -1.0);
    let h_tot = &p.en + &d.p;
    acc(&mut out.en, &ddx(&(&d.ux * &h_tot), dx), -1.0);
    acc(&mut out.en, &ddy(&(&d.uy * &h_tot), dy), -1.0);

    // mass diffusion: div(a grad rho)
    acc(&mut out.rho, &div_k_grad(a_arr, &p.rho, dx, dy), 1.0);

    // momentum: div(G) + div((a u_j) grad rho) for the f (x) u part
    let arho = a_arr * &p.rho;
    add_div_g(&mut out.mx, 0, gform, prep, &arho, grid);
    add_div_g(&mut out.my, 1, gform, prep, &arho, grid);
    let aux = a_arr * &d.ux;
    let auy = a_arr * &d.uy;
    acc(&mut out.mx, &div_k_grad(&aux, &p.rho, dx, dy), 1.0);
    acc(&mut out.my, &div_k_grad(&auy, &p.rho, dx, dy), 1.0);

    // energy: div(l) + div(|u|^2/2 a grad rho) + div(G u)
    let mut k1 = Array2::zeros(p.rho.dim());
    for ((i, j), v) in k1.indexed_iter_mut() {
        let a = a_arr[(i, j)];
        let dd = d_arr[(i, j)];
        *v = (dd - a) * p.rho[(i, j)] * d.srho_over_se[(i, j)] + a * d.e[(i, j)];
    }
    acc(&mut out.en, &div_k_grad(&k1, &p.rho, dx, dy), 1.0);
    let drho = d_arr * &p.rho;
    acc(&mut out.en, &div_k_grad(&drho, &d.e, dx, dy), 1.0);
    let ke_a = &ke_density(d) * a_arr;
    acc(&mut out.en, &div_k_grad(&ke_a, &p.rho, dx, dy), 1.0);
    add_div_gu(&mut out.en, gform, prep, &arho, grid);

    out
}

fn tendency_brenner(
    prep: &StagePrep,
    a_arr: &Array2<f64>,
    d_arr: &Array2<f64>,
    gform: &MomentumForm,
    grid: &Grid,
) -> Tendency {
    let p = &prep.padded;
    let d = &prep.derived;
    let (dx, dy) = (grid.dx, grid.dy);
    let shrink = crate::solver::stencil::shrink;
    let mut out = Tendency {
        rho: Array2::zeros((grid.nx, grid.ny)),
        mx: Array2::zeros((grid.nx, grid.ny)),
        my: Array2::zeros((grid.nx, grid.ny)),
        en: Array2::zeros((grid.nx, grid.ny)),
    };

    // mass velocity u_m = u - a grad(rho) / rho, on the one-ring range
    let gx = ddx(&p.rho, dx);
    let gy = ddy(&p.rho, dy);
    let rho1 = shrink(&p.rho, 1);
    let a1 = shrink(a_arr, 1);
    let umx = &shrink(&d.ux, 1) - &(&(&a1 * &gx) / &rho1);
    let umy = &shrink(&d.uy, 1) - &(&(&a1 * &gy) / &rho1);

    // convection of rho, m, E by the mass velocity
    for (dst, w) in [
        (&mut out.rho, &rho1),
        (&mut out.mx, &shrink(&p.mx, 1)),
        (&mut out.my, &shrink(&p.my, 1)),
        (&mut out.en, &shrink(&p.en, 1)),
    ] {
        acc(dst, &ddx(&(&umx * w), dx), -1.0);
        acc(dst, &ddy(&(&umy * w), dy), -1.0);
    }

    // pressure gradient and momentum diffusion
    acc(&mut out.mx, &ddx(&d.p, dx), -1.0);
    acc(&mut out.my, &ddy(&d.p, dy), -1.0);
    let arho = a_arr * &p.rho;
    add_div_g(&mut out.mx, 0, gform, prep, &arho, grid);
    add_div_g(&mut out.my, 1, gform, prep, &arho, grid);

    // heat-like flux q = (a - d) p grad(log rho) + d rho grad(e)
    let logrho = p.rho.mapv(f64::ln);
    let apd = &(a_arr - d_arr) * &d.p;
    acc(&mut out.en, &div_k_grad(&apd, &logrho, dx, dy), 1.0);
    let drho = d_arr * &p.rho;
    acc(&mut out.en, &div_k_grad(&drho, &d.e, dx, dy), 1.0);

    // work flux -div((p I - G) u)
    let ux1 = shrink(&d.ux, 1);
    let uy1 = shrink(&d.uy, 1);
    let p1 = shrink(&d.p, 1);
    let (gux, guy) = match gform {
        MomentumForm::Parabolic => {
            let arho1 = shrink(&arho, 1);
            let gux = &arho1 * &(&(&ux1 * &ddx(&d.ux, dx)) + &(&uy1 * &ddx(&d.uy, dx)));
            let guy = &arho1 * &(&(&ux1 * &ddy(&d.ux, dy)) + &(&uy1 * &ddy(&d.uy, dy)));
            (gux, guy)
        }
        MomentumForm::Symmetric { mu, lambda_visc } => {
            let murho1 = shrink(&p.rho, 1).mapv(|r| mu * r);
            let lamrho1 = shrink(&p.rho, 1).mapv(|r| lambda_visc * r);
            let dxux = ddx(&d.ux, dx);
            let dxuy = ddx(&d.uy, dx);
            let dyux = ddy(&d.ux, dy);
            let dyuy = ddy(&d.uy, dy);
            let divu = &dxux + &dyuy;
            let gux = &(&murho1
                * &(&(&ux1 * &dxux.mapv(|v| 2.0 * v)) + &(&uy1 * &(&dxuy + &dyux))))
                + &(&(&lamrho1 * &divu) * &ux1);
            let guy = &(&murho1
                * &(&(&ux1 * &(&dxuy + &dyux)) + &(&uy1 * &dyuy.mapv(|v| 2.0 * v))))
                + &(&(&lamrho1 * &divu) * &uy1);
            (gux, guy)
        }
        MomentumForm::Zero => (Array2::zeros(ux1.dim()), Array2::zeros(ux1.dim())),
    };
    let vx = &(&p1 * &ux1) - &gux;
    let vy = &(&p1 * &uy1) - &guy;
    acc(&mut out.en, &ddx(&vx, dx), -1.0);
    acc(&mut out.en, &ddy(&vy, dy), -1.0);

    out
}

/// Right-hand side of the monolithic parabolic system: Euler fluxes plus
/// `eps * Laplacian` on every conserved variable.
pub(crate) fn tendency_parabolic(prep: &StagePrep, eps: f64, grid: &Grid) -> Tendency {
    let p = &prep.padded;
    let d = &prep.derived;
    let (dx, dy) = (grid.dx, grid.dy);
    let mut out = Tendency {
        rho: Array2::zeros((grid.nx, grid.ny)),
        mx: Array2::zeros((grid.nx, grid.ny)),
        my: Array2::zeros((grid.nx, grid.ny)),
        en: Array2::zeros((grid.nx, grid.ny)),
    };
    acc(&mut out.rho, &ddx(&p.mx, dx), -1.0);
    acc(&mut out.rho, &ddy(&p.my, dy), -1.0);
    acc(&mut out.mx, &ddx(&(&(&d.ux * &p.mx) + &d.p), dx), -1.0);
    acc(&mut out.mx, &ddy(&(&d.uy * &p.mx), dy), -1.0);
    acc(&mut out.my, &ddx(&(&d.ux * &p.my), dx), -1.0);
    acc(&mut out.my, &ddy(&(&(&d.uy * &p.my) + &d.p), dy), -1.0);
    let h_tot = &p.en + &d.p;
    acc(&mut out.en, &ddx(&(&d.ux * &h_tot), dx), -1.0);
    acc(&mut out.en, &ddy(&(&d.uy * &h_tot), dy), -1.0);
    for (dst, w) in [
        (&mut out.rho, &p.rho),
        (&mut out.mx, &p.mx),
        (&mut out.my, &p.my),
        (&mut out.en, &p.en),
    ] {
        acc(dst, &laplacian(w, dx, dy), eps);
    }
    out
}

/// Semi-discrete right-hand side of the entropy-consistent regularized
/// system. Coefficient fields are evaluated pointwise on (rho, e).
pub fn rhs_regularized(
    field: &ConservedField,
    grid: &Grid,
    bv: &BoundaryValues,
    coeffs: &RegularizationCoeffs,
    eos: &EosModel,
    form: RegularizedForm,
) -> Result<Tendency, SolverError> {
    coeffs.validate(grid.dim())?;
    let prep = prep_stage(field, bv, grid, eos)?;
    let (a_arr, d_arr) = coefficient_arrays_fixed(&prep, coeffs);
    Ok(tendency_regularized(
        &prep,
        &a_arr,
        &d_arr,
        &coeffs.gform,
        grid,
        form,
    ))
}

/// Right-hand side of the parabolic regularization with constant `eps >= 0`.
pub fn rhs_parabolic(
    field: &ConservedField,
    grid: &Grid,
    bv: &BoundaryValues,
    eps: f64,
    eos: &EosModel,
) -> Result<Tendency, SolverError> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(SolverError::BadSetup(format!(
            "parabolic viscosity must be finite and non-negative, got {eps}"
        )));
    }
    let prep = prep_stage(field, bv, grid, eos)?;
    Ok(tendency_parabolic(&prep, eps, grid))
}

/// Evaluate pointwise coefficient fields on the padded (rho, e) range.
pub(crate) fn coefficient_arrays_fixed(
    prep: &StagePrep,
    coeffs: &RegularizationCoeffs,
) -> (Array2<f64>, Array2<f64>) {
    let shape = prep.padded.rho.dim();
    let mut a = Array2::zeros(shape);
    let mut d = Array2::zeros(shape);
    for i in 0..shape.0 {
        for j in 0..shape.1 {
            let rho = prep.padded.rho[(i, j)];
            let e = prep.derived.e[(i, j)];
            a[(i, j)] = coeffs.a.eval(rho, e);
            d[(i, j)] = coeffs.d.eval(rho, e);
        }
    }
    (a, d)
}

/// Mesh-scaled first-order coefficient field `c0 h (|u| + c)`, evaluated
/// pointwise; used for both a and d.
pub(crate) fn coefficient_array_mesh_scaled(prep: &StagePrep, c0: f64, h_min: f64) -> Array2<f64> {
    let d = &prep.derived;
    let mut out = Array2::zeros(d.ux.dim());
    for ((i, j), v) in out.indexed_iter_mut() {
        let speed = (d.ux[(i, j)].powi(2) + d.uy[(i, j)].powi(2)).sqrt();
        *v = c0 * h_min * (speed + d.c2[(i, j)].sqrt());
    }
    out
}

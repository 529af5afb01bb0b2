//! Certificates and counterexample constructions on solver output.
//!
//! A [`Certificate`] is a machine-checkable verdict on a recorded trajectory:
//! positivity of density and internal energy, the minimum principle for the
//! specific entropy, and discrete residuals of the generalized entropy
//! inequalities for a chosen [`EntropyFamily`]. All certificates share one
//! convention: `worst` is the largest violation encountered (negative when
//! the property holds with margin) and `pass ⇔ worst ≤ tol`.
//!
//! The module also hosts the two standalone failure constructions that
//! delimit the theory: [`a_neq_d_counterexample`] builds a generalized
//! entropy and an initial state whose entropy production is pointwise
//! negative whenever the mass and thermal diffusivities differ, and
//! [`ns_entropy_violation_demo`] shows that Fourier heat conduction alone
//! pushes the spatial entropy minimum down, which no amount of grid
//! refinement repairs.

use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use thiserror::Error;

use crate::eos::{thermo_eval, EosError, EosModel};
use crate::linalg::Sym2;
use crate::regularization::{quadratic_form_j, s_matrix, RegularizationError};
use crate::solver::grid::HALO;
use crate::solver::rhs::{coefficient_array_mesh_scaled, coefficient_arrays_fixed, prep_stage};
use crate::solver::stencil::{ddx, ddy, div_k_grad, shrink};
use crate::solver::{
    BoundaryValues, ConservedField, Grid, InitialCondition, Prim, SolverError, Trajectory,
    ViscositySpec,
};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    /// The entropy family fails `f' > 0` or `f'/c_p - f'' > 0` somewhere on
    /// the states it was asked to certify.
    #[error("entropy family is not generalized at rho = {rho}, e = {e}: {detail}")]
    FamilyNotGeneralized { rho: f64, e: f64, detail: String },
    /// The counterexample construction found no direction of positive
    /// entropy-production defect; happens exactly when a = d.
    #[error("no entropy-inequality counterexample exists for a = {a}, d = {d}")]
    NoCounterexample { a: f64, d: f64 },
    #[error("bad diagnostic input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Regularization(#[from] RegularizationError),
}

/// Scalar function of the specific entropy.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An entropy functional of the form rho * f(s).
///
/// The family is *generalized* (admissible for the Euler system) where
/// `f'(s) > 0` and `f'(s)/c_p - f''(s) > 0`; certificates verify this on
/// every state they touch and refuse to certify a family outside its
/// admissible range.
#[derive(Clone)]
pub enum EntropyFamily {
    /// f(s) = s.
    Physical,
    /// f(s) = exp(s/q); generalized exactly where q > c_p.
    Harten { q: f64 },
    /// User-supplied f with its first two derivatives.
    Custom {
        name: String,
        f: ScalarFn,
        fp: ScalarFn,
        fpp: ScalarFn,
    },
}

impl fmt::Debug for EntropyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntropyFamily::Physical => write!(f, "Physical"),
            EntropyFamily::Harten { q } => write!(f, "Harten {{ q: {q} }}"),
            EntropyFamily::Custom { name, .. } => write!(f, "Custom {{ name: {name:?} }}"),
        }
    }
}

impl EntropyFamily {
    #[must_use]
    pub fn f(&self, s: f64) -> f64 {
        match self {
            EntropyFamily::Physical => s,
            EntropyFamily::Harten { q } => (s / q).exp(),
            EntropyFamily::Custom { f, .. } => f(s),
        }
    }

    #[must_use]
    pub fn fp(&self, s: f64) -> f64 {
        match self {
            EntropyFamily::Physical => 1.0,
            EntropyFamily::Harten { q } => (s / q).exp() / q,
            EntropyFamily::Custom { fp, .. } => fp(s),
        }
    }

    #[must_use]
    pub fn fpp(&self, s: f64) -> f64 {
        match self {
            EntropyFamily::Physical => 0.0,
            EntropyFamily::Harten { q } => (s / q).exp() / (q * q),
            EntropyFamily::Custom { fpp, .. } => fpp(s),
        }
    }

    /// Short identifier used in certificate names and output files.
    #[must_use]
    pub fn name(&self) -> String {
        match self {
            EntropyFamily::Physical => "physical".to_string(),
            EntropyFamily::Harten { q } => format!("harten_q{q}"),
            EntropyFamily::Custom { name, .. } => name.clone(),
        }
    }

    /// Both strict admissibility inequalities at one entropy / heat-capacity
    /// pair.
    #[must_use]
    pub fn generalized_at(&self, s: f64, cp: f64) -> bool {
        let fp = self.fp(s);
        fp > 0.0 && fp / cp - self.fpp(s) > 0.0
    }

    fn ensure_generalized(
        &self,
        s: f64,
        cp: f64,
        rho: f64,
        e: f64,
    ) -> Result<(), DiagnosticsError> {
        if self.generalized_at(s, cp) {
            Ok(())
        } else {
            Err(DiagnosticsError::FamilyNotGeneralized {
                rho,
                e,
                detail: format!(
                    "{}: f'(s) = {}, f'(s)/c_p - f''(s) = {} at s = {s}, c_p = {cp}",
                    self.name(),
                    self.fp(s),
                    self.fp(s) / cp - self.fpp(s),
                ),
            })
        }
    }
}

/// The family f(s) = exp((1 - eps) s / cp) for a fixed heat capacity.
///
/// It satisfies f'' = (1 - eps) f' / cp exactly, so for `eps` in (0, 1) it is
/// generalized wherever the actual heat capacity equals `cp` — yet its
/// inequality is the one that fails when the mass and thermal diffusivities
/// differ; see [`a_neq_d_counterexample`].
pub fn crafted_family(eps: f64, cp: f64) -> Result<EntropyFamily, DiagnosticsError> {
    if !(eps > 0.0 && eps < 1.0) || !eps.is_finite() {
        return Err(DiagnosticsError::BadInput(format!(
            "crafted family needs eps in (0, 1), got {eps}"
        )));
    }
    if !(cp > 0.0) || !cp.is_finite() {
        return Err(DiagnosticsError::BadInput(format!(
            "crafted family needs cp > 0, got {cp}"
        )));
    }
    let k = (1.0 - eps) / cp;
    Ok(EntropyFamily::Custom {
        name: format!("crafted_eps{eps}"),
        f: Arc::new(move |s| (k * s).exp()),
        fp: Arc::new(move |s| k * (k * s).exp()),
        fpp: Arc::new(move |s| k * k * (k * s).exp()),
    })
}

/// Cell and time at which a certificate's worst value was observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellAt {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

/// Outcome of one trajectory check; `pass ⇔ worst ≤ tol`.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub name: String,
    pub pass: bool,
    /// Largest violation seen; negative values mean the property held with
    /// margin everywhere.
    pub worst: f64,
    pub location: Option<CellAt>,
    pub tol: f64,
}

impl Certificate {
    #[must_use]
    pub fn from_worst(name: &str, worst: f64, tol: f64, location: Option<CellAt>) -> Self {
        Certificate {
            name: name.to_string(),
            pass: worst <= tol,
            worst,
            location,
            tol,
        }
    }

    /// One `name,pass,worst,where,tol` line for the certificates file.
    #[must_use]
    pub fn summary_line(&self) -> String {
        let place = match &self.location {
            Some(loc) => format!("i={};j={};t={:.6e}", loc.i, loc.j, loc.t),
            None => "-".to_string(),
        };
        format!(
            "{},{},{:.16e},{},{:.16e}",
            self.name, self.pass, self.worst, place, self.tol
        )
    }
}

/// Track the running maximum and where it happened.
struct WorstTracker {
    worst: f64,
    location: Option<CellAt>,
}

impl WorstTracker {
    fn new() -> Self {
        WorstTracker {
            worst: f64::NEG_INFINITY,
            location: None,
        }
    }

    fn update(&mut self, value: f64, i: usize, j: usize, t: f64) {
        if value > self.worst {
            self.worst = value;
            self.location = Some(CellAt { i, j, t });
        }
    }
}

/// Specific internal energy per interior cell, with no positivity gating.
fn interior_internal_energy(state: &ConservedField) -> Array2<f64> {
    let (nx, ny) = state.rho.dim();
    let mut e = Array2::zeros((nx, ny));
    for i in 0..nx {
        for j in 0..ny {
            let rho = state.rho[(i, j)];
            let ke = 0.5
                * (state.mx[(i, j)] * state.mx[(i, j)] + state.my[(i, j)] * state.my[(i, j)])
                / rho;
            e[(i, j)] = (state.en[(i, j)] - ke) / rho;
        }
    }
    e
}

/// Density and internal-energy positivity over all recorded states.
///
/// The violation at a cell is `max(-rho, -e)` (only `-rho` where the density
/// is not positive, since `e` is then meaningless), so `worst ≤ 0` — the
/// tolerance — exactly when every recorded cell is admissible.
#[must_use]
pub fn positivity_certificate(traj: &Trajectory) -> Certificate {
    let mut tracker = WorstTracker::new();
    for state in &traj.states {
        let (nx, ny) = state.rho.dim();
        for i in 0..nx {
            for j in 0..ny {
                let rho = state.rho[(i, j)];
                let violation = if rho > 0.0 {
                    let ke = 0.5
                        * (state.mx[(i, j)] * state.mx[(i, j)]
                            + state.my[(i, j)] * state.my[(i, j)])
                        / rho;
                    let e = (state.en[(i, j)] - ke) / rho;
                    (-rho).max(-e)
                } else {
                    -rho
                };
                tracker.update(violation, i, j, state.t);
            }
        }
    }
    Certificate::from_worst("positivity", tracker.worst, 0.0, tracker.location)
}

/// Minimum principle for the specific entropy: the spatial minimum of s never
/// drops below its initial value.
///
/// The violation at a cell is `min s(·, 0) - s`; `tol` defaults to
/// `1e-8 |min s(·,0)| + 1e-12`.
pub fn min_entropy_certificate(
    traj: &Trajectory,
    eos: &EosModel,
    tol: Option<f64>,
) -> Result<Certificate, DiagnosticsError> {
    let entropies = |state: &ConservedField| -> Result<Array2<f64>, DiagnosticsError> {
        let e = interior_internal_energy(state);
        let (nx, ny) = state.rho.dim();
        let mut s = Array2::zeros((nx, ny));
        for i in 0..nx {
            for j in 0..ny {
                s[(i, j)] = eos.entropy_derivs(state.rho[(i, j)], e[(i, j)])?.s;
            }
        }
        Ok(s)
    };

    let first = traj
        .states
        .first()
        .ok_or_else(|| DiagnosticsError::BadInput("empty trajectory".to_string()))?;
    let s0 = entropies(first)?;
    let min_s0 = s0.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = tol.unwrap_or(1e-8 * min_s0.abs() + 1e-12);

    let mut tracker = WorstTracker::new();
    for state in &traj.states {
        let s = entropies(state)?;
        for ((i, j), si) in s.indexed_iter() {
            tracker.update(min_s0 - si, i, j, state.t);
        }
    }
    Ok(Certificate::from_worst(
        "min_entropy",
        tracker.worst,
        tol,
        tracker.location,
    ))
}

/// Result of [`entropy_inequality_residual`]: the certificate for the primary
/// flux form plus the agreement data for the mass-velocity rewrite.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub certificate: Certificate,
    /// Largest violation of the primary-form residual.
    pub worst_primary: f64,
    /// Largest violation when the same inequality is assembled around the
    /// shifted transport velocity u + (d - a) grad(rho) / rho.
    pub worst_rewritten: f64,
    /// Largest pointwise difference between the two assemblies; both
    /// discretize the same law, so this is pure truncation error.
    pub max_form_difference: f64,
    /// Number of consecutive state pairs evaluated.
    pub pairs: usize,
}

/// Coefficient fields on the padded range, mirroring the solver's per-step
/// freeze.
fn coefficient_arrays(
    prep: &crate::solver::rhs::StagePrep,
    visc: &ViscositySpec,
    h_min: f64,
) -> (Array2<f64>, Array2<f64>) {
    match visc {
        ViscositySpec::Fixed(coeffs) => coefficient_arrays_fixed(prep, coeffs),
        ViscositySpec::MeshScaled { c0, .. } => {
            let arr = coefficient_array_mesh_scaled(prep, *c0, h_min);
            (arr.clone(), arr)
        }
    }
}

/// Discrete residual of the generalized entropy inequality
/// `∂t(rho f) + div(u rho f - d rho grad f - a f grad rho) ≥ 0`
/// over every consecutive pair of recorded states.
///
/// Time is differenced forward, space with the solver's centered stencils,
/// and the a/d coefficient fields are rebuilt from each pair's first state
/// exactly as the solver froze them, so the residual measures the recorded
/// run, not a re-simulation. The trajectory must contain every accepted step
/// (`snapshot_stride = 1`); ghost values are frozen from the first state,
/// matching the solver's boundary treatment.
///
/// `worst` is the largest value of `-residual`; the certificate passes when
/// it stays at or below `tol`, which should be of truncation size
/// (`C (h + dt)`, with `C` calibrated from a coarser companion run). The
/// report also assembles the identical law around the shifted transport
/// velocity `u + (d - a) grad(rho)/rho` and records the largest disagreement
/// between the two forms.
pub fn entropy_inequality_residual(
    traj: &Trajectory,
    grid: &Grid,
    eos: &EosModel,
    family: &EntropyFamily,
    visc: &ViscositySpec,
    tol: f64,
) -> Result<ResidualReport, DiagnosticsError> {
    if traj.states.len() < 2 {
        return Err(DiagnosticsError::BadInput(
            "entropy residual needs at least two recorded states".to_string(),
        ));
    }
    if traj.states.len() != traj.steps + 1 {
        return Err(DiagnosticsError::BadInput(format!(
            "entropy residual needs every accepted step recorded: {} states for {} steps",
            traj.states.len(),
            traj.steps
        )));
    }
    if traj.states[0].rho.dim() != (grid.nx, grid.ny) {
        return Err(DiagnosticsError::BadInput(format!(
            "state shape {:?} does not match the grid ({}, {})",
            traj.states[0].rho.dim(),
            grid.nx,
            grid.ny
        )));
    }

    let bv = BoundaryValues::from_initial(&traj.states[0], grid);
    let (dx, dy) = (grid.dx, grid.dy);
    let mut primary = WorstTracker::new();
    let mut rewritten = WorstTracker::new();
    let mut max_diff: f64 = 0.0;

    // rho * f(s) on the interior of a state, checking the family on the way.
    let rho_f_interior = |state: &ConservedField| -> Result<Array2<f64>, DiagnosticsError> {
        let e = interior_internal_energy(state);
        let (nx, ny) = state.rho.dim();
        let mut out = Array2::zeros((nx, ny));
        for i in 0..nx {
            for j in 0..ny {
                let rho = state.rho[(i, j)];
                let td = thermo_eval(rho, e[(i, j)], eos)?;
                family.ensure_generalized(td.derivs.s, td.cp, rho, e[(i, j)])?;
                out[(i, j)] = rho * family.f(td.derivs.s);
            }
        }
        Ok(out)
    };

    for k in 0..traj.states.len() - 1 {
        let s0 = &traj.states[k];
        let s1 = &traj.states[k + 1];
        let dt = s1.t - s0.t;
        if !(dt > 0.0) {
            return Err(DiagnosticsError::BadInput(format!(
                "non-increasing snapshot times {} -> {}",
                s0.t, s1.t
            )));
        }

        let prep = prep_stage(s0, &bv, grid, eos)?;
        let (pn0, pn1) = prep.padded.rho.dim();
        let mut f_pad = Array2::zeros((pn0, pn1));
        let mut rhof_pad = Array2::zeros((pn0, pn1));
        for i in 0..pn0 {
            for j in 0..pn1 {
                let rho = prep.padded.rho[(i, j)];
                let e = prep.derived.e[(i, j)];
                let td = thermo_eval(rho, e, eos)?;
                family.ensure_generalized(td.derivs.s, td.cp, rho, e)?;
                f_pad[(i, j)] = family.f(td.derivs.s);
                rhof_pad[(i, j)] = rho * f_pad[(i, j)];
            }
        }
        let (a_arr, d_arr) = coefficient_arrays(&prep, visc, grid.h_min());

        // Primary form: div(u rho f) - div(d rho grad f) - div(a f grad rho).
        let flux_x = &prep.derived.ux * &rhof_pad;
        let flux_y = &prep.derived.uy * &rhof_pad;
        let conv = &ddx(&flux_x, dx) + &ddy(&flux_y, dy);
        let visc_f = div_k_grad(&(&d_arr * &prep.padded.rho), &f_pad, dx, dy);
        let visc_rho = div_k_grad(&(&a_arr * &f_pad), &prep.padded.rho, dx, dy);
        let spatial_primary = shrink(&(&(&conv - &visc_f) - &visc_rho), 1);

        // Rewritten form: div(u~ rho f) - div(d grad(rho f)) with
        // u~ = u + (d - a) grad(rho) / rho.
        let drho_x = ddx(&prep.padded.rho, dx);
        let drho_y = ddy(&prep.padded.rho, dy);
        let ux_r = shrink(&prep.derived.ux, 1);
        let uy_r = shrink(&prep.derived.uy, 1);
        let rho_r = shrink(&prep.padded.rho, 1);
        let rhof_r = shrink(&rhof_pad, 1);
        let a_r = shrink(&a_arr, 1);
        let d_r = shrink(&d_arr, 1);
        let (rn0, rn1) = rho_r.dim();
        let mut flux_x_rw = Array2::zeros((rn0, rn1));
        let mut flux_y_rw = Array2::zeros((rn0, rn1));
        for i in 0..rn0 {
            for j in 0..rn1 {
                let shift = (d_r[(i, j)] - a_r[(i, j)]) / rho_r[(i, j)];
                flux_x_rw[(i, j)] = (ux_r[(i, j)] + shift * drho_x[(i, j)]) * rhof_r[(i, j)];
                flux_y_rw[(i, j)] = (uy_r[(i, j)] + shift * drho_y[(i, j)]) * rhof_r[(i, j)];
            }
        }
        let conv_rw = &ddx(&flux_x_rw, dx) + &ddy(&flux_y_rw, dy);
        let visc_rw = shrink(&div_k_grad(&d_arr, &rhof_pad, dx, dy), 1);
        let spatial_rewritten = &conv_rw - &visc_rw;

        let rhof0 = shrink(&rhof_pad, HALO);
        let rhof1 = rho_f_interior(s1)?;
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                let dt_term = (rhof1[(i, j)] - rhof0[(i, j)]) / dt;
                let r_primary = dt_term + spatial_primary[(i, j)];
                let r_rewritten = dt_term + spatial_rewritten[(i, j)];
                primary.update(-r_primary, i, j, s1.t);
                rewritten.update(-r_rewritten, i, j, s1.t);
                max_diff = max_diff.max((r_primary - r_rewritten).abs());
            }
        }
    }

    let certificate = Certificate::from_worst(
        &format!("entropy_{}", family.name()),
        primary.worst,
        tol,
        primary.location,
    );
    Ok(ResidualReport {
        certificate,
        worst_primary: primary.worst,
        worst_rewritten: rewritten.worst,
        max_form_difference: max_diff,
        pairs: traj.states.len() - 1,
    })
}

/// Everything [`a_neq_d_counterexample`] constructs.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub rho_star: f64,
    pub e_star: f64,
    pub a: f64,
    pub d: f64,
    /// The admissibility form whose positive direction seeds the construction.
    pub s2: Sym2,
    pub lambda_plus: f64,
    /// Density-gradient magnitude of the violating direction (unit paired
    /// with `grad_e`).
    pub grad_rho: f64,
    pub grad_e: f64,
    /// |s_rho grad_rho + s_e grad_e|^2 for that direction.
    pub grad_s_sq: f64,
    /// Largest eps for which the crafted family still violates; the
    /// construction uses half of it.
    pub eps_bound: f64,
    pub eps: f64,
    pub family: EntropyFamily,
    /// d rho f''(s) |grad s|^2 + J f'(s) at the seed state with zero velocity;
    /// positive means the entropy production is pointwise negative, i.e. the
    /// inequality fails.
    pub violation: f64,
    /// Zero-velocity initial data realizing the gradients near the origin,
    /// clamped to stay admissible far from it.
    pub initial: InitialCondition,
}

/// Build a generalized entropy whose inequality fails when the mass and
/// thermal diffusivities differ at the given state.
///
/// The admissibility form for the physical entropy's dissipation,
/// `d rho (grad rho, grad e) S (grad rho, grad e)^T`, acquires a positive
/// eigenvalue exactly when a ≠ d. Its unit eigenvector supplies gradients
/// `(X, Y)`; the family `f(s) = exp((1 - eps) s / c_p)` with
/// `eps = min(eps_bound, 1) / 2`, `eps_bound = lambda_+ c_p / |grad s|^2`,
/// is then generalized yet produces entropy of the wrong sign at the state
/// `rho_0 = rho* + x·X`, `e_0 = e* + x·Y`, `m_0 = 0`.
pub fn a_neq_d_counterexample(
    rho_star: f64,
    e_star: f64,
    a: f64,
    d: f64,
    eos: &EosModel,
) -> Result<Counterexample, DiagnosticsError> {
    let scale = a.abs().max(d.abs());
    if (a - d).abs() <= 1e-14 * scale {
        return Err(DiagnosticsError::NoCounterexample { a, d });
    }
    let td = thermo_eval(rho_star, e_star, eos)?;
    let report = s_matrix(rho_star, e_star, a, d, 1.0, eos)?;
    let (_, lambda_plus) = report.s2.eigenvalues();
    if lambda_plus <= 0.0 {
        return Err(DiagnosticsError::NoCounterexample { a, d });
    }

    let (gx, gy) = report.s2.eigenvector(lambda_plus);
    let grad_s = td.derivs.s_rho * gx + td.derivs.s_e * gy;
    let grad_s_sq = grad_s * grad_s;

    // Violation for the crafted family needs eps < lambda_+ c_p / |grad s|^2;
    // with |grad s| = 0 the production defect is positive for every
    // generalized family and any eps works.
    let (eps_bound, eps) = if grad_s_sq <= 1e-30 {
        (f64::INFINITY, 0.5)
    } else {
        let bound = lambda_plus * td.cp / grad_s_sq;
        (bound, 0.5 * bound.min(1.0))
    };
    let family = crafted_family(eps, td.cp)?;

    let j = quadratic_form_j(rho_star, e_star, [gx, 0.0], [gy, 0.0], a, d, eos)?;
    let s_star = td.derivs.s;
    let violation = d * rho_star * family.fpp(s_star) * grad_s_sq + j * family.fp(s_star);
    if violation <= 0.0 {
        return Err(DiagnosticsError::NoCounterexample { a, d });
    }

    let ic_eos = eos.clone();
    let (x_dir, y_dir) = (gx, gy);
    let (rs, es) = (rho_star, e_star);
    let initial = InitialCondition::Custom(Arc::new(move |x: f64, _y: f64| {
        let rho = rs + (x * x_dir).clamp(-0.5 * rs, 0.5 * rs);
        let e = es + (x * y_dir).clamp(-0.5 * es, 0.5 * es);
        // The clamps keep (rho, e) strictly positive, so this cannot fail.
        let dv = ic_eos
            .entropy_derivs(rho, e)
            .expect("clamped counterexample state is admissible");
        let p = -rho * rho * dv.s_rho / dv.s_e;
        Prim {
            rho,
            ux: 0.0,
            uy: 0.0,
            p,
        }
    }));

    Ok(Counterexample {
        rho_star,
        e_star,
        a,
        d,
        s2: report.s2,
        lambda_plus,
        grad_rho: gx,
        grad_e: gy,
        grad_s_sq,
        eps_bound,
        eps,
        family,
        violation,
        initial,
    })
}

/// Invert the (temperature, entropy) chart to (rho, e).
///
/// Closed form for the ideal gas; damped Newton elsewhere. The chart's
/// Jacobian determinant is p_e / rho^2, so a state with p_e = 0 is reported
/// as a bad equation of state rather than a failed iteration.
fn state_from_temperature_entropy(
    eos: &EosModel,
    t_target: f64,
    s_target: f64,
    guess: (f64, f64),
) -> Result<(f64, f64), DiagnosticsError> {
    if let EosModel::IdealGas { gamma } = eos {
        let e = t_target / (gamma - 1.0);
        let rho = (e.ln() / (gamma - 1.0) - s_target).exp();
        return Ok((rho, e));
    }
    let (mut rho, mut e) = guess;
    let tol_t = 1e-13 * (1.0 + t_target.abs());
    let tol_s = 1e-13 * (1.0 + s_target.abs());
    for _ in 0..80 {
        let dv = eos.entropy_derivs(rho, e)?;
        let t = 1.0 / dv.s_e;
        let t_rho = -dv.s_rhoe / (dv.s_e * dv.s_e);
        let t_e = -dv.s_ee / (dv.s_e * dv.s_e);
        let f1 = t - t_target;
        let f2 = dv.s - s_target;
        if f1.abs() <= tol_t && f2.abs() <= tol_s {
            return Ok((rho, e));
        }
        let det = t_rho * dv.s_e - t_e * dv.s_rho;
        let det_scale = (t_rho * dv.s_e).abs() + (t_e * dv.s_rho).abs();
        if !det.is_finite() || det.abs() <= 1e-13 * det_scale + f64::MIN_POSITIVE {
            return Err(DiagnosticsError::Eos(EosError::BadEos(format!(
                "temperature-entropy chart is singular near rho = {rho}, e = {e} (p_e = 0)"
            ))));
        }
        let mut drho = (-f1 * dv.s_e + f2 * t_e) / det;
        let mut de = (f1 * dv.s_rho - f2 * t_rho) / det;
        // Damp the step so the iterate stays in the admissible quadrant.
        while rho + drho <= 0.0 || e + de <= 0.0 {
            drho *= 0.5;
            de *= 0.5;
        }
        rho += drho;
        e += de;
    }
    Err(DiagnosticsError::BadInput(format!(
        "temperature-entropy inversion did not converge to (T, s) = ({t_target}, {s_target})"
    )))
}

/// Everything [`ns_entropy_violation_demo`] measures.
#[derive(Debug, Clone)]
pub struct NsViolationDemo {
    pub kappa: f64,
    /// Cell count of the 1D demo grid on [-1, 1].
    pub n: usize,
    pub h: f64,
    /// Discrete d/dt of the specific entropy at the grid center, evaluated
    /// from the heat-conduction energy balance at zero velocity.
    pub dsdt_at_origin: f64,
    /// Same quantity with the profile's exact curvature -2 in place of the
    /// discrete Laplacian.
    pub analytic_dsdt: f64,
    pub center_rho: f64,
    pub center_temperature: f64,
    pub center_entropy: f64,
    /// Passes exactly when a strict entropy decrease was exhibited.
    pub certificate: Certificate,
}

/// Show that Fourier heat conduction drives the spatial entropy minimum
/// down, no matter how small kappa > 0 is.
///
/// On [-1, 1] with an odd cell count (so one cell sits exactly at the
/// origin), the demo builds zero-velocity initial data from the profiles
/// `T_0 = T* - x^2 exp(-(x/w)^2)` and `s_0 = s* + x^2 exp(-(x/w)^2)` with
/// w = 0.4: the entropy has its global minimum at the origin while the
/// temperature has a strict maximum there. The heat-conduction energy
/// balance at zero velocity gives `ds/dt = s_e kappa (lap T) / rho`, which
/// the demo evaluates at the center with the discrete three-point Laplacian;
/// the profile makes it `-2 kappa s_e / rho < 0`, so the minimum decreases.
///
/// The anchor state solves (T, s) = (T*, s*); for the ideal gas T* = 1 and
/// s* is chosen so the center density is exactly 1, for user models the
/// anchor is the state at (rho, e) = (1, 1). A model whose (T, s) chart is
/// singular (p_e = 0) cannot express the construction and is rejected.
pub fn ns_entropy_violation_demo(
    eos: &EosModel,
    kappa: f64,
    n: usize,
) -> Result<NsViolationDemo, DiagnosticsError> {
    if n < 5 || n % 2 == 0 {
        return Err(DiagnosticsError::BadInput(format!(
            "demo grid needs an odd cell count of at least 5, got {n}"
        )));
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(DiagnosticsError::BadInput(format!(
            "heat conductivity must be finite and non-negative, got {kappa}"
        )));
    }

    let (t_star, s_star) = match eos {
        EosModel::IdealGas { gamma } => {
            let e = 1.0 / (gamma - 1.0);
            (1.0, e.ln() / (gamma - 1.0))
        }
        _ => {
            let dv = eos.entropy_derivs(1.0, 1.0)?;
            (1.0 / dv.s_e, dv.s)
        }
    };

    let h = 2.0 / n as f64;
    let x_at = |i: usize| -1.0 + (i as f64 + 0.5) * h;
    let bump = |x: f64| x * x * (-(x / 0.4) * (x / 0.4)).exp();
    let i_c = (n - 1) / 2;

    // Solve the center first: it both anchors the warm-started sweep and
    // surfaces a singular (T, s) chart before any off-center iteration.
    let center = state_from_temperature_entropy(eos, t_star, s_star, (1.0, 1.0))?;
    let dv_c = eos.entropy_derivs(center.0, center.1)?;
    // p_e = rho^2 (s_rho s_ee - s_e s_rhoe) / s_e^2, checked term against
    // term so an exact cancellation registers as degenerate.
    let se2 = dv_c.s_e * dv_c.s_e;
    let rho2 = center.0 * center.0;
    let pe_terms = [
        rho2 * dv_c.s_rho * dv_c.s_ee / se2,
        -rho2 * dv_c.s_rhoe / dv_c.s_e,
    ];
    let p_e = pe_terms[0] + pe_terms[1];
    let pe_scale = pe_terms[0].abs() + pe_terms[1].abs();
    if p_e.abs() <= 1e-12 * pe_scale + f64::MIN_POSITIVE {
        return Err(DiagnosticsError::Eos(EosError::BadEos(format!(
            "p_e = {p_e} at the anchor state: the temperature-entropy coordinates are degenerate"
        ))));
    }

    // Temperatures realized by the equation of state on the inverted field;
    // only the center and its two neighbors enter the Laplacian.
    let mut temperature = vec![0.0_f64; n];
    temperature[i_c] = 1.0 / dv_c.s_e;
    for (from, to) in [(i_c, i_c + 1), (i_c, i_c - 1)] {
        let mut state = center;
        // Walk outward warm-starting each inversion from its neighbor.
        let steps: Vec<usize> = if to > from {
            (to..n).collect()
        } else {
            (0..=to).rev().collect()
        };
        for i in steps {
            let x = x_at(i);
            state = state_from_temperature_entropy(eos, t_star - bump(x), s_star + bump(x), state)?;
            temperature[i] = 1.0 / eos.entropy_derivs(state.0, state.1)?.s_e;
        }
    }

    let lap_t = (temperature[i_c - 1] - 2.0 * temperature[i_c] + temperature[i_c + 1]) / (h * h);
    let dsdt = kappa * dv_c.s_e * lap_t / center.0;
    let analytic = kappa * dv_c.s_e * (-2.0) / center.0;

    let certificate = Certificate::from_worst(
        "ns_min_entropy_violated",
        dsdt,
        -1e-12,
        Some(CellAt {
            i: i_c,
            j: 0,
            t: 0.0,
        }),
    );
    Ok(NsViolationDemo {
        kappa,
        n,
        h,
        dsdt_at_origin: dsdt,
        analytic_dsdt: analytic,
        center_rho: center.0,
        center_temperature: 1.0 / dv_c.s_e,
        center_entropy: dv_c.s,
        certificate,
    })
}

/// Quality metrics for an isolated contact wave; see [`contact_quality`].
#[derive(Debug, Clone)]
pub struct ContactReport {
    /// Uniform transport velocity read from the left end of the initial
    /// state.
    pub u_ref: f64,
    pub p_ref: f64,
    /// max |u - u_ref| over all recorded cells and times.
    pub u_drift: f64,
    pub p_drift: f64,
    /// (time, width) of the density transition layer per recorded state,
    /// measured between the 10% and 90% levels of the initial end-to-end
    /// jump. NaN if a level is nowhere attained.
    pub widths: Vec<(f64, f64)>,
}

/// Measure how a scheme treats a contact wave: velocity and pressure should
/// stay at their uniform initial values and the density jump should smear as
/// slowly as possible.
pub fn contact_quality(
    traj: &Trajectory,
    grid: &Grid,
    eos: &EosModel,
) -> Result<ContactReport, DiagnosticsError> {
    if grid.ny != 1 {
        return Err(DiagnosticsError::BadInput(
            "contact metrics are defined for 1D runs".to_string(),
        ));
    }
    let first = traj
        .states
        .first()
        .ok_or_else(|| DiagnosticsError::BadInput("empty trajectory".to_string()))?;
    if first.rho.dim() != (grid.nx, 1) {
        return Err(DiagnosticsError::BadInput(format!(
            "state shape {:?} does not match the grid ({}, 1)",
            first.rho.dim(),
            grid.nx
        )));
    }

    let rho_l = first.rho[(0, 0)];
    let rho_r = first.rho[(grid.nx - 1, 0)];
    let jump = rho_r - rho_l;
    if jump.abs() <= 1e-12 * rho_l.abs().max(rho_r.abs()) {
        return Err(DiagnosticsError::BadInput(
            "contact metrics need a density jump between the domain ends".to_string(),
        ));
    }
    let sign = jump.signum();
    let level_lo = rho_l + 0.1 * jump;
    let level_hi = rho_l + 0.9 * jump;

    let e0 = interior_internal_energy(first);
    let u_ref = first.mx[(0, 0)] / rho_l;
    let dv0 = eos.entropy_derivs(rho_l, e0[(0, 0)])?;
    let p_ref = -rho_l * rho_l * dv0.s_rho / dv0.s_e;

    let mut u_drift: f64 = 0.0;
    let mut p_drift: f64 = 0.0;
    let mut widths = Vec::with_capacity(traj.states.len());
    for state in &traj.states {
        let e = interior_internal_energy(state);
        let mut x_lo = f64::NAN;
        let mut x_hi = f64::NAN;
        for i in 0..grid.nx {
            let rho = state.rho[(i, 0)];
            let u = state.mx[(i, 0)] / rho;
            let dv = eos.entropy_derivs(rho, e[(i, 0)])?;
            let p = -rho * rho * dv.s_rho / dv.s_e;
            u_drift = u_drift.max((u - u_ref).abs());
            p_drift = p_drift.max((p - p_ref).abs());

            let x = grid.xc(i);
            // Last cell still on the left level, first cell on the right one.
            if sign * (rho - level_lo) <= 0.0 {
                x_lo = x;
            }
            if sign * (rho - level_hi) >= 0.0 && x_hi.is_nan() {
                x_hi = x;
            }
        }
        widths.push((state.t, x_hi - x_lo));
    }
    Ok(ContactReport {
        u_ref,
        p_ref,
        u_drift,
        p_drift,
        widths,
    })
}

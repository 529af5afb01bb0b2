//! Explicit time integration with combined convective/viscous step control.

use std::sync::Arc;

use ndarray::Array2;

use crate::eos::{thermo_eval, EosModel};
use crate::regularization::{CoeffField, MomentumForm, RegularizationCoeffs};
use crate::solver::field::{BoundaryValues, ConservedField, Tendency};
use crate::solver::grid::{Grid, SolverError};
use crate::solver::lax::lax_step;
use crate::solver::rhs::{
    coefficient_array_mesh_scaled, coefficient_arrays_fixed, max_signal_speed, prep_stage,
    tendency_parabolic, tendency_regularized, RegularizedForm, StagePrep,
};

/// Strong-stability-preserving explicit integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    ForwardEuler,
    SspRk2,
    SspRk3,
}

/// Which spatial scheme drives the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// Entropy-consistent regularization in conservative form.
    GpRegularized,
    /// The same system written with the mass velocity.
    GpBrenner,
    /// First-order central scheme (1D, built-in viscosity, ignores the
    /// integrator and viscosity settings).
    Lax,
    /// Identical viscosity on every conserved variable.
    Parabolic,
}

/// How the regularization coefficients are chosen.
#[derive(Debug, Clone)]
pub enum ViscositySpec {
    /// User-provided coefficient fields.
    Fixed(RegularizationCoeffs),
    /// First-order mesh scaling `a = d = c0 h (|u| + c)`, refreshed from the
    /// state at the start of every step and frozen across its stages.
    MeshScaled { c0: f64, gform: MomentumForm },
}

#[derive(Debug, Clone)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub integrator: Integrator,
    /// Convective step fraction, in (0, 1].
    pub cfl: f64,
    /// Viscous step fraction, in (0, 1].
    pub viscfactor: f64,
    pub visc: ViscositySpec,
}

impl SchemeSpec {
    /// A reasonable default around a given viscosity choice: second-order
    /// integrator, half-size steps.
    #[must_use]
    pub fn new(kind: SchemeKind, visc: ViscositySpec) -> Self {
        SchemeSpec {
            kind,
            integrator: Integrator::SspRk2,
            cfl: 0.5,
            viscfactor: 0.5,
            visc,
        }
    }

    pub(crate) fn validate(&self, grid: &Grid) -> Result<(), SolverError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(SolverError::BadSetup(format!(
                "cfl must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.viscfactor > 0.0 && self.viscfactor <= 1.0) {
            return Err(SolverError::BadSetup(format!(
                "viscfactor must lie in (0, 1], got {}",
                self.viscfactor
            )));
        }
        match &self.visc {
            ViscositySpec::Fixed(coeffs) => coeffs.validate(grid.dim())?,
            ViscositySpec::MeshScaled { c0, gform } => {
                if !(c0.is_finite() && *c0 >= 0.0) {
                    return Err(SolverError::BadSetup(format!(
                        "mesh-scaled coefficient must be finite and non-negative, got {c0}"
                    )));
                }
                RegularizationCoeffs::constant(0.0, 0.0)
                    .with_gform(gform.clone())
                    .validate(grid.dim())?;
            }
        }
        if self.kind == SchemeKind::Lax && grid.dim() != 1 {
            return Err(SolverError::BadSetup(
                "the central scheme is one-dimensional".into(),
            ));
        }
        if self.kind == SchemeKind::Parabolic {
            self.parabolic_eps()?;
        }
        Ok(())
    }

    /// The single constant viscosity used by the parabolic scheme.
    fn parabolic_eps(&self) -> Result<f64, SolverError> {
        match &self.visc {
            ViscositySpec::Fixed(c) => match (&c.a, &c.d) {
                (CoeffField::Const(a), CoeffField::Const(d)) if a == d => Ok(*a),
                _ => Err(SolverError::BadSetup(
                    "the parabolic scheme takes one constant viscosity (set a = d)".into(),
                )),
            },
            ViscositySpec::MeshScaled { .. } => Err(SolverError::BadSetup(
                "the parabolic scheme takes one constant viscosity, not a mesh-scaled field".into(),
            )),
        }
    }
}

/// Source term sampled at cell centers and stage times:
/// `(x, y, t) -> [S_rho, S_mx, S_my, S_E]`.
pub type SourceFn = Arc<dyn Fn(f64, f64, f64) -> [f64; 4] + Send + Sync>;

#[derive(Clone, Default)]
pub struct AdvanceOpts {
    pub t_end: f64,
    /// Record every k-th accepted state (0: endpoints only). The initial and
    /// final states are always recorded.
    pub snapshot_stride: usize,
    /// Run the full thermodynamic admissibility check (concavity included)
    /// every k-th step; 0 disables it. Positivity of density and internal
    /// energy is enforced on every stage regardless.
    pub admissibility_stride: usize,
    /// Hard cap on step count; 0 means the built-in default.
    pub max_steps: usize,
    pub source: Option<SourceFn>,
}

impl std::fmt::Debug for AdvanceOpts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AdvanceOpts")
            .field("t_end", &self.t_end)
            .field("snapshot_stride", &self.snapshot_stride)
            .field("admissibility_stride", &self.admissibility_stride)
            .field("max_steps", &self.max_steps)
            .field("source", &self.source.as_ref().map(|_| ".."))
            .finish()
    }
}

/// Recorded run: snapshot times and states, plus the number of accepted
/// steps. With `snapshot_stride = 1` every accepted state is present.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ConservedField>,
    pub steps: usize,
}

impl Trajectory {
    #[must_use]
    pub fn final_state(&self) -> &ConservedField {
        self.states.last().expect("trajectory is never empty")
    }
}

const DEFAULT_MAX_STEPS: usize = 5_000_000;

/// Integrate `initial` to `opts.t_end`.
pub fn advance(
    initial: &ConservedField,
    grid: &Grid,
    eos: &EosModel,
    scheme: &SchemeSpec,
    opts: &AdvanceOpts,
) -> Result<Trajectory, SolverError> {
    advance_observed(initial, grid, eos, scheme, opts, &mut |_| {})
}

/// Like [`advance`], invoking `observer` on every accepted state.
pub fn advance_observed(
    initial: &ConservedField,
    grid: &Grid,
    eos: &EosModel,
    scheme: &SchemeSpec,
    opts: &AdvanceOpts,
    observer: &mut dyn FnMut(&ConservedField),
) -> Result<Trajectory, SolverError> {
    scheme.validate(grid)?;
    if initial.rho.dim() != (grid.nx, grid.ny) {
        return Err(SolverError::BadSetup(format!(
            "field shape {:?} does not match the grid ({}, {})",
            initial.rho.dim(),
            grid.nx,
            grid.ny
        )));
    }
    let span = opts.t_end - initial.t;
    if !(span >= 0.0 && span.is_finite()) {
        return Err(SolverError::BadSetup(format!(
            "t_end = {} lies before the initial time {}",
            opts.t_end, initial.t
        )));
    }
    let max_steps = if opts.max_steps == 0 {
        DEFAULT_MAX_STEPS
    } else {
        opts.max_steps
    };
    let bv = BoundaryValues::from_initial(initial, grid);
    let mut traj = Trajectory {
        times: vec![initial.t],
        states: vec![initial.clone()],
        steps: 0,
    };
    let mut state = initial.clone();
    let tiny = 1e-12 * span;
    let h_min = grid.h_min();

    while opts.t_end - state.t > tiny && span > 0.0 {
        let prep0 = prep_stage(&state, &bv, grid, eos)?;
        let coeffs = step_coefficients(scheme, &prep0, h_min)?;
        let dt = step_size(scheme, grid, &prep0, &coeffs, opts.t_end - state.t)?;
        if !(dt.is_finite() && dt > 1e-14 * span) {
            return Err(SolverError::StepFailure {
                t: state.t,
                step: traj.steps,
                reason: format!("time step collapsed to {dt}"),
            });
        }
        if traj.steps >= max_steps {
            return Err(SolverError::StepFailure {
                t: state.t,
                step: traj.steps,
                reason: format!("exceeded {max_steps} steps"),
            });
        }

        let new_state = if scheme.kind == SchemeKind::Lax {
            lax_step(&state, grid, &bv, eos, dt)?
        } else {
            let eval =
                |s: &ConservedField, pre: Option<&StagePrep>| -> Result<Tendency, SolverError> {
                    let owned;
                    let prep = match pre {
                        Some(p) => p,
                        None => {
                            owned = prep_stage(s, &bv, grid, eos)?;
                            &owned
                        }
                    };
                    let mut tend = match &coeffs {
                        StepCoefficients::Regularized { a, d, gform, form } => {
                            tendency_regularized(prep, a, d, gform, grid, *form)
                        }
                        StepCoefficients::Parabolic { eps } => tendency_parabolic(prep, *eps, grid),
                    };
                    if let Some(src) = &opts.source {
                        add_source(&mut tend, grid, src, s.t);
                    }
                    Ok(tend)
                };
            match scheme.integrator {
                Integrator::ForwardEuler => {
                    let k1 = eval(&state, Some(&prep0))?;
                    state.stepped(&k1, dt)
                }
                Integrator::SspRk2 => {
                    let k1 = eval(&state, Some(&prep0))?;
                    let u1 = state.stepped(&k1, dt);
                    let k2 = eval(&u1, None)?;
                    let u1b = u1.stepped(&k2, dt);
                    ConservedField::blended(0.5, &state, 0.5, &u1b, state.t + dt)
                }
                Integrator::SspRk3 => {
                    let k1 = eval(&state, Some(&prep0))?;
                    let u1 = state.stepped(&k1, dt);
                    let k2 = eval(&u1, None)?;
                    let u1b = u1.stepped(&k2, dt);
                    let u2 = ConservedField::blended(0.75, &state, 0.25, &u1b, state.t + 0.5 * dt);
                    let k3 = eval(&u2, None)?;
                    let u2b = u2.stepped(&k3, dt);
                    ConservedField::blended(1.0 / 3.0, &state, 2.0 / 3.0, &u2b, state.t + dt)
                }
            }
        };

        traj.steps += 1;
        observer(&new_state);
        if opts.admissibility_stride > 0 && traj.steps % opts.admissibility_stride == 0 {
            deep_admissibility_check(&new_state, grid, eos)?;
        }
        let record = opts.snapshot_stride > 0 && traj.steps % opts.snapshot_stride == 0;
        let finished = opts.t_end - new_state.t <= tiny;
        if record || finished {
            traj.times.push(new_state.t);
            traj.states.push(new_state.clone());
        }
        state = new_state;
    }
    if traj.times.len() == 1 && span == 0.0 {
        // zero-length run: the initial state is the final state
    } else if (traj.times.last().copied().unwrap() - state.t).abs() > 0.0 {
        traj.times.push(state.t);
        traj.states.push(state);
    }
    Ok(traj)
}

enum StepCoefficients {
    Regularized {
        a: Array2<f64>,
        d: Array2<f64>,
        gform: MomentumForm,
        form: RegularizedForm,
    },
    Parabolic {
        eps: f64,
    },
}

fn step_coefficients(
    scheme: &SchemeSpec,
    prep: &StagePrep,
    h_min: f64,
) -> Result<StepCoefficients, SolverError> {
    match scheme.kind {
        SchemeKind::Lax => Ok(StepCoefficients::Parabolic { eps: 0.0 }), // unused
        SchemeKind::Parabolic => Ok(StepCoefficients::Parabolic {
            eps: scheme.parabolic_eps()?,
        }),
        SchemeKind::GpRegularized | SchemeKind::GpBrenner => {
            let form = if scheme.kind == SchemeKind::GpRegularized {
                RegularizedForm::Conservative
            } else {
                RegularizedForm::Brenner
            };
            let (a, d, gform) = match &scheme.visc {
                ViscositySpec::Fixed(c) => {
                    let (a, d) = coefficient_arrays_fixed(prep, c);
                    (a, d, c.gform.clone())
                }
                ViscositySpec::MeshScaled { c0, gform } => {
                    let a = coefficient_array_mesh_scaled(prep, *c0, h_min);
                    (a.clone(), a, gform.clone())
                }
            };
            Ok(StepCoefficients::Regularized { a, d, gform, form })
        }
    }
}

fn step_size(
    scheme: &SchemeSpec,
    grid: &Grid,
    prep: &StagePrep,
    coeffs: &StepCoefficients,
    remaining: f64,
) -> Result<f64, SolverError> {
    let beta = max_signal_speed(&prep.derived);
    let h_min = grid.h_min();
    let mut dt = if beta > 0.0 {
        scheme.cfl * h_min / beta
    } else {
        remaining
    };
    if scheme.kind != SchemeKind::Lax {
        let nu = match coeffs {
            StepCoefficients::Parabolic { eps } => *eps,
            StepCoefficients::Regularized { a, d, gform, .. } => {
                let mut nu = 0.0_f64;
                for (&av, &dv) in a.iter().zip(d.iter()) {
                    if !(av.is_finite() && dv.is_finite() && av >= 0.0 && dv >= 0.0) {
                        return Err(SolverError::BadSetup(format!(
                            "coefficient fields must stay finite and non-negative, got a = {av}, d = {dv}"
                        )));
                    }
                    nu = nu.max(av).max(dv);
                }
                if let MomentumForm::Symmetric { mu, lambda_visc } = gform {
                    nu = nu.max(2.0 * mu + lambda_visc.max(0.0));
                }
                nu
            }
        };
        if nu > 0.0 {
            let dt_visc = scheme.viscfactor * h_min * h_min / (2.0 * grid.dim() as f64 * nu);
            dt = dt.min(dt_visc);
        }
    }
    Ok(dt.min(remaining))
}

fn add_source(tend: &mut Tendency, grid: &Grid, src: &SourceFn, t: f64) {
    for i in 0..grid.nx {
        let x = grid.xc(i);
        for j in 0..grid.ny {
            let s = src(x, grid.yc(j), t);
            tend.rho[(i, j)] += s[0];
            tend.mx[(i, j)] += s[1];
            tend.my[(i, j)] += s[2];
            tend.en[(i, j)] += s[3];
        }
    }
}

/// Full thermodynamic admissibility sweep: every cell must evaluate to a
/// strictly convex, positive-temperature state.
pub fn deep_admissibility_check(
    state: &ConservedField,
    grid: &Grid,
    eos: &EosModel,
) -> Result<(), SolverError> {
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let rho = state.rho[(i, j)];
            if !(rho > 0.0) {
                return Err(SolverError::NonAdmissible {
                    t: state.t,
                    detail: format!("rho = {rho} at cell ({i}, {j})"),
                });
            }
            let ux = state.mx[(i, j)] / rho;
            let uy = state.my[(i, j)] / rho;
            let e = state.en[(i, j)] / rho - 0.5 * (ux * ux + uy * uy);
            if !(e > 0.0) {
                return Err(SolverError::NonAdmissible {
                    t: state.t,
                    detail: format!("internal energy = {e} at cell ({i}, {j})"),
                });
            }
            if let Err(err) = thermo_eval(rho, e, eos) {
                return Err(SolverError::NonAdmissible {
                    t: state.t,
                    detail: format!("cell ({i}, {j}): {err}"),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::grid::BoundaryKind;
    use crate::solver::ic::{initial_condition, InitialCondition};
    use crate::solver::rhs::rhs_parabolic;

    fn smooth_ic() -> InitialCondition {
        InitialCondition::Smooth {
            rho_mean: 2.0,
            rho_amp: 0.3,
            u_mean: 0.5,
            u_amp: 0.2,
            p_mean: 2.0,
            p_amp: 0.3,
        }
    }

    fn scheme(kind: SchemeKind) -> SchemeSpec {
        SchemeSpec::new(
            kind,
            ViscositySpec::Fixed(RegularizationCoeffs::constant(0.01, 0.02)),
        )
    }

    #[test]
    fn conserves_totals_on_periodic_domains() {
        let grid = Grid::new_1d(48, 0.0, 1.0, BoundaryKind::Periodic).unwrap();
        let eos = EosModel::ideal_gas(1.4).unwrap();
        let initial = initial_condition(&smooth_ic(), &grid, &eos).unwrap();
        let before = initial.totals(&grid);
        for kind in [
            SchemeKind::GpRegularized,
            SchemeKind::GpBrenner,
            SchemeKind::Parabolic,
            SchemeKind::Lax,
        ] {
            let mut sch = scheme(kind);
            if kind == SchemeKind::Parabolic {
                sch.visc = ViscositySpec::Fixed(RegularizationCoeffs::constant(0.02, 0.02));
            }
            let opts = AdvanceOpts {
                t_end: 0.02,
                snapshot_stride: 0,
                ..Default::default()
            };
            let traj = advance(&initial, &grid, &eos, &sch, &opts).unwrap();
            let after = traj.final_state().totals(&grid);
            for k in 0..4 {
                let scale = before[k].abs().max(1.0);
                assert!(
                    (after[k] - before[k]).abs() < 1e-12 * scale,
                    "{kind:?} drifted component {k}: {} -> {}",
                    before[k],
                    after[k]
                );
            }
            assert!((traj.final_state().t - 0.02).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_states_are_fixed_points() {
        let grid = Grid::new_1d(16, 0.0, 1.0, BoundaryKind::Periodic).unwrap();
        let eos = EosModel::ideal_gas(1.4).unwrap();
        let ic = InitialCondition::Riemann {
            left: crate::solver::ic::Prim::new_1d(1.2, 0.4, 1.5),
            right: crate::solver::ic::Prim::new_1d(1.2, 0.4, 1.5),
            x_split: 0.5,
        };
        let initial = initial_condition(&ic, &grid, &eos).unwrap();
        for integrator in [Integrator::ForwardEuler, Integrator::SspRk3] {
            let mut sch = scheme(SchemeKind::GpRegularized);
            sch.integrator = integrator;
            let opts = AdvanceOpts {
                t_end: 0.05,
                snapshot_stride: 0,
                ..Default::default()
            };
            let traj = advance(&initial, &grid, &eos, &sch, &opts).unwrap();
            let f = traj.final_state();
            for i in 0..16 {
                assert!((f.rho[(i, 0)] - 1.2).abs() < 1e-13);
                assert!((f.mx[(i, 0)] - 0.48).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn snapshot_stride_and_observer_agree_on_step_count() {
        let grid = Grid::new_1d(24, 0.0, 1.0, BoundaryKind::Periodic).unwrap();
        let eos = EosModel::ideal_gas(1.4).unwrap();
        let initial = initial_condition(&smooth_ic(), &grid, &eos).unwrap();
        let sch = scheme(SchemeKind::GpRegularized);
        let opts = AdvanceOpts {
            t_end: 0.01,
            snapshot_stride: 1,
            ..Default::default()
        };
        let mut seen = 0usize;
        let traj =
            advance_observed(&initial, &grid, &eos, &sch, &opts, &mut |_| seen += 1).unwrap();
        assert_eq!(seen, traj.steps);
        assert_eq!(traj.states.len(), traj.steps + 1);
        // times strictly increase and end at t_end
        for w in traj.times.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!((traj.times.last().unwrap() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn zero_span_returns_the_initial_state_only() {
        let grid = Grid::new_1d(8, 0.0, 1.0, BoundaryKind::Periodic).unwrap();
        let eos = EosModel::ideal_gas(1.4).unwrap();
        let initial = initial_condition(&smooth_ic(), &grid, &eos).unwrap();
        let sch = scheme(SchemeKind::GpRegularized);
        let opts = AdvanceOpts {
            t_end: 0.0,
            ..Default::default()
        };
        let traj = advance(&initial, &grid, &eos, &sch, &opts).unwrap();
        assert_eq!(traj.states.len(), 1);
        assert_eq!(traj.steps, 0);
    }

    #[test]
    fn central_step_equals_forward_euler_parabolic_with_grid_viscosity() {
        let grid = Grid::new_1d(32, 0.0, 1.0, BoundaryKind::Periodic).unwrap();
        let eos = EosModel::ideal_gas(1.4).unwrap();
        let initial = initial_condition(&smooth_ic(), &grid, &eos).unwrap();
        let bv = BoundaryValues::from_initial(&initial, &grid);
        let dt = 2e-3;
        let eps = 0.5 * grid.dx * grid.dx / dt;
        let a = lax_step(&initial, &grid, &bv, &eos, dt).unwrap();
        let tend = rhs_parabolic(&initial, &grid, &bv, eps, &eos).unwrap();
        let b = initial.stepped(&tend, dt);
        let mut scale = 0.0_f64;
        for v in initial.en.iter() {
            scale = scale.max(v.abs());
        }
        for i in 0..32 {
            assert!((a.rho[(i, 0)] - b.rho[(i, 0)]).abs() <= 1e-14 * scale);
            assert!((a.mx[(i, 0)] - b.mx[(i, 0)]).abs() <= 1e-14 * scale);
            assert!((a.en[(i, 0)] - b.en[(i, 0)]).abs() <= 1e-14 * scale);
        }
    }

    #[test]
    fn validates_scheme_parameters() {
        let grid = Grid::new_1d(8, 0.0, 1.0, BoundaryKind::Periodic).unwrap();
        let eos = EosModel::ideal_gas(1.4).unwrap();
        let initial = initial_condition(&smooth_ic(), &grid, &eos).unwrap();
        let mut sch = scheme(SchemeKind::GpRegularized);
        sch.cfl = 0.0;
        let opts = AdvanceOpts {
            t_end: 0.01,
            ..Default::default()
        };
        assert!(matches!(
            advance(&initial, &grid, &eos, &sch, &opts),
            Err(SolverError::BadSetup(_))
        ));
        let mut sch = scheme(SchemeKind::Parabolic);
        sch.visc = ViscositySpec::Fixed(RegularizationCoeffs::constant(0.01, 0.02));
        assert!(matches!(
            advance(&initial, &grid, &eos, &sch, &opts),
            Err(SolverError::BadSetup(_))
        ));
        let mut sch = scheme(SchemeKind::Lax);
        sch.cfl = 1.5;
        assert!(matches!(
            advance(&initial, &grid, &eos, &sch, &opts),
            Err(SolverError::BadSetup(_))
        ));
    }

    #[test]
    fn manufactured_wave_converges_at_second_order() {
        let eos = EosModel::ideal_gas(1.4).unwrap();
        let source: SourceFn = Arc::new(|x, _y, t| crate::solver::mms::source(x, t, 1.4));
        let mut errors = Vec::new();
        for n in [32, 64, 128] {
            let grid = Grid::new_1d(n, 0.0, 1.0, BoundaryKind::Periodic).unwrap();
            let initial =
                initial_condition(&InitialCondition::ManufacturedWave, &grid, &eos).unwrap();
            let sch = SchemeSpec {
                kind: SchemeKind::GpRegularized,
                integrator: Integrator::SspRk3,
                cfl: 0.4,
                viscfactor: 0.5,
                visc: ViscositySpec::Fixed(RegularizationCoeffs::constant(0.0, 0.0)),
            };
            let opts = AdvanceOpts {
                t_end: 0.2,
                snapshot_stride: 0,
                source: Some(source.clone()),
                ..Default::default()
            };
            let traj = advance(&initial, &grid, &eos, &sch, &opts).unwrap();
            let f = traj.final_state();
            let mut l1 = 0.0;
            for i in 0..n {
                let exact = crate::solver::mms::exact_conserved(grid.xc(i), 0.2, 1.4);
                l1 += (f.rho[(i, 0)] - exact[0]).abs() * grid.dx;
            }
            errors.push(l1);
        }
        let o1 = (errors[0] / errors[1]).log2();
        let o2 = (errors[1] / errors[2]).log2();
        assert!(
            o1 > 1.9 && o2 > 1.9,
            "expected second-order convergence, got {o1:.2}, {o2:.2} from {errors:?}"
        );
    }
}

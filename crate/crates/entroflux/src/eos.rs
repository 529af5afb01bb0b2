//! Specific-entropy equations of state and derived thermodynamics.
//!
//! A model supplies the specific entropy s(ρ,e) and its partials up to second
//! order. Everything else — pressure, temperature, their partials, the sound
//! speed, c_p, the convexity matrix Σ and the Hessian combination ℍ₂ — follows
//! from the identities T ds = de + p dτ (τ = 1/ρ), s_e = 1/T and
//! p s_e + ρ² s_ρ = 0.
//!
//! Admissibility of a state means: s_e > 0 (positive temperature) together
//! with strict concavity of (ρ,e) ↦ ρ s, i.e. ∂_ρ(ρ²s_ρ) < 0, s_ee < 0 and
//! ∂_ρ(ρ²s_ρ)·s_ee − ρ²s_ρe² > 0. Positivity of the pressure is *not* part of
//! admissibility and is never checked.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::Sym2;

/// Relative tolerance of the permanent determinant self-check in
/// [`thermo_eval`]: det Σ is computed both directly and through the pressure
/// and temperature partials, and the two routes must agree this closely.
pub const DET_SIGMA_SELF_CHECK_REL: f64 = 1e-10;

/// s(ρ,e) and its partial derivatives up to second order at one state.
#[derive(Debug, Clone, Copy)]
pub struct EntropyDerivs {
    pub s: f64,
    pub s_rho: f64,
    pub s_e: f64,
    pub s_rhorho: f64,
    pub s_rhoe: f64,
    pub s_ee: f64,
}

impl EntropyDerivs {
    /// ∂_ρ(ρ² s_ρ) = 2ρ s_ρ + ρ² s_ρρ, the (1,1) building block of Σ.
    #[must_use]
    pub fn d_rho_rho2_s_rho(&self, rho: f64) -> f64 {
        2.0 * rho * self.s_rho + rho * rho * self.s_rhorho
    }
}

/// Signature of a user-supplied entropy evaluator.
pub type EntropyFn = dyn Fn(f64, f64) -> EntropyDerivs + Send + Sync;

/// An equation of state given through its specific entropy.
#[derive(Clone)]
pub enum EosModel {
    /// s = log(e^{1/(γ−1)} ρ⁻¹); admissible everywhere in ρ,e > 0.
    IdealGas { gamma: f64 },
    /// Any s(ρ,e) with analytic derivatives; admissibility is per-state.
    UserSupplied { entropy: Arc<EntropyFn> },
}

impl fmt::Debug for EosModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EosModel::IdealGas { gamma } => write!(f, "IdealGas {{ gamma: {gamma} }}"),
            EosModel::UserSupplied { .. } => write!(f, "UserSupplied {{ .. }}"),
        }
    }
}

impl EosModel {
    /// Ideal gas with ratio of specific heats `gamma` (must exceed 1).
    pub fn ideal_gas(gamma: f64) -> Result<Self, EosError> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(EosError::BadEos(format!(
                "ideal gas requires gamma > 1, got {gamma}"
            )));
        }
        Ok(EosModel::IdealGas { gamma })
    }

    pub fn user_supplied<F>(entropy: F) -> Self
    where
        F: Fn(f64, f64) -> EntropyDerivs + Send + Sync + 'static,
    {
        EosModel::UserSupplied {
            entropy: Arc::new(entropy),
        }
    }

    /// Entropy and derivatives at (ρ,e). Errors on states outside ρ,e > 0.
    pub fn entropy_derivs(&self, rho: f64, e: f64) -> Result<EntropyDerivs, EosError> {
        if !(rho > 0.0 && e > 0.0) || !rho.is_finite() || !e.is_finite() {
            return Err(EosError::DomainError { rho, e });
        }
        Ok(match self {
            EosModel::IdealGas { gamma } => {
                let gm1 = gamma - 1.0;
                EntropyDerivs {
                    s: e.ln() / gm1 - rho.ln(),
                    s_rho: -1.0 / rho,
                    s_e: 1.0 / (gm1 * e),
                    s_rhorho: 1.0 / (rho * rho),
                    s_rhoe: 0.0,
                    s_ee: -1.0 / (gm1 * e * e),
                }
            }
            EosModel::UserSupplied { entropy } => entropy(rho, e),
        })
    }
}

/// Thermodynamic state derived from the entropy at one (ρ,e).
#[derive(Debug, Clone, Copy)]
pub struct ThermoDerivs {
    pub rho: f64,
    pub e: f64,
    pub derivs: EntropyDerivs,
    pub p: f64,
    pub t: f64,
    pub p_rho: f64,
    pub p_e: f64,
    pub t_rho: f64,
    pub t_e: f64,
    /// Squared sound speed c² = p_ρ − (s_ρ/s_e) p_e.
    pub c2: f64,
    /// Specific heat at constant pressure.
    pub cp: f64,
    /// Convexity matrix Σ = [[ρ⁻¹∂_ρ(ρ²s_ρ), ρ s_ρe], [ρ s_ρe, ρ s_ee]].
    pub sigma: Sym2,
    pub det_sigma: f64,
    /// ℍ₂ at α = 1 (see [`h2_matrix`] for general α).
    pub h2: Sym2,
}

/// Non-erroring admissibility probe; see [`check_admissibility`].
#[derive(Debug, Clone, Copy)]
pub struct AdmissibilityReport {
    /// All three concavity conditions of ρs hold.
    pub convex: bool,
    /// s_e > 0.
    pub positive_temperature: bool,
    /// c² > 0 (implied by `convex && positive_temperature`; reported
    /// independently as a cross-check).
    pub hyperbolic: bool,
    /// c_p·T_e, which admissibility forces above 1.
    pub cp_te: f64,
}

impl AdmissibilityReport {
    #[must_use]
    pub fn admissible(&self) -> bool {
        self.convex && self.positive_temperature
    }
}

#[derive(Debug, Error)]
pub enum EosError {
    #[error("bad EOS: {0}")]
    BadEos(String),
    #[error("state outside thermodynamic domain: rho = {rho}, e = {e} (need both > 0)")]
    DomainError { rho: f64, e: f64 },
    #[error("non-admissible state at rho = {rho}, e = {e}: {reason}")]
    NonAdmissibleState {
        rho: f64,
        e: f64,
        reason: &'static str,
    },
    #[error("entropy derivatives inconsistent at rho = {rho}, e = {e}: {detail}")]
    InconsistentDerivatives { rho: f64, e: f64, detail: String },
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Full thermodynamic evaluation at one admissible state.
///
/// Errors on domain violations and on non-admissible states. det Σ is computed
/// through two routes (direct determinant, and s_e³(p_ρT_e − p_eT_ρ) built
/// from the derived partials) which must agree to
/// [`DET_SIGMA_SELF_CHECK_REL`]. The two routes coincide algebraically, so
/// this is a tripwire against transcription errors in the partial-derivative
/// formulas, not a check on the supplied entropy evaluator — for the latter
/// use [`validate_model`].
pub fn thermo_eval(rho: f64, e: f64, eos: &EosModel) -> Result<ThermoDerivs, EosError> {
    let dv = eos.entropy_derivs(rho, e)?;
    let drr = dv.d_rho_rho2_s_rho(rho);

    if !(dv.s_e > 0.0) {
        return Err(EosError::NonAdmissibleState {
            rho,
            e,
            reason: "s_e <= 0 (non-positive temperature)",
        });
    }
    let det_sigma_direct = drr * dv.s_ee - rho * rho * dv.s_rhoe * dv.s_rhoe;
    if !(drr < 0.0 && dv.s_ee < 0.0 && det_sigma_direct > 0.0) {
        return Err(EosError::NonAdmissibleState {
            rho,
            e,
            reason: "entropy concavity conditions violated",
        });
    }

    let se = dv.s_e;
    let p = -rho * rho * dv.s_rho / se;
    let t = 1.0 / se;
    let p_e = rho * rho / (se * se) * (dv.s_rho * dv.s_ee - se * dv.s_rhoe);
    let p_rho = (rho * rho * dv.s_rho * dv.s_rhoe - se * drr) / (se * se);
    let t_e = -dv.s_ee / (se * se);
    let t_rho = -dv.s_rhoe / (se * se);
    let c2 = p_rho - (dv.s_rho / se) * p_e;
    let cp = (p_rho * se - p_e * dv.s_rho) / (se * (p_rho * t_e - p_e * t_rho));

    let det_sigma_via_partials = se * se * se * (p_rho * t_e - p_e * t_rho);
    if rel_gap(det_sigma_direct, det_sigma_via_partials) > DET_SIGMA_SELF_CHECK_REL {
        return Err(EosError::InconsistentDerivatives {
            rho,
            e,
            detail: format!(
                "detSigma direct = {det_sigma_direct:e}, \
                 via pressure/temperature partials = {det_sigma_via_partials:e}"
            ),
        });
    }

    let sigma = Sym2::new(drr / rho, rho * dv.s_rhoe, rho * dv.s_ee);
    let derivs = ThermoDerivs {
        rho,
        e,
        derivs: dv,
        p,
        t,
        p_rho,
        p_e,
        t_rho,
        t_e,
        c2,
        cp,
        sigma,
        det_sigma: det_sigma_direct,
        h2: Sym2::new(0.0, 0.0, 0.0), // replaced below
    };
    let h2 = h2_matrix(&derivs, 1.0);
    Ok(ThermoDerivs { h2, ..derivs })
}

/// The matrix ℍ₂^α with entries
/// h₁₁ = α c_p⁻¹ s_ρ² + ρ⁻²∂_ρ(ρ²s_ρ), h₁₂ = α c_p⁻¹ s_ρ s_e + s_ρe,
/// h₂₂ = α c_p⁻¹ s_e² + s_ee.
///
/// At α = 1 it is singular (det = 0), negative semi-definite, and satisfies
/// h₂₂ p_ρ − h₁₂ p_e = 0; admissibility makes h₂₂ < 0 for every α ≤ 1.
#[must_use]
pub fn h2_matrix(td: &ThermoDerivs, alpha: f64) -> Sym2 {
    let dv = &td.derivs;
    let acp = alpha / td.cp;
    let drr = dv.d_rho_rho2_s_rho(td.rho);
    Sym2::new(
        acp * dv.s_rho * dv.s_rho + drr / (td.rho * td.rho),
        acp * dv.s_rho * dv.s_e + dv.s_rhoe,
        acp * dv.s_e * dv.s_e + dv.s_ee,
    )
}

/// Probe a state without gating: reports which admissibility conditions hold.
///
/// Unlike [`thermo_eval`] this never fails on a non-admissible state — that is
/// its purpose — but states outside ρ,e > 0 are still domain errors.
pub fn check_admissibility(
    rho: f64,
    e: f64,
    eos: &EosModel,
) -> Result<AdmissibilityReport, EosError> {
    let dv = eos.entropy_derivs(rho, e)?;
    let drr = dv.d_rho_rho2_s_rho(rho);
    let det_sigma = drr * dv.s_ee - rho * rho * dv.s_rhoe * dv.s_rhoe;

    let convex = drr < 0.0 && dv.s_ee < 0.0 && det_sigma > 0.0;
    let positive_temperature = dv.s_e > 0.0;

    // Derived quantities may be meaningless off the admissible set; compute
    // them defensively and let non-finite values read as "not hyperbolic".
    let se = dv.s_e;
    let (hyperbolic, cp_te) = if se != 0.0 {
        let p_e = rho * rho / (se * se) * (dv.s_rho * dv.s_ee - se * dv.s_rhoe);
        let p_rho = (rho * rho * dv.s_rho * dv.s_rhoe - se * drr) / (se * se);
        let t_e = -dv.s_ee / (se * se);
        let t_rho = -dv.s_rhoe / (se * se);
        let c2 = p_rho - (dv.s_rho / se) * p_e;
        let cp = (p_rho * se - p_e * dv.s_rho) / (se * (p_rho * t_e - p_e * t_rho));
        (c2.is_finite() && c2 > 0.0, cp * t_e)
    } else {
        (false, f64::NAN)
    };

    Ok(AdmissibilityReport {
        convex,
        positive_temperature,
        hyperbolic,
        cp_te,
    })
}

/// Finite-difference consistency of an entropy evaluator at one state.
///
/// Compares the analytic first and second derivatives against centered
/// differences of s at spacings h and h/2 and reports the observed order
/// log₂(err_h / err_{h/2}) of the worst derivative. A consistent evaluator
/// shows order ≈ 2 (the differences converge to the analytic values at the
/// truncation rate); an inconsistent one shows order ≈ 0.
#[derive(Debug, Clone, Copy)]
pub struct DerivativeConsistency {
    pub max_rel_err_h: f64,
    pub max_rel_err_half_h: f64,
    pub observed_order: f64,
}

pub fn derivative_consistency(
    eos: &EosModel,
    rho: f64,
    e: f64,
    h: f64,
) -> Result<DerivativeConsistency, EosError> {
    let errs = |h: f64| -> Result<f64, EosError> {
        let dv = eos.entropy_derivs(rho, e)?;
        let s = |r: f64, ee: f64| -> Result<f64, EosError> { Ok(eos.entropy_derivs(r, ee)?.s) };
        let hr = h * rho;
        let he = h * e;
        let fd_s_rho = (s(rho + hr, e)? - s(rho - hr, e)?) / (2.0 * hr);
        let fd_s_e = (s(rho, e + he)? - s(rho, e - he)?) / (2.0 * he);
        let fd_s_rhorho = (s(rho + hr, e)? - 2.0 * dv.s + s(rho - hr, e)?) / (hr * hr);
        let fd_s_ee = (s(rho, e + he)? - 2.0 * dv.s + s(rho, e - he)?) / (he * he);
        let fd_s_rhoe = (s(rho + hr, e + he)? - s(rho + hr, e - he)? - s(rho - hr, e + he)?
            + s(rho - hr, e - he)?)
            / (4.0 * hr * he);
        let pairs = [
            (fd_s_rho, dv.s_rho, 1.0 / rho),
            (fd_s_e, dv.s_e, 1.0 / e),
            (fd_s_rhorho, dv.s_rhorho, 1.0 / (rho * rho)),
            (fd_s_ee, dv.s_ee, 1.0 / (e * e)),
            (fd_s_rhoe, dv.s_rhoe, 1.0 / (rho * e)),
        ];
        // Scale each error by a natural magnitude so derivatives that vanish
        // (e.g. s_ρe for the ideal gas) still contribute meaningfully.
        Ok(pairs
            .iter()
            .map(|(fd, an, scale)| (fd - an).abs() / (an.abs().max(scale.abs())))
            .fold(0.0, f64::max))
    };
    let err_h = errs(h)?;
    let err_half = errs(0.5 * h)?;
    let observed_order = if err_h <= f64::EPSILON || err_half <= f64::EPSILON {
        // Differences already at rounding level: consistency is beyond doubt.
        f64::INFINITY
    } else {
        (err_h / err_half).log2()
    };
    Ok(DerivativeConsistency {
        max_rel_err_h: err_h,
        max_rel_err_half_h: err_half,
        observed_order,
    })
}

/// Check an entropy evaluator for internal consistency at sample states.
///
/// Every state must be admissible, and the analytic derivatives must pass the
/// finite-difference test of [`derivative_consistency`] (observed convergence
/// order ≥ 1.5 unless the errors are already at rounding level). This is the
/// gate that catches a user-supplied model whose derivative fields do not
/// match its own s values — run it once at setup before trusting the model in
/// a solver loop.
pub fn validate_model(eos: &EosModel, states: &[(f64, f64)]) -> Result<(), EosError> {
    for &(rho, e) in states {
        thermo_eval(rho, e, eos)?;
        // h large enough that second-difference truncation (~h²) dominates
        // rounding (~machine-eps/h²), so the order estimate is clean.
        let chk = derivative_consistency(eos, rho, e, 1e-2)?;
        let at_rounding_level = chk.max_rel_err_h < 1e-7;
        if !at_rounding_level && !(chk.observed_order >= 1.5) {
            return Err(EosError::InconsistentDerivatives {
                rho,
                e,
                detail: format!(
                    "finite-difference check converges at order {:.2} \
                     (errors {:.3e} at h, {:.3e} at h/2); expected order about 2",
                    chk.observed_order, chk.max_rel_err_h, chk.max_rel_err_half_h
                ),
            });
        }
    }
    Ok(())
}

/// Invert p(ρ,e) = p at fixed ρ for the internal energy.
///
/// Closed form for the ideal gas; Newton iteration with bisection fallback
/// otherwise (monotonicity in e, i.e. p_e > 0, is assumed — true for every
/// admissible state with positive p_e, and checked a posteriori).
pub fn energy_from_pressure(eos: &EosModel, rho: f64, p: f64) -> Result<f64, EosError> {
    if !(rho > 0.0) {
        return Err(EosError::DomainError { rho, e: f64::NAN });
    }
    match eos {
        EosModel::IdealGas { gamma } => {
            if !(p > 0.0) {
                return Err(EosError::BadEos(format!(
                    "ideal gas requires p > 0 to invert for e, got {p}"
                )));
            }
            Ok(p / ((gamma - 1.0) * rho))
        }
        EosModel::UserSupplied { .. } => {
            let pressure = |e: f64| -> Result<f64, EosError> {
                let dv = eos.entropy_derivs(rho, e)?;
                if dv.s_e <= 0.0 {
                    return Err(EosError::NonAdmissibleState {
                        rho,
                        e,
                        reason: "s_e <= 0 while inverting pressure",
                    });
                }
                Ok(-rho * rho * dv.s_rho / dv.s_e)
            };
            // Bracket the root, expanding geometrically from e = 1.
            let (mut lo, mut hi) = (1.0_f64, 1.0_f64);
            for _ in 0..200 {
                if pressure(lo)? <= p {
                    break;
                }
                lo *= 0.5;
            }
            for _ in 0..200 {
                if pressure(hi)? >= p {
                    break;
                }
                hi *= 2.0;
            }
            if !(pressure(lo)? <= p && pressure(hi)? >= p) {
                return Err(EosError::BadEos(format!(
                    "could not bracket e with p(rho={rho}, e) = {p}"
                )));
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if pressure(mid)? < p {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ideal(gamma: f64) -> EosModel {
        EosModel::ideal_gas(gamma).unwrap()
    }

    // Frozen closed-form values, derived independently (symbolic
    // differentiation of s = log(e^{1/(γ−1)} ρ⁻¹) and the defining identities).
    #[test]
    fn ideal_gas_frozen_states() {
        struct Case {
            rho: f64,
            e: f64,
            gamma: f64,
            s: f64,
            p: f64,
            t: f64,
            c2: f64,
            cp: f64,
            det_sigma: f64,
        }
        let cases = [
            Case {
                rho: 1.0,
                e: 1.0,
                gamma: 1.4,
                s: 0.0,
                p: 0.4,
                t: 0.4,
                c2: 0.56,
                cp: 3.5,
                det_sigma: 2.5,
            },
            Case {
                rho: 2.0,
                e: 0.5,
                gamma: 1.4,
                s: -2.4260151319598089,
                p: 0.4,
                t: 0.2,
                c2: 0.28,
                cp: 3.5,
                det_sigma: 10.0,
            },
            Case {
                rho: 1.0,
                e: 1.0,
                gamma: 2.0,
                s: 0.0,
                p: 1.0,
                t: 1.0,
                c2: 2.0,
                cp: 2.0,
                det_sigma: 1.0,
            },
            Case {
                rho: 0.5,
                e: 2.0,
                gamma: 3.0,
                s: 1.0397207708399181,
                p: 2.0,
                t: 4.0,
                c2: 12.0,
                cp: 1.5,
                det_sigma: 0.125,
            },
        ];
        for c in cases {
            let td = thermo_eval(c.rho, c.e, &ideal(c.gamma)).unwrap();
            assert_relative_eq!(td.derivs.s, c.s, epsilon = 1e-14, max_relative = 1e-14);
            assert_relative_eq!(td.p, c.p, max_relative = 1e-14);
            assert_relative_eq!(td.t, c.t, max_relative = 1e-14);
            assert_relative_eq!(td.c2, c.c2, max_relative = 1e-13);
            assert_relative_eq!(td.cp, c.cp, max_relative = 1e-13);
            assert_relative_eq!(td.det_sigma, c.det_sigma, max_relative = 1e-13);
            // c_p T_e = γ exactly for the ideal gas
            assert_relative_eq!(td.cp * td.t_e, c.gamma, max_relative = 1e-13);
        }
    }

    #[test]
    fn ideal_gas_closed_form_partials() {
        let td = thermo_eval(2.0, 0.5, &ideal(1.4)).unwrap();
        // p = (γ−1)ρe: p_ρ = (γ−1)e, p_e = (γ−1)ρ; T = (γ−1)e: T_e = γ−1.
        assert_relative_eq!(td.p_rho, 0.4 * 0.5, max_relative = 1e-14);
        assert_relative_eq!(td.p_e, 0.4 * 2.0, max_relative = 1e-14);
        assert_relative_eq!(td.t_e, 0.4, max_relative = 1e-14);
        assert_relative_eq!(td.t_rho, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn pressure_identity_and_a9() {
        // p s_e + ρ² s_ρ = 0 and c_p detΣ = s_e³ c² on a grid of states.
        for &gamma in &[1.2, 1.4, 2.0, 3.0] {
            let eos = ideal(gamma);
            for i in 1..=5 {
                for j in 1..=5 {
                    let rho = 0.3 * i as f64;
                    let e = 0.4 * j as f64;
                    let td = thermo_eval(rho, e, &eos).unwrap();
                    let dv = td.derivs;
                    let lhs = td.p * dv.s_e;
                    let rhs = -rho * rho * dv.s_rho;
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
                    assert_relative_eq!(
                        td.cp * td.det_sigma,
                        dv.s_e.powi(3) * td.c2,
                        max_relative = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn h2_is_singular_negative_and_pressure_orthogonal_at_alpha_one() {
        let td = thermo_eval(1.0, 1.0, &ideal(1.4)).unwrap();
        let h2 = td.h2;
        // All entries equal −5/7 at this state.
        assert_relative_eq!(h2.a11, -5.0 / 7.0, max_relative = 1e-13);
        assert_relative_eq!(h2.a12, -5.0 / 7.0, max_relative = 1e-13);
        assert_relative_eq!(h2.a22, -5.0 / 7.0, max_relative = 1e-13);
        let scale = h2.a11.abs().max(h2.a22.abs()).powi(2);
        assert!(h2.det().abs() <= 1e-12 * scale);
        assert!(h2.a22 < 0.0);
        assert!((h2.a22 * td.p_rho - h2.a12 * td.p_e).abs() <= 1e-12);
        let (lo, hi) = h2.eigenvalues();
        assert!(lo < 0.0 && hi.abs() < 1e-12);
    }

    #[test]
    fn h2_alpha_determinant_tracks_det_sigma() {
        // det(ℍ₂^α) = (1−α) ρ⁻² detΣ
        for &alpha in &[-1.0, 0.0, 0.3, 0.9, 1.0] {
            let td = thermo_eval(2.0, 0.5, &ideal(1.4)).unwrap();
            let h = h2_matrix(&td, alpha);
            assert_relative_eq!(
                h.det(),
                (1.0 - alpha) * td.det_sigma / (td.rho * td.rho),
                epsilon = 1e-12,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn admissibility_report_ideal_gas() {
        let rep = check_admissibility(1.0, 1.0, &ideal(1.4)).unwrap();
        assert!(rep.convex && rep.positive_temperature && rep.hyperbolic);
        assert!(rep.admissible());
        assert_relative_eq!(rep.cp_te, 1.4, max_relative = 1e-13);
    }

    #[test]
    fn admissibility_report_flags_nonconvex_eos() {
        // s convex in e (s_ee > 0): not admissible, but the probe must not error.
        let eos = EosModel::user_supplied(|rho, e| EntropyDerivs {
            s: e * e - rho.ln(),
            s_rho: -1.0 / rho,
            s_e: 2.0 * e,
            s_rhorho: 1.0 / (rho * rho),
            s_rhoe: 0.0,
            s_ee: 2.0,
        });
        let rep = check_admissibility(1.0, 1.0, &eos).unwrap();
        assert!(!rep.convex);
        assert!(rep.positive_temperature);
        assert!(!rep.admissible());
        assert!(matches!(
            thermo_eval(1.0, 1.0, &eos),
            Err(EosError::NonAdmissibleState { .. })
        ));
    }

    #[test]
    fn domain_errors() {
        let eos = ideal(1.4);
        assert!(matches!(
            thermo_eval(-1.0, 1.0, &eos),
            Err(EosError::DomainError { .. })
        ));
        assert!(matches!(
            thermo_eval(1.0, 0.0, &eos),
            Err(EosError::DomainError { .. })
        ));
        assert!(EosModel::ideal_gas(1.0).is_err());
        assert!(EosModel::ideal_gas(f64::NAN).is_err());
    }

    #[test]
    fn inconsistent_user_derivatives_abort_loudly() {
        // Correct thermodynamics except for a mixed partial that does not
        // match the s values: validate_model must reject the evaluator.
        let eos = EosModel::user_supplied(|rho, e| EntropyDerivs {
            s: 2.5 * e.ln() - rho.ln(),
            s_rho: -1.0 / rho,
            s_e: 2.5 / e,
            s_rhorho: 1.0 / (rho * rho),
            s_rhoe: 0.1, // wrong: true mixed partial is 0
            s_ee: -2.5 / (e * e),
        });
        match validate_model(&eos, &[(1.0, 1.0), (2.0, 0.5)]) {
            Err(EosError::InconsistentDerivatives { .. }) => {}
            other => panic!("expected InconsistentDerivatives, got {other:?}"),
        }
        // a faithful evaluator sails through the same gate
        let good = ideal(1.4);
        validate_model(&good, &[(1.0, 1.0), (2.0, 0.5), (0.3, 3.0)]).unwrap();
    }

    #[test]
    fn user_supplied_matching_ideal_gas_passes_everything() {
        let gamma = 1.4;
        let user = EosModel::user_supplied(move |rho, e| {
            let gm1 = gamma - 1.0;
            EntropyDerivs {
                s: e.ln() / gm1 - rho.ln(),
                s_rho: -1.0 / rho,
                s_e: 1.0 / (gm1 * e),
                s_rhorho: 1.0 / (rho * rho),
                s_rhoe: 0.0,
                s_ee: -1.0 / (gm1 * e * e),
            }
        });
        let a = thermo_eval(1.7, 0.9, &user).unwrap();
        let b = thermo_eval(1.7, 0.9, &ideal(gamma)).unwrap();
        assert_relative_eq!(a.p, b.p, max_relative = 1e-14);
        assert_relative_eq!(a.cp, b.cp, max_relative = 1e-14);
        assert_relative_eq!(a.det_sigma, b.det_sigma, max_relative = 1e-14);
    }

    #[test]
    fn derivative_consistency_observed_order_two() {
        let chk = derivative_consistency(&ideal(1.4), 1.3, 0.8, 1e-3).unwrap();
        assert!(
            chk.observed_order >= 1.9,
            "observed order {} too low (errors {:e}, {:e})",
            chk.observed_order,
            chk.max_rel_err_h,
            chk.max_rel_err_half_h
        );
    }

    #[test]
    fn derivative_consistency_catches_wrong_first_derivative() {
        let eos = EosModel::user_supplied(|rho, e| EntropyDerivs {
            s: 2.5 * e.ln() - rho.ln(),
            s_rho: -1.1 / rho, // 10% off
            s_e: 2.5 / e,
            s_rhorho: 1.0 / (rho * rho),
            s_rhoe: 0.0,
            s_ee: -2.5 / (e * e),
        });
        let chk = derivative_consistency(&eos, 1.0, 1.0, 1e-3).unwrap();
        assert!(chk.observed_order < 1.0);
    }

    #[test]
    fn energy_from_pressure_roundtrip() {
        let eos = ideal(1.4);
        let e = energy_from_pressure(&eos, 2.0, 0.4).unwrap();
        assert_relative_eq!(e, 0.5, max_relative = 1e-14);

        // user-supplied route exercises the bisection path
        let user = EosModel::user_supplied(|rho, e| {
            let gm1 = 0.4;
            EntropyDerivs {
                s: e.ln() / gm1 - rho.ln(),
                s_rho: -1.0 / rho,
                s_e: 1.0 / (gm1 * e),
                s_rhorho: 1.0 / (rho * rho),
                s_rhoe: 0.0,
                s_ee: -1.0 / (gm1 * e * e),
            }
        });
        let e2 = energy_from_pressure(&user, 2.0, 0.4).unwrap();
        assert_relative_eq!(e2, 0.5, max_relative = 1e-10);
    }
}

//! Viscous flux construction and the quadratic-form analysis behind it.
//!
//! The regularized system transports mass, momentum and total energy with the
//! extra fluxes
//!
//! ```text
//! mass:      f = a(ρ,e) ∇ρ
//! momentum:  𝕘 = 𝔾 + f ⊗ u
//! energy:    h + 𝕘·u,   h = l − ½|u|² f,
//!            l = s_e⁻¹(e s_e − ρ s_ρ) f + d(ρ,e) ρ s_e⁻¹ ∇s
//! ```
//!
//! with a, d ≥ 0 and a momentum tensor 𝔾 satisfying 𝔾:∇u ≥ 0. Whether this
//! regularization also dissipates every generalized entropy hinges on a family
//! of 2×2 quadratic forms in (∇ρ, ∇e): the form J controlling the physical
//! entropy, its λ-shifted relative which is always non-positive, and the
//! matrices 𝕊₂^α whose semi-definiteness decides the generalized families.
//! This module builds the fluxes pointwise and exposes those analyses.
//!
//! Gradient conventions: a velocity gradient `grad_u[i][j]` stores ∂u_j/∂x_i
//! (row index = derivative direction), a flux tensor `q[i][j]` transports
//! momentum component j in direction i, and contractions follow suit:
//! (𝕘·u)_i = Σ_j 𝕘[i][j] u_j and 𝔾:∇u = Σ_{ij} 𝔾[i][j] grad_u[i][j].

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::eos::{thermo_eval, EosError, EosModel, ThermoDerivs};
use crate::linalg::Sym2;

/// Relative tolerance of the built-in dual-route self-checks (direct versus
/// matrix evaluation of J, determinant closed forms of 𝕊₂, the two algebraic
/// forms of l).
pub const SELF_CHECK_REL: f64 = 1e-12;

/// A viscosity coefficient: either a constant or a pure function of (ρ,e).
#[derive(Clone)]
pub enum CoeffField {
    Const(f64),
    Fn(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl CoeffField {
    #[must_use]
    pub fn eval(&self, rho: f64, e: f64) -> f64 {
        match self {
            CoeffField::Const(c) => *c,
            CoeffField::Fn(f) => f(rho, e),
        }
    }

    pub fn function<F>(f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        CoeffField::Fn(Arc::new(f))
    }
}

impl From<f64> for CoeffField {
    fn from(c: f64) -> Self {
        CoeffField::Const(c)
    }
}

impl fmt::Debug for CoeffField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffField::Const(c) => write!(f, "Const({c})"),
            CoeffField::Fn(_) => write!(f, "Fn(..)"),
        }
    }
}

/// Choice of the momentum tensor 𝔾.
#[derive(Clone, Debug, PartialEq)]
pub enum MomentumForm {
    /// 𝔾 = a ρ ∇u. With a = d this is the regularization whose conserved
    /// variables all diffuse with the same coefficient.
    Parabolic,
    /// 𝔾 = 2μ ρ ∇ˢu + λ' ρ (div u) 𝕀 with ∇ˢu = ½(∇u + ∇uᵀ).
    /// Requires μ ≥ 0 and 2μ + dim·λ' ≥ 0 so that 𝔾:∇u ≥ 0.
    Symmetric { mu: f64, lambda_visc: f64 },
    /// 𝔾 = 0 (momentum gets only the f⊗u correction).
    Zero,
}

/// The full coefficient set (a, d, 𝔾-form) of one regularization.
#[derive(Clone, Debug)]
pub struct RegularizationCoeffs {
    pub a: CoeffField,
    pub d: CoeffField,
    pub gform: MomentumForm,
}

impl RegularizationCoeffs {
    /// Constant coefficients with the parabolic momentum tensor.
    #[must_use]
    pub fn constant(a: f64, d: f64) -> Self {
        RegularizationCoeffs {
            a: CoeffField::Const(a),
            d: CoeffField::Const(d),
            gform: MomentumForm::Parabolic,
        }
    }

    #[must_use]
    pub fn with_gform(mut self, gform: MomentumForm) -> Self {
        self.gform = gform;
        self
    }

    /// Validate what can be validated up front: constant coefficients must be
    /// non-negative and a symmetric 𝔾 must satisfy μ ≥ 0, 2μ + dim·λ' ≥ 0
    /// (the pointwise condition making 𝔾:∇u a sum of squares). Callback
    /// coefficients are checked at evaluation time instead.
    pub fn validate(&self, dim: usize) -> Result<(), RegularizationError> {
        if let CoeffField::Const(a) = self.a {
            if !(a >= 0.0) || !a.is_finite() {
                return Err(RegularizationError::BadCoefficients(format!(
                    "a must be finite and >= 0, got {a}"
                )));
            }
        }
        if let CoeffField::Const(d) = self.d {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(RegularizationError::BadCoefficients(format!(
                    "d must be finite and >= 0, got {d}"
                )));
            }
        }
        if let MomentumForm::Symmetric { mu, lambda_visc } = self.gform {
            if !(mu >= 0.0) || !mu.is_finite() || !lambda_visc.is_finite() {
                return Err(RegularizationError::BadCoefficients(format!(
                    "symmetric momentum tensor needs finite mu >= 0, got mu = {mu}"
                )));
            }
            if 2.0 * mu + dim as f64 * lambda_visc < 0.0 {
                return Err(RegularizationError::BadCoefficients(format!(
                    "symmetric momentum tensor needs 2*mu + dim*lambda >= 0; \
                     got mu = {mu}, lambda = {lambda_visc}, dim = {dim}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum RegularizationError {
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error("degenerate coefficient: {0}")]
    DegenerateCoefficient(String),
    #[error("bad coefficients: {0}")]
    BadCoefficients(String),
    #[error("self-check failed: {0}")]
    SelfCheckFailed(String),
}

/// The pointwise viscous fluxes of the regularized system.
#[derive(Debug, Clone, Copy)]
pub struct ViscousFluxes<const D: usize> {
    /// Mass flux f = a∇ρ.
    pub f: [f64; D],
    /// Momentum tensor 𝔾 (the part with 𝔾:∇u ≥ 0).
    pub gtensor: [[f64; D]; D],
    /// Internal-energy flux l.
    pub l: [f64; D],
    /// Full momentum flux 𝕘 = 𝔾 + f⊗u.
    pub g: [[f64; D]; D],
    /// Energy flux piece h = l − ½|u|²f; the energy equation transports h + 𝕘·u.
    pub h: [f64; D],
}

impl<const D: usize> ViscousFluxes<D> {
    /// The complete viscous flux of the total-energy equation, h + 𝕘·u.
    #[must_use]
    pub fn energy_flux(&self, u: [f64; D]) -> [f64; D] {
        let mut out = self.h;
        for i in 0..D {
            for j in 0..D {
                out[i] += self.g[i][j] * u[j];
            }
        }
        out
    }

    /// The contraction 𝔾:∇u, non-negative for every valid momentum form.
    #[must_use]
    pub fn g_contraction(&self, grad_u: [[f64; D]; D]) -> f64 {
        let mut acc = 0.0;
        for i in 0..D {
            for j in 0..D {
                acc += self.gtensor[i][j] * grad_u[i][j];
            }
        }
        acc
    }
}

/// Evaluate the momentum tensor 𝔾 for one of the supported forms.
pub fn momentum_tensor<const D: usize>(
    gform: &MomentumForm,
    rho: f64,
    a: f64,
    grad_u: [[f64; D]; D],
) -> Result<[[f64; D]; D], RegularizationError> {
    let mut g = [[0.0; D]; D];
    match *gform {
        MomentumForm::Zero => {}
        MomentumForm::Parabolic => {
            for i in 0..D {
                for j in 0..D {
                    g[i][j] = a * rho * grad_u[i][j];
                }
            }
        }
        MomentumForm::Symmetric { mu, lambda_visc } => {
            if !(mu >= 0.0) || 2.0 * mu + D as f64 * lambda_visc < 0.0 {
                return Err(RegularizationError::BadCoefficients(format!(
                    "symmetric momentum tensor needs mu >= 0 and 2*mu + dim*lambda >= 0; \
                     got mu = {mu}, lambda = {lambda_visc}, dim = {D}"
                )));
            }
            let mut div_u = 0.0;
            for i in 0..D {
                div_u += grad_u[i][i];
            }
            for i in 0..D {
                for j in 0..D {
                    g[i][j] = mu * rho * (grad_u[i][j] + grad_u[j][i]);
                }
                g[i][i] += lambda_visc * rho * div_u;
            }
        }
    }
    Ok(g)
}

fn coeff_pair(
    coeffs: &RegularizationCoeffs,
    rho: f64,
    e: f64,
) -> Result<(f64, f64), RegularizationError> {
    let a = coeffs.a.eval(rho, e);
    let d = coeffs.d.eval(rho, e);
    if !(a >= 0.0 && d >= 0.0) || !a.is_finite() || !d.is_finite() {
        return Err(RegularizationError::BadCoefficients(format!(
            "coefficients must be finite and >= 0 at (rho = {rho}, e = {e}): a = {a}, d = {d}"
        )));
    }
    Ok((a, d))
}

/// Assemble all viscous fluxes at one state.
///
/// l is computed through its definitional form
/// s_e⁻¹(e s_e − ρ s_ρ)f + dρ s_e⁻¹∇s and cross-checked against the
/// algebraically equivalent (d−a)ρ s_ρ s_e⁻¹∇ρ + a e∇ρ + dρ∇e; the two must
/// agree to [`SELF_CHECK_REL`] or the call fails loudly.
pub fn viscous_fluxes<const D: usize>(
    rho: f64,
    e: f64,
    u: [f64; D],
    grad_rho: [f64; D],
    grad_e: [f64; D],
    grad_u: [[f64; D]; D],
    coeffs: &RegularizationCoeffs,
    eos: &EosModel,
) -> Result<ViscousFluxes<D>, RegularizationError> {
    let (a, d) = coeff_pair(coeffs, rho, e)?;
    let dv = thermo_eval(rho, e, eos)?.derivs;

    let mut f = [0.0; D];
    let mut l = [0.0; D];
    let mut scale = 0.0_f64;
    let c_f = (e * dv.s_e - rho * dv.s_rho) / dv.s_e;
    let c_alt_rho = (d - a) * rho * dv.s_rho / dv.s_e + a * e;
    for i in 0..D {
        f[i] = a * grad_rho[i];
        let grad_s_i = dv.s_rho * grad_rho[i] + dv.s_e * grad_e[i];
        l[i] = c_f * f[i] + d * rho / dv.s_e * grad_s_i;
        let l_alt = c_alt_rho * grad_rho[i] + d * rho * grad_e[i];
        scale = scale
            .max(l[i].abs())
            .max(l_alt.abs())
            .max((c_f * f[i]).abs())
            .max((d * rho / dv.s_e * grad_s_i).abs());
        if (l[i] - l_alt).abs() > SELF_CHECK_REL * scale {
            return Err(RegularizationError::SelfCheckFailed(format!(
                "the two forms of l disagree in component {i}: {} vs {l_alt}",
                l[i]
            )));
        }
    }

    let gtensor = momentum_tensor(&coeffs.gform, rho, a, grad_u)?;
    let mut g = gtensor;
    for i in 0..D {
        for j in 0..D {
            g[i][j] += f[i] * u[j];
        }
    }
    let mut u2 = 0.0;
    for i in 0..D {
        u2 += u[i] * u[i];
    }
    let mut h = [0.0; D];
    for i in 0..D {
        h[i] = l[i] - 0.5 * u2 * f[i];
    }
    Ok(ViscousFluxes {
        f,
        gtensor,
        l,
        g,
        h,
    })
}

/// Drift velocity u_m = u − f/ρ seen by the mass equation once the mass flux
/// is absorbed into the transport term.
pub fn mass_velocity<const D: usize>(
    u: [f64; D],
    rho: f64,
    f: [f64; D],
) -> Result<[f64; D], RegularizationError> {
    if !(rho > 0.0) {
        return Err(RegularizationError::Eos(EosError::DomainError {
            rho,
            e: f64::NAN,
        }));
    }
    let mut um = u;
    for i in 0..D {
        um[i] -= f[i] / rho;
    }
    Ok(um)
}

/// The symmetric matrix 𝕟₂ generating the entropy-production quadratic form:
/// J = (∇ρ,∇e)·𝕟·(∇ρ,∇e)ᵀ with
/// n₁₁ = (d−a)ρ s_ρ s_e⁻¹ s_ρe + a ρ⁻¹∂_ρ(ρ²s_ρ),
/// 2n₁₂ = (d−a)ρ s_ρ s_e⁻¹ s_ee + (d+a)ρ s_ρe, n₂₂ = dρ s_ee.
#[must_use]
pub fn n_matrix(td: &ThermoDerivs, a: f64, d: f64) -> Sym2 {
    let dv = &td.derivs;
    let rho = td.rho;
    let drr = dv.d_rho_rho2_s_rho(rho);
    Sym2::new(
        (d - a) * rho * dv.s_rho / dv.s_e * dv.s_rhoe + a * drr / rho,
        0.5 * ((d - a) * rho * dv.s_rho / dv.s_e * dv.s_ee + (d + a) * rho * dv.s_rhoe),
        d * rho * dv.s_ee,
    )
}

/// Entropy production J = −f·∇(e s_e − ρ s_ρ) + l·∇s_e + a∇ρ·∇s as a
/// function of the local gradients.
///
/// Evaluated both directly from that definition and through [`n_matrix`];
/// disagreement beyond [`SELF_CHECK_REL`] aborts. J ≤ 0 for all gradients
/// exactly when a d detΣ − ¼(d−a)²ρ⁻²s_e²p_e² ≥ 0 (see [`m_matrix_check`]).
pub fn quadratic_form_j<const D: usize>(
    rho: f64,
    e: f64,
    grad_rho: [f64; D],
    grad_e: [f64; D],
    a: f64,
    d: f64,
    eos: &EosModel,
) -> Result<f64, RegularizationError> {
    if !(a >= 0.0 && d >= 0.0) {
        return Err(RegularizationError::BadCoefficients(format!(
            "a and d must be >= 0, got a = {a}, d = {d}"
        )));
    }
    let td = thermo_eval(rho, e, eos)?;
    let dv = &td.derivs;

    // Matrix route.
    let n2 = n_matrix(&td, a, d);
    let (mut rr, mut re, mut ee) = (0.0, 0.0, 0.0);
    for i in 0..D {
        rr += grad_rho[i] * grad_rho[i];
        re += grad_rho[i] * grad_e[i];
        ee += grad_e[i] * grad_e[i];
    }
    let j_matrix = n2.a11 * rr + 2.0 * n2.a12 * re + n2.a22 * ee;

    // Direct route: expand each thermodynamic gradient by the chain rule.
    let w_rho = e * dv.s_rhoe - dv.s_rho - rho * dv.s_rhorho;
    let w_e = dv.s_e + e * dv.s_ee - rho * dv.s_rhoe;
    let c_l_rho = (d - a) * rho * dv.s_rho / dv.s_e + a * e;
    let (mut t_f, mut t_l, mut t_a) = (0.0, 0.0, 0.0);
    for i in 0..D {
        let f_i = a * grad_rho[i];
        let l_i = c_l_rho * grad_rho[i] + d * rho * grad_e[i];
        let grad_w_i = w_rho * grad_rho[i] + w_e * grad_e[i];
        let grad_se_i = dv.s_rhoe * grad_rho[i] + dv.s_ee * grad_e[i];
        let grad_s_i = dv.s_rho * grad_rho[i] + dv.s_e * grad_e[i];
        t_f -= f_i * grad_w_i;
        t_l += l_i * grad_se_i;
        t_a += a * grad_rho[i] * grad_s_i;
    }
    let j_direct = t_f + t_l + t_a;

    let scale = t_f
        .abs()
        .max(t_l.abs())
        .max(t_a.abs())
        .max(j_matrix.abs())
        .max((n2.a11 * rr).abs() + (2.0 * n2.a12 * re).abs() + (n2.a22 * ee).abs());
    if (j_direct - j_matrix).abs() > SELF_CHECK_REL * scale {
        return Err(RegularizationError::SelfCheckFailed(format!(
            "J evaluated two ways disagrees: direct {j_direct} vs matrix {j_matrix}"
        )));
    }
    Ok(j_matrix)
}

/// Result of the λ-shifted semi-definiteness analysis; see [`m_matrix_check`].
#[derive(Debug, Clone, Copy)]
pub struct MMatrixReport {
    /// λ with d(1+λ) = a.
    pub lambda: f64,
    /// det of the shifted matrix 𝕄₂ = 𝕟₂ + λd𝕢₂ (non-negative whenever
    /// a, d ≥ 0).
    pub det_m2: f64,
    /// Lower-right entry of 𝕄₂ (non-positive whenever a, d ≥ 0).
    pub m22: f64,
    /// Whether the *unshifted* J is negative semi-definite, i.e. whether
    /// a d detΣ − ¼(d−a)² ρ⁻² s_e² p_e² ≥ 0.
    pub negative_semidefinite: bool,
}

/// Analyze the quadratic form J through the shift J + λd(ρ/s_e)∇s_e·∇s.
///
/// Choosing λ so that d(1+λ) = a turns the generating matrix into 𝕟₂ with d
/// replaced by a, which is negative semi-definite for every a, d ≥ 0 — that is
/// the mechanism behind the minimum entropy principle holding even where J
/// itself changes sign. The report also answers whether J itself is negative
/// semi-definite (the λ = 0 question).
pub fn m_matrix_check(
    rho: f64,
    e: f64,
    a: f64,
    d: f64,
    eos: &EosModel,
) -> Result<MMatrixReport, RegularizationError> {
    if !(a >= 0.0 && d >= 0.0) {
        return Err(RegularizationError::BadCoefficients(format!(
            "a and d must be >= 0, got a = {a}, d = {d}"
        )));
    }
    if d == 0.0 {
        return Err(RegularizationError::DegenerateCoefficient(
            "d = 0: lambda with d(1+lambda) = a is undefined; analyze J directly \
             through quadratic_form_j / n_matrix instead"
                .to_string(),
        ));
    }
    let td = thermo_eval(rho, e, eos)?;
    let lambda = a / d - 1.0;

    // With d(1+λ) = a the shifted matrix is n_matrix evaluated at (a, a).
    let m2 = n_matrix(&td, a, a);
    let det_m2 = a * a * td.det_sigma;
    let det_direct = m2.det();
    let scale = (m2.a11 * m2.a22).abs() + m2.a12 * m2.a12 + det_m2.abs();
    debug_assert!(
        (det_m2 - det_direct).abs() <= 1e-10 * scale.max(f64::MIN_POSITIVE),
        "closed-form det(M2) {det_m2} vs direct {det_direct}"
    );

    let pe_term = td.rho * dv_se(&td) * td.p_e;
    let criterion = a * d * td.det_sigma - 0.25 * (d - a) * (d - a) * pe_term * pe_term;
    Ok(MMatrixReport {
        lambda,
        det_m2,
        m22: m2.a22,
        negative_semidefinite: criterion >= 0.0,
    })
}

/// ρ⁻¹ s_e shorthand used by the determinant criteria (they all involve
/// ρ⁻²s_e²p_e²; keeping one helper keeps the expressions readable).
fn dv_se(td: &ThermoDerivs) -> f64 {
    td.derivs.s_e / (td.rho * td.rho)
}

/// Result of building 𝕊₂^α at one state; see [`s_matrix`].
#[derive(Debug, Clone, Copy)]
pub struct SMatrixReport {
    pub s2: Sym2,
    pub det_s2: f64,
    pub negative_semidefinite: bool,
}

/// Build 𝕊₂^α for the coefficient ratio x = 1 − a/d and decide its sign.
///
/// Entries: s₁₁ = h₁₁ + xρ⁻²s_e p_ρ, s₁₂ = h₁₂ + ½xρ⁻²s_e p_e, s₂₂ = h₂₂,
/// with ℍ₂^α from the convexity layer. The determinant satisfies the closed
/// form ρ⁻²((1−α)detΣ(1−x) − ¼x²ρ⁻²s_e²p_e²) — at α = 1 this collapses to
/// −¼x²ρ⁻⁴s_e²p_e², so only x = 0 (a = d) survives — and the computed entries
/// are cross-checked against it to [`SELF_CHECK_REL`] scale. Negative
/// semi-definiteness is decided from s₂₂ ≤ 0 together with det ≥ 0, the
/// determinant read with a relative slack of ~1e-12 so exactly-singular
/// boundary cases (x = 0 at α = 1) are not flipped by rounding.
pub fn s_matrix(
    rho: f64,
    e: f64,
    a: f64,
    d: f64,
    alpha: f64,
    eos: &EosModel,
) -> Result<SMatrixReport, RegularizationError> {
    if d == 0.0 {
        return Err(RegularizationError::DegenerateCoefficient(
            "d = 0: the coefficient ratio x = 1 - a/d is undefined".to_string(),
        ));
    }
    if !(a >= 0.0 && d > 0.0) {
        return Err(RegularizationError::BadCoefficients(format!(
            "need a >= 0 and d > 0, got a = {a}, d = {d}"
        )));
    }
    if !(alpha <= 1.0) {
        return Err(RegularizationError::BadCoefficients(format!(
            "the analysis requires alpha <= 1, got {alpha}"
        )));
    }
    let td = thermo_eval(rho, e, eos)?;
    let x = 1.0 - a / d;
    s_matrix_at(&td, x, alpha)
}

/// [`s_matrix`] with the ratio x = 1 − a/d supplied directly (callers probing
/// the admissible interval) and the state already evaluated.
pub fn s_matrix_at(
    td: &ThermoDerivs,
    x: f64,
    alpha: f64,
) -> Result<SMatrixReport, RegularizationError> {
    let h2 = crate::eos::h2_matrix(td, alpha);
    let se_rho2 = dv_se(td);
    let s2 = Sym2::new(
        h2.a11 + x * se_rho2 * td.p_rho,
        h2.a12 + 0.5 * x * se_rho2 * td.p_e,
        h2.a22,
    );
    let det_s2 = s2.det();

    let pe_term = x * td.rho * se_rho2 * td.p_e;
    let closed =
        ((1.0 - alpha) * td.det_sigma * (1.0 - x) - 0.25 * pe_term * pe_term) / (td.rho * td.rho);
    let scale = (s2.a11 * s2.a22).abs() + s2.a12 * s2.a12;
    if (det_s2 - closed).abs() > 1e-10 * scale.max(closed.abs()).max(f64::MIN_POSITIVE) {
        return Err(RegularizationError::SelfCheckFailed(format!(
            "det(S2) from entries {det_s2} does not match its closed form {closed}"
        )));
    }

    let slack = 1e-12 * scale;
    Ok(SMatrixReport {
        s2,
        det_s2,
        negative_semidefinite: s2.a22 <= 0.0 && det_s2 >= -slack,
    })
}

/// The open interval of ratios x = 1 − a/d for which 𝕊₂^α stays negative
/// semi-definite at this state:
///
/// ```text
/// −2Γ − 2√(Γ(1+Γ)) < x < −2Γ + 2√(Γ(1+Γ)),   Γ = (1−α) detΣ ρ² s_e⁻² p_e⁻².
/// ```
///
/// At the endpoints det(𝕊₂^α) = 0 (marginally semi-definite); at α = 1 the
/// interval degenerates to {0}, i.e. a = d. For the ideal gas with α = 0,
/// Γ = 1/(γ−1) independently of the state. The upper endpoint always lies
/// below 1, so admissible ratios never require a negative a.
pub fn admissible_range(
    rho: f64,
    e: f64,
    alpha: f64,
    eos: &EosModel,
) -> Result<(f64, f64), RegularizationError> {
    if !(alpha <= 1.0) {
        return Err(RegularizationError::BadCoefficients(format!(
            "the analysis requires alpha <= 1, got {alpha}"
        )));
    }
    let td = thermo_eval(rho, e, eos)?;
    if td.p_e == 0.0 {
        // det(𝕊₂^α) = ρ⁻²(1−α)detΣ(1−x): every x ≤ 1 qualifies (all x at α=1).
        return Ok(if alpha == 1.0 {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, 1.0)
        });
    }
    let pe_term = td.rho * dv_se(&td) * td.p_e;
    let gamma_ratio = (1.0 - alpha) * td.det_sigma / (pe_term * pe_term);
    let delta = gamma_ratio * (1.0 + gamma_ratio);
    let half_width = 2.0 * delta.sqrt();
    Ok((
        -2.0 * gamma_ratio - half_width,
        -2.0 * gamma_ratio + half_width,
    ))
}

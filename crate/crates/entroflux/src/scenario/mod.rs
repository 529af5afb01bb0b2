//! TOML-driven scenario runner.
//!
//! A [`ScenarioConfig`] names an equation of state, regularization
//! coefficients, scheme, grid, initial condition, and a list of certificates;
//! [`run_scenario`] executes it and writes field snapshots (CSV, one row per
//! cell), a snapshot manifest, and a certificate summary into the output
//! directory. All outputs are byte-deterministic for a fixed config.
//! [`refinement_study`] reruns a config on successively halved meshes and
//! tabulates the observed convergence order of either the exact-solution
//! error (manufactured-wave runs) or the worst certificate violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{
    a_neq_d_counterexample, crafted_family, entropy_inequality_residual, min_entropy_certificate,
    positivity_certificate, Certificate, DiagnosticsError, EntropyFamily, ResidualReport,
};
use crate::eos::{EosError, EosModel};
use crate::regularization::{CoeffField, MomentumForm, RegularizationCoeffs};
use crate::solver::{
    advance, initial_condition, mms, AdvanceOpts, BoundaryKind, Grid, InitialCondition, Integrator,
    Prim, SchemeKind, SchemeSpec, SolverError, Trajectory, ViscositySpec,
};

/// Environment variable overriding the configured output directory.
pub const OUT_DIR_ENV: &str = "ENTROFLUX_OUT_DIR";

#[derive(Debug, Error)]
pub enum ScenarioError {
    /// Parse or validation failure; the CLI maps this to exit code 2.
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Eos(#[from] EosError),
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Config(msg.into()))
}

// ---------------------------------------------------------------------------
// Config blocks
// ---------------------------------------------------------------------------

fn default_eos_kind() -> String {
    "ideal".to_string()
}
fn default_gform() -> String {
    "parabolic".to_string()
}
fn default_scheme() -> String {
    "gp-regularized".to_string()
}
fn default_integrator() -> String {
    "ssp-rk2".to_string()
}
fn default_half() -> f64 {
    0.5
}
fn default_dim() -> usize {
    1
}
fn default_boundary() -> String {
    "periodic".to_string()
}
fn default_stride() -> usize {
    1
}
fn default_seed() -> u64 {
    20260818
}
fn default_certificates() -> Vec<String> {
    vec!["positivity".to_string(), "min_entropy".to_string()]
}
fn default_directory() -> String {
    "out".to_string()
}
fn default_formats() -> Vec<String> {
    vec!["csv".to_string()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EosBlock {
    #[serde(default = "default_eos_kind")]
    pub kind: String,
    pub gamma: f64,
}

/// Regularization coefficients: exactly one of `{a, d}`, `{ratio_x, d}`, or
/// mesh-scaled `{c0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Alternative to `a`: a = d (1 - ratio_x).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_x: Option<f64>,
    /// Mesh-scaled first-order coefficients a = d = c0 h (|u| + c).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(default = "default_gform")]
    pub gform: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_visc: Option<f64>,
}

impl Default for CoeffsBlock {
    fn default() -> Self {
        CoeffsBlock {
            a: None,
            d: None,
            ratio_x: None,
            c0: None,
            gform: default_gform(),
            mu: None,
            lambda_visc: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeBlock {
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default = "default_integrator")]
    pub integrator: String,
    #[serde(default = "default_half")]
    pub cfl: f64,
    #[serde(default = "default_half")]
    pub viscfactor: f64,
}

impl Default for SchemeBlock {
    fn default() -> Self {
        SchemeBlock {
            scheme: default_scheme(),
            integrator: default_integrator(),
            cfl: default_half(),
            viscfactor: default_half(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Cell count (x-direction in 2D).
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    pub extent: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent_y: Option<[f64; 2]>,
    #[serde(default = "default_boundary")]
    pub boundary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_y: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcBlock {
    pub kind: String,
    /// Riemann: [rho, u, p] on each side of `x_split`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_split: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_right: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_amp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_amp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_amp: Option<f64>,
    /// Counterexample seed state (defaults to 1.0 each).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default)]
    pub t_end: f64,
    /// Record every k-th accepted step (0: endpoints only). Entropy
    /// certificates need 1.
    #[serde(default = "default_stride")]
    pub snapshot_stride: usize,
    /// Recorded for provenance and used by randomized drivers built on top
    /// of the runner.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Hard step cap; 0 means the solver default.
    #[serde(default)]
    pub max_steps: usize,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            t_end: 0.0,
            snapshot_stride: default_stride(),
            seed: default_seed(),
            max_steps: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsBlock {
    /// Certificate names: `positivity`, `min_entropy`, `entropy_physical`,
    /// `entropy_harten_q<float>`, `entropy_crafted_eps<float>`, or
    /// `entropy_crafted` (derives the family from a counterexample initial
    /// condition).
    #[serde(default = "default_certificates")]
    pub certificates: Vec<String>,
    /// Constant C in the residual tolerance C (h + dt); 0 calibrates C from
    /// a half-resolution companion run.
    #[serde(default)]
    pub residual_tol_constant: f64,
}

impl Default for DiagnosticsBlock {
    fn default() -> Self {
        DiagnosticsBlock {
            certificates: default_certificates(),
            residual_tol_constant: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

/// Complete scenario description; see the module docs for the block layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub eos: EosBlock,
    #[serde(default)]
    pub coeffs: CoeffsBlock,
    #[serde(default)]
    pub scheme: SchemeBlock,
    pub grid: GridBlock,
    pub ic: IcBlock,
    #[serde(default)]
    pub run: RunBlock,
    #[serde(default)]
    pub diagnostics: DiagnosticsBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String, ScenarioError> {
        toml::to_string_pretty(self).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    /// Resolve names, check ranges, and build the runtime plan.
    pub fn validate(&self) -> Result<Scenario, ScenarioError> {
        Scenario::build(self)
    }
}

// ---------------------------------------------------------------------------
// Validated plan
// ---------------------------------------------------------------------------

/// One certificate to evaluate after the run.
#[derive(Debug, Clone)]
pub enum CertRequest {
    Positivity,
    MinEntropy,
    Entropy(EntropyFamily),
}

/// A validated, runnable scenario.
#[derive(Clone)]
pub struct Scenario {
    pub eos: EosModel,
    pub gamma: f64,
    pub grid: Grid,
    pub ic: InitialCondition,
    pub scheme: SchemeSpec,
    pub opts: AdvanceOpts,
    pub certificates: Vec<CertRequest>,
    pub residual_tol_constant: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
}

fn parse_boundary(name: &str) -> Result<BoundaryKind, ScenarioError> {
    match name {
        "periodic" => Ok(BoundaryKind::Periodic),
        "farfield" => Ok(BoundaryKind::FarField),
        other => config_err(format!("unknown boundary {other:?}")),
    }
}

fn require<T: Copy>(field: Option<T>, what: &str, kind: &str) -> Result<T, ScenarioError> {
    field.ok_or_else(|| ScenarioError::Config(format!("ic kind {kind:?} needs `{what}`")))
}

impl Scenario {
    fn build(cfg: &ScenarioConfig) -> Result<Self, ScenarioError> {
        // EOS
        if cfg.eos.kind != "ideal" {
            return config_err(format!(
                "unknown eos kind {:?} (only \"ideal\" is configurable)",
                cfg.eos.kind
            ));
        }
        if !(cfg.eos.gamma > 1.0) {
            return config_err(format!("gamma must exceed 1, got {}", cfg.eos.gamma));
        }
        let gamma = cfg.eos.gamma;
        let eos = EosModel::ideal_gas(gamma)?;

        // Grid
        let g = &cfg.grid;
        let bc_x = parse_boundary(&g.boundary)?;
        let grid = match g.dim {
            1 => {
                if g.ny.is_some() || g.extent_y.is_some() || g.boundary_y.is_some() {
                    return config_err("1D grids take no ny / extent_y / boundary_y");
                }
                Grid::new_1d(g.n, g.extent[0], g.extent[1], bc_x)
                    .map_err(|e| ScenarioError::Config(e.to_string()))?
            }
            2 => {
                let ny =
                    g.ny.ok_or_else(|| ScenarioError::Config("2D grids need `ny`".into()))?;
                let ey = g
                    .extent_y
                    .ok_or_else(|| ScenarioError::Config("2D grids need `extent_y`".into()))?;
                let bc_y = parse_boundary(g.boundary_y.as_deref().unwrap_or(&g.boundary))?;
                Grid::new_2d(g.n, ny, g.extent[0], g.extent[1], ey[0], ey[1], bc_x, bc_y)
                    .map_err(|e| ScenarioError::Config(e.to_string()))?
            }
            other => return config_err(format!("dim must be 1 or 2, got {other}")),
        };

        // Momentum form
        let c = &cfg.coeffs;
        let gform = match c.gform.as_str() {
            "parabolic" => {
                if c.mu.is_some() || c.lambda_visc.is_some() {
                    return config_err("mu / lambda_visc only apply to gform = \"symmetric\"");
                }
                MomentumForm::Parabolic
            }
            "symmetric" => MomentumForm::Symmetric {
                mu: c.mu.unwrap_or(0.0),
                lambda_visc: c.lambda_visc.unwrap_or(0.0),
            },
            "zero" => {
                if c.mu.is_some() || c.lambda_visc.is_some() {
                    return config_err("mu / lambda_visc only apply to gform = \"symmetric\"");
                }
                MomentumForm::Zero
            }
            other => return config_err(format!("unknown gform {other:?}")),
        };

        // Viscosity coefficients
        let scheme_kind = match cfg.scheme.scheme.as_str() {
            "gp-regularized" => SchemeKind::GpRegularized,
            "gp-brenner" => SchemeKind::GpBrenner,
            "lax" => SchemeKind::Lax,
            "parabolic" => SchemeKind::Parabolic,
            other => return config_err(format!("unknown scheme {other:?}")),
        };
        let fixed_ad: Option<(f64, f64)> = match (c.a, c.d, c.ratio_x, c.c0) {
            (Some(a), Some(d), None, None) => Some((a, d)),
            (None, Some(d), Some(x), None) => Some((d * (1.0 - x), d)),
            (None, None, None, Some(_)) => None,
            (None, None, None, None) => {
                if scheme_kind == SchemeKind::Lax {
                    Some((0.0, 0.0))
                } else {
                    return config_err("coeffs need `a` and `d`, or `ratio_x` and `d`, or `c0`");
                }
            }
            _ => {
                return config_err("give exactly one of {a, d}, {ratio_x, d}, or {c0} in [coeffs]")
            }
        };
        let visc = match fixed_ad {
            Some((a, d)) => {
                if !(a >= 0.0 && d >= 0.0) || !a.is_finite() || !d.is_finite() {
                    return config_err(format!(
                        "coefficients must be finite and non-negative, got a = {a}, d = {d}"
                    ));
                }
                ViscositySpec::Fixed(RegularizationCoeffs::constant(a, d).with_gform(gform.clone()))
            }
            None => {
                let c0 = c.c0.expect("match arm guarantees c0");
                if !(c0 >= 0.0) || !c0.is_finite() {
                    return config_err(format!("c0 must be finite and non-negative, got {c0}"));
                }
                ViscositySpec::MeshScaled {
                    c0,
                    gform: gform.clone(),
                }
            }
        };

        // Scheme
        let integrator = match cfg.scheme.integrator.as_str() {
            "forward-euler" => Integrator::ForwardEuler,
            "ssp-rk2" => Integrator::SspRk2,
            "ssp-rk3" => Integrator::SspRk3,
            other => return config_err(format!("unknown integrator {other:?}")),
        };
        let scheme = SchemeSpec {
            kind: scheme_kind,
            integrator,
            cfl: cfg.scheme.cfl,
            viscfactor: cfg.scheme.viscfactor,
            visc,
        };
        // Surface bad scheme parameters as config errors, not runtime ones.
        scheme
            .validate(&grid)
            .map_err(|e| ScenarioError::Config(e.to_string()))?;

        // Initial condition (and source for the manufactured wave)
        let ic_block = &cfg.ic;
        let kind = ic_block.kind.as_str();
        let mut source = None;
        let mut counterexample_star: Option<(f64, f64)> = None;
        let ic = match kind {
            "riemann" => {
                let l = require(ic_block.left, "left", kind)?;
                let r = require(ic_block.right, "right", kind)?;
                InitialCondition::Riemann {
                    left: Prim::new_1d(l[0], l[1], l[2]),
                    right: Prim::new_1d(r[0], r[1], r[2]),
                    x_split: require(ic_block.x_split, "x_split", kind)?,
                }
            }
            "contact" => InitialCondition::Contact {
                rho_left: require(ic_block.rho_left, "rho_left", kind)?,
                rho_right: require(ic_block.rho_right, "rho_right", kind)?,
                u: require(ic_block.u, "u", kind)?,
                p: require(ic_block.p, "p", kind)?,
                x_split: require(ic_block.x_split, "x_split", kind)?,
            },
            "smooth" => InitialCondition::Smooth {
                rho_mean: require(ic_block.rho_mean, "rho_mean", kind)?,
                rho_amp: require(ic_block.rho_amp, "rho_amp", kind)?,
                u_mean: require(ic_block.u_mean, "u_mean", kind)?,
                u_amp: require(ic_block.u_amp, "u_amp", kind)?,
                p_mean: require(ic_block.p_mean, "p_mean", kind)?,
                p_amp: require(ic_block.p_amp, "p_amp", kind)?,
            },
            "manufactured-wave" => {
                source = Some(
                    Arc::new(move |x: f64, _y: f64, t: f64| mms::source(x, t, gamma))
                        as crate::solver::SourceFn,
                );
                InitialCondition::ManufacturedWave
            }
            "counterexample" => {
                let rho_star = ic_block.rho_star.unwrap_or(1.0);
                let e_star = ic_block.e_star.unwrap_or(1.0);
                let (a, d) = constant_coefficients(&scheme.visc).ok_or_else(|| {
                    ScenarioError::Config(
                        "a counterexample run needs constant a, d coefficients".into(),
                    )
                })?;
                counterexample_star = Some((rho_star, e_star));
                a_neq_d_counterexample(rho_star, e_star, a, d, &eos)
                    .map_err(|e| ScenarioError::Config(e.to_string()))?
                    .initial
            }
            other => return config_err(format!("unknown ic kind {other:?}")),
        };

        // Certificates
        let mut certificates = Vec::new();
        let mut wants_entropy = false;
        for name in &cfg.diagnostics.certificates {
            let req = parse_certificate(name, gamma, &scheme.visc, counterexample_star, &eos)?;
            if matches!(req, CertRequest::Entropy(_)) {
                wants_entropy = true;
            }
            certificates.push(req);
        }
        if wants_entropy {
            if scheme.kind == SchemeKind::Lax {
                return config_err(
                    "entropy certificates measure the regularized fluxes; the lax scheme's \
                     built-in dissipation is not expressible as one — use gp-regularized, \
                     gp-brenner, or parabolic",
                );
            }
            if cfg.run.snapshot_stride != 1 {
                return config_err("entropy certificates need snapshot_stride = 1");
            }
            if cfg.diagnostics.residual_tol_constant == 0.0 && grid.nx / 2 < 4 {
                return config_err(
                    "residual tolerance calibration runs a half-resolution companion; \
                     need n >= 8 or an explicit residual_tol_constant",
                );
            }
        }
        if !(cfg.diagnostics.residual_tol_constant >= 0.0) {
            return config_err("residual_tol_constant must be non-negative");
        }

        // Output
        for fmt in &cfg.output.formats {
            if fmt != "csv" {
                return config_err(format!("unknown output format {fmt:?}"));
            }
        }

        let opts = AdvanceOpts {
            t_end: cfg.run.t_end,
            snapshot_stride: cfg.run.snapshot_stride,
            admissibility_stride: 0,
            max_steps: cfg.run.max_steps,
            source,
        };
        if !(cfg.run.t_end >= 0.0) || !cfg.run.t_end.is_finite() {
            return config_err(format!(
                "t_end must be finite and >= 0, got {}",
                cfg.run.t_end
            ));
        }

        // Bad initial-condition parameters (e.g. a density amplitude that
        // drives rho negative) are config errors; sample the field now.
        initial_condition(&ic, &grid, &eos).map_err(|e| ScenarioError::Config(e.to_string()))?;

        Ok(Scenario {
            eos,
            gamma,
            grid,
            ic,
            scheme,
            opts,
            certificates,
            residual_tol_constant: cfg.diagnostics.residual_tol_constant,
            out_dir: PathBuf::from(&cfg.output.directory),
            seed: cfg.run.seed,
        })
    }
}

/// Constant (a, d) of a [`ViscositySpec::Fixed`] with constant fields, if that is what it is.
fn constant_coefficients(visc: &ViscositySpec) -> Option<(f64, f64)> {
    match visc {
        ViscositySpec::Fixed(coeffs) => match (&coeffs.a, &coeffs.d) {
            (CoeffField::Const(a), CoeffField::Const(d)) => Some((*a, *d)),
            _ => None,
        },
        ViscositySpec::MeshScaled { .. } => None,
    }
}

fn parse_certificate(
    name: &str,
    gamma: f64,
    visc: &ViscositySpec,
    counterexample_star: Option<(f64, f64)>,
    eos: &EosModel,
) -> Result<CertRequest, ScenarioError> {
    match name {
        "positivity" => return Ok(CertRequest::Positivity),
        "min_entropy" => return Ok(CertRequest::MinEntropy),
        "entropy_physical" => return Ok(CertRequest::Entropy(EntropyFamily::Physical)),
        "entropy_crafted" => {
            let (rho_star, e_star) = counterexample_star.ok_or_else(|| {
                ScenarioError::Config(
                    "entropy_crafted derives its family from a counterexample initial \
                     condition; use entropy_crafted_eps<float> otherwise"
                        .into(),
                )
            })?;
            let (a, d) = constant_coefficients(visc).ok_or_else(|| {
                ScenarioError::Config("entropy_crafted needs constant a, d coefficients".into())
            })?;
            let cx = a_neq_d_counterexample(rho_star, e_star, a, d, eos)
                .map_err(|e| ScenarioError::Config(e.to_string()))?;
            return Ok(CertRequest::Entropy(cx.family));
        }
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("entropy_harten_q") {
        let q: f64 = rest
            .parse()
            .map_err(|_| ScenarioError::Config(format!("bad harten exponent in {name:?}")))?;
        return Ok(CertRequest::Entropy(EntropyFamily::Harten { q }));
    }
    if let Some(rest) = name.strip_prefix("entropy_crafted_eps") {
        let eps: f64 = rest
            .parse()
            .map_err(|_| ScenarioError::Config(format!("bad eps in {name:?}")))?;
        let cp = gamma / (gamma - 1.0);
        let family = crafted_family(eps, cp).map_err(|e| ScenarioError::Config(e.to_string()))?;
        return Ok(CertRequest::Entropy(family));
    }
    config_err(format!("unknown certificate {name:?}"))
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

/// Everything a run produced; `all_pass` mirrors the CLI exit decision.
#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub snapshot_paths: Vec<PathBuf>,
    pub manifest_path: PathBuf,
    pub certificates_path: PathBuf,
    pub certificates: Vec<Certificate>,
    pub residual_reports: Vec<ResidualReport>,
    /// (certificate name, observed refinement slope of the worst violation)
    /// for every auto-calibrated residual whose violation was measurable.
    pub residual_slopes: Vec<(String, f64)>,
    pub all_pass: bool,
    pub trajectory: Trajectory,
}

/// Resolve the output directory: explicit override, then the environment
/// variable, then the config value.
fn resolve_out_dir(configured: &Path, out_override: Option<&Path>) -> PathBuf {
    if let Some(dir) = out_override {
        return dir.to_path_buf();
    }
    if let Ok(env_dir) = std::env::var(OUT_DIR_ENV) {
        if !env_dir.is_empty() {
            return PathBuf::from(env_dir);
        }
    }
    configured.to_path_buf()
}

/// 17-significant-digit decimal, the fixed width used by every CSV value.
fn fmt_val(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write one snapshot CSV; `min_s` is the per-cell running minimum of the
/// specific entropy over all snapshots up to this one.
fn write_snapshot(
    path: &Path,
    state: &crate::solver::ConservedField,
    grid: &Grid,
    eos: &EosModel,
    min_s: &mut Array2<f64>,
) -> Result<(), ScenarioError> {
    let two_d = grid.ny > 1;
    let mut out = String::new();
    out.push_str(if two_d {
        "x,y,rho,ux,uy,e,p,s,min_s_to_date\n"
    } else {
        "x,rho,ux,e,p,s,min_s_to_date\n"
    });
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            let rho = state.rho[(i, j)];
            let ux = state.mx[(i, j)] / rho;
            let uy = state.my[(i, j)] / rho;
            let e = (state.en[(i, j)] - 0.5 * rho * (ux * ux + uy * uy)) / rho;
            let dv = eos.entropy_derivs(rho, e)?;
            let p = -rho * rho * dv.s_rho / dv.s_e;
            min_s[(i, j)] = min_s[(i, j)].min(dv.s);
            let mut row = vec![fmt_val(grid.xc(i))];
            if two_d {
                row.push(fmt_val(grid.yc(j)));
            }
            row.push(fmt_val(rho));
            row.push(fmt_val(ux));
            if two_d {
                row.push(fmt_val(uy));
            }
            row.push(fmt_val(e));
            row.push(fmt_val(p));
            row.push(fmt_val(dv.s));
            row.push(fmt_val(min_s[(i, j)]));
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Average step size of a recorded run; 0 for a zero-step run.
fn avg_dt(traj: &Trajectory) -> f64 {
    if traj.steps == 0 {
        0.0
    } else {
        (traj.final_state().t - traj.states[0].t) / traj.steps as f64
    }
}

/// Evaluate the residual certificate, calibrating the tolerance from a
/// half-resolution companion when no constant was configured. Returns the
/// report and the observed refinement slope when one was measurable.
fn residual_with_calibration(
    scen: &Scenario,
    traj: &Trajectory,
    family: &EntropyFamily,
) -> Result<(ResidualReport, Option<f64>), ScenarioError> {
    let floor = 1e-12;
    let h = scen.grid.h_min();
    let dt = avg_dt(traj);
    if scen.residual_tol_constant > 0.0 {
        let tol = scen.residual_tol_constant * (h + dt) + floor;
        let report = entropy_inequality_residual(
            traj,
            &scen.grid,
            &scen.eos,
            family,
            &scen.scheme.visc,
            tol,
        )?;
        return Ok((report, None));
    }

    // Companion run on a mesh with every count halved.
    let coarse_grid = if scen.grid.ny > 1 {
        Grid::new_2d(
            scen.grid.nx / 2,
            scen.grid.ny / 2,
            scen.grid.x0,
            scen.grid.x0 + scen.grid.dx * scen.grid.nx as f64,
            scen.grid.y0,
            scen.grid.y0 + scen.grid.dy * scen.grid.ny as f64,
            scen.grid.bc_x,
            scen.grid.bc_y,
        )?
    } else {
        Grid::new_1d(
            scen.grid.nx / 2,
            scen.grid.x0,
            scen.grid.x0 + scen.grid.dx * scen.grid.nx as f64,
            scen.grid.bc_x,
        )?
    };
    let coarse_initial = initial_condition(&scen.ic, &coarse_grid, &scen.eos)?;
    let coarse_traj = advance(
        &coarse_initial,
        &coarse_grid,
        &scen.eos,
        &scen.scheme,
        &scen.opts,
    )?;
    let coarse = entropy_inequality_residual(
        &coarse_traj,
        &coarse_grid,
        &scen.eos,
        family,
        &scen.scheme.visc,
        f64::INFINITY,
    )?;
    let h_c = coarse_grid.h_min();
    let dt_c = avg_dt(&coarse_traj);

    // Violations that are pure truncation shrink at least first order in
    // (h + dt); hold the fine run to the coarse one's level scaled down
    // accordingly (20% slack), so a resolution-independent violation fails.
    let scale = if h_c + dt_c > 0.0 {
        (h + dt) / (h_c + dt_c)
    } else {
        1.0
    };
    let tol = 1.2 * coarse.worst_primary.max(0.0) * scale + floor;
    let report =
        entropy_inequality_residual(traj, &scen.grid, &scen.eos, family, &scen.scheme.visc, tol)?;
    let slope = if coarse.worst_primary > floor && report.worst_primary > floor {
        Some((coarse.worst_primary / report.worst_primary).log2())
    } else {
        None
    };
    Ok((report, slope))
}

/// Execute a validated config: integrate, write snapshots + manifest +
/// certificate summary, and evaluate every requested certificate.
///
/// `out_override` beats the `ENTROFLUX_OUT_DIR` environment variable, which
/// beats the configured directory. Outputs already written are left on disk
/// when a later stage fails.
pub fn run_scenario(
    config: &ScenarioConfig,
    out_override: Option<&Path>,
) -> Result<RunOutcome, ScenarioError> {
    let scen = config.validate()?;
    let out_dir = resolve_out_dir(&scen.out_dir, out_override);
    fs::create_dir_all(&out_dir)?;

    let initial = initial_condition(&scen.ic, &scen.grid, &scen.eos)?;
    let traj = advance(&initial, &scen.grid, &scen.eos, &scen.scheme, &scen.opts)?;

    // Snapshots + manifest.
    let mut snapshot_paths = Vec::with_capacity(traj.states.len());
    let mut manifest = String::from("index,time,path\n");
    let mut min_s = Array2::from_elem((scen.grid.nx, scen.grid.ny), f64::INFINITY);
    for (k, state) in traj.states.iter().enumerate() {
        let name = format!("snap_{k:06}.csv");
        let path = out_dir.join(&name);
        write_snapshot(&path, state, &scen.grid, &scen.eos, &mut min_s)?;
        manifest.push_str(&format!("{k},{},{name}\n", fmt_val(state.t)));
        snapshot_paths.push(path);
    }
    let manifest_path = out_dir.join("manifest.csv");
    fs::write(&manifest_path, manifest)?;

    // Certificates.
    let mut certificates = Vec::new();
    let mut residual_reports = Vec::new();
    let mut residual_slopes = Vec::new();
    for req in &scen.certificates {
        match req {
            CertRequest::Positivity => certificates.push(positivity_certificate(&traj)),
            CertRequest::MinEntropy => {
                certificates.push(min_entropy_certificate(&traj, &scen.eos, None)?)
            }
            CertRequest::Entropy(family) => {
                let (report, slope) = residual_with_calibration(&scen, &traj, family)?;
                certificates.push(report.certificate.clone());
                if let Some(s) = slope {
                    residual_slopes.push((report.certificate.name.clone(), s));
                }
                residual_reports.push(report);
            }
        }
    }
    let mut summary = String::from("name,pass,worst,where,tol\n");
    for cert in &certificates {
        summary.push_str(&cert.summary_line());
        summary.push('\n');
    }
    let certificates_path = out_dir.join("certificates.csv");
    fs::write(&certificates_path, summary)?;

    let all_pass = certificates.iter().all(|c| c.pass);
    Ok(RunOutcome {
        out_dir,
        snapshot_paths,
        manifest_path,
        certificates_path,
        certificates,
        residual_reports,
        residual_slopes,
        all_pass,
        trajectory: traj,
    })
}

// ---------------------------------------------------------------------------
// Refinement study
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RefinementRow {
    pub level: usize,
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    /// Exact-solution L1 density error for manufactured-wave runs, otherwise
    /// the worst certificate violation floored at zero.
    pub metric: f64,
    /// log2(previous / this); None on the first level or when a metric
    /// vanishes.
    pub order: Option<f64>,
}

#[derive(Debug)]
pub struct RefinementStudy {
    pub metric_name: String,
    pub rows: Vec<RefinementRow>,
    pub table_path: PathBuf,
}

/// Rerun a config on `levels` meshes, halving h (and dt through the step
/// controller) each time, and tabulate the observed convergence order.
pub fn refinement_study(
    config: &ScenarioConfig,
    levels: usize,
    out_override: Option<&Path>,
) -> Result<RefinementStudy, ScenarioError> {
    if levels < 3 {
        return config_err(format!(
            "a refinement study needs >= 3 levels, got {levels}"
        ));
    }
    let base = config.validate()?;
    let out_dir = resolve_out_dir(&base.out_dir, out_override);
    fs::create_dir_all(&out_dir)?;
    let is_mms = matches!(base.ic, InitialCondition::ManufacturedWave);
    if is_mms && base.grid.ny != 1 {
        return config_err("manufactured-wave studies are one-dimensional");
    }
    let metric_name = if is_mms {
        "l1_rho_error".to_string()
    } else {
        "worst_violation".to_string()
    };

    let mut rows: Vec<RefinementRow> = Vec::with_capacity(levels);
    for level in 0..levels {
        let factor = 1usize << level;
        let mut cfg = config.clone();
        cfg.grid.n = config.grid.n * factor;
        if let Some(ny) = config.grid.ny {
            cfg.grid.ny = Some(ny * factor);
        }
        let scen = cfg.validate()?;
        let initial = initial_condition(&scen.ic, &scen.grid, &scen.eos)?;
        let traj = advance(&initial, &scen.grid, &scen.eos, &scen.scheme, &scen.opts)?;

        let metric = if is_mms {
            let last = traj.final_state();
            let mut err = 0.0;
            for i in 0..scen.grid.nx {
                let exact = mms::exact_conserved(scen.grid.xc(i), last.t, scen.gamma);
                err += (last.rho[(i, 0)] - exact[0]).abs() * scen.grid.dx;
            }
            err
        } else {
            let mut worst = 0.0_f64;
            for req in &scen.certificates {
                let w = match req {
                    CertRequest::Positivity => positivity_certificate(&traj).worst,
                    CertRequest::MinEntropy => {
                        min_entropy_certificate(&traj, &scen.eos, None)?.worst
                    }
                    CertRequest::Entropy(family) => {
                        entropy_inequality_residual(
                            &traj,
                            &scen.grid,
                            &scen.eos,
                            family,
                            &scen.scheme.visc,
                            f64::INFINITY,
                        )?
                        .worst_primary
                    }
                };
                worst = worst.max(w);
            }
            worst
        };

        let order = rows.last().and_then(|prev: &RefinementRow| {
            if prev.metric > 0.0 && metric > 0.0 {
                Some((prev.metric / metric).log2())
            } else {
                None
            }
        });
        rows.push(RefinementRow {
            level,
            n: scen.grid.nx,
            h: scen.grid.h_min(),
            dt: avg_dt(&traj),
            metric,
            order,
        });
    }

    let mut table = format!("level,n,h,dt,{metric_name},order\n");
    for row in &rows {
        let order = row.order.map_or("-".to_string(), |o| format!("{o:.3}"));
        table.push_str(&format!(
            "{},{},{},{},{},{order}\n",
            row.level,
            row.n,
            fmt_val(row.h),
            fmt_val(row.dt),
            fmt_val(row.metric),
        ));
    }
    let table_path = out_dir.join("refinement.csv");
    fs::write(&table_path, table)?;
    Ok(RefinementStudy {
        metric_name,
        rows,
        table_path,
    })
}

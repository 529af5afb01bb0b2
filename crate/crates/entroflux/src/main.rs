//! Command-line front end: run scenarios, refinement studies, and pointwise
//! thermodynamic / coefficient checks.
//!
//! Exit codes: 0 success (all certificates pass), 1 a certificate or check
//! failed, 2 configuration error, 3 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use entroflux::diagnostics::{a_neq_d_counterexample, DiagnosticsError};
use entroflux::eos::{check_admissibility, thermo_eval, EosError, EosModel};
use entroflux::regularization::admissible_range;
use entroflux::scenario::{refinement_study, run_scenario, ScenarioConfig, ScenarioError};

#[derive(Parser)]
#[command(
    name = "entroflux",
    about = "Entropy-consistent viscous regularization of the compressible Euler equations",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario config: integrate, write CSV snapshots + manifest, and
    /// evaluate certificates. ENTROFLUX_OUT_DIR overrides the output
    /// directory.
    Run {
        /// TOML scenario file.
        config: PathBuf,
    },
    /// Rerun a config on successively halved meshes and tabulate observed
    /// convergence orders.
    Refine {
        /// TOML scenario file.
        config: PathBuf,
        /// Number of mesh levels (>= 3).
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Print thermodynamic derivatives and admissibility at one state.
    CheckEos {
        /// Adiabatic exponent of the ideal gas (> 1).
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        e: f64,
    },
    /// Print the coefficient-ratio interval x = 1 - a/d on which every
    /// generalized entropy satisfies its inequality.
    Range {
        #[arg(long)]
        gamma: f64,
        /// Interpolation weight between the two quadratic-form splittings
        /// (<= 1; the interval collapses to {0} at 1).
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// Construct an entropy-inequality violation for mismatched coefficients
    /// a != d: a crafted generalized entropy and a state with strictly
    /// positive production defect.
    Counterexample {
        #[arg(long)]
        gamma: f64,
        /// Mass-diffusion coefficient.
        #[arg(long)]
        a: f64,
        /// Thermal coefficient.
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        e: f64,
    },
}

const PASS: u8 = 0;
const CHECK_FAILED: u8 = 1;
const CONFIG_ERROR: u8 = 2;
const RUNTIME_ERROR: u8 = 3;

fn scenario_exit(err: &ScenarioError) -> u8 {
    match err {
        ScenarioError::Config(_) => CONFIG_ERROR,
        _ => RUNTIME_ERROR,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run { config } => cmd_run(&config),
        Cmd::Refine { config, levels } => cmd_refine(&config, levels),
        Cmd::CheckEos { gamma, rho, e } => cmd_check_eos(gamma, rho, e),
        Cmd::Range { gamma, alpha } => cmd_range(gamma, alpha),
        Cmd::Counterexample {
            gamma,
            a,
            d,
            rho,
            e,
        } => cmd_counterexample(gamma, a, d, rho, e),
    };
    ExitCode::from(code)
}

fn load_config(path: &PathBuf) -> Result<ScenarioConfig, u8> {
    ScenarioConfig::from_path(path).map_err(|err| {
        eprintln!("error: {err}");
        match err {
            ScenarioError::Io(_) => RUNTIME_ERROR,
            _ => CONFIG_ERROR,
        }
    })
}

fn cmd_run(path: &PathBuf) -> u8 {
    let config = match load_config(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match run_scenario(&config, None) {
        Ok(outcome) => {
            println!(
                "wrote {} snapshot(s) to {}",
                outcome.snapshot_paths.len(),
                outcome.out_dir.display()
            );
            println!("manifest: {}", outcome.manifest_path.display());
            println!("certificates: {}", outcome.certificates_path.display());
            for cert in &outcome.certificates {
                println!("  {}", cert.summary_line());
            }
            for (name, slope) in &outcome.residual_slopes {
                println!("  {name}: violation refinement slope {slope:.3}");
            }
            if outcome.all_pass {
                println!("all certificates pass");
                PASS
            } else {
                println!("certificate failure");
                CHECK_FAILED
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            scenario_exit(&err)
        }
    }
}

fn cmd_refine(path: &PathBuf, levels: usize) -> u8 {
    let config = match load_config(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    match refinement_study(&config, levels, None) {
        Ok(study) => {
            println!(
                "level  n       h             dt            {}  order",
                study.metric_name
            );
            for row in &study.rows {
                let order = row.order.map_or("-".to_string(), |o| format!("{o:.3}"));
                println!(
                    "{:<6} {:<7} {:<13.6e} {:<13.6e} {:<13.6e} {order}",
                    row.level, row.n, row.h, row.dt, row.metric
                );
            }
            println!("table: {}", study.table_path.display());
            PASS
        }
        Err(err) => {
            eprintln!("error: {err}");
            scenario_exit(&err)
        }
    }
}

fn cmd_check_eos(gamma: f64, rho: f64, e: f64) -> u8 {
    if !(gamma > 1.0) {
        eprintln!("error: gamma must exceed 1, got {gamma}");
        return CONFIG_ERROR;
    }
    let eos = match EosModel::ideal_gas(gamma) {
        Ok(eos) => eos,
        Err(err) => {
            eprintln!("error: {err}");
            return CONFIG_ERROR;
        }
    };
    let report = match check_admissibility(rho, e, &eos) {
        Ok(r) => r,
        Err(err @ EosError::DomainError { .. }) => {
            eprintln!("error: {err}");
            return CONFIG_ERROR;
        }
        Err(err) => {
            eprintln!("error: {err}");
            return RUNTIME_ERROR;
        }
    };
    println!("state: rho = {rho}, e = {e} (gamma = {gamma})");
    println!("  strictly convex -s     : {}", report.convex);
    println!("  positive temperature   : {}", report.positive_temperature);
    println!("  hyperbolic (c^2 > 0)   : {}", report.hyperbolic);
    println!("  c_p T_e (must be > 1)  : {:.16e}", report.cp_te);
    if !report.admissible() {
        println!("state is NOT admissible");
        return CHECK_FAILED;
    }
    match thermo_eval(rho, e, &eos) {
        Ok(td) => {
            println!("  s                      : {:.16e}", td.derivs.s);
            println!("  p                      : {:.16e}", td.p);
            println!("  T                      : {:.16e}", td.t);
            println!("  c^2                    : {:.16e}", td.c2);
            println!("  c_p                    : {:.16e}", td.cp);
            println!("  det Sigma              : {:.16e}", td.det_sigma);
            println!("state is admissible");
            PASS
        }
        Err(err) => {
            eprintln!("error: {err}");
            RUNTIME_ERROR
        }
    }
}

fn cmd_range(gamma: f64, alpha: f64) -> u8 {
    if !(gamma > 1.0) {
        eprintln!("error: gamma must exceed 1, got {gamma}");
        return CONFIG_ERROR;
    }
    if !(alpha <= 1.0) {
        eprintln!("error: alpha must be <= 1, got {alpha}");
        return CONFIG_ERROR;
    }
    let eos = match EosModel::ideal_gas(gamma) {
        Ok(eos) => eos,
        Err(err) => {
            eprintln!("error: {err}");
            return CONFIG_ERROR;
        }
    };
    // The interval is state-independent for an ideal gas; evaluate at (1, 1).
    match admissible_range(1.0, 1.0, alpha, &eos) {
        Ok((lo, hi)) => {
            println!("gamma = {gamma}, alpha = {alpha}");
            println!("admissible ratio interval for x = 1 - a/d:");
            println!("  ({lo:.16e}, {hi:.16e})");
            println!("equivalently a/d in ({:.16e}, {:.16e})", 1.0 - hi, 1.0 - lo);
            PASS
        }
        Err(err) => {
            eprintln!("error: {err}");
            RUNTIME_ERROR
        }
    }
}

fn cmd_counterexample(gamma: f64, a: f64, d: f64, rho: f64, e: f64) -> u8 {
    if !(gamma > 1.0) {
        eprintln!("error: gamma must exceed 1, got {gamma}");
        return CONFIG_ERROR;
    }
    if !(a >= 0.0 && d >= 0.0) {
        eprintln!("error: coefficients must be non-negative, got a = {a}, d = {d}");
        return CONFIG_ERROR;
    }
    let eos = match EosModel::ideal_gas(gamma) {
        Ok(eos) => eos,
        Err(err) => {
            eprintln!("error: {err}");
            return CONFIG_ERROR;
        }
    };
    match a_neq_d_counterexample(rho, e, a, d, &eos) {
        Ok(cx) => {
            println!("state: rho = {rho}, e = {e} (gamma = {gamma}), a = {a}, d = {d}");
            println!(
                "  largest quadratic-form eigenvalue : {:.16e}",
                cx.lambda_plus
            );
            println!(
                "  violating gradient direction      : ({:.16e}, {:.16e})",
                cx.grad_rho, cx.grad_e
            );
            println!(
                "  |grad s|^2 along it               : {:.16e}",
                cx.grad_s_sq
            );
            println!("  family exponent bound eps <      : {:.16e}", cx.eps_bound);
            println!("  crafted family                    : {}", cx.family.name());
            println!(
                "  entropy production defect         : {:.16e} (> 0)",
                cx.violation
            );
            println!("a generalized entropy violates its inequality at this state");
            PASS
        }
        Err(DiagnosticsError::NoCounterexample { a, d }) => {
            println!(
                "no violation constructible for a = {a}, d = {d}: the quadratic form \
                 stays negative semidefinite (matched coefficients admit every \
                 generalized entropy)"
            );
            CHECK_FAILED
        }
        Err(err @ DiagnosticsError::BadInput(_)) => {
            eprintln!("error: {err}");
            CONFIG_ERROR
        }
        Err(err) => {
            eprintln!("error: {err}");
            RUNTIME_ERROR
        }
    }
}

//! Manufactured traveling-wave solution with its source terms, used to
//! measure convergence orders of the semi-discrete operators.
//!
//! The wave is smooth and periodic on unit length:
//! `rho = 2 + sin(phi)/2`, `u = 1 + 3 cos(phi)/10`, `p = 2 + cos(phi)/2`
//! with phase `phi = 2 pi (x - t)`. Density and pressure stay well away
//! from zero, so any ideal-gas exponent is admissible.

use std::f64::consts::PI;

/// Exact primitive state `(rho, u, p)` at position `x` and time `t`.
#[must_use]
pub fn exact_prim(x: f64, t: f64) -> (f64, f64, f64) {
    let phi = 2.0 * PI * (x - t);
    (
        2.0 + 0.5 * phi.sin(),
        1.0 + 0.3 * phi.cos(),
        2.0 + 0.5 * phi.cos(),
    )
}

/// Exact conserved state `[rho, m, 0, E]` for an ideal gas with exponent
/// `gamma`.
#[must_use]
pub fn exact_conserved(x: f64, t: f64, gamma: f64) -> [f64; 4] {
    let (rho, u, p) = exact_prim(x, t);
    let en = p / (gamma - 1.0) + 0.5 * rho * u * u;
    [rho, rho * u, 0.0, en]
}

/// Source terms `[S_rho, S_m, 0, S_E]` that make the wave an exact solution
/// of the 1D compressible Euler equations.
#[must_use]
pub fn source(x: f64, t: f64, gamma: f64) -> [f64; 4] {
    let phi = 2.0 * PI * (x - t);
    let rho = 2.0 + 0.5 * phi.sin();
    let u = 1.0 + 0.3 * phi.cos();
    let p = 2.0 + 0.5 * phi.cos();
    // derivatives with respect to the phase
    let rho_d = 0.5 * phi.cos();
    let u_d = -0.3 * phi.sin();
    let p_d = -0.5 * phi.sin();
    let en = p / (gamma - 1.0) + 0.5 * rho * u * u;
    let en_d = p_d / (gamma - 1.0) + 0.5 * rho_d * u * u + rho * u * u_d;
    let two_pi = 2.0 * PI;
    let s_rho = two_pi * (rho_d * (u - 1.0) + rho * u_d);
    let s_m = two_pi * ((rho_d * u + rho * u_d) * (u - 1.0) + rho * u * u_d + p_d);
    let s_en = two_pi * (en_d * (u - 1.0) + u_d * (en + p) + u * p_d);
    [s_rho, s_m, 0.0, s_en]
}

//! Entropy-consistent viscous regularization of the compressible Euler equations.
//!
//! The library has four layers:
//!
//! * [`eos`] — specific-entropy equations of state s(ρ,e) and the thermodynamic
//!   quantities derived from them (pressure, temperature, sound speed, c_p, the
//!   convexity matrix Σ and the entropy Hessian combination ℍ₂);
//! * [`regularization`] — the viscous flux family (mass flux f = a∇ρ, entropy
//!   flux l, momentum flux 𝔾) and the quadratic forms that decide which entropy
//!   inequalities the resulting system satisfies;
//! * [`solver`] — explicit centered-difference schemes for the regularized
//!   system on uniform 1D/2D grids, plus the classical Lax and monolithic
//!   parabolic schemes for comparison;
//! * [`diagnostics`] — runtime certificates: density/internal-energy positivity,
//!   the minimum principle for the specific entropy, discrete residuals of the
//!   generalized entropy inequalities, and constructive counterexamples for the
//!   cases the theory excludes.
//!
//! [`scenario`] ties the layers together behind a TOML configuration and is what
//! the `entroflux` binary drives.

pub mod diagnostics;
pub mod eos;
pub mod linalg;
pub mod regularization;
pub mod scenario;
pub mod solver;

//! Closed-form solutions of the `n = 5` Lane-Emden equation
//!
//! ```text
//! ξ⁻² d/dξ (ξ² dθ/dξ) + θ⁵ = 0
//! ```
//!
//! Solutions are labelled by the constant `C` of the energy integral
//! `(dz/dt)² = (-z⁶ + 3z² + C)/12` of the autonomous form
//! `θ = z/sqrt(2ξ)`, `t = -ln ξ`:
//!
//! - [`elliptic`]: `K(k)`, Jacobian `sn/cn/dn/dc/sc`, real-axis ℘.
//! - [`factor`]: the seven regimes of `C` and the roots of `w(z)`.
//! - [`families`]: every closed-form family, its derivative, and the
//!   discrete scaling symmetry.
//! - [`oracle`]: an independent Runge-Kutta integrator and residual checks.
//! - [`verify`]: the check battery behind `lane-emden verify`.
//! - [`cli`]: the `lane-emden` command-line tool.

pub mod cli;
pub mod elliptic;
pub mod error;
pub mod factor;
pub mod families;
pub mod oracle;
pub mod verify;

pub use error::{Error, Result};
pub use factor::{classify, Regime};
pub use families::{eval, Branch, Sample, Solution, SolutionParams};

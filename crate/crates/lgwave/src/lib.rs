//! Traveling waves for modified Leslie-Gower predator-prey systems.
//!
//! The library studies the reaction-diffusion system
//!
//! ```text
//!   u_t = u_xx   + f(u) (p(u) - v)
//!   v_t = d v_xx + s v (1 - v / q(u)),      q(u) = u h(u) + mu
//! ```
//!
//! on the line, where `u` is prey density, `v` is predator density, and the
//! kinetic building blocks satisfy
//!
//! * `f(0) = 0`, `f' > 0`                  (prey capture),
//! * `p(1) = 0`, `p' < 0`                  (per-capture prey growth),
//! * `h(0) > 0`, `h' >= 0`                 (prey contribution to carrying capacity).
//!
//! Built-in kinetics cover Lotka-Volterra, Holling type II, and Ivlev response
//! functions; custom kinetics plug in through closures.
//!
//! Modules, bottom of the stack first:
//!
//! * [`model`] - kinetics, parameter validation, structural assumption checks.
//! * [`analysis`] - equilibria, critical invasion speed `c* = 2 sqrt(d s)`,
//!   decay eigenvalues, coexistence/extinction thresholds, and the wave-operator
//!   context (`tau`, kernel exponents) used downstream.
//! * [`bounds`] - explicit piecewise-exponential upper/lower solution pairs for
//!   the wave profile system at speed `c >= c*`, plus pointwise verification of
//!   the defining differential inequalities.
//! * [`waveode`] - the 4-dimensional wave profile ODE: shooting from the
//!   prey-only state, monotone iteration between upper/lower solutions,
//!   derivative estimates, asymptotic decay rates, and tail classification.
//! * [`lyapunov`] - three wave Lyapunov constructions (coexistence, prey-free,
//!   and a wider-range Lotka-Volterra variant) with descent verification along
//!   computed profiles.
//! * [`pdesim`] - explicit finite-difference simulation of the full PDE,
//!   front tracking, spreading-speed estimation, and co-moving profile
//!   extraction.
//! * [`cli`] - config parsing and the subcommand driver behind the `lgwave`
//!   binary (`analyze`, `bounds`, `wave`, `lyapunov`, `simulate`, `reproduce`).
//! * [`output`] - deterministic CSV/SVG/summary emission.
//!
//! The `examples/` directory exercises each capability end to end; the
//! acceptance suite in `tests/acceptance.rs` pins the quantitative contracts.

pub mod analysis;
pub mod bounds;
pub mod cli;
mod error;
pub mod lyapunov;
pub mod model;
pub mod numerics;
pub mod output;
pub mod pdesim;
pub mod waveode;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

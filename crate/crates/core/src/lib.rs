//! One-dimensional blood flow in arteries with variable wall stiffness and
//! variable cross-section at rest, solved with a well-balanced finite-volume
//! scheme.
//!
//! The model is the hyperbolic system for the cross-section area `A` and the
//! discharge `Q = A u`,
//!
//! ```text
//!   dA/dt + dQ/dx = 0
//!   dQ/dt + d/dx ( Q^2/A + k A^(3/2) / (3 sqrt(pi) rho) )
//!         = A/(sqrt(pi) rho) * ( d(k sqrt(A0))/dx - (2/3) sqrt(A) dk/dx )
//!           - Cf Q/A  [ + Cv d^2Q/dx^2 ]
//! ```
//!
//! with `k(x)` the wall stiffness and `A0(x)` the cross-section at rest. The
//! geometric source term is discretized with a hydrostatic reconstruction of
//! the interface states, which preserves the rest equilibrium
//! `Q = 0, k sqrt(A) - k sqrt(A0) = const` exactly; a naive centered
//! discretization is included as a comparison baseline. Fluxes are HLL,
//! friction is applied semi-implicitly, and the optional viscoelastic
//! diffusion term is split off and integrated with Crank-Nicolson.
//!
//! Entry points:
//! - [`scenario::run_scenario`] runs a configured simulation and returns
//!   snapshots plus diagnostics.
//! - [`scenario::presets`] holds ready-made configurations for the classic
//!   validation cases (man at rest, tourniquet, constriction, pulse waves in
//!   uniform and tapered vessels).
//! - [`oracles`] holds the analytic and asymptotic reference solutions the
//!   test suites compare against.
//!
//! See the crate examples for one runnable program per capability.

pub mod boundary;
pub mod config;
pub mod convergence;
pub mod geometry;
pub mod oracles;
pub mod output;
pub mod riemann;
pub mod scenario;
pub mod state;
pub mod timestepper;
pub mod wellbalanced;

pub use geometry::{build_profile, ArteryProfile, Grid, ProfileSpec};
pub use scenario::{run_scenario, RunOutput, ScenarioConfig, Snapshot};
pub use state::{PhysicalParams, State};
pub use timestepper::{SchemeConfig, SourceMode};

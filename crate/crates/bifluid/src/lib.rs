//! One-dimensional barotropic two-fluid flow on the unit interval.
//!
//! Two interpenetrating compressible components, each with its own density
//! and velocity, are coupled through a constant 2x2 viscosity matrix and a
//! momentum-exchange (drag) term. The solver advances the coupled system
//! with a semi-implicit finite-difference scheme whose implicit viscous
//! stage is solved sequentially (component 1 first, then component 2) when
//! the viscosity matrix is lower triangular.
//!
//! Alongside the solver, the crate ships the machinery to check the
//! structural properties of the system numerically: energy dissipation
//! monitoring, mass-coordinate (Lagrangian) identities, manufactured-solution
//! convergence, a spectral Galerkin cross-oracle, and continuous-dependence
//! experiments.

pub mod config;
pub mod diagnostics;
pub mod expr;
pub mod grid;
pub mod lagrangian;
pub mod linalg;
pub mod ops;
pub mod output;
pub mod params;
pub mod presets;
pub mod solver;
pub mod state;
pub mod verification;

pub mod commands;

pub use grid::Grid;
pub use params::MixtureParams;
pub use solver::{StepControl, Trajectory};
pub use state::{InitialData, State};

//! Nodal flow state and initial-data specifications.

use crate::grid::Grid;
use thiserror::Error;

/// Default floor below which a density is declared vacuum-degenerate.
pub const DEFAULT_POSITIVITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("density rho{component} = {value:.6e} at x = {x:.6} is below the positivity floor")]
    NonPositiveDensity {
        component: usize,
        x: f64,
        value: f64,
    },
    #[error("velocity u{component} must vanish at the boundary (got {value:.6e})")]
    BoundaryVelocityNonzero { component: usize, value: f64 },
    #[error("field arrays must all have {expected} nodes, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sampled field is not finite at x = {x:.6}")]
    NonFiniteSample { x: f64 },
}

/// Both components' densities and velocities at one time level.
///
/// Arrays are indexed by node on the uniform grid; component index is
/// 0-based. Values are immutable after construction by convention: the
/// solver returns fresh states rather than mutating.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub rho: [Vec<f64>; 2],
    pub u: [Vec<f64>; 2],
}

impl State {
    pub fn node_count(&self) -> usize {
        self.rho[0].len()
    }

    /// Grid spacing implied by the node count.
    pub fn spacing(&self) -> f64 {
        1.0 / (self.node_count() - 1) as f64
    }

    /// Check positivity, boundary conditions, and array consistency.
    pub fn check(&self, floor: f64) -> Result<(), StateError> {
        let m = self.node_count();
        for i in 0..2 {
            if self.rho[i].len() != m || self.u[i].len() != m {
                return Err(StateError::LengthMismatch {
                    expected: m,
                    got: self.rho[i].len().min(self.u[i].len()),
                });
            }
            let h = self.spacing();
            for (k, &r) in self.rho[i].iter().enumerate() {
                if !(r > floor) {
                    return Err(StateError::NonPositiveDensity {
                        component: i + 1,
                        x: k as f64 * h,
                        value: r,
                    });
                }
            }
            for &edge in &[0, m - 1] {
                if self.u[i][edge] != 0.0 {
                    return Err(StateError::BoundaryVelocityNonzero {
                        component: i + 1,
                        value: self.u[i][edge],
                    });
                }
            }
        }
        Ok(())
    }
}

/// One scalar field of the initial data: a constant, a closed form, or a
/// pre-tabulated nodal array.
pub enum FieldSpec {
    Constant(f64),
    Function(Box<dyn Fn(f64) -> f64 + Send + Sync>),
    Samples(Vec<f64>),
}

impl FieldSpec {
    pub fn function<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        FieldSpec::Function(Box::new(f))
    }

    fn sample(&self, grid: &Grid) -> Result<Vec<f64>, StateError> {
        let vals: Vec<f64> = match self {
            FieldSpec::Constant(c) => vec![*c; grid.node_count()],
            FieldSpec::Function(f) => grid.nodes().iter().map(|&x| f(x)).collect(),
            FieldSpec::Samples(s) => {
                if s.len() != grid.node_count() {
                    return Err(StateError::LengthMismatch {
                        expected: grid.node_count(),
                        got: s.len(),
                    });
                }
                s.clone()
            }
        };
        if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
            return Err(StateError::NonFiniteSample { x: grid.node(k) });
        }
        Ok(vals)
    }
}

/// Initial densities and velocities for both components.
pub struct InitialData {
    pub rho0: [FieldSpec; 2],
    pub u0: [FieldSpec; 2],
}

/// Plain sampled arrays without admissibility checks; used for
/// perturbation deltas, which may be negative.
pub struct SampledFields {
    pub rho: [Vec<f64>; 2],
    pub u: [Vec<f64>; 2],
}

/// Sample the four fields to the grid nodes. Endpoint velocities are
/// forced to exactly zero; no positivity check is applied.
pub fn sample_fields(data: &InitialData, grid: &Grid) -> Result<SampledFields, StateError> {
    let rho = [data.rho0[0].sample(grid)?, data.rho0[1].sample(grid)?];
    let mut u = [data.u0[0].sample(grid)?, data.u0[1].sample(grid)?];
    let last = grid.node_count() - 1;
    for ui in &mut u {
        ui[0] = 0.0;
        ui[last] = 0.0;
    }
    Ok(SampledFields { rho, u })
}

/// Sample initial data into a valid state at `t = 0`: endpoint velocities
/// exactly zero, densities strictly above the positivity floor.
pub fn sample_initial(
    data: &InitialData,
    grid: &Grid,
    positivity_floor: f64,
) -> Result<State, StateError> {
    let fields = sample_fields(data, grid)?;
    let state = State {
        t: 0.0,
        rho: fields.rho,
        u: fields.u,
    };
    state.check(positivity_floor)?;
    Ok(state)
}

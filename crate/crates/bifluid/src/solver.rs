//! Semi-implicit time integration of the coupled two-component system.
//!
//! Each step does:
//! 1. a conservative first-order upwind update of both densities from the
//!    continuity equations (interface fluxes vanish at the walls, so the
//!    trapezoidal mass of each component is conserved exactly);
//! 2. a velocity update with explicit upwinded convection, central pressure
//!    gradient, backward-Euler viscous terms, and semi-implicit drag.
//!
//! With `mu12 = 0` the implicit stage is solved sequentially: the `u1`
//! tridiagonal system first, then `mu21 * dxx(u1)` enters the `u2` system
//! as a known source. The block-coupled variant assembles the identical
//! linear system as one 2x2-block tridiagonal matrix and must agree with
//! the sequential path to elimination round-off; it is also the only path
//! available for non-triangular viscosity matrices.

use crate::grid::Grid;
use crate::linalg::{self, Mat2, Vec2};
use crate::params::MixtureParams;
use crate::state::{State, StateError, DEFAULT_POSITIVITY_FLOOR};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("vacuum-degenerate at t={t:.6}: rho{component} = {value:.6e} at x = {x:.6}")]
    VacuumDegenerate {
        t: f64,
        component: usize,
        x: f64,
        value: f64,
    },
    #[error("singular implicit system for u{component} at t={t:.6} (dt too large?)")]
    SingularSystem { t: f64, component: usize },
    #[error("sequential viscous split requires mu12 = 0 (got {mu12:.6e}); use the block coupling")]
    NonTriangular { mu12: f64 },
    #[error("invalid step control: {0}")]
    InvalidControl(String),
    #[error("invalid state: {0}")]
    InvalidState(#[from] StateError),
}

/// Time-stepping controls.
#[derive(Debug, Clone, PartialEq)]
pub struct StepControl {
    /// CFL safety factor in (0, 1].
    pub cfl_safety: f64,
    /// Upper bound on the step size.
    pub dt_max: f64,
    /// Final time of the run.
    pub t_end: f64,
    /// Treat the drag term semi-implicitly (own velocity at the new level).
    pub drag_implicit: bool,
    /// Keep every `store_stride`-th state (the final state is always kept).
    pub store_stride: usize,
    /// Densities at or below this value abort the run as vacuum-degenerate.
    pub positivity_floor: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl_safety: 0.4,
            dt_max: 0.05,
            t_end: 1.0,
            drag_implicit: true,
            store_stride: 1,
            positivity_floor: DEFAULT_POSITIVITY_FLOOR,
        }
    }
}

impl StepControl {
    pub fn check(&self) -> Result<(), SolverError> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(SolverError::InvalidControl(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !(self.dt_max > 0.0) {
            return Err(SolverError::InvalidControl(format!(
                "dt_max must be positive, got {}",
                self.dt_max
            )));
        }
        if !(self.t_end > 0.0) {
            return Err(SolverError::InvalidControl(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.store_stride == 0 {
            return Err(SolverError::InvalidControl(
                "store_stride must be at least 1".into(),
            ));
        }
        if !(self.positivity_floor > 0.0) {
            return Err(SolverError::InvalidControl(format!(
                "positivity_floor must be positive, got {}",
                self.positivity_floor
            )));
        }
        Ok(())
    }
}

/// Discretization of the explicit convection term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convection {
    /// Donor-cell upwinding (default; first order).
    Upwind,
    /// Central differencing (test mode for convergence-order studies).
    Central,
}

/// How the implicit viscous stage is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViscousCoupling {
    /// Component 1 first, then component 2; requires `mu12 = 0`.
    Sequential,
    /// One 2x2-block tridiagonal solve; works for any coercive matrix.
    Block,
}

/// External source terms evaluated at grid nodes, used by
/// manufactured-solution runs.
pub trait SourceTerms {
    /// Right-hand side of the continuity equation for `component` (0-based).
    fn continuity(&self, component: usize, x: f64, t: f64) -> f64;
    /// Right-hand side of the momentum equation for `component` (0-based).
    fn momentum(&self, component: usize, x: f64, t: f64) -> f64;
}

/// Scheme variations beyond the default production configuration.
#[derive(Clone, Copy)]
pub struct SchemeOptions<'a> {
    pub convection: Convection,
    pub coupling: ViscousCoupling,
    pub sources: Option<&'a dyn SourceTerms>,
}

impl Default for SchemeOptions<'_> {
    fn default() -> Self {
        Self {
            convection: Convection::Upwind,
            coupling: ViscousCoupling::Sequential,
            sources: None,
        }
    }
}

/// Per-step log entry. `t` is the time at the end of the step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    /// Convective CFL number actually taken: dt * max speed / h.
    pub cfl: f64,
    /// Max-norm residual of the implicit velocity systems after the solve.
    pub residual: f64,
}

/// Time-ordered states (possibly strided) plus the full per-step log.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub step_log: Vec<StepRecord>,
}

impl Trajectory {
    pub fn first(&self) -> &State {
        &self.states[0]
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory has states")
    }

    /// Largest step size taken during the run (0 for an empty log).
    pub fn max_dt(&self) -> f64 {
        self.step_log.iter().fold(0.0, |m, r| m.max(r.dt))
    }

    /// Grid spacing of the stored states.
    pub fn spacing(&self) -> f64 {
        self.first().spacing()
    }
}

/// Fastest signal speed over all nodes and components: nodal velocity or the
/// barotropic sound-speed proxy sqrt(K_i gamma_i rho_i^(gamma_i - 1)).
pub fn max_signal_speed(state: &State, params: &MixtureParams) -> f64 {
    let mut speed = 0.0_f64;
    for i in 0..2 {
        for k in 0..state.node_count() {
            speed = speed.max(state.u[i][k].abs());
            let c2 = params.k[i] * params.gamma[i] * state.rho[i][k].powf(params.gamma[i] - 1.0);
            if c2 > 0.0 {
                speed = speed.max(c2.sqrt());
            }
        }
    }
    speed
}

/// CFL-limited step size: `min(dt_max, cfl_safety * h / max_signal_speed)`,
/// falling back to `dt_max` when every speed vanishes.
pub fn stable_dt(state: &State, params: &MixtureParams, ctl: &StepControl, grid: &Grid) -> f64 {
    let speed = max_signal_speed(state, params);
    if speed == 0.0 {
        ctl.dt_max
    } else {
        ctl.dt_max.min(ctl.cfl_safety * grid.spacing() / speed)
    }
}

/// Advance the state by `dt` with the default scheme.
pub fn step(
    state: &State,
    params: &MixtureParams,
    grid: &Grid,
    ctl: &StepControl,
    dt: f64,
) -> Result<State, SolverError> {
    step_with(state, params, grid, ctl, dt, &SchemeOptions::default()).map(|(s, _)| s)
}

/// Advance the state by `dt`; returns the new state and the max-norm
/// residual of the implicit velocity solves.
pub fn step_with(
    state: &State,
    params: &MixtureParams,
    grid: &Grid,
    ctl: &StepControl,
    dt: f64,
    opts: &SchemeOptions,
) -> Result<(State, f64), SolverError> {
    let m = grid.node_count();
    debug_assert_eq!(state.node_count(), m);
    let h = grid.spacing();
    let t_new = state.t + dt;

    // Stage (a): conservative upwind continuity update.
    let mut rho_new: [Vec<f64>; 2] = [vec![0.0; m], vec![0.0; m]];
    for i in 0..2 {
        let rho = &state.rho[i];
        let u = &state.u[i];
        // Interface flux (rho u) at x_{k+1/2}; donor cell chosen by the
        // face velocity sign. Wall fluxes are zero since u = 0 there.
        let mut flux = vec![0.0; m - 1];
        for (k, f) in flux.iter_mut().enumerate() {
            let uf = 0.5 * (u[k] + u[k + 1]);
            *f = if uf >= 0.0 { rho[k] * uf } else { rho[k + 1] * uf };
        }
        // Boundary nodes control half cells, interior nodes full cells;
        // with trapezoidal weights the update telescopes to zero net mass.
        rho_new[i][0] = rho[0] - 2.0 * dt / h * flux[0];
        for k in 1..m - 1 {
            rho_new[i][k] = rho[k] - dt / h * (flux[k] - flux[k - 1]);
        }
        rho_new[i][m - 1] = rho[m - 1] + 2.0 * dt / h * flux[m - 2];
        if let Some(src) = opts.sources {
            for k in 0..m {
                rho_new[i][k] += dt * src.continuity(i, grid.node(k), state.t);
            }
        }
        for k in 0..m {
            if !(rho_new[i][k] > ctl.positivity_floor) {
                return Err(SolverError::VacuumDegenerate {
                    t: t_new,
                    component: i + 1,
                    x: grid.node(k),
                    value: rho_new[i][k],
                });
            }
        }
    }

    // Stage (b): explicit convection + pressure, implicit viscosity, drag.
    //
    // Interior row k of component i (boundary rows pin u = 0):
    //   rho_i'(u* - u^n)/dt + rho_i' u^n Du^n + K_i Dc(rho_i'^gamma_i)
    //     = sum_j mu_ij Dxx u_j* + drag_i + g_i,
    // where drag_1 = a (u2^n - u1*) and drag_2 = a (u1* - u2*) in the
    // semi-implicit mode (own velocity new, and the freshly computed u1
    // feeds the u2 equation), or fully explicit when drag_implicit is off.
    let a_impl = if ctl.drag_implicit { params.a } else { 0.0 };
    let mut explicit_rhs: [Vec<f64>; 2] = [vec![0.0; m], vec![0.0; m]];
    for i in 0..2 {
        let rho = &rho_new[i];
        let u = &state.u[i];
        let other = &state.u[1 - i];
        let sign = if i == 0 { 1.0 } else { -1.0 };
        let pressure: Vec<f64> = rho.iter().map(|r| params.k[i] * r.powf(params.gamma[i])).collect();
        for k in 1..m - 1 {
            let du = match opts.convection {
                Convection::Upwind => {
                    if u[k] > 0.0 {
                        (u[k] - u[k - 1]) / h
                    } else if u[k] < 0.0 {
                        (u[k + 1] - u[k]) / h
                    } else {
                        0.0
                    }
                }
                Convection::Central => (u[k + 1] - u[k - 1]) / (2.0 * h),
            };
            let conv = rho[k] * u[k] * du;
            let pgrad = (pressure[k + 1] - pressure[k - 1]) / (2.0 * h);
            let drag_rhs = if ctl.drag_implicit {
                // The partner contribution for component 1 stays at the
                // old level; for component 2 it couples implicitly and is
                // assembled into the matrix instead.
                if i == 0 {
                    params.a * other[k]
                } else {
                    0.0
                }
            } else {
                sign * params.a * (state.u[1][k] - state.u[0][k])
            };
            let g = opts
                .sources
                .map(|s| s.momentum(i, grid.node(k), t_new))
                .unwrap_or(0.0);
            explicit_rhs[i][k] = rho[k] / dt * u[k] - conv - pgrad + drag_rhs + g;
        }
    }

    let (u_new, residual) = match opts.coupling {
        ViscousCoupling::Sequential => solve_sequential(
            state, params, &rho_new, &explicit_rhs, a_impl, h, dt, t_new, ctl,
        )?,
        ViscousCoupling::Block => solve_block(
            params, &rho_new, &explicit_rhs, a_impl, h, dt, t_new,
        )?,
    };

    Ok((
        State {
            t: t_new,
            rho: rho_new,
            u: u_new,
        },
        residual,
    ))
}

#[allow(clippy::too_many_arguments)]
fn solve_sequential(
    state: &State,
    params: &MixtureParams,
    rho_new: &[Vec<f64>; 2],
    explicit_rhs: &[Vec<f64>; 2],
    a_impl: f64,
    h: f64,
    dt: f64,
    t_new: f64,
    ctl: &StepControl,
) -> Result<([Vec<f64>; 2], f64), SolverError> {
    if params.mu[0][1] != 0.0 {
        return Err(SolverError::NonTriangular {
            mu12: params.mu[0][1],
        });
    }
    let m = rho_new[0].len();
    let h2 = h * h;
    let mut u_new: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut residual = 0.0_f64;

    for i in 0..2 {
        let mu_ii = params.mu[i][i];
        let mut sub = vec![0.0; m - 1];
        let mut diag = vec![1.0; m];
        let mut sup = vec![0.0; m - 1];
        let mut rhs = vec![0.0; m];
        for k in 1..m - 1 {
            diag[k] = rho_new[i][k] / dt + 2.0 * mu_ii / h2 + a_impl;
            sub[k - 1] = -mu_ii / h2;
            sup[k] = -mu_ii / h2;
            rhs[k] = explicit_rhs[i][k];
            if i == 1 {
                let u1 = &u_new[0];
                // viscous cross term with the freshly computed u1
                rhs[k] += params.mu[1][0] * (u1[k - 1] - 2.0 * u1[k] + u1[k + 1]) / h2;
                if ctl.drag_implicit {
                    rhs[k] += params.a * u1[k];
                }
            }
        }
        // boundary rows: u = 0
        sub[m - 2] = 0.0;
        sup[0] = 0.0;

        let x = linalg::solve_tridiagonal(&sub, &diag, &sup, &rhs).map_err(|_| {
            SolverError::SingularSystem {
                t: t_new,
                component: i + 1,
            }
        })?;
        residual = residual.max(tridiagonal_residual(&sub, &diag, &sup, &rhs, &x));
        u_new[i] = x;
    }
    let _ = state;
    Ok((u_new, residual))
}

fn tridiagonal_residual(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64], x: &[f64]) -> f64 {
    let n = diag.len();
    let mut worst = 0.0_f64;
    for k in 0..n {
        let mut ax = diag[k] * x[k];
        if k > 0 {
            ax += sub[k - 1] * x[k - 1];
        }
        if k < n - 1 {
            ax += sup[k] * x[k + 1];
        }
        worst = worst.max((ax - rhs[k]).abs());
    }
    worst
}

#[allow(clippy::too_many_arguments)]
fn solve_block(
    params: &MixtureParams,
    rho_new: &[Vec<f64>; 2],
    explicit_rhs: &[Vec<f64>; 2],
    a_impl: f64,
    h: f64,
    dt: f64,
    t_new: f64,
) -> Result<([Vec<f64>; 2], f64), SolverError> {
    let m = rho_new[0].len();
    let h2 = h * h;
    let mu = &params.mu;

    let off: Mat2 = [
        [-mu[0][0] / h2, -mu[0][1] / h2],
        [-mu[1][0] / h2, -mu[1][1] / h2],
    ];
    let ident: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    let zero: Mat2 = [[0.0, 0.0], [0.0, 0.0]];

    let mut sub = vec![zero; m - 1];
    let mut diag = vec![ident; m];
    let mut sup = vec![zero; m - 1];
    let mut rhs = vec![[0.0, 0.0]; m];

    for k in 1..m - 1 {
        // Same system as the sequential split: the component-1 drag keeps
        // the partner at the old level (already in the explicit rhs), the
        // component-2 drag couples implicitly to u1*.
        diag[k] = [
            [rho_new[0][k] / dt + 2.0 * mu[0][0] / h2 + a_impl, 2.0 * mu[0][1] / h2],
            [
                2.0 * mu[1][0] / h2 - a_impl,
                rho_new[1][k] / dt + 2.0 * mu[1][1] / h2 + a_impl,
            ],
        ];
        sub[k - 1] = off;
        sup[k] = off;
        rhs[k] = [explicit_rhs[0][k], explicit_rhs[1][k]];
    }
    sub[m - 2] = zero;
    sup[0] = zero;

    let x = linalg::solve_block_tridiagonal(&sub, &diag, &sup, &rhs).map_err(|_| {
        SolverError::SingularSystem {
            t: t_new,
            component: 1,
        }
    })?;

    let mut worst = 0.0_f64;
    for k in 0..m {
        let mut ax = linalg::mat2_vec(&diag[k], &x[k]);
        if k > 0 {
            let t = linalg::mat2_vec(&sub[k - 1], &x[k - 1]);
            ax[0] += t[0];
            ax[1] += t[1];
        }
        if k < m - 1 {
            let t = linalg::mat2_vec(&sup[k], &x[k + 1]);
            ax[0] += t[0];
            ax[1] += t[1];
        }
        worst = worst
            .max((ax[0] - rhs[k][0]).abs())
            .max((ax[1] - rhs[k][1]).abs());
    }

    let u1: Vec<f64> = x.iter().map(|v: &Vec2| v[0]).collect();
    let u2: Vec<f64> = x.iter().map(|v| v[1]).collect();
    Ok(([u1, u2], worst))
}

/// Step callback invoked after every accepted step.
pub type Monitor<'a> = &'a mut dyn FnMut(&State, &StepRecord);

/// Integrate from the initial state to `ctl.t_end` with the default scheme.
pub fn run(
    initial: &State,
    params: &MixtureParams,
    ctl: &StepControl,
    grid: &Grid,
    monitors: &mut [Monitor<'_>],
) -> Result<Trajectory, SolverError> {
    run_with(initial, params, ctl, grid, &SchemeOptions::default(), monitors)
}

/// Integrate from the initial state to `ctl.t_end`, invoking every monitor
/// after each step. The final step is clamped so the run lands exactly on
/// `t_end`; stored states honour `ctl.store_stride` but always include the
/// first and last state.
pub fn run_with(
    initial: &State,
    params: &MixtureParams,
    ctl: &StepControl,
    grid: &Grid,
    opts: &SchemeOptions,
    monitors: &mut [Monitor<'_>],
) -> Result<Trajectory, SolverError> {
    ctl.check()?;
    initial.check(ctl.positivity_floor)?;
    if initial.node_count() != grid.node_count() {
        return Err(SolverError::InvalidState(StateError::LengthMismatch {
            expected: grid.node_count(),
            got: initial.node_count(),
        }));
    }

    let mut traj = Trajectory {
        states: vec![initial.clone()],
        step_log: Vec::new(),
    };
    let mut current = initial.clone();
    let mut steps_taken = 0usize;
    let mut last_stored = true;

    // The comparison tolerance keeps a final sliver step of size ~1e-14
    // from being taken after exact landing.
    let eps = 1e-12 * ctl.t_end.max(1.0);
    while current.t < ctl.t_end - eps {
        let speed = max_signal_speed(&current, params);
        let dt_stable = if speed == 0.0 {
            ctl.dt_max
        } else {
            ctl.dt_max.min(ctl.cfl_safety * grid.spacing() / speed)
        };
        let dt = dt_stable.min(ctl.t_end - current.t);
        let (next, residual) = step_with(&current, params, grid, ctl, dt, opts)?;
        steps_taken += 1;
        let record = StepRecord {
            t: next.t,
            dt,
            cfl: dt * speed / grid.spacing(),
            residual,
        };
        for monitor in monitors.iter_mut() {
            monitor(&next, &record);
        }
        traj.step_log.push(record);
        last_stored = steps_taken % ctl.store_stride == 0;
        if last_stored {
            traj.states.push(next.clone());
        }
        current = next;
    }
    if !last_stored {
        traj.states.push(current);
    }
    Ok(traj)
}

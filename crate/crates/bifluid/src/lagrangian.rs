//! Mass-coordinate charts and the change-of-variables identities.
//!
//! For component `m`, the mass coordinate is `y_m(x, t) = int_0^x rho_m ds`;
//! it maps [0, 1] onto [0, d_m] with `d_m` the component's total mass.
//! Each component carries its own chart, so these are diagnostic overlays
//! on the Eulerian solution rather than a solver coordinate system.

use crate::ops::{interp_linear, interp_uniform, trapz_h};
use crate::params::MixtureParams;
use crate::state::State;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LagrangianError {
    #[error("mass chart needs positive densities: rho{component} = {value:.6e} at node {node}")]
    NonPositiveDensity {
        component: usize,
        node: usize,
        value: f64,
    },
    #[error("states must be ordered in time (dt = {dt:.6e})")]
    NonPositiveTimeStep { dt: f64 },
}

/// Cumulative-mass chart of one component at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct MassChart {
    /// 0-based component index.
    pub component: usize,
    /// Total mass `d_m`.
    pub total_mass: f64,
    /// Cumulative mass at each Eulerian node (strictly increasing).
    pub y_nodes: Vec<f64>,
    /// The Eulerian node positions, kept for the inverse map.
    x_nodes: Vec<f64>,
}

impl MassChart {
    /// Inverse chart: the Eulerian position holding cumulative mass `y`.
    pub fn x_of_mass(&self, y: f64) -> f64 {
        interp_linear(&self.y_nodes, &self.x_nodes, y)
    }

    /// Forward chart evaluated between nodes.
    pub fn mass_of_x(&self, x: f64) -> f64 {
        interp_linear(&self.x_nodes, &self.y_nodes, x)
    }
}

/// Build the cumulative trapezoidal mass chart of component `m` (0-based).
pub fn build_chart(state: &State, component: usize) -> Result<MassChart, LagrangianError> {
    let rho = &state.rho[component];
    let n = rho.len() - 1;
    let h = state.spacing();
    for (k, &r) in rho.iter().enumerate() {
        if !(r > 0.0) {
            return Err(LagrangianError::NonPositiveDensity {
                component: component + 1,
                node: k,
                value: r,
            });
        }
    }
    let mut y = Vec::with_capacity(n + 1);
    y.push(0.0);
    for k in 0..n {
        let last = *y.last().unwrap();
        y.push(last + 0.5 * h * (rho[k] + rho[k + 1]));
    }
    Ok(MassChart {
        component,
        total_mass: *y.last().unwrap(),
        y_nodes: y,
        x_nodes: (0..=n).map(|k| k as f64 / n as f64).collect(),
    })
}

/// Interpolation rule used when resampling onto the mass grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Piecewise linear (monotone and positivity-preserving).
    #[default]
    Linear,
    /// Monotone cubic (Fritsch-Carlson slopes).
    MonotoneCubic,
}

/// Resample a nodal Eulerian field onto `n_y + 1` uniform mass nodes of the
/// chart's interval [0, d_m].
pub fn resample(
    field: &[f64],
    chart: &MassChart,
    n_y: usize,
    interpolation: Interpolation,
) -> Vec<f64> {
    let d = chart.total_mass;
    (0..=n_y)
        .map(|j| {
            let y = d * j as f64 / n_y as f64;
            let x = chart.x_of_mass(y);
            match interpolation {
                Interpolation::Linear => interp_uniform(field, x),
                Interpolation::MonotoneCubic => monotone_cubic_eval(field, x),
            }
        })
        .collect()
}

/// Fritsch-Carlson monotone cubic interpolation on the uniform unit grid.
fn monotone_cubic_eval(field: &[f64], x: f64) -> f64 {
    let n = field.len() - 1;
    let h = 1.0 / n as f64;
    let slopes = monotone_slopes(field, h);
    let s = x.clamp(0.0, 1.0) * n as f64;
    let j = (s.floor() as usize).min(n - 1);
    let t = s - j as f64;
    let (y0, y1) = (field[j], field[j + 1]);
    let (m0, m1) = (slopes[j] * h, slopes[j + 1] * h);
    let t2 = t * t;
    let t3 = t2 * t;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + m0 * (t3 - 2.0 * t2 + t)
        + y1 * (-2.0 * t3 + 3.0 * t2)
        + m1 * (t3 - t2)
}

fn monotone_slopes(field: &[f64], h: f64) -> Vec<f64> {
    let n = field.len() - 1;
    let deltas: Vec<f64> = (0..n).map(|k| (field[k + 1] - field[k]) / h).collect();
    let mut m = vec![0.0; n + 1];
    m[0] = deltas[0];
    m[n] = deltas[n - 1];
    for k in 1..n {
        if deltas[k - 1] * deltas[k] <= 0.0 {
            m[k] = 0.0;
        } else {
            m[k] = 0.5 * (deltas[k - 1] + deltas[k]);
        }
    }
    // limit slopes so the interpolant stays monotone on each cell
    for k in 0..n {
        if deltas[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
        } else {
            let alpha = m[k] / deltas[k];
            let beta = m[k + 1] / deltas[k];
            let r = alpha * alpha + beta * beta;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                m[k] = tau * alpha * deltas[k];
                m[k + 1] = tau * beta * deltas[k];
            }
        }
    }
    m
}

/// Evaluate the total energy once in Eulerian form and once transformed to
/// the mass coordinate of `component`, and return the absolute difference.
/// The two are the same integral under a change of variables, so the
/// residual is pure quadrature error, O(h^2) on smooth states.
pub fn verify_transformed_energy(
    state: &State,
    params: &MixtureParams,
    component: usize,
    n_y: usize,
) -> Result<f64, LagrangianError> {
    let eulerian = crate::diagnostics::energy(state, params);
    let chart = build_chart(state, component)?;
    let d = chart.total_mass;
    let hy = d / n_y as f64;
    let rho_m = &state.rho[component];
    let mut integrand = vec![0.0; n_y + 1];
    for (j, value) in integrand.iter_mut().enumerate() {
        let y = d * j as f64 / n_y as f64;
        let x = chart.x_of_mass(y);
        let rm = interp_uniform(rho_m, x);
        let mut acc = 0.0;
        for i in 0..2 {
            let r = interp_uniform(&state.rho[i], x);
            let u = interp_uniform(&state.u[i], x);
            acc += 0.5 * r * u * u / rm
                + params.k[i] / (params.gamma[i] - 1.0) * r.powf(params.gamma[i]) / rm;
        }
        *value = acc;
    }
    let transformed = trapz_h(&integrand, hy);
    Ok((eulerian - transformed).abs())
}

/// A position where `rho_m` crosses its mean value `d_m`.
///
/// The trapezoidal mean lies between the nodal extrema, so a (non-strict)
/// sign change always exists on some cell; the crossing is located by
/// linear interpolation. When the density is flat the first node with the
/// minimal deviation is returned.
pub fn mean_value_point(state: &State, component: usize) -> Result<f64, LagrangianError> {
    let chart = build_chart(state, component)?;
    let d = chart.total_mass;
    let rho = &state.rho[component];
    let n = rho.len() - 1;
    let h = state.spacing();
    for k in 0..n {
        let a = rho[k] - d;
        let b = rho[k + 1] - d;
        if a == 0.0 {
            return Ok(k as f64 * h);
        }
        if a * b < 0.0 {
            return Ok(k as f64 * h + h * a / (a - b));
        }
        if b == 0.0 {
            return Ok((k + 1) as f64 * h);
        }
    }
    // No discrete crossing: the density is flat to rounding. Return the
    // first node minimizing the deviation.
    let mut best = 0usize;
    let mut best_dev = f64::INFINITY;
    for (k, &r) in rho.iter().enumerate() {
        let dev = (r - d).abs();
        if dev < best_dev {
            best_dev = dev;
            best = k;
        }
    }
    Ok(best as f64 * h)
}

/// Max-norm residuals of the transformed continuity equation over the
/// interior mass nodes, evaluated from two consecutive states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedResidual {
    /// Advective form: dt(rho_i) + rho_m (u_i - u_m) dy(rho_i) + rho_i rho_m dy(u_i).
    pub advective: f64,
    /// Divergence form: dt(rho_i / rho_m) + dy(rho_i (u_i - u_m)).
    pub divergence: f64,
}

/// Evaluate both residual forms on the uniform mass grid of component `m`
/// (0-based); `i` is the transported component. Spatial derivatives are
/// central on the mass grid at the earlier time level, the time derivative
/// is a forward difference, so the residual is O(h + dt) on solver output
/// and O(h^2 + dt) on exact fields.
pub fn transformed_residual(
    earlier: &State,
    later: &State,
    m: usize,
    i: usize,
    n_y: usize,
) -> Result<TransformedResidual, LagrangianError> {
    let dt = later.t - earlier.t;
    if !(dt > 0.0) {
        return Err(LagrangianError::NonPositiveTimeStep { dt });
    }
    let chart_a = build_chart(earlier, m)?;
    let chart_b = build_chart(later, m)?;
    let d = chart_a.total_mass;
    let hy = d / n_y as f64;

    let sample = |state: &State, chart: &MassChart, field: &[f64]| -> Vec<f64> {
        let _ = state;
        (0..=n_y)
            .map(|j| {
                let y = d * j as f64 / n_y as f64;
                interp_uniform(field, chart.x_of_mass(y))
            })
            .collect()
    };

    let rho_i_a = sample(earlier, &chart_a, &earlier.rho[i]);
    let rho_m_a = sample(earlier, &chart_a, &earlier.rho[m]);
    let u_i_a = sample(earlier, &chart_a, &earlier.u[i]);
    let u_m_a = sample(earlier, &chart_a, &earlier.u[m]);
    let rho_i_b = sample(later, &chart_b, &later.rho[i]);
    let rho_m_b = sample(later, &chart_b, &later.rho[m]);

    let mut advective = 0.0_f64;
    let mut divergence = 0.0_f64;
    for j in 1..n_y {
        let dy_rho = (rho_i_a[j + 1] - rho_i_a[j - 1]) / (2.0 * hy);
        let dy_u = (u_i_a[j + 1] - u_i_a[j - 1]) / (2.0 * hy);
        let dt_rho = (rho_i_b[j] - rho_i_a[j]) / dt;
        let r_adv =
            dt_rho + rho_m_a[j] * (u_i_a[j] - u_m_a[j]) * dy_rho + rho_i_a[j] * rho_m_a[j] * dy_u;
        advective = advective.max(r_adv.abs());

        let ratio_a = rho_i_a[j] / rho_m_a[j];
        let ratio_b = rho_i_b[j] / rho_m_b[j];
        let flux = |jj: usize| rho_i_a[jj] * (u_i_a[jj] - u_m_a[jj]);
        let r_div = (ratio_b - ratio_a) / dt + (flux(j + 1) - flux(j - 1)) / (2.0 * hy);
        divergence = divergence.max(r_div.abs());
    }
    Ok(TransformedResidual {
        advective,
        divergence,
    })
}

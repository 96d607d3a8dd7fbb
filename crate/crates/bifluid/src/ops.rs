//! Nodal field operations on a uniform grid: quadrature and differences.

/// Trapezoidal quadrature with explicit spacing.
pub fn trapz_h(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    let interior: f64 = values[1..n].iter().sum();
    h * (0.5 * (values[0] + values[n]) + interior)
}

/// Trapezoidal quadrature of nodal values over [0, 1].
pub fn trapz(values: &[f64]) -> f64 {
    trapz_h(values, 1.0 / (values.len() - 1) as f64)
}

/// First derivative: central differences inside, one-sided at the ends.
pub fn gradient(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len() - 1;
    let mut g = vec![0.0; n + 1];
    g[0] = (values[1] - values[0]) / h;
    for k in 1..n {
        g[k] = (values[k + 1] - values[k - 1]) / (2.0 * h);
    }
    g[n] = (values[n] - values[n - 1]) / h;
    g
}

/// Second derivative: central three-point stencil, shifted at the ends.
pub fn second_derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len() - 1;
    let h2 = h * h;
    let mut d = vec![0.0; n + 1];
    d[0] = (values[0] - 2.0 * values[1] + values[2]) / h2;
    for k in 1..n {
        d[k] = (values[k - 1] - 2.0 * values[k] + values[k + 1]) / h2;
    }
    d[n] = (values[n - 2] - 2.0 * values[n - 1] + values[n]) / h2;
    d
}

/// sqrt of the trapezoidal integral of the squared field over [0, 1].
pub fn l2_norm(values: &[f64]) -> f64 {
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    trapz(&sq).max(0.0).sqrt()
}

/// Maximum absolute nodal value.
pub fn linf_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Linear interpolation of a nodal field given strictly increasing nodes.
/// Queries outside the node range are clamped to the end values.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    // partition_point returns the first index with node > x
    let j = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let w = (x - x0) / (x1 - x0);
    ys[j - 1] * (1.0 - w) + ys[j] * w
}

/// Linear interpolation on the uniform unit grid implied by `ys.len()`.
pub fn interp_uniform(ys: &[f64], x: f64) -> f64 {
    let n = ys.len() - 1;
    let s = (x.clamp(0.0, 1.0)) * n as f64;
    let j = (s.floor() as usize).min(n - 1);
    let w = s - j as f64;
    ys[j] * (1.0 - w) + ys[j + 1] * w
}

/// Least-squares slope of log(err) against log(scale): the observed
/// convergence order of a refinement sequence.
pub fn fitted_order(scales: &[f64], errors: &[f64]) -> f64 {
    debug_assert_eq!(scales.len(), errors.len());
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > 0.0)
        .map(|(s, e)| (s.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

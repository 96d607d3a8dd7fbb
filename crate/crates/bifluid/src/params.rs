//! Physical constants of the two-component mixture.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("drag must be positive (got {0})")]
    DragNotPositive(f64),
    #[error("pressure coefficient K{component} must be positive (got {value})")]
    PressureCoeffNotPositive { component: usize, value: f64 },
    #[error("adiabatic exponent must exceed 1 (gamma{component} = {value})")]
    AdiabaticExponentTooSmall { component: usize, value: f64 },
    #[error("viscosity matrix is not coercive (smallest symmetric-part eigenvalue {m0})")]
    ViscosityNotCoercive { m0: f64 },
    #[error("viscosity matrix entries must be finite")]
    ViscosityNotFinite,
}

/// Smallest eigenvalue of the symmetric part (mu + mu^T) / 2.
fn symmetric_part_min_eigenvalue(mu: [[f64; 2]; 2]) -> f64 {
    let off = 0.5 * (mu[0][1] + mu[1][0]);
    let mean = 0.5 * (mu[0][0] + mu[1][1]);
    let half_gap = 0.5 * (mu[0][0] - mu[1][1]);
    mean - (half_gap * half_gap + off * off).sqrt()
}

/// Largest constant `m0` with `(mu xi, xi) >= m0 |xi|^2` for all `xi`,
/// i.e. the smallest eigenvalue of the symmetric part of `mu`.
///
/// Errors when the matrix fails the coercivity hypothesis (`m0 <= 0`).
pub fn compute_m0(mu: [[f64; 2]; 2]) -> Result<f64, ParamsError> {
    if mu.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ParamsError::ViscosityNotFinite);
    }
    let m0 = symmetric_part_min_eigenvalue(mu);
    if m0 <= 0.0 {
        return Err(ParamsError::ViscosityNotCoercive { m0 });
    }
    Ok(m0)
}

/// Drag coefficient, pressure laws `p_i = K_i rho_i^gamma_i`, and the
/// constant viscosity matrix `mu`, with its coercivity constant cached.
///
/// Component indices are 0-based in code; messages and file outputs use
/// the 1-based numbering.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureParams {
    pub a: f64,
    pub k: [f64; 2],
    pub gamma: [f64; 2],
    pub mu: [[f64; 2]; 2],
    m0: f64,
    triangular_enforced: bool,
}

impl MixtureParams {
    /// Build a parameter record without range checks. `m0` and the
    /// triangularity flag are derived from `mu`. Test configurations may
    /// use values outside the validated range (e.g. `a = 0`); anything
    /// fed in from user input goes through [`validate_params`].
    pub fn new(a: f64, k: [f64; 2], gamma: [f64; 2], mu: [[f64; 2]; 2]) -> Self {
        Self {
            a,
            k,
            gamma,
            mu,
            m0: symmetric_part_min_eigenvalue(mu),
            triangular_enforced: mu[0][1] == 0.0,
        }
    }

    /// Cached coercivity constant of the viscosity matrix.
    pub fn m0(&self) -> f64 {
        self.m0
    }

    /// True when `mu12 = 0`, the hypothesis under which the sequential
    /// implicit split is exact. Non-triangular matrices run through the
    /// block-coupled solve and carry no stability guarantee.
    pub fn is_triangular(&self) -> bool {
        self.triangular_enforced
    }
}

/// Check every standing hypothesis on the constants and return the record
/// with the derived fields recomputed. Idempotent.
pub fn validate_params(params: MixtureParams) -> Result<MixtureParams, ParamsError> {
    if !(params.a > 0.0) {
        return Err(ParamsError::DragNotPositive(params.a));
    }
    for i in 0..2 {
        if !(params.k[i] > 0.0) {
            return Err(ParamsError::PressureCoeffNotPositive {
                component: i + 1,
                value: params.k[i],
            });
        }
        if !(params.gamma[i] > 1.0) {
            return Err(ParamsError::AdiabaticExponentTooSmall {
                component: i + 1,
                value: params.gamma[i],
            });
        }
    }
    let m0 = compute_m0(params.mu)?;
    Ok(MixtureParams {
        m0,
        triangular_enforced: params.mu[0][1] == 0.0,
        ..params
    })
}

//! Named initial-data presets.

use crate::state::{FieldSpec, InitialData};
use std::f64::consts::PI;

/// Names of the presets whose sampled states are smooth and admissible at
/// every resolution. `vacuum_collapse` is deliberately excluded: it is the
/// designed-failure case that drives a density to the positivity floor.
pub const SMOOTH_PRESETS: [&str; 3] = ["equilibrium", "smooth", "counterflow"];

/// Look up a preset by name.
pub fn preset(name: &str) -> Option<InitialData> {
    match name {
        "equilibrium" => Some(InitialData {
            rho0: [FieldSpec::Constant(1.0), FieldSpec::Constant(1.0)],
            u0: [FieldSpec::Constant(0.0), FieldSpec::Constant(0.0)],
        }),
        "smooth" => Some(InitialData {
            rho0: [
                FieldSpec::function(|x| 1.0 + 0.5 * (2.0 * PI * x).sin()),
                FieldSpec::function(|x| 1.2 + 0.3 * (2.0 * PI * x).cos()),
            ],
            u0: [
                FieldSpec::function(|x| 0.1 * (PI * x).sin()),
                FieldSpec::function(|x| -0.05 * (2.0 * PI * x).sin()),
            ],
        }),
        "counterflow" => Some(InitialData {
            rho0: [
                FieldSpec::function(|x| 1.1 + 0.2 * (PI * x).sin()),
                FieldSpec::function(|x| 0.9 + 0.2 * x),
            ],
            u0: [
                FieldSpec::function(|x| 0.15 * (PI * x).sin()),
                FieldSpec::function(|x| -0.15 * (PI * x).sin()),
            ],
        }),
        // Expansion around a near-vacuum notch at x = 1/2; with weak
        // viscosity and pressure this empties the centre past the floor.
        "vacuum_collapse" => Some(InitialData {
            rho0: [
                FieldSpec::function(|x| 1e-9 + 0.5 * (1.0 + (2.0 * PI * x).cos())),
                FieldSpec::function(|x| 1e-9 + 0.5 * (1.0 + (2.0 * PI * x).cos())),
            ],
            u0: [
                FieldSpec::function(|x| -2.0 * (2.0 * PI * x).sin()),
                FieldSpec::function(|x| -2.0 * (2.0 * PI * x).sin()),
            ],
        }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::state::sample_initial;

    #[test]
    fn smooth_presets_sample_to_admissible_states() {
        let grid = Grid::new(64).unwrap();
        for name in SMOOTH_PRESETS {
            let data = preset(name).unwrap();
            sample_initial(&data, &grid, 1e-12)
                .unwrap_or_else(|e| panic!("preset {name} not admissible: {e}"));
        }
    }

    #[test]
    fn unknown_preset_is_none() {
        assert!(preset("no_such_preset").is_none());
    }
}

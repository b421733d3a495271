//! Scenario files shipped with the binary.

use crate::config::{parse_config, ConfigError, ScenarioConfig};

pub const BUNDLED: [(&str, &str); 9] = [
    ("spin_half_algebra", include_str!("../scenarios/spin_half_algebra.cfg")),
    ("free_particle_3d_audit", include_str!("../scenarios/free_particle_3d_audit.cfg")),
    ("free_boost_invariance", include_str!("../scenarios/free_boost_invariance.cfg")),
    ("linear_field_breaking", include_str!("../scenarios/linear_field_breaking.cfg")),
    ("anisotropic_rotation_breaking", include_str!("../scenarios/anisotropic_rotation_breaking.cfg")),
    ("two_particle_casimir", include_str!("../scenarios/two_particle_casimir.cfg")),
    ("dvo_spin_half", include_str!("../scenarios/dvo_spin_half.cfg")),
    ("central_charge_phase", include_str!("../scenarios/central_charge_phase.cfg")),
    ("classical_time_reversal", include_str!("../scenarios/classical_time_reversal.cfg")),
];

pub fn bundled_text(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn bundled(name: &str) -> Option<Result<ScenarioConfig, ConfigError>> {
    bundled_text(name).map(parse_config)
}

//! Scenario files shipped with the crate, embedded at build time.

use super::{Scenario, SimError};

pub const BUNDLED_SCENARIO_FILES: [(&str, &str); 5] = [
    ("calm_monitoring.json", include_str!("../../scenarios/calm_monitoring.json")),
    ("search_and_rescue.json", include_str!("../../scenarios/search_and_rescue.json")),
    ("triage_surge.json", include_str!("../../scenarios/triage_surge.json")),
    ("degraded_ai.json", include_str!("../../scenarios/degraded_ai.json")),
    ("night_shift.json", include_str!("../../scenarios/night_shift.json")),
];

pub fn bundled_scenarios() -> Result<Vec<Scenario>, SimError> {
    BUNDLED_SCENARIO_FILES.iter().map(|(_, text)| Scenario::from_json(text)).collect()
}

//! Shipped scenario files. They go through the same parser as user configs.

use crate::config::{load, ScenarioConfig};
use crate::SimError;

pub const PRESETS: [(&str, &str); 4] = [
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("counter_wedge", include_str!("../presets/counter_wedge.toml")),
    ("bec_design", include_str!("../presets/bec_design.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<ScenarioConfig, SimError> {
    let text = source(name).ok_or_else(|| {
        let known: Vec<&str> = names().collect();
        SimError::config("preset", format!("unknown preset {name:?}; known: {}", known.join(", ")))
    })?;
    load(text).map_err(SimError::Config)
}

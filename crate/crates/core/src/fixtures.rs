//! Bundled example documents. `SECDEC_FIXTURES` points [`load`] at a
//! directory of replacements.

use std::path::PathBuf;

use crate::decision::{parse_decision_model, DecisionModel};
use crate::scenario::{parse_scenario, Scenario};
use crate::volume::{parse_market, MarketParameters};

pub const FIXTURES_ENV: &str = "SECDEC_FIXTURES";

pub const BASE_SCENARIO_JSON: &str = include_str!("../fixtures/base_scenario.json");
pub const ZERO_SCENARIO_JSON: &str = include_str!("../fixtures/zero_scenario.json");
pub const EXAMPLE_MARKET_JSON: &str = include_str!("../fixtures/example_market.json");
pub const CONSTANT_MARKET_JSON: &str = include_str!("../fixtures/constant_market.json");
pub const UNIFORM_WEIGHTS_JSON: &str = include_str!("../fixtures/uniform_weights.json");

const EMBEDDED: &[(&str, &str)] = &[
    ("base_scenario", BASE_SCENARIO_JSON),
    ("zero_scenario", ZERO_SCENARIO_JSON),
    ("example_market", EXAMPLE_MARKET_JSON),
    ("constant_market", CONSTANT_MARKET_JSON),
    ("uniform_weights", UNIFORM_WEIGHTS_JSON),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    EMBEDDED.iter().map(|(n, _)| *n)
}

/// Text of fixture `name` (without `.json`), from `$SECDEC_FIXTURES` when set.
pub fn load(name: &str) -> std::io::Result<String> {
    if let Some(dir) = std::env::var_os(FIXTURES_ENV) {
        let path = PathBuf::from(dir).join(format!("{name}.json"));
        return std::fs::read_to_string(path);
    }
    EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::NotFound, format!("no fixture named `{name}`")))
}

pub fn base_scenario() -> Scenario {
    parse_scenario(BASE_SCENARIO_JSON).expect("bundled base scenario is valid")
}

pub fn zero_scenario() -> Scenario {
    parse_scenario(ZERO_SCENARIO_JSON).expect("bundled zero scenario is valid")
}

pub fn example_market() -> MarketParameters {
    parse_market(EXAMPLE_MARKET_JSON).expect("bundled market is valid")
}

pub fn constant_market() -> MarketParameters {
    parse_market(CONSTANT_MARKET_JSON).expect("bundled market is valid")
}

pub fn uniform_weights() -> DecisionModel {
    parse_decision_model(UNIFORM_WEIGHTS_JSON).expect("bundled weights are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_fixtures_parse() {
        assert_eq!(zero_scenario(), Scenario::zeroed());
        assert_eq!(uniform_weights(), DecisionModel::uniform());
        assert!(example_market().scan.is_some());
        assert_eq!(constant_market().equality_tolerance, 1e-3);
        assert_eq!(names().count(), 5);
    }
}

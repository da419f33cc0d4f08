//! Decision engine for loan securitization: profit rates, the condition
//! catalog, weighted decision scoring, optimal securitized fractions and
//! market volume feasibility.

pub mod api;
pub mod conditions;
pub mod decision;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod names;
pub mod optimizer;
pub mod outcome;
pub mod report;
pub mod scenario;
pub mod sensitivity;
pub mod volume;

pub use conditions::{evaluate_all_conditions, evaluate_condition, ConditionReport, ConditionResult, CONDITION_COUNT};
pub use decision::{decision_indicator, make_decision, DecisionModel, Recommendation};
pub use error::{ErrorKind, ValidationError, ValidationErrors};
pub use names::QuantityName;
pub use outcome::Status;
pub use report::ENGINE_VERSION;
pub use scenario::{parse_scenario, Scenario};

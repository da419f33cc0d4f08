//! The 29 securitization conditions, evaluated with three-valued outcomes.
//!
//! Each condition is a conjunction of inequalities. A condition whose inputs
//! cannot all be resolved is indeterminate and lists what is missing; it is
//! never reported as violated on account of missing data.

mod catalog;

use std::cell::RefCell;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ValidationErrors;
use crate::model;
use crate::names::QuantityName;
use crate::outcome::{combine, Relation, Status, SubResult};
use crate::scenario::{Field, Scenario};
use crate::sensitivity::{internal_derivative, resolve_quantity, Resolution, ScenarioSource, SensitivityContext};

pub use catalog::CONDITION_COUNT;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConditionError {
    #[error("unknown condition id {0} (expected 1..=29)")]
    UnknownId(u32),
    #[error("invalid scenario:\n{0}")]
    Invalid(ValidationErrors),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub id: u32,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub missing_inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subresults: Vec<SubResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub text: String,
    pub relation: Relation,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: u32,
    pub rendering: String,
    pub required_inputs: Vec<String>,
    pub comparisons: Vec<Comparison>,
    pub compound: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Scenario-level diagnostics reported alongside the conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `I_spv - I_b`.
    pub spread_convergence_gap: f64,
    /// `d1(I_g|I_b)`, expected negative.
    pub d_ig_d_ib: f64,
    pub d_ig_d_ib_negative: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub results: Vec<ConditionResult>,
    pub diagnostics: Diagnostics,
}

impl ConditionReport {
    pub fn count(&self, status: Status) -> usize {
        self.results.iter().filter(|r| r.status == status).count()
    }

    pub fn get(&self, id: u32) -> Option<&ConditionResult> {
        self.results.iter().find(|r| r.id == id)
    }
}

pub const CAPITAL_RESERVE_NOTE: &str =
    "the claim that securitization lets a bank bypass capital-reserve requirements is not modeled";

/// Records every name a condition reads and every name it could not resolve.
pub(crate) struct Eval<'a> {
    source: ScenarioSource<'a>,
    reads: RefCell<Vec<String>>,
    missing: RefCell<Vec<String>>,
    warnings: RefCell<Vec<String>>,
}

fn push_unique(list: &RefCell<Vec<String>>, name: &str) {
    let mut list = list.borrow_mut();
    if !list.iter().any(|n| n == name) {
        list.push(name.to_string());
    }
}

impl<'a> Eval<'a> {
    fn new(scenario: &'a Scenario, context: &'a SensitivityContext) -> Self {
        Self {
            source: ScenarioSource::new(scenario, context),
            reads: RefCell::default(),
            missing: RefCell::default(),
            warnings: RefCell::default(),
        }
    }

    fn scenario(&self) -> &Scenario {
        self.source.scenario
    }

    /// A scenario field, recorded by its flat key.
    pub(crate) fn f(&self, field: Field) -> f64 {
        push_unique(&self.reads, field.key());
        self.scenario().get(field)
    }

    /// Any quantity name: computed, supplied or modelled.
    pub(crate) fn q(&self, name: &str) -> Option<f64> {
        let name = QuantityName::parse(name).expect("catalog names parse");
        let key = name.to_string();
        push_unique(&self.reads, &key);
        match resolve_quantity(&name, &self.source) {
            Ok(Resolution::Value { value, .. }) if value.value.is_finite() => {
                for w in value.warnings {
                    push_unique(&self.warnings, &w);
                }
                Some(value.value)
            }
            Ok(Resolution::Value { value, .. }) => {
                push_unique(&self.warnings, &format!("{key}: non-finite value {}", value.value));
                push_unique(&self.missing, &key);
                None
            }
            Ok(Resolution::Missing) => {
                push_unique(&self.missing, &key);
                None
            }
            Err(e) => {
                push_unique(&self.warnings, &format!("{key}: {e}"));
                push_unique(&self.missing, &key);
                None
            }
        }
    }

    pub(crate) fn i_c(&self) -> f64 {
        self.f(self.scenario().alias_map.i_c.unwrap_or(Field::Ic))
    }

    pub(crate) fn retained_funding(&self) -> f64 {
        self.f(self.scenario().alias_map.retained_funding.unwrap_or(Field::If))
    }

    /// `I_is`: an aliased rate field if configured, else an exogenous level.
    pub(crate) fn i_is(&self) -> Option<f64> {
        match self.scenario().alias_map.i_is {
            Some(field) => Some(self.f(field)),
            None => self.q("I_is"),
        }
    }

    pub(crate) fn cmp(&self, text: &str, relation: Relation, lhs: Option<f64>, rhs: Option<f64>) -> SubResult {
        SubResult::compare(text, relation, lhs, rhs)
    }
}

struct Evaluated {
    subresults: Vec<SubResult>,
    reads: Vec<String>,
    missing: Vec<String>,
    warnings: Vec<String>,
}

fn run(def: &catalog::Definition, scenario: &Scenario, context: &SensitivityContext) -> Evaluated {
    let eval = Eval::new(scenario, context);
    let subresults = (def.clauses)(&eval);
    Evaluated {
        subresults,
        reads: eval.reads.into_inner(),
        missing: eval.missing.into_inner(),
        warnings: eval.warnings.into_inner(),
    }
}

fn to_result(def: &catalog::Definition, ev: Evaluated) -> ConditionResult {
    let (status, margin) = combine(&ev.subresults);
    // every indeterminate clause traces back to a missing name
    debug_assert_eq!(status == Status::Indeterminate, !ev.missing.is_empty());
    ConditionResult {
        id: def.id,
        status,
        margin,
        missing_inputs: ev.missing,
        subresults: if ev.subresults.len() > 1 {
            ev.subresults
        } else {
            Vec::new()
        },
        warnings: ev.warnings,
        note: def.note.map(str::to_string),
    }
}

fn definition(id: u32) -> Result<&'static catalog::Definition, ConditionError> {
    catalog::DEFINITIONS
        .iter()
        .find(|d| d.id == id)
        .ok_or(ConditionError::UnknownId(id))
}

/// Evaluate one condition on an already-validated scenario.
pub fn evaluate_condition_unchecked(
    id: u32,
    scenario: &Scenario,
    context: &SensitivityContext,
) -> Result<ConditionResult, ConditionError> {
    let def = definition(id)?;
    Ok(to_result(def, run(def, scenario, context)))
}

pub fn evaluate_condition(
    id: u32,
    scenario: &Scenario,
    context: &SensitivityContext,
) -> Result<ConditionResult, ConditionError> {
    let def = definition(id)?;
    scenario.validate().map_err(ConditionError::Invalid)?;
    Ok(to_result(def, run(def, scenario, context)))
}

pub fn diagnostics(scenario: &Scenario, context: &SensitivityContext) -> Diagnostics {
    let name = QuantityName::parse("d1(I_g|I_b)").expect("valid name");
    let d = internal_derivative(name.as_derivative().expect("derivative"), scenario, context.step);
    let (value, warnings) = match d {
        Ok(v) => (v.value, v.warnings),
        // I_g is affine in its fields, so bumping cannot produce non-finite values
        // unless the inputs are already at the edge of the float range
        Err(e) => (f64::NAN, vec![format!("d1(I_g|I_b): {e}")]),
    };
    let value = if value.is_finite() { value } else { 0.0 };
    Diagnostics {
        spread_convergence_gap: model::spread_convergence_gap(scenario),
        d_ig_d_ib: value,
        d_ig_d_ib_negative: value < 0.0,
        warnings,
        notes: vec![CAPITAL_RESERVE_NOTE.to_string()],
    }
}

/// All 29 conditions in order, plus diagnostics.
pub fn evaluate_all_conditions(
    scenario: &Scenario,
    context: &SensitivityContext,
) -> Result<ConditionReport, ValidationErrors> {
    scenario.validate()?;
    Ok(evaluate_all_unchecked(scenario, context))
}

pub fn evaluate_all_unchecked(scenario: &Scenario, context: &SensitivityContext) -> ConditionReport {
    let results = catalog::DEFINITIONS
        .iter()
        .map(|def| to_result(def, run(def, scenario, context)))
        .collect();
    ConditionReport {
        results,
        diagnostics: diagnostics(scenario, context),
    }
}

/// The catalog, derived by evaluating each condition once on an all-zero
/// scenario and recording which names it reads.
pub fn catalog() -> &'static [CatalogEntry] {
    static CATALOG: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let zero = Scenario::zeroed();
        let ctx = SensitivityContext::default();
        catalog::DEFINITIONS
            .iter()
            .map(|def| {
                let ev = run(def, &zero, &ctx);
                CatalogEntry {
                    id: def.id,
                    rendering: def.rendering.to_string(),
                    required_inputs: ev.reads,
                    comparisons: ev
                        .subresults
                        .iter()
                        .map(|s| Comparison {
                            text: s.text.clone(),
                            relation: s.relation,
                            strict: s.relation.is_strict(),
                        })
                        .collect(),
                    compound: ev.subresults.len() > 1,
                    note: def.note.map(str::to_string),
                }
            })
            .collect()
    })
}

pub fn condition_required_inputs(id: u32) -> Result<Vec<String>, ConditionError> {
    definition(id)?;
    Ok(catalog()[id as usize - 1].required_inputs.clone())
}

//! Derivatives of the profit formulas (finite differences on the implemented
//! formulas) and resolution of exogenous quantities from supplied values or
//! response models.
//!
//! A derivative is *internal* when its quantity is `I_g` or `I_gs` and every
//! variable is a bank-level scenario field; the engine computes those by
//! bumping the field. Everything else is *exogenous*: looked up in the
//! scenario's exogenous map, else differentiated analytically from a matching
//! [`ResponseModel`], else reported missing.

mod response;
pub mod stencil;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use response::{CrossTerm, ModelForm, ResponseModel};
pub use stencil::{central_difference, default_step, mixed_difference};

use crate::model;
use crate::names::{DerivativeName, NameError, QuantityName, Symbol};
use crate::scenario::{Field, Scenario};
use stencil::{tensor_difference, Axis};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("non-finite function value at point {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error("unsupported derivative order {0} (expected 1, 2 or 3)")]
    InvalidOrder(usize),
    #[error("invalid step {0} (must be finite and > 0)")]
    InvalidStep(f64),
    #[error("{0}")]
    BadVariable(String),
    #[error("`{0}` is not an internal derivative; resolve it from exogenous inputs or response models instead")]
    NotInternal(String),
    #[error("the response model for {model} cannot supply derivatives of order {order}")]
    UnsupportedOrder { model: String, order: usize },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Name(#[from] NameError),
}

/// A derivative value plus any caveats attached while computing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeValue {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl DerivativeValue {
    fn plain(value: f64) -> Self {
        Self {
            value,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Scenario,
    Internal,
    Exogenous,
    ResponseModel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Resolution {
    Value { value: DerivativeValue, source: Source },
    Missing,
}

impl Resolution {
    pub fn value(&self) -> Option<f64> {
        match self {
            Resolution::Value { value, .. } => Some(value.value),
            Resolution::Missing => None,
        }
    }
}

/// Caller-level knobs for derivative evaluation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivityContext {
    /// Fixed finite-difference step; default is order-dependent, see [`default_step`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Models consulted after the scenario's own.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_models: Vec<ResponseModel>,
}

/// Where names are resolved against: a scenario, or a market for the volume conditions.
pub trait QuantitySource {
    fn exogenous(&self) -> &BTreeMap<String, f64>;
    fn models(&self) -> Box<dyn Iterator<Item = &ResponseModel> + '_>;
    /// Value of a symbol known to the source itself (scenario fields etc.).
    fn point(&self, symbol: &Symbol) -> Option<f64>;
    /// Computes internal derivatives; `None` when the source has none.
    fn internal(&self, _name: &DerivativeName) -> Option<Result<DerivativeValue, SensitivityError>> {
        None
    }
}

pub struct ScenarioSource<'a> {
    pub scenario: &'a Scenario,
    pub context: &'a SensitivityContext,
}

impl<'a> ScenarioSource<'a> {
    pub fn new(scenario: &'a Scenario, context: &'a SensitivityContext) -> Self {
        Self { scenario, context }
    }
}

impl QuantitySource for ScenarioSource<'_> {
    fn exogenous(&self) -> &BTreeMap<String, f64> {
        &self.scenario.exo_derivatives
    }

    fn models(&self) -> Box<dyn Iterator<Item = &ResponseModel> + '_> {
        Box::new(
            self.scenario
                .response_models
                .iter()
                .chain(self.context.extra_models.iter()),
        )
    }

    fn point(&self, symbol: &Symbol) -> Option<f64> {
        self.scenario.symbol_value(symbol)
    }

    fn internal(&self, name: &DerivativeName) -> Option<Result<DerivativeValue, SensitivityError>> {
        name.is_internal()
            .then(|| internal_derivative(name, self.scenario, self.context.step))
    }
}

/// Differentiate `I_g` or `I_gs` with respect to scenario fields by bumping
/// them and re-evaluating the formula.
pub fn internal_derivative(
    name: &DerivativeName,
    scenario: &Scenario,
    step: Option<f64>,
) -> Result<DerivativeValue, SensitivityError> {
    if !name.is_internal() {
        return Err(SensitivityError::NotInternal(name.to_string()));
    }
    let securitized = name.quantity.is("I_gs");
    let order = name.order();
    let groups: Vec<(Field, usize)> = name
        .grouped()
        .into_iter()
        .map(|(s, n)| (s.field().expect("internal names use scenario fields"), n))
        .collect();
    let point: Vec<f64> = groups.iter().map(|(f, _)| scenario.get(*f)).collect();
    let axes: Vec<Axis> = groups
        .iter()
        .enumerate()
        .map(|(index, (_, n))| Axis {
            index,
            order: *n,
            step: step.unwrap_or_else(|| default_step(point[index], order)),
        })
        .collect();

    let formula = |xs: &[f64]| {
        let mut bumped = scenario.clone();
        for ((field, _), x) in groups.iter().zip(xs) {
            bumped.set(*field, *x);
        }
        if securitized {
            model::profit_securitized(&bumped)
        } else {
            model::profit_unsecuritized(&bumped)
        }
    };
    let value = tensor_difference(formula, &point, &axes)?;

    let mut warnings = Vec::new();
    let reach = axes
        .iter()
        .filter(|ax| matches!(groups[ax.index].0, Field::If | Field::Ib))
        .map(|ax| stencil::reach(ax.order) * ax.step)
        .fold(0.0, f64::max);
    if reach > 0.0 && (scenario.rates.i_f - scenario.rates.i_b).abs() <= 2.0 * reach {
        warnings.push(format!(
            "{name}: stencil crosses the Max(I_f, I_b) kink (i_f={}, i_b={})",
            scenario.rates.i_f, scenario.rates.i_b
        ));
    }
    Ok(DerivativeValue { value, warnings })
}

/// Resolve an exogenous derivative: exact key in the exogenous map, else a
/// matching response model, else missing.
pub fn resolve_derivative(name: &DerivativeName, source: &dyn QuantitySource) -> Result<Resolution, SensitivityError> {
    if let Some(v) = source.exogenous().get(&name.to_string()) {
        return Ok(Resolution::Value {
            value: DerivativeValue::plain(*v),
            source: Source::Exogenous,
        });
    }
    for m in source.models() {
        if !m.covers(&name.quantity, &name.wrt) {
            continue;
        }
        if let Some(point) = m.point_from(|s| source.point(s)) {
            let value = m.evaluate(&point, &name.wrt)?;
            return Ok(Resolution::Value {
                value: DerivativeValue::plain(value),
                source: Source::ResponseModel,
            });
        }
    }
    Ok(Resolution::Missing)
}

/// Resolve any quantity name: internal derivatives are computed, levels known
/// to the source are read directly, everything else goes through the
/// exogenous map and response models.
pub fn resolve_quantity(name: &QuantityName, source: &dyn QuantitySource) -> Result<Resolution, SensitivityError> {
    match name {
        QuantityName::Derivative(d) => match source.internal(d) {
            Some(result) => result.map(|value| Resolution::Value {
                value,
                source: Source::Internal,
            }),
            None => resolve_derivative(d, source),
        },
        QuantityName::Level { symbol, given } => {
            if given.is_none() {
                if let Some(v) = source.point(symbol) {
                    return Ok(Resolution::Value {
                        value: DerivativeValue::plain(v),
                        source: Source::Scenario,
                    });
                }
            }
            if let Some(v) = source.exogenous().get(&name.to_string()) {
                return Ok(Resolution::Value {
                    value: DerivativeValue::plain(*v),
                    source: Source::Exogenous,
                });
            }
            if given.is_none() {
                for m in source.models() {
                    if m.covers(symbol, &[]) {
                        if let Some(point) = m.point_from(|s| source.point(s)) {
                            return Ok(Resolution::Value {
                                value: DerivativeValue::plain(m.evaluate(&point, &[])?),
                                source: Source::ResponseModel,
                            });
                        }
                    }
                }
            }
            Ok(Resolution::Missing)
        }
    }
}

/// One row of a sensitivity request result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityEntry {
    pub name: String,
    pub value: Option<f64>,
    pub status: EntryStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Ok,
    Missing,
    Error,
}

/// Evaluate a batch of already-parsed names against a scenario.
pub fn evaluate_names(
    names: &[QuantityName],
    scenario: &Scenario,
    context: &SensitivityContext,
) -> Vec<SensitivityEntry> {
    let source = ScenarioSource::new(scenario, context);
    names
        .iter()
        .map(|name| {
            let base = SensitivityEntry {
                name: name.to_string(),
                value: None,
                status: EntryStatus::Missing,
                source: None,
                warnings: Vec::new(),
                error: None,
            };
            match resolve_quantity(name, &source) {
                Ok(Resolution::Value { value, source }) => SensitivityEntry {
                    value: Some(value.value),
                    status: EntryStatus::Ok,
                    source: Some(source),
                    warnings: value.warnings,
                    ..base
                },
                Ok(Resolution::Missing) => base,
                Err(e) => SensitivityEntry {
                    status: EntryStatus::Error,
                    error: Some(e.to_string()),
                    ..base
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::base_scenario;

    fn d(s: &str) -> DerivativeName {
        QuantityName::parse(s).unwrap().as_derivative().unwrap().clone()
    }

    #[test]
    fn internal_first_order_examples() {
        let base = base_scenario();
        let v = internal_derivative(&d("d1(I_gs|I_ts)"), &base, None).unwrap();
        assert!((v.value + 1.0).abs() < 1e-12, "{}", v.value);
        assert!(v.warnings.is_empty());
        let v = internal_derivative(&d("d1(I_g|I_i)"), &base, None).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn internal_second_order_is_zero_away_from_kink() {
        let base = base_scenario();
        let v = internal_derivative(&d("d2(I_gs|I_f,I_f)"), &base, None).unwrap();
        assert!(v.value.abs() < 1e-6, "{}", v.value);
        let v = internal_derivative(&d("d2(I_gs|I_cs,I_cs)"), &base, None).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn mixed_internal_derivative_of_bilinear_objective() {
        // d2 I_gs / dS dS_s = (I_f - I_c - I_ci - I_ms - I_ts) - (I_i - I_lc - I_ts)
        let base = base_scenario();
        let v = internal_derivative(&d("d2(I_gs|S,S_s)"), &base, None).unwrap();
        let oracle = (0.02 - 0.005 - 0.003 - 0.002 - 0.004) - (0.08 - 0.01 - 0.004);
        assert!((v.value - oracle).abs() < 1e-9, "{} vs {oracle}", v.value);
    }

    #[test]
    fn kink_warning_near_max() {
        let mut s = base_scenario();
        s.fractions.s = 0.5;
        s.rates.i_b = s.rates.i_f;
        let v = internal_derivative(&d("d1(I_gs|I_f)"), &s, None).unwrap();
        assert_eq!(v.warnings.len(), 1);
        let v = internal_derivative(&d("d1(I_gs|I_ts)"), &s, None).unwrap();
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn refuses_exogenous_names() {
        let base = base_scenario();
        let err = internal_derivative(&d("d1(P_rp|I_g)"), &base, None).unwrap_err();
        assert!(matches!(err, SensitivityError::NotInternal(_)));
    }

    #[test]
    fn resolve_order_exo_then_model_then_missing() {
        let mut s = base_scenario();
        let ctx = SensitivityContext::default();
        s.exo_derivatives.insert("d2(V_s|V_d,V_f)".into(), 1.5);
        let src = ScenarioSource::new(&s, &ctx);
        let r = resolve_derivative(&d("d2(V_s|V_d,V_f)"), &src).unwrap();
        assert_eq!(r.value(), Some(1.5));
        assert_eq!(
            resolve_derivative(&d("d1(P_rp|I_g)"), &src).unwrap(),
            Resolution::Missing
        );

        let model: ResponseModel = serde_json::from_str(
            r#"{"dependent":"I_spv","independents":["V_s"],
                "form":{"family":"linear","intercept":0.05,"slopes":{"V_s":-0.001}}}"#,
        )
        .unwrap();
        let ctx = SensitivityContext {
            step: None,
            extra_models: vec![model],
        };
        let src = ScenarioSource::new(&s, &ctx);
        let r = resolve_derivative(&d("d1(I_spv|V_s)"), &src).unwrap();
        assert_eq!(r.value(), Some(-0.001));
        // the exogenous map wins over a model
        s.exo_derivatives.insert("d1(I_spv|V_s)".into(), 7.0);
        let src = ScenarioSource::new(&s, &ctx);
        assert_eq!(
            resolve_derivative(&d("d1(I_spv|V_s)"), &src).unwrap().value(),
            Some(7.0)
        );
    }

    #[test]
    fn levels_resolve_from_scenario_then_exo() {
        let mut s = base_scenario();
        s.exo_derivatives.insert("P_rp".into(), 0.3);
        let ctx = SensitivityContext::default();
        let src = ScenarioSource::new(&s, &ctx);
        let q = |n: &str| resolve_quantity(&QuantityName::parse(n).unwrap(), &src).unwrap();
        assert_eq!(q("I_i").value(), Some(0.08));
        assert_eq!(q("P_rp").value(), Some(0.3));
        assert_eq!(q("P_ra"), Resolution::Missing);
        assert_eq!(q("I_m|E_max"), Resolution::Missing);
        assert!(
            (q("Psi_bbs-Psi_bsa").value().unwrap() - (s.probabilities.psi_bbs - s.probabilities.psi_bsa)).abs() < 1e-15
        );
    }
}

//! Request-level operations shared by the CLI and the HTTP service. Each takes
//! a JSON request document and returns a typed response or an [`ApiError`].

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::conditions::catalog;
use crate::decision::{decision_model_from_value, DecisionModel};
use crate::error::{from_json_value, parse_json_text, ErrorKind, ValidationError, ValidationErrors};
use crate::names::QuantityName;
use crate::optimizer::{
    compare_strategies, maximize_unchecked, optimization_config_from_value, OptimizationConfig, OptimizeError,
};
use crate::report::{
    evaluate_scenario, CatalogResponse, DecideResponse, EvaluationReport, OptimizeResponse, SensitivityResponse,
    VolumeResponse,
};
use crate::scenario::{scenario_from_value, Scenario, SCHEMA_VERSION};
use crate::sensitivity::{evaluate_names, SensitivityContext};
use crate::volume::{
    bank_optimal_volume, evaluate_volume_conditions, feasible_volume_intervals, market_from_value, QUALITATIVE_CAVEAT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApiErrorCode {
    Validation,
    DerivativeName,
    Internal,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{message}")]
pub struct ApiError {
    pub code: ApiErrorCode,
    pub message: String,
    pub errors: ValidationErrors,
}

impl ApiError {
    pub fn validation(errors: ValidationErrors) -> Self {
        let code = if errors.iter().any(|e| e.kind == ErrorKind::DerivativeName) {
            ApiErrorCode::DerivativeName
        } else {
            ApiErrorCode::Validation
        };
        Self {
            code,
            message: errors.to_string(),
            errors,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            code: ApiErrorCode::Internal,
            message: message.into(),
            errors: ValidationErrors::default(),
        }
    }

    pub fn paths(&self) -> Vec<String> {
        self.errors.paths()
    }

    /// HTTP status for this error.
    pub fn http_status(&self) -> u16 {
        match self.code {
            ApiErrorCode::Validation => 400,
            ApiErrorCode::DerivativeName => 422,
            ApiErrorCode::Internal => 500,
        }
    }
}

impl From<ValidationErrors> for ApiError {
    fn from(e: ValidationErrors) -> Self {
        ApiError::validation(e)
    }
}

impl From<OptimizeError> for ApiError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Invalid(errs) => ApiError::validation(errs),
            other => ApiError::internal(other.to_string()),
        }
    }
}

pub fn parse_body(text: &str) -> Result<Value, ApiError> {
    parse_json_text(text).map_err(ApiError::validation)
}

fn scenario_at(value: Value, path: &str) -> Result<Scenario, ApiError> {
    scenario_from_value(value).map_err(|e| ApiError::validation(e.prefixed(path)))
}

fn take_object(body: Value) -> Result<serde_json::Map<String, Value>, ApiError> {
    match body {
        Value::Object(map) => Ok(map),
        _ => Err(ApiError::validation(ValidationErrors::single(ValidationError::new(
            "",
            ErrorKind::Shape,
            "request body must be a JSON object",
        )))),
    }
}

fn take_field(map: &mut serde_json::Map<String, Value>, key: &str) -> Result<Value, ApiError> {
    map.remove(key).ok_or_else(|| {
        ApiError::validation(ValidationErrors::single(ValidationError::new(
            key,
            ErrorKind::Shape,
            format!("missing field `{key}`"),
        )))
    })
}

/// Body: a scenario document.
pub fn evaluate(body: Value) -> Result<EvaluationReport, ApiError> {
    let scenario = scenario_from_value(body)?;
    let (report, _) = evaluate_scenario(&scenario, &SensitivityContext::default(), &DecisionModel::uniform());
    Ok(report)
}

/// Body: the decision-model fields plus a `scenario` key.
pub fn decide(body: Value) -> Result<DecideResponse, ApiError> {
    let mut map = take_object(body)?;
    let scenario_value = take_field(&mut map, "scenario")?;
    let model = decision_model_from_value(Value::Object(map));
    let scenario = scenario_at(scenario_value, "scenario");
    let (model, scenario) = match (model, scenario) {
        (Ok(m), Ok(s)) => (m, s),
        (m, s) => {
            let mut errs = ValidationErrors::default();
            if let Err(e) = m {
                errs.extend(e);
            }
            if let Err(e) = s {
                errs.extend(e.errors);
            }
            return Err(ApiError::validation(errs));
        }
    };
    let (report, decision) = evaluate_scenario(&scenario, &SensitivityContext::default(), &model);
    Ok(DecideResponse { decision, report })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeRequest {
    scenario: Value,
    #[serde(default)]
    config: Option<Value>,
}

/// Body: `{scenario, config?}`.
pub fn optimize(body: Value) -> Result<OptimizeResponse, ApiError> {
    let req: OptimizeRequest = from_json_value(body)?;
    let scenario = scenario_at(req.scenario, "scenario")?;
    let config = match req.config {
        Some(v) => optimization_config_from_value(v).map_err(|e| ApiError::validation(e.prefixed("config")))?,
        None => OptimizationConfig::default(),
    };
    let optimization = maximize_unchecked(&scenario, &config)?;
    let comparison = compare_strategies(&scenario, &SensitivityContext::default())?;
    Ok(OptimizeResponse {
        optimization,
        comparison,
    })
}

/// Body: a market document, optionally with a `scan` block.
pub fn volume(body: Value) -> Result<VolumeResponse, ApiError> {
    let mp = market_from_value(body)?;
    let at_v_m = evaluate_volume_conditions(&mp, mp.v_m);
    let (scan, optimum) = match &mp.scan {
        Some(cfg) => {
            let result = feasible_volume_intervals(&mp, cfg).map_err(|e| ApiError::validation(e.prefixed("scan")))?;
            let optimum = bank_optimal_volume(&result.intervals, &mp);
            (Some(result), Some(optimum))
        }
        None => (None, None),
    };
    Ok(VolumeResponse {
        at_v_m,
        scan,
        optimum,
        caveats: vec![QUALITATIVE_CAVEAT.to_string()],
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensitivityRequest {
    scenario: Value,
    names: Vec<String>,
    #[serde(default)]
    step: Option<f64>,
}

/// Body: `{scenario, names, step?}`.
pub fn sensitivity(body: Value) -> Result<SensitivityResponse, ApiError> {
    let req: SensitivityRequest = from_json_value(body)?;
    let mut errs = ValidationErrors::default();
    let mut names = Vec::with_capacity(req.names.len());
    for (i, n) in req.names.iter().enumerate() {
        match QuantityName::parse(n) {
            Ok(q) => names.push(q),
            Err(e) => errs.push(e.at(&format!("names[{i}]"))),
        }
    }
    if let Some(h) = req.step {
        if !(h.is_finite() && h > 0.0) {
            errs.push(ValidationError::new("step", ErrorKind::Range, "must be finite and > 0"));
        }
    }
    let scenario = scenario_at(req.scenario, "scenario");
    let scenario = match scenario {
        Ok(s) if errs.is_empty() => s,
        Ok(_) => return Err(ApiError::validation(errs)),
        Err(e) => {
            errs.extend(e.errors);
            return Err(ApiError::validation(errs));
        }
    };
    let context = SensitivityContext {
        step: req.step,
        extra_models: Vec::new(),
    };
    Ok(SensitivityResponse {
        values: evaluate_names(&names, &scenario, &context),
    })
}

pub fn conditions() -> CatalogResponse {
    CatalogResponse {
        schema_version: SCHEMA_VERSION,
        conditions: catalog().to_vec(),
    }
}

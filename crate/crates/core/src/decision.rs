//! Weighted-score decision indicator over the 29 condition results.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::{ConditionReport, CONDITION_COUNT};
use crate::error::{check_finite, from_json_value, parse_json_text, ErrorKind, ValidationError, ValidationErrors};
use crate::outcome::Status;

pub const SIMPLEX_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MARGIN_SCALE: f64 = 0.05;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScoringPolicy {
    /// 1 when satisfied, else 0.
    #[default]
    Binary,
    /// `clamp01(0.5 + margin / scale)`.
    MarginScaled {
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// `scores[i]` when condition `i+1` is satisfied, else 0.
    Custom { scores: Vec<f64> },
}

fn default_scale() -> f64 {
    DEFAULT_MARGIN_SCALE
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndeterminatePolicy {
    #[default]
    ScoreZero,
    ExcludeRenormalize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionModel {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub scoring_policy: ScoringPolicy,
    #[serde(default)]
    pub indeterminate_policy: IndeterminatePolicy,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn schema_version() -> u32 {
    crate::scenario::SCHEMA_VERSION
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("expected {CONDITION_COUNT} weights, found {0}")]
    Dimension(usize),
    #[error("weight {index} is negative ({value})")]
    Negative { index: usize, value: f64 },
    #[error("weight {0} is not a finite number")]
    NonFinite(usize),
    #[error("weights sum to {0}, not 1 (tolerance {SIMPLEX_TOLERANCE})")]
    OffSimplex(f64),
}

impl WeightError {
    pub fn to_validation(&self) -> ValidationError {
        let path = match self {
            WeightError::Negative { index, .. } | WeightError::NonFinite(index) => {
                format!("weights[{index}]")
            }
            _ => "weights".to_string(),
        };
        ValidationError::new(path, ErrorKind::Weights, self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecisionError {
    #[error("{name} must be in [0,1], got {value}")]
    OutOfRange { name: &'static str, value: f64 },
}

/// Non-negative, exactly 29 entries, summing to 1 within [`SIMPLEX_TOLERANCE`].
pub fn validate_weights(weights: &[f64]) -> Result<(), WeightError> {
    if weights.len() != CONDITION_COUNT {
        return Err(WeightError::Dimension(weights.len()));
    }
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() {
            return Err(WeightError::NonFinite(index));
        }
        if value < 0.0 {
            return Err(WeightError::Negative { index, value });
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
        return Err(WeightError::OffSimplex(sum));
    }
    Ok(())
}

impl DecisionModel {
    pub fn uniform() -> Self {
        Self {
            schema_version: schema_version(),
            weights: vec![1.0 / CONDITION_COUNT as f64; CONDITION_COUNT],
            scoring_policy: ScoringPolicy::Binary,
            indeterminate_policy: IndeterminatePolicy::ScoreZero,
            threshold: DEFAULT_THRESHOLD,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationErrors> {
        let mut errs = ValidationErrors::default();
        if self.schema_version != crate::scenario::SCHEMA_VERSION {
            errs.push(ValidationError::new(
                "schema_version",
                ErrorKind::Range,
                format!("unsupported schema version {}", self.schema_version),
            ));
        }
        if let Err(e) = validate_weights(&self.weights) {
            errs.push(e.to_validation());
        }
        if check_finite(&mut errs, "threshold", self.threshold) && !(0.0..=1.0).contains(&self.threshold) {
            errs.push(ValidationError::new("threshold", ErrorKind::Range, "must be in [0,1]"));
        }
        match &self.scoring_policy {
            ScoringPolicy::Binary => {}
            ScoringPolicy::MarginScaled { scale } => {
                if check_finite(&mut errs, "scoring_policy.scale", *scale) && *scale <= 0.0 {
                    errs.push(ValidationError::new(
                        "scoring_policy.scale",
                        ErrorKind::Range,
                        "must be > 0",
                    ));
                }
            }
            ScoringPolicy::Custom { scores } => {
                if scores.len() != CONDITION_COUNT {
                    errs.push(ValidationError::new(
                        "scoring_policy.scores",
                        ErrorKind::Shape,
                        format!("expected {CONDITION_COUNT} scores, found {}", scores.len()),
                    ));
                }
                for (i, &y) in scores.iter().enumerate() {
                    let path = format!("scoring_policy.scores[{i}]");
                    if check_finite(&mut errs, &path, y) && !(0.0..=1.0).contains(&y) {
                        errs.push(ValidationError::new(path, ErrorKind::Range, "must be in [0,1]"));
                    }
                }
            }
        }
        errs.into_result()
    }
}

pub fn parse_decision_model(text: &str) -> Result<DecisionModel, ValidationErrors> {
    decision_model_from_value(parse_json_text(text)?)
}

pub fn decision_model_from_value(value: serde_json::Value) -> Result<DecisionModel, ValidationErrors> {
    let model: DecisionModel = from_json_value(value)?;
    model.validate()?;
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recommendation {
    Securitize,
    DoNotSecuritize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub id: u32,
    pub status: Status,
    pub weight: f64,
    pub score: f64,
    /// Whether the condition counts toward the indicator.
    pub included: bool,
    /// `weight * score` (before renormalization).
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub indicator: f64,
    pub threshold: f64,
    pub recommendation: Recommendation,
    pub n_indeterminate: usize,
    pub contributions: Vec<Contribution>,
}

fn score(policy: &ScoringPolicy, index: usize, status: Status, margin: Option<f64>) -> f64 {
    match policy {
        ScoringPolicy::Binary => {
            if status == Status::Satisfied {
                1.0
            } else {
                0.0
            }
        }
        ScoringPolicy::MarginScaled { scale } => match margin {
            Some(m) => (0.5 + m / scale).clamp(0.0, 1.0),
            None => 0.0,
        },
        ScoringPolicy::Custom { scores } => {
            if status == Status::Satisfied {
                scores.get(index).copied().unwrap_or(0.0)
            } else {
                0.0
            }
        }
    }
}

fn contributions(report: &ConditionReport, model: &DecisionModel) -> Vec<Contribution> {
    report
        .results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let weight = model.weights.get(i).copied().unwrap_or(0.0);
            let indeterminate = r.status == Status::Indeterminate;
            let included = !(indeterminate && model.indeterminate_policy == IndeterminatePolicy::ExcludeRenormalize);
            let score = if indeterminate {
                0.0
            } else {
                score(&model.scoring_policy, i, r.status, r.margin)
            };
            Contribution {
                id: r.id,
                status: r.status,
                weight,
                score,
                included,
                weighted: weight * score,
            }
        })
        .collect()
}

/// Compensated (Neumaier) summation.
fn accurate_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

fn indicator_of(parts: &[Contribution]) -> f64 {
    // Both sums see the same terms in the same order, so an all-satisfied
    // report scores exactly 1; compensation makes k equal weights out of n
    // give k/n to the last bit.
    let counted = || parts.iter().filter(|c| c.included);
    let num = accurate_sum(counted().map(|c| c.weighted));
    let den = accurate_sum(counted().map(|c| c.weight));
    if den > 0.0 {
        (num / den).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// `sum(x_i * y_i)` over counted conditions, normalized by their weight sum.
pub fn decision_indicator(report: &ConditionReport, model: &DecisionModel) -> f64 {
    indicator_of(&contributions(report, model))
}

/// Securitize iff `indicator >= threshold`.
pub fn decide(indicator: f64, threshold: f64) -> Result<Recommendation, DecisionError> {
    for (name, value) in [("indicator", indicator), ("threshold", threshold)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(DecisionError::OutOfRange { name, value });
        }
    }
    Ok(if indicator >= threshold {
        Recommendation::Securitize
    } else {
        Recommendation::DoNotSecuritize
    })
}

/// Indicator, recommendation and per-condition breakdown for a validated model.
pub fn make_decision(report: &ConditionReport, model: &DecisionModel) -> Decision {
    let parts = contributions(report, model);
    let indicator = indicator_of(&parts);
    let recommendation = if indicator >= model.threshold {
        Recommendation::Securitize
    } else {
        Recommendation::DoNotSecuritize
    };
    Decision {
        indicator,
        threshold: model.threshold,
        recommendation,
        n_indeterminate: report.count(Status::Indeterminate),
        contributions: parts,
    }
}

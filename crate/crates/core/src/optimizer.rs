//! Maximizing securitized profit over the bank's decision fractions (S, S_s).
//!
//! The objective is bilinear in (S, S_s), so its maximum over a box sits at a
//! corner. The grid search is the default engine and the corner enumeration
//! cross-checks it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditions::{evaluate_condition_unchecked, ConditionResult};
use crate::error::{check_finite, from_json_value, ValidationError, ValidationErrors};
use crate::model;
use crate::outcome::Status;
use crate::scenario::Scenario;
use crate::sensitivity::SensitivityContext;

pub const DEFAULT_GRID: usize = 101;
/// Grid and corner optima must agree to this absolute tolerance.
pub const AGREEMENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Grid,
    Corner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizationConfig {
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "unit")]
    pub s_bounds: [f64; 2],
    #[serde(default = "unit")]
    pub s_s_bounds: [f64; 2],
    /// Cross-check the grid optimum against corner enumeration.
    #[serde(default = "yes")]
    pub corner_check: bool,
    #[serde(default)]
    pub engine: Method,
    /// Include every grid value in the result.
    #[serde(default)]
    pub include_grid: bool,
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

fn unit() -> [f64; 2] {
    [0.0, 1.0]
}

fn yes() -> bool {
    true
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            s_bounds: unit(),
            s_s_bounds: unit(),
            corner_check: true,
            engine: Method::Grid,
            include_grid: false,
        }
    }
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<(), ValidationErrors> {
        let mut errs = ValidationErrors::default();
        if self.grid < 2 {
            errs.push(ValidationError::range("grid", "must be >= 2"));
        }
        if self.grid > 10_001 {
            errs.push(ValidationError::range("grid", "must be <= 10001"));
        }
        for (name, [lo, hi]) in [("s_bounds", self.s_bounds), ("s_s_bounds", self.s_s_bounds)] {
            let ok = check_finite(&mut errs, name, lo) & check_finite(&mut errs, name, hi);
            if ok && !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                errs.push(ValidationError::range(name, "bounds must satisfy 0 <= lo <= hi <= 1"));
            }
        }
        errs.into_result()
    }
}

pub fn optimization_config_from_value(value: serde_json::Value) -> Result<OptimizationConfig, ValidationErrors> {
    let config: OptimizationConfig = from_json_value(value)?;
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerCheck {
    pub s: f64,
    pub s_s: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub s_star: f64,
    pub s_s_star: f64,
    /// Securitized profit at the optimum, as a fraction of principal.
    pub value: f64,
    pub value_currency: f64,
    pub method: Method,
    pub evaluations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corner_check: Option<CornerCheck>,
    /// `grid_values[i][j]` at `(s_i, s_s_j)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_values: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("invalid optimization request:\n{0}")]
    Invalid(ValidationErrors),
    #[error("grid optimum {grid} and corner optimum {corner} disagree")]
    Disagreement { grid: f64, corner: f64 },
}

fn axis(bounds: [f64; 2], n: usize) -> Vec<f64> {
    let [lo, hi] = bounds;
    (0..n)
        .map(|k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * (k as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// Best point over the candidates, scanned with `s` outer and `s_s` inner in
/// ascending order and replaced only on strict improvement, so ties resolve
/// to the lexicographically smallest `(s, s_s)`.
fn search(scenario: &Scenario, s_axis: &[f64], ss_axis: &[f64], keep: bool) -> (f64, f64, f64, Option<Vec<Vec<f64>>>) {
    let mut work = scenario.clone();
    let mut best = (s_axis[0], ss_axis[0], f64::NEG_INFINITY);
    let mut rows = keep.then(|| Vec::with_capacity(s_axis.len()));
    for &s in s_axis {
        work.fractions.s = s;
        let mut row = Vec::new();
        for &ss in ss_axis {
            work.fractions.s_s = ss;
            let v = model::profit_securitized(&work);
            if v > best.2 {
                best = (s, ss, v);
            }
            if keep {
                row.push(v);
            }
        }
        if let Some(rows) = rows.as_mut() {
            rows.push(row);
        }
    }
    (best.0, best.1, best.2, rows)
}

fn corners(scenario: &Scenario, config: &OptimizationConfig) -> CornerCheck {
    let (s, ss, value, _) = search(scenario, &dedup(config.s_bounds), &dedup(config.s_s_bounds), false);
    CornerCheck { s, s_s: ss, value }
}

fn dedup([lo, hi]: [f64; 2]) -> Vec<f64> {
    if lo == hi {
        vec![lo]
    } else {
        vec![lo, hi]
    }
}

pub fn maximize_securitization_profit(
    scenario: &Scenario,
    config: &OptimizationConfig,
) -> Result<OptimizationResult, OptimizeError> {
    config.validate().map_err(OptimizeError::Invalid)?;
    scenario.validate().map_err(OptimizeError::Invalid)?;
    maximize_unchecked(scenario, config)
}

/// As [`maximize_securitization_profit`] for inputs already validated.
pub fn maximize_unchecked(
    scenario: &Scenario,
    config: &OptimizationConfig,
) -> Result<OptimizationResult, OptimizeError> {
    let corner = corners(scenario, config);
    let (s, ss, value, grid_values, evaluations) = match config.engine {
        Method::Corner => (corner.s, corner.s_s, corner.value, None, 4),
        Method::Grid => {
            let s_axis = axis(config.s_bounds, config.grid);
            let ss_axis = axis(config.s_s_bounds, config.grid);
            let (s, ss, v, rows) = search(scenario, &s_axis, &ss_axis, config.include_grid);
            (s, ss, v, rows, config.grid * config.grid)
        }
    };
    if config.corner_check && (value - corner.value).abs() > AGREEMENT_TOLERANCE {
        return Err(OptimizeError::Disagreement {
            grid: value,
            corner: corner.value,
        });
    }
    Ok(OptimizationResult {
        s_star: s,
        s_s_star: ss,
        value,
        value_currency: model::to_currency(value, scenario.principal),
        method: config.engine,
        evaluations,
        corner_check: config.corner_check.then_some(corner),
        grid_values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionStatus {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing_inputs: Vec<String>,
}

impl From<ConditionResult> for ConditionStatus {
    fn from(r: ConditionResult) -> Self {
        Self {
            status: r.status,
            margin: r.margin,
            missing_inputs: r.missing_inputs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyComparison {
    pub i_g: f64,
    pub i_gs_at_scenario: f64,
    pub i_gs_maximized: f64,
    pub s_star: f64,
    pub s_s_star: f64,
    pub condition2: ConditionStatus,
    pub condition3: ConditionStatus,
}

/// Holding vs securitizing as configured vs securitizing optimally, with the
/// after-tax (C2) and pre-tax (C3) comparisons.
pub fn compare_strategies(
    scenario: &Scenario,
    context: &SensitivityContext,
) -> Result<StrategyComparison, OptimizeError> {
    scenario.validate().map_err(OptimizeError::Invalid)?;
    let best = maximize_unchecked(scenario, &OptimizationConfig::default())?;
    let c = |id| -> ConditionStatus {
        evaluate_condition_unchecked(id, scenario, context)
            .expect("conditions 2 and 3 exist")
            .into()
    };
    Ok(StrategyComparison {
        i_g: model::profit_unsecuritized(scenario),
        i_gs_at_scenario: model::profit_securitized(scenario),
        i_gs_maximized: best.value,
        s_star: best.s_star,
        s_s_star: best.s_s_star,
        condition2: c(2),
        condition3: c(3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{base_scenario, zero_scenario};

    #[test]
    fn base_optimum() {
        let r = maximize_securitization_profit(&base_scenario(), &OptimizationConfig::default()).unwrap();
        assert_eq!((r.s_star, r.s_s_star), (1.0, 0.0));
        let oracle = 1.0 * (0.08 - 0.01 - 0.004) + 0.003 - 0.001;
        assert!((r.value - oracle).abs() < 1e-12);
        assert!((r.value - 0.068).abs() < 1e-12);
        let mut at = base_scenario();
        at.fractions.s = 1.0;
        at.fractions.s_s = 0.0;
        assert_eq!(r.value, model::profit_securitized(&at));
        assert_eq!(r.method, Method::Grid);
    }

    #[test]
    fn zero_scenario_ties_to_origin() {
        let r = maximize_securitization_profit(&zero_scenario(), &OptimizationConfig::default()).unwrap();
        assert_eq!((r.s_star, r.s_s_star, r.value), (0.0, 0.0, 0.0));
    }

    #[test]
    fn negative_ic_moves_to_full_realization() {
        let mut s = base_scenario();
        s.rates.i_c = -0.07;
        let r = maximize_securitization_profit(&s, &OptimizationConfig::default()).unwrap();
        assert_eq!((r.s_star, r.s_s_star), (1.0, 1.0));
    }

    #[test]
    fn bounds_and_corner_engine() {
        let config = OptimizationConfig {
            s_s_bounds: [0.5, 1.0],
            ..OptimizationConfig::default()
        };
        let r = maximize_securitization_profit(&base_scenario(), &config).unwrap();
        assert_eq!((r.s_star, r.s_s_star), (1.0, 0.5));
        let corner = OptimizationConfig {
            engine: Method::Corner,
            ..config
        };
        let c = maximize_securitization_profit(&base_scenario(), &corner).unwrap();
        assert_eq!(c.method, Method::Corner);
        assert!((c.value - r.value).abs() <= AGREEMENT_TOLERANCE);
    }

    #[test]
    fn invalid_configs() {
        for config in [
            OptimizationConfig {
                grid: 1,
                ..Default::default()
            },
            OptimizationConfig {
                s_bounds: [0.6, 0.4],
                ..Default::default()
            },
            OptimizationConfig {
                s_s_bounds: [0.0, 1.5],
                ..Default::default()
            },
        ] {
            assert!(matches!(
                maximize_securitization_profit(&base_scenario(), &config),
                Err(OptimizeError::Invalid(_))
            ));
        }
    }

    #[test]
    fn grid_values_optional() {
        let config = OptimizationConfig {
            grid: 3,
            include_grid: true,
            ..Default::default()
        };
        let r = maximize_securitization_profit(&base_scenario(), &config).unwrap();
        let g = r.grid_values.unwrap();
        assert_eq!((g.len(), g[0].len()), (3, 3));
    }

    #[test]
    fn strategies_on_base_and_zero() {
        let ctx = SensitivityContext::default();
        let c = compare_strategies(&base_scenario(), &ctx).unwrap();
        assert!((c.i_g - 0.017).abs() < 1e-12);
        assert!((c.i_gs_at_scenario - 0.011).abs() < 1e-12);
        assert!((c.i_gs_maximized - 0.068).abs() < 1e-12);

        let mut zero = zero_scenario();
        zero.exo_derivatives.insert("I_is".into(), 0.0);
        let c = compare_strategies(&zero, &ctx).unwrap();
        assert_eq!((c.i_g, c.i_gs_at_scenario, c.i_gs_maximized), (0.0, 0.0, 0.0));
        assert_eq!(c.condition2.status, Status::Violated);
        assert_eq!(c.condition3.status, Status::Violated);

        let mut hi_ts = base_scenario();
        hi_ts.rates.i_ts = 0.05;
        let c = compare_strategies(&hi_ts, &ctx).unwrap();
        assert!((c.i_gs_at_scenario - (0.011 - 1.0 * 0.046)).abs() < 1e-12);
        assert!((c.i_gs_at_scenario + 0.035).abs() < 1e-12);
    }
}

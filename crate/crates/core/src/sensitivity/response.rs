//! Closed-form response models for exogenous relationships such as
//! `R_ss(V_m)` or `I_spv(V_s)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SensitivityError;
use crate::error::{check_finite, ValidationError, ValidationErrors};
use crate::names::Symbol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossTerm {
    pub vars: [String; 2],
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelForm {
    /// `y = intercept + sum(slope_k * x_k)`
    Linear {
        intercept: f64,
        #[serde(default)]
        slopes: BTreeMap<String, f64>,
    },
    /// `y = intercept + sum(slope_k * ln x_k)`
    LogLinear {
        intercept: f64,
        #[serde(default)]
        slopes: BTreeMap<String, f64>,
    },
    /// `y = intercept + sum(slope_k * x_k) + sum(coef * x_i * x_j)`
    Quadratic {
        intercept: f64,
        #[serde(default)]
        slopes: BTreeMap<String, f64>,
        #[serde(default)]
        cross: Vec<CrossTerm>,
    },
    /// Piecewise-linear interpolation over `[x, y]` knots of a single variable.
    /// Supplies values and first derivatives only.
    TableInterpolated { points: Vec<[f64; 2]> },
}

impl ModelForm {
    pub fn family(&self) -> &'static str {
        match self {
            ModelForm::Linear { .. } => "linear",
            ModelForm::LogLinear { .. } => "log_linear",
            ModelForm::Quadratic { .. } => "quadratic",
            ModelForm::TableInterpolated { .. } => "table_interpolated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseModel {
    pub dependent: String,
    pub independents: Vec<String>,
    pub form: ModelForm,
}

/// Monomial `coef * prod(x_i ^ p_i)` over the model's independents.
#[derive(Debug, Clone)]
struct Term {
    coef: f64,
    powers: Vec<u32>,
}

impl ResponseModel {
    pub fn validate(&self) -> ValidationErrors {
        let mut errs = ValidationErrors::default();
        if let Err(e) = Symbol::parse(&self.dependent) {
            errs.push(e.at("dependent"));
        }
        let mut seen = Vec::new();
        for (i, ind) in self.independents.iter().enumerate() {
            match Symbol::parse(ind) {
                Ok(s) if seen.contains(&s) => errs.push(ValidationError::range(
                    format!("independents[{i}]"),
                    "duplicate independent variable",
                )),
                Ok(s) => seen.push(s),
                Err(e) => errs.push(e.at(&format!("independents[{i}]"))),
            }
        }
        if self.independents.is_empty() {
            errs.push(ValidationError::range(
                "independents",
                "at least one independent variable is required",
            ));
        }
        let known = |name: &str| Symbol::parse(name).map(|s| seen.contains(&s)).unwrap_or(false);
        let check_slopes = |errs: &mut ValidationErrors, slopes: &BTreeMap<String, f64>| {
            for (k, v) in slopes {
                let path = format!("form.slopes.{k}");
                if !known(k) {
                    errs.push(ValidationError::range(&path, "not one of the declared independents"));
                }
                check_finite(errs, &path, *v);
            }
        };
        match &self.form {
            ModelForm::Linear { intercept, slopes } | ModelForm::LogLinear { intercept, slopes } => {
                check_finite(&mut errs, "form.intercept", *intercept);
                check_slopes(&mut errs, slopes);
            }
            ModelForm::Quadratic {
                intercept,
                slopes,
                cross,
            } => {
                check_finite(&mut errs, "form.intercept", *intercept);
                check_slopes(&mut errs, slopes);
                for (i, term) in cross.iter().enumerate() {
                    for v in &term.vars {
                        if !known(v) {
                            errs.push(ValidationError::range(
                                format!("form.cross[{i}].vars"),
                                format!("`{v}` is not one of the declared independents"),
                            ));
                        }
                    }
                    check_finite(&mut errs, &format!("form.cross[{i}].coef"), term.coef);
                }
            }
            ModelForm::TableInterpolated { points } => {
                if self.independents.len() != 1 {
                    errs.push(ValidationError::range(
                        "independents",
                        "table_interpolated models take exactly one independent variable",
                    ));
                }
                if points.len() < 2 {
                    errs.push(ValidationError::range(
                        "form.points",
                        "at least two points are required",
                    ));
                }
                for (i, [x, y]) in points.iter().enumerate() {
                    check_finite(&mut errs, &format!("form.points[{i}]"), *x);
                    check_finite(&mut errs, &format!("form.points[{i}]"), *y);
                }
                if points
                    .windows(2)
                    .any(|w| w[0][0].partial_cmp(&w[1][0]) != Some(std::cmp::Ordering::Less))
                {
                    errs.push(ValidationError::range(
                        "form.points",
                        "x values must be strictly increasing",
                    ));
                }
            }
        }
        errs
    }

    pub fn dependent_symbol(&self) -> Option<Symbol> {
        Symbol::parse(&self.dependent).ok()
    }

    fn independent_symbols(&self) -> Vec<Symbol> {
        self.independents.iter().filter_map(|s| Symbol::parse(s).ok()).collect()
    }

    fn index_of(&self, name: &str) -> Option<usize> {
        let sym = Symbol::parse(name).ok()?;
        self.independent_symbols().iter().position(|s| *s == sym)
    }

    /// Whether this model can answer for `quantity` differentiated by `wrt`.
    pub fn covers(&self, quantity: &Symbol, wrt: &[Symbol]) -> bool {
        let inds = self.independent_symbols();
        self.dependent_symbol().as_ref() == Some(quantity) && wrt.iter().all(|w| inds.contains(w))
    }

    fn polynomial(&self) -> Option<Vec<Term>> {
        let n = self.independents.len();
        let (intercept, slopes, cross): (f64, &BTreeMap<String, f64>, &[CrossTerm]) = match &self.form {
            ModelForm::Linear { intercept, slopes } => (*intercept, slopes, &[]),
            ModelForm::Quadratic {
                intercept,
                slopes,
                cross,
            } => (*intercept, slopes, cross.as_slice()),
            _ => return None,
        };
        let mut terms = vec![Term {
            coef: intercept,
            powers: vec![0; n],
        }];
        for (k, v) in slopes {
            let mut powers = vec![0; n];
            powers[self.index_of(k)?] = 1;
            terms.push(Term { coef: *v, powers });
        }
        for c in cross {
            let mut powers = vec![0; n];
            powers[self.index_of(&c.vars[0])?] += 1;
            powers[self.index_of(&c.vars[1])?] += 1;
            terms.push(Term { coef: c.coef, powers });
        }
        Some(terms)
    }

    /// Value (empty `wrt`) or analytic partial derivative at `point`, where
    /// `point[i]` is the value of the i-th independent.
    pub fn evaluate(&self, point: &[f64], wrt: &[Symbol]) -> Result<f64, SensitivityError> {
        let idx: Vec<usize> = wrt
            .iter()
            .map(|w| {
                self.independent_symbols().iter().position(|s| s == w).ok_or_else(|| {
                    SensitivityError::BadVariable(format!(
                        "`{w}` is not an independent of the model for {}",
                        self.dependent
                    ))
                })
            })
            .collect::<Result<_, _>>()?;
        match &self.form {
            ModelForm::Linear { .. } | ModelForm::Quadratic { .. } => {
                let terms = self
                    .polynomial()
                    .ok_or_else(|| SensitivityError::BadVariable("invalid model".into()))?;
                let mut total = 0.0;
                for term in terms {
                    let mut coef = term.coef;
                    let mut powers = term.powers;
                    for &i in &idx {
                        if powers[i] == 0 {
                            coef = 0.0;
                            break;
                        }
                        coef *= powers[i] as f64;
                        powers[i] -= 1;
                    }
                    if coef != 0.0 {
                        total += coef
                            * powers
                                .iter()
                                .zip(point)
                                .map(|(&p, &x)| x.powi(p as i32))
                                .product::<f64>();
                    }
                }
                Ok(total)
            }
            ModelForm::LogLinear { intercept, slopes } => {
                let inds = self.independent_symbols();
                for (i, x) in point.iter().enumerate() {
                    let has_slope = slopes.keys().any(|k| Symbol::parse(k).ok().as_ref() == inds.get(i));
                    if has_slope && *x <= 0.0 {
                        return Err(SensitivityError::Domain(format!(
                            "log_linear model for {} needs {} > 0, got {x}",
                            self.dependent, inds[i]
                        )));
                    }
                }
                let slope_of = |i: usize| {
                    slopes
                        .iter()
                        .find(|(k, _)| self.index_of(k) == Some(i))
                        .map(|(_, v)| *v)
                        .unwrap_or(0.0)
                };
                if idx.is_empty() {
                    let mut total = *intercept;
                    for (i, x) in point.iter().enumerate() {
                        let b = slope_of(i);
                        if b != 0.0 {
                            total += b * x.ln();
                        }
                    }
                    return Ok(total);
                }
                if idx.iter().any(|&i| i != idx[0]) {
                    // separable in each variable: cross partials vanish
                    return Ok(0.0);
                }
                let (i, n) = (idx[0], idx.len() as i32);
                let x = point[i];
                // d^n/dx^n ln x = (-1)^(n-1) (n-1)! / x^n
                let factorial: f64 = (1..n).map(f64::from).product();
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                Ok(slope_of(i) * sign * factorial / x.powi(n))
            }
            ModelForm::TableInterpolated { points } => {
                if idx.len() > 1 {
                    return Err(SensitivityError::UnsupportedOrder {
                        model: self.dependent.clone(),
                        order: idx.len(),
                    });
                }
                let x = point[0];
                let (lo, hi) = (points[0][0], points[points.len() - 1][0]);
                if x < lo || x > hi {
                    return Err(SensitivityError::Domain(format!(
                        "{x} is outside the table domain [{lo}, {hi}] of the model for {}",
                        self.dependent
                    )));
                }
                let seg = points.windows(2).position(|w| x < w[1][0]).unwrap_or(points.len() - 2);
                let ([x0, y0], [x1, y1]) = (points[seg], points[seg + 1]);
                let slope = (y1 - y0) / (x1 - x0);
                if idx.is_empty() {
                    Ok(y0 + slope * (x - x0))
                } else {
                    Ok(slope)
                }
            }
        }
    }

    /// Independent values looked up through `lookup`; `None` if any is unavailable.
    pub fn point_from<F>(&self, lookup: F) -> Option<Vec<f64>>
    where
        F: Fn(&Symbol) -> Option<f64>,
    {
        self.independent_symbols().iter().map(lookup).collect()
    }
}

//! Three-valued comparison outcomes shared by the securitization conditions
//! and the volume conditions.

use serde::{Deserialize, Serialize};

/// Non-strict comparisons within this distance of a tie count as satisfied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Satisfied,
    Violated,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Gt,
    Lt,
    Ge,
    Le,
    /// Equality within a relative tolerance.
    ApproxEq,
}

impl Relation {
    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Gt | Relation::Lt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::ApproxEq => "=",
        }
    }
}

/// One inequality of a condition, evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubResult {
    pub text: String,
    pub relation: Relation,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
}

/// Overflowing arithmetic on extreme inputs still yields a finite, ordered margin.
fn finite_margin(m: f64) -> f64 {
    if m.is_nan() {
        -f64::MAX
    } else {
        m.clamp(-f64::MAX, f64::MAX)
    }
}

fn status_of(margin: f64, strict: bool) -> (Status, f64) {
    if strict {
        let s = if margin > 0.0 {
            Status::Satisfied
        } else {
            Status::Violated
        };
        (s, margin)
    } else if margin >= 0.0 {
        (Status::Satisfied, margin)
    } else if margin >= -TIE_TOLERANCE {
        (Status::Satisfied, 0.0)
    } else {
        (Status::Violated, margin)
    }
}

impl SubResult {
    /// `lhs relation rhs`; the margin is positive when the inequality holds
    /// with room to spare.
    pub fn compare(text: impl Into<String>, relation: Relation, lhs: Option<f64>, rhs: Option<f64>) -> Self {
        let text = text.into();
        let (Some(l), Some(r)) = (lhs, rhs) else {
            return Self {
                text,
                relation,
                status: Status::Indeterminate,
                margin: None,
                lhs,
                rhs,
            };
        };
        let raw = match relation {
            Relation::Gt | Relation::Ge => l - r,
            Relation::Lt | Relation::Le => r - l,
            Relation::ApproxEq => -(l - r).abs(),
        };
        let (status, margin) = status_of(finite_margin(raw), relation.is_strict());
        Self {
            text,
            relation,
            status,
            margin: Some(margin),
            lhs,
            rhs,
        }
    }

    /// `lhs = rhs` within `tol * max(1, |rhs|)`.
    pub fn approx_eq(text: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = finite_margin(tol * rhs.abs().max(1.0) - (lhs - rhs).abs());
        let (status, margin) = status_of(margin, false);
        Self {
            text: text.into(),
            relation: Relation::ApproxEq,
            status,
            margin: Some(margin),
            lhs: Some(lhs),
            rhs: Some(rhs),
        }
    }
}

/// Status and margin of a conjunction: indeterminate if any part is,
/// otherwise satisfied iff every part is, with the smallest margin.
pub fn combine(parts: &[SubResult]) -> (Status, Option<f64>) {
    if parts.is_empty() || parts.iter().any(|p| p.status == Status::Indeterminate) {
        return (Status::Indeterminate, None);
    }
    let margin = parts.iter().filter_map(|p| p.margin).fold(f64::INFINITY, f64::min);
    let status = if parts.iter().all(|p| p.status == Status::Satisfied) {
        Status::Satisfied
    } else {
        Status::Violated
    };
    (status, Some(margin))
}

/// Maximum of several possibly-missing values; missing if any is.
pub fn max_of(values: &[Option<f64>]) -> Option<f64> {
    values
        .iter()
        .try_fold(f64::NEG_INFINITY, |acc, v| v.map(|v| acc.max(v)))
}

pub fn min_of(values: &[Option<f64>]) -> Option<f64> {
    values.iter().try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
}

//! Evaluation reports and their JSON / text-table renderings.
//!
//! Both renderings are produced from the same in-memory value.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::conditions::{catalog, evaluate_all_unchecked, CatalogEntry, ConditionResult, Diagnostics};
use crate::decision::{make_decision, Decision, DecisionModel, Recommendation};
use crate::model;
use crate::optimizer::{OptimizationResult, StrategyComparison};
use crate::outcome::Status;
use crate::scenario::{Scenario, SCHEMA_VERSION};
use crate::sensitivity::{SensitivityContext, SensitivityEntry};
use crate::volume::{BankVolume, ScanResult, VolumeConditionReport};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Penalties {
    /// Transfer-format penalty F.
    pub format: f64,
    /// SPV organizational-form penalty E.
    pub spv_form: f64,
    /// Adverse-selection value A.
    pub adverse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub satisfied: usize,
    pub violated: usize,
    pub indeterminate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub engine_version: String,
    pub i_g: f64,
    pub i_gs: f64,
    pub i_g_currency: f64,
    pub i_gs_currency: f64,
    pub residual_rate: f64,
    pub penalties: Penalties,
    pub conditions: Vec<ConditionResult>,
    pub counts: StatusCounts,
    pub diagnostics: Diagnostics,
    pub indicator: f64,
    pub threshold: f64,
    pub recommendation: Recommendation,
}

/// Full evaluation of a validated scenario under a validated decision model.
pub fn evaluate_scenario(
    scenario: &Scenario,
    context: &SensitivityContext,
    decision: &DecisionModel,
) -> (EvaluationReport, Decision) {
    let report = evaluate_all_unchecked(scenario, context);
    let d = make_decision(&report, decision);
    let counts = StatusCounts {
        satisfied: report.count(Status::Satisfied),
        violated: report.count(Status::Violated),
        indeterminate: report.count(Status::Indeterminate),
    };
    let out = EvaluationReport {
        schema_version: SCHEMA_VERSION,
        engine_version: ENGINE_VERSION.to_string(),
        i_g: model::profit_unsecuritized(scenario),
        i_gs: model::profit_securitized(scenario),
        i_g_currency: model::profit_unsecuritized_currency(scenario),
        i_gs_currency: model::profit_securitized_currency(scenario),
        residual_rate: model::residual_rate(scenario.rates.i_i, scenario.rates.i_s),
        penalties: Penalties {
            format: model::format_penalty(&scenario.format_choice),
            spv_form: model::spv_form_penalty(&scenario.spv_form),
            adverse: model::adverse_selection_value(&scenario.adverse, scenario.horizon_t),
        },
        conditions: report.results,
        counts,
        diagnostics: report.diagnostics,
        indicator: d.indicator,
        threshold: d.threshold,
        recommendation: d.recommendation,
    };
    (out, d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecideResponse {
    pub decision: Decision,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResponse {
    pub optimization: OptimizationResult,
    pub comparison: StrategyComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeResponse {
    pub at_v_m: VolumeConditionReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum: Option<BankVolume>,
    pub caveats: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResponse {
    pub values: Vec<SensitivityEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogResponse {
    pub schema_version: u32,
    pub conditions: Vec<CatalogEntry>,
}

/// Pretty JSON with a trailing newline; the one serializer used by the CLI and the service.
pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn fmt_margin(m: Option<f64>) -> String {
    m.map_or_else(|| "-".to_string(), |m| format!("{m:+.4}"))
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Satisfied => "satisfied",
        Status::Violated => "violated",
        Status::Indeterminate => "indeterminate",
    }
}

/// Left-aligned columns separated by two spaces; the last column is not padded.
fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: Vec<&str>| {
        let last = cells.len() - 1;
        let mut l = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i == last {
                l.push_str(c);
            } else {
                let _ = write!(l, "{c:<w$}  ", w = widths[i]);
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(&mut out, header.to_vec());
    for row in rows {
        line(&mut out, row.iter().map(String::as_str).collect());
    }
    out
}

/// One row per condition: id, status, margin, rendering, missing inputs.
pub fn render_conditions_table(results: &[ConditionResult]) -> String {
    let cat = catalog();
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let rendering = cat
                .iter()
                .find(|e| e.id == r.id)
                .map(|e| e.rendering.clone())
                .unwrap_or_default();
            vec![
                format!("C{}", r.id),
                status_word(r.status).to_string(),
                fmt_margin(r.margin),
                rendering,
                r.missing_inputs.join(", "),
            ]
        })
        .collect();
    table(&["ID", "STATUS", "MARGIN", "CONDITION", "MISSING"], &rows)
}

pub fn render_evaluation_table(r: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "I_g        {:.6}  ({:.2})", r.i_g, r.i_g_currency);
    let _ = writeln!(out, "I_gs       {:.6}  ({:.2})", r.i_gs, r.i_gs_currency);
    let _ = writeln!(
        out,
        "penalties  F={:.6}  E={:.6}  A={:.6}",
        r.penalties.format, r.penalties.spv_form, r.penalties.adverse
    );
    let _ = writeln!(out, "spread gap {:.6}", r.diagnostics.spread_convergence_gap);
    let _ = writeln!(
        out,
        "d1(I_g|I_b) {:.6}{}",
        r.diagnostics.d_ig_d_ib,
        if r.diagnostics.d_ig_d_ib_negative {
            "  (negative)"
        } else {
            ""
        }
    );
    let _ = writeln!(
        out,
        "conditions {} satisfied, {} violated, {} indeterminate",
        r.counts.satisfied, r.counts.violated, r.counts.indeterminate
    );
    let _ = writeln!(
        out,
        "indicator  {:.4}  threshold {:.4}  -> {}",
        r.indicator,
        r.threshold,
        recommendation_word(r.recommendation)
    );
    out.push('\n');
    out.push_str(&render_conditions_table(&r.conditions));
    for note in &r.diagnostics.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

fn recommendation_word(r: Recommendation) -> &'static str {
    match r {
        Recommendation::Securitize => "securitize",
        Recommendation::DoNotSecuritize => "do not securitize",
    }
}

pub fn render_decision_table(r: &DecideResponse) -> String {
    let d = &r.decision;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "indicator {:.4}  threshold {:.4}  indeterminate {}  -> {}",
        d.indicator,
        d.threshold,
        d.n_indeterminate,
        recommendation_word(d.recommendation)
    );
    out.push('\n');
    let rows: Vec<Vec<String>> = d
        .contributions
        .iter()
        .map(|c| {
            vec![
                format!("C{}", c.id),
                status_word(c.status).to_string(),
                format!("{:.4}", c.weight),
                format!("{:.4}", c.score),
                if c.included { "yes".into() } else { "no".into() },
            ]
        })
        .collect();
    out.push_str(&table(&["ID", "STATUS", "WEIGHT", "SCORE", "COUNTED"], &rows));
    out
}

pub fn render_optimize_table(r: &OptimizeResponse) -> String {
    let o = &r.optimization;
    let c = &r.comparison;
    let mut out = String::new();
    let _ = writeln!(out, "s*         {:.4}", o.s_star);
    let _ = writeln!(out, "s_s*       {:.4}", o.s_s_star);
    let _ = writeln!(out, "value      {:.6}  ({:.2})", o.value, o.value_currency);
    let method = match o.method {
        crate::optimizer::Method::Grid => "grid",
        crate::optimizer::Method::Corner => "corner",
    };
    let _ = writeln!(out, "method     {method}");
    let _ = writeln!(out, "I_g        {:.6}", c.i_g);
    let _ = writeln!(out, "I_gs       {:.6}  (at scenario)", c.i_gs_at_scenario);
    let _ = writeln!(
        out,
        "C2         {}  {}",
        status_word(c.condition2.status),
        fmt_margin(c.condition2.margin)
    );
    let _ = writeln!(
        out,
        "C3         {}  {}",
        status_word(c.condition3.status),
        fmt_margin(c.condition3.margin)
    );
    out
}

pub fn render_volume_table(r: &VolumeResponse) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "conditions at V_m = {}", r.at_v_m.v_m);
    let rows: Vec<Vec<String>> = r
        .at_v_m
        .conditions
        .iter()
        .map(|c| {
            vec![
                format!("({})", c.label),
                status_word(c.status).to_string(),
                fmt_margin(c.margin),
                c.rendering.clone(),
                c.missing_inputs.join(", "),
            ]
        })
        .collect();
    out.push_str(&table(&["ID", "STATUS", "MARGIN", "CONDITION", "MISSING"], &rows));
    if let Some(scan) = &r.scan {
        let _ = writeln!(
            out,
            "\nscan [{}, {}] step {}: {} of {} points feasible",
            scan.v_min, scan.v_max, scan.step, scan.feasible_points, scan.grid_points
        );
        if scan.intervals.is_empty() {
            let _ = writeln!(out, "no feasible volume");
        }
        for i in &scan.intervals {
            let _ = writeln!(out, "feasible   [{:.4}, {:.4}]", i.lo, i.hi);
        }
        for (label, t) in &scan.tallies {
            if t.violated + t.indeterminate > 0 {
                let _ = writeln!(
                    out,
                    "({label}) violated at {} points, indeterminate at {}",
                    t.violated, t.indeterminate
                );
            }
        }
    }
    if let Some(opt) = &r.optimum {
        match (opt.market_volume, opt.bank_volume) {
            (Some(m), Some(b)) => {
                let _ = writeln!(out, "market volume {m:.4}  bank volume {b:.4}");
            }
            _ => {
                let _ = writeln!(out, "market volume none  bank volume none");
            }
        }
    }
    for c in &r.caveats {
        let _ = writeln!(out, "note: {c}");
    }
    out
}

pub fn render_sensitivity_table(r: &SensitivityResponse) -> String {
    let rows: Vec<Vec<String>> = r
        .values
        .iter()
        .map(|e| {
            let mut detail: Vec<String> = e.warnings.clone();
            if let Some(err) = &e.error {
                detail.push(err.clone());
            }
            vec![
                e.name.clone(),
                e.value.map_or_else(|| "-".into(), |v| format!("{v:.6}")),
                format!("{:?}", e.status).to_lowercase(),
                detail.join("; "),
            ]
        })
        .collect();
    table(&["NAME", "VALUE", "STATUS", "NOTES"], &rows)
}

pub fn render_catalog_table(r: &CatalogResponse) -> String {
    let rows: Vec<Vec<String>> = r
        .conditions
        .iter()
        .map(|e| vec![format!("C{}", e.id), e.rendering.clone(), e.required_inputs.join(", ")])
        .collect();
    table(&["ID", "CONDITION", "INPUTS"], &rows)
}

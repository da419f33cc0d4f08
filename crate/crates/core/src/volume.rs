//! Market-level conditions (a)-(g) for the ABS/MBS volume in an asset class,
//! and a grid scan for the set of volumes where all of them hold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, from_json_value, parse_json_text, ErrorKind, ValidationError, ValidationErrors};
use crate::names::{QuantityName, Symbol};
use crate::outcome::{combine, Relation, Status, SubResult};
use crate::sensitivity::{resolve_derivative, QuantitySource, Resolution, ResponseModel};

pub const DEFAULT_EQUALITY_TOLERANCE: f64 = 1e-3;
pub const MAX_SCAN_POINTS: usize = 2_000_000;

pub const QUALITATIVE_CAVEAT: &str =
    "qualitative factors (asset class, marketing ability, social capital) also affect the optimal volume and are not modeled";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub v_min: f64,
    pub v_max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParameters {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    /// Relative impact of the non-ABS/MBS capital markets.
    pub phi: f64,
    /// Relative impact of the ABS/MBS market.
    pub omega: f64,
    pub m_mys: f64,
    pub m_cm: f64,
    pub m_ays: f64,
    /// Substitution rates at the evaluation point, used when no model supplies them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_sn: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_ss: Option<f64>,
    pub v_m: f64,
    pub v_p: f64,
    pub s_h: f64,
    pub s_c: f64,
    #[serde(default = "default_tolerance")]
    pub equality_tolerance: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub response_models: Vec<ResponseModel>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub exo_derivatives: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
}

fn schema_version() -> u32 {
    crate::scenario::SCHEMA_VERSION
}

fn default_tolerance() -> f64 {
    DEFAULT_EQUALITY_TOLERANCE
}

impl ScanConfig {
    pub fn validate(&self, prefix: &str) -> ValidationErrors {
        let mut errs = ValidationErrors::default();
        let p = |name: &str| format!("{prefix}{name}");
        let ok = [("v_min", self.v_min), ("v_max", self.v_max), ("step", self.step)]
            .iter()
            .all(|(n, v)| check_finite(&mut errs, &p(n), *v));
        if !ok {
            return errs;
        }
        if self.v_min <= 0.0 {
            errs.push(ValidationError::range(p("v_min"), "must be > 0"));
        }
        if self.v_max <= self.v_min {
            errs.push(ValidationError::range(p("v_max"), "must be > v_min"));
        }
        if self.step <= 0.0 {
            errs.push(ValidationError::range(p("step"), "must be > 0"));
        } else if self.v_max > self.v_min && self.point_count() > MAX_SCAN_POINTS {
            errs.push(ValidationError::range(
                p("step"),
                format!("grid would have more than {MAX_SCAN_POINTS} points"),
            ));
        }
        errs
    }

    /// Number of grid points `v_min + k*step` not exceeding `v_max`.
    pub fn point_count(&self) -> usize {
        let n = ((self.v_max - self.v_min) / self.step * (1.0 + 1e-12)).floor();
        if n.is_finite() && n >= 0.0 {
            (n as usize).saturating_add(1)
        } else {
            0
        }
    }

    pub fn point(&self, k: usize) -> f64 {
        self.v_min + k as f64 * self.step
    }
}

impl MarketParameters {
    pub fn validate(&self) -> Result<(), ValidationErrors> {
        let mut errs = ValidationErrors::default();
        if self.schema_version != crate::scenario::SCHEMA_VERSION {
            errs.push(ValidationError::range(
                "schema_version",
                format!("unsupported schema version {}", self.schema_version),
            ));
        }
        let mut finite = true;
        for (name, v) in [
            ("phi", self.phi),
            ("omega", self.omega),
            ("m_mys", self.m_mys),
            ("m_cm", self.m_cm),
            ("m_ays", self.m_ays),
            ("v_m", self.v_m),
            ("v_p", self.v_p),
            ("s_h", self.s_h),
            ("s_c", self.s_c),
            ("equality_tolerance", self.equality_tolerance),
        ] {
            finite &= check_finite(&mut errs, name, v);
        }
        for (name, v) in [("r_sn", self.r_sn), ("r_ss", self.r_ss)] {
            if let Some(v) = v {
                check_finite(&mut errs, name, v);
            }
        }
        if finite {
            for (name, v) in [
                ("phi", self.phi),
                ("omega", self.omega),
                ("s_h", self.s_h),
                ("s_c", self.s_c),
            ] {
                if !(v > 0.0 && v < 1.0) {
                    errs.push(ValidationError::range(name, "must be in (0,1)"));
                }
            }
            if (self.phi + self.omega - 1.0).abs() > 1e-9 {
                errs.push(ValidationError::range(
                    "omega",
                    format!("phi + omega must equal 1, got {}", self.phi + self.omega),
                ));
            }
            if self.v_m <= 0.0 {
                errs.push(ValidationError::range("v_m", "must be > 0"));
            }
            if self.v_p < self.v_m {
                errs.push(ValidationError::range("v_p", "must be >= v_m"));
            }
            if self.equality_tolerance <= 0.0 {
                errs.push(ValidationError::range("equality_tolerance", "must be > 0"));
            }
        }
        for (i, m) in self.response_models.iter().enumerate() {
            errs.extend(m.validate().prefixed(&format!("response_models[{i}]")));
        }
        for (key, v) in &self.exo_derivatives {
            let path = format!("exo_derivatives.{key}");
            match QuantityName::parse(key) {
                Ok(n) if n.to_string() == *key => {}
                Ok(n) => errs.push(ValidationError::new(
                    &path,
                    ErrorKind::DerivativeName,
                    format!("name is not in canonical form (expected `{n}`)"),
                )),
                Err(e) => errs.push(e.at(&path)),
            }
            check_finite(&mut errs, &path, *v);
        }
        if let Some(scan) = &self.scan {
            errs.extend(scan.validate("scan."));
        }
        errs.into_result()
    }
}

pub fn parse_market(text: &str) -> Result<MarketParameters, ValidationErrors> {
    market_from_value(parse_json_text(text)?)
}

pub fn market_from_value(value: serde_json::Value) -> Result<MarketParameters, ValidationErrors> {
    let mut mp: MarketParameters = from_json_value(value)?;
    let mut errs = ValidationErrors::default();
    let mut canonical = BTreeMap::new();
    for (key, v) in std::mem::take(&mut mp.exo_derivatives) {
        match QuantityName::parse(&key) {
            Ok(name) => {
                canonical.insert(name.to_string(), v);
            }
            Err(e) => errs.push(e.at(&format!("exo_derivatives.{key}"))),
        }
    }
    mp.exo_derivatives = canonical;
    if let Err(e) = mp.validate() {
        errs.extend(e);
    }
    errs.into_result().map(|_| mp)
}

/// Resolves market symbols with `V_m` set to the candidate volume.
struct MarketSource<'a> {
    mp: &'a MarketParameters,
    v_m: f64,
}

impl QuantitySource for MarketSource<'_> {
    fn exogenous(&self) -> &BTreeMap<String, f64> {
        &self.mp.exo_derivatives
    }

    fn models(&self) -> Box<dyn Iterator<Item = &ResponseModel> + '_> {
        Box::new(self.mp.response_models.iter())
    }

    fn point(&self, symbol: &Symbol) -> Option<f64> {
        let Symbol::Plain(name) = symbol else {
            return None;
        };
        let mp = self.mp;
        match name.as_str() {
            "V_m" => Some(self.v_m),
            "V_p" => Some(mp.v_p),
            "Phi" => Some(mp.phi),
            "Omega" => Some(mp.omega),
            "S_h" => Some(mp.s_h),
            "S_c" => Some(mp.s_c),
            "M_mys" => Some(mp.m_mys),
            "M_cm" => Some(mp.m_cm),
            "M_ays" => Some(mp.m_ays),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeConditionResult {
    pub label: String,
    pub rendering: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub missing_inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subresults: Vec<SubResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeConditionReport {
    pub v_m: f64,
    pub equality_tolerance: f64,
    pub all_satisfied: bool,
    pub conditions: Vec<VolumeConditionResult>,
}

struct Ctx<'a> {
    source: MarketSource<'a>,
    missing: Vec<String>,
    warnings: Vec<String>,
}

impl Ctx<'_> {
    /// `R_sn` / `R_ss` level: a model at the candidate point, else the
    /// document value, else an exogenous level.
    fn r_level(&mut self, name: &str) -> Option<f64> {
        let sym = Symbol::plain(name);
        for m in self.source.mp.response_models.iter() {
            if m.covers(&sym, &[]) {
                if let Some(point) = m.point_from(|s| self.source.point(s)) {
                    match m.evaluate(&point, &[]) {
                        Ok(v) if v.is_finite() => return Some(v),
                        Ok(v) => self.warnings.push(format!("{name}: non-finite value {v}")),
                        Err(e) => self.warnings.push(format!("{name}: {e}")),
                    }
                    self.missing.push(name.to_string());
                    return None;
                }
            }
        }
        let field = match name {
            "R_sn" => self.source.mp.r_sn,
            _ => self.source.mp.r_ss,
        };
        if let Some(v) = field.or_else(|| self.source.mp.exo_derivatives.get(name).copied()) {
            return Some(v);
        }
        self.missing.push(name.to_string());
        None
    }

    fn derivative(&mut self, name: &str) -> Option<f64> {
        let parsed = QuantityName::parse(name).expect("valid name");
        let d = parsed.as_derivative().expect("derivative name");
        match resolve_derivative(d, &self.source) {
            Ok(Resolution::Value { value, .. }) if value.value.is_finite() => Some(value.value),
            Ok(Resolution::Value { value, .. }) => {
                self.warnings.push(format!("{name}: non-finite value {}", value.value));
                self.missing.push(name.to_string());
                None
            }
            Ok(Resolution::Missing) => {
                self.missing.push(name.to_string());
                None
            }
            Err(e) => {
                self.warnings.push(format!("{name}: {e}"));
                self.missing.push(name.to_string());
                None
            }
        }
    }
}

fn finish(label: &str, rendering: &str, ctx: &mut Ctx, parts: Vec<SubResult>) -> VolumeConditionResult {
    let (status, margin) = combine(&parts);
    VolumeConditionResult {
        label: label.to_string(),
        rendering: rendering.to_string(),
        status,
        margin,
        missing_inputs: std::mem::take(&mut ctx.missing),
        subresults: if parts.len() > 1 { parts } else { Vec::new() },
        warnings: std::mem::take(&mut ctx.warnings),
    }
}

/// Conditions (a)-(g) at candidate market volume `v_m`.
pub fn evaluate_volume_conditions(mp: &MarketParameters, v_m: f64) -> VolumeConditionReport {
    use Relation::{Ge, Gt, Lt};
    let mut ctx = Ctx {
        source: MarketSource { mp, v_m },
        missing: Vec::new(),
        warnings: Vec::new(),
    };
    let tol = mp.equality_tolerance;
    let cmp = SubResult::compare;
    let mut out = Vec::with_capacity(7);

    let parts = vec![
        SubResult::approx_eq("M_mys = M_cm", mp.m_mys, mp.m_cm, tol),
        cmp("S_c >= S_h", Ge, Some(mp.s_c), Some(mp.s_h)),
    ];
    out.push(finish("a", "M_mys = M_cm; S_c >= S_h", &mut ctx, parts));

    let parts = vec![cmp("V_m*S_c >= S_h*V_p", Ge, Some(v_m * mp.s_c), Some(mp.s_h * mp.v_p))];
    out.push(finish("b", "V_m*S_c >= S_h*V_p", &mut ctx, parts));

    let parts = vec![cmp("V_p > S_c*V_m", Gt, Some(mp.v_p), Some(mp.s_c * v_m))];
    out.push(finish("c", "V_p > S_c*V_m", &mut ctx, parts));

    let r_sn = ctx.r_level("R_sn");
    let r_ss = ctx.r_level("R_ss");
    let rhs = r_sn
        .zip(r_ss)
        .map(|(sn, ss)| mp.m_cm * sn * mp.phi + mp.m_ays * ss * mp.omega);
    let text = "M_mys >= M_cm*R_sn*Phi + M_ays*R_ss*Omega";
    let parts = vec![cmp(text, Ge, Some(mp.m_mys), rhs)];
    out.push(finish("d", text, &mut ctx, parts));

    let d1 = ctx.derivative("d1(R_ss|V_m)");
    let d2 = ctx.derivative("d2(R_sn|V_m,V_m)");
    let parts = vec![
        cmp("d1(R_ss|V_m) < 1", Lt, d1, Some(1.0)),
        cmp("d2(R_sn|V_m,V_m) < 0", Lt, d2, Some(0.0)),
    ];
    out.push(finish("e", "d1(R_ss|V_m) < 1; d2(R_sn|V_m,V_m) < 0", &mut ctx, parts));

    let d1 = ctx.derivative("d1(R_sn|V_p)");
    let d2 = ctx.derivative("d2(R_ss|V_m,V_m)");
    let parts = vec![
        cmp("d1(R_sn|V_p) < 0", Lt, d1, Some(0.0)),
        cmp("d2(R_ss|V_m,V_m) < 0", Lt, d2, Some(0.0)),
    ];
    out.push(finish("f", "d1(R_sn|V_p) < 0; d2(R_ss|V_m,V_m) < 0", &mut ctx, parts));

    let r_ss = ctx.r_level("R_ss");
    let text = "M_mys >= M_cm*R_ss";
    let parts = vec![cmp(text, Ge, Some(mp.m_mys), r_ss.map(|r| mp.m_cm * r))];
    out.push(finish("g", text, &mut ctx, parts));

    VolumeConditionReport {
        v_m,
        equality_tolerance: tol,
        all_satisfied: out.iter().all(|c| c.status == Status::Satisfied),
        conditions: out,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionTally {
    pub violated: usize,
    pub indeterminate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub v_min: f64,
    pub v_max: f64,
    pub step: f64,
    pub grid_points: usize,
    pub feasible_points: usize,
    pub intervals: Vec<Interval>,
    /// Per-condition count of grid points where it failed.
    pub tallies: BTreeMap<String, ConditionTally>,
    /// Some grid points were excluded only because an input was missing.
    pub indeterminate_points: usize,
}

/// Maximal runs of grid points where all of (a)-(g) are satisfied.
pub fn feasible_volume_intervals(mp: &MarketParameters, scan: &ScanConfig) -> Result<ScanResult, ValidationErrors> {
    scan.validate("").into_result()?;
    let n = scan.point_count();
    if n == 0 {
        return Err(ValidationErrors::single(ValidationError::range("step", "empty grid")));
    }
    let mut intervals: Vec<Interval> = Vec::new();
    let mut tallies: BTreeMap<String, ConditionTally> = BTreeMap::new();
    let mut feasible_points = 0;
    let mut indeterminate_points = 0;
    let mut run_start: Option<f64> = None;
    let mut last_ok = 0.0;
    for k in 0..n {
        let v = scan.point(k);
        let report = evaluate_volume_conditions(mp, v);
        let mut any_indeterminate = false;
        for c in &report.conditions {
            let t = tallies.entry(c.label.clone()).or_insert(ConditionTally {
                violated: 0,
                indeterminate: 0,
            });
            match c.status {
                Status::Satisfied => {}
                Status::Violated => t.violated += 1,
                Status::Indeterminate => {
                    t.indeterminate += 1;
                    any_indeterminate = true;
                }
            }
        }
        if any_indeterminate {
            indeterminate_points += 1;
        }
        if report.all_satisfied {
            feasible_points += 1;
            run_start.get_or_insert(v);
            last_ok = v;
        } else if let Some(lo) = run_start.take() {
            intervals.push(Interval { lo, hi: last_ok });
        }
    }
    if let Some(lo) = run_start {
        intervals.push(Interval { lo, hi: last_ok });
    }
    Ok(ScanResult {
        v_min: scan.v_min,
        v_max: scan.v_max,
        step: scan.step,
        grid_points: n,
        feasible_points,
        intervals,
        tallies,
        indeterminate_points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BankVolume {
    pub market_volume: Option<f64>,
    pub bank_volume: Option<f64>,
}

/// Largest feasible market volume and the bank's share of it.
pub fn bank_optimal_volume(intervals: &[Interval], mp: &MarketParameters) -> BankVolume {
    let market = intervals
        .iter()
        .map(|i| i.hi)
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    BankVolume {
        market_volume: market,
        bank_volume: market.map(|m| mp.s_c * m),
    }
}

//! The scenario document: every rate, fraction, tax, probability and volume
//! describing one bank / loan-pool securitization decision.
//!
//! All rates are decimal fractions per period (0.08, not 8%). The principal and
//! the economy-wide volumes are in currency units.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_finite, from_json_value, parse_json_text, ValidationError, ValidationErrors};
use crate::names::{QuantityName, Symbol};
use crate::sensitivity::ResponseModel;

pub const SCHEMA_VERSION: u32 = 1;

pub const UNITS_NOTE: &str =
    "rates, fractions, taxes and probabilities are decimal fractions per period; principal and volumes are currency units";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rates {
    pub i_i: f64,
    pub i_b: f64,
    pub i_f: f64,
    pub i_s: f64,
    pub i_spv: f64,
    pub i_lc: f64,
    pub i_m: f64,
    pub i_ms: f64,
    pub i_ts: f64,
    pub i_l: f64,
    pub i_ls: f64,
    pub i_rc: f64,
    pub i_ci: f64,
    pub i_cs: f64,
    pub i_dr: f64,
    pub i_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fractions {
    pub s: f64,
    pub s_s: f64,
    pub s_i: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Taxes {
    pub t_ts: f64,
    pub t_a: f64,
    pub t_ls: f64,
    pub t_o: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probabilities {
    pub psi_bbs: f64,
    pub psi_bsa: f64,
    pub psi_bbi: f64,
    pub psi_bai: f64,
    pub psi_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Volumes {
    pub v_s: f64,
    pub v_d: f64,
    pub v_f: f64,
}

/// Present value of projected future profits, as rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FutureGains {
    pub unsec: f64,
    pub sec: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// Penalty only when the chosen alternative is not the best one.
    #[default]
    Conditional,
    /// Penalty as the bare formula, regardless of the choice made.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferFormat {
    #[default]
    TrueSale,
    Assignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormatInputs {
    pub chosen: TransferFormat,
    pub value_true_sale: f64,
    pub value_assignment: f64,
    #[serde(default)]
    pub penalty_mode: PenaltyMode,
}

impl Default for FormatInputs {
    fn default() -> Self {
        Self {
            chosen: TransferFormat::TrueSale,
            value_true_sale: 0.0,
            value_assignment: 0.0,
            penalty_mode: PenaltyMode::Conditional,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpvForm {
    #[default]
    Llc,
    Llp,
    CCorp,
    Trust,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpvFormInputs {
    pub chosen: SpvForm,
    pub value_optimal: f64,
    pub value_llc: f64,
    pub value_llp: f64,
    pub value_c_corp: f64,
    pub value_trust: f64,
    #[serde(default)]
    pub penalty_mode: PenaltyMode,
}

impl SpvFormInputs {
    pub fn value_of(&self, form: SpvForm) -> f64 {
        match form {
            SpvForm::Llc => self.value_llc,
            SpvForm::Llp => self.value_llp,
            SpvForm::CCorp => self.value_c_corp,
            SpvForm::Trust => self.value_trust,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdverseSelectionInputs {
    /// Aggregate replacement-collateral value as a fraction of the pool.
    pub c_a_total: f64,
    /// Probability of impaired collateral.
    pub p_i: f64,
    /// Probability the servicer offers medium/low quality replacement collateral.
    pub p_a: f64,
    #[serde(default = "default_steps")]
    pub steps: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_value: Option<f64>,
}

fn default_steps() -> u32 {
    1
}

impl Default for AdverseSelectionInputs {
    fn default() -> Self {
        Self {
            c_a_total: 0.0,
            p_i: 0.0,
            p_a: 0.0,
            steps: 1,
            direct_value: None,
        }
    }
}

/// Opt-in reinterpretations of ambiguous symbols. Everything is off by default,
/// so the formulas read exactly as written.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AliasMap {
    /// Replaces the standalone `I_f` in the retained-loan bracket
    /// `I_i - I_lc - I_f - Max(I_f, I_b)` (e.g. with `i_l`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retained_funding: Option<Field>,
    /// Reads `I_is` from a scenario field (e.g. `i_ls`) instead of requiring it
    /// as an exogenous level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_is: Option<Field>,
    /// Reads `I_c` from another scenario field (e.g. `i_lc`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_c: Option<Field>,
}

impl AliasMap {
    pub fn is_empty(&self) -> bool {
        self.retained_funding.is_none() && self.i_is.is_none() && self.i_c.is_none()
    }
}

/// A full scenario. Constructed from a document by [`parse_scenario`] or built
/// programmatically and checked with [`Scenario::validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    pub rates: Rates,
    pub principal: f64,
    pub fractions: Fractions,
    pub taxes: Taxes,
    pub probabilities: Probabilities,
    pub volumes: Volumes,
    pub future_gains: FutureGains,
    #[serde(default)]
    pub format_choice: FormatInputs,
    #[serde(default)]
    pub spv_form: SpvFormInputs,
    #[serde(default)]
    pub adverse: AdverseSelectionInputs,
    pub horizon_t: f64,
    /// Exogenous levels and derivatives keyed by canonical quantity name.
    #[serde(default)]
    pub exo_derivatives: BTreeMap<String, f64>,
    #[serde(default)]
    pub response_models: Vec<ResponseModel>,
    #[serde(default, skip_serializing_if = "AliasMap::is_empty")]
    pub alias_map: AliasMap,
}

/// Every numeric scalar of a [`Scenario`] that can be read by name or bumped
/// for differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Ii,
    Ib,
    If,
    Is,
    Ispv,
    Ilc,
    Im,
    Ims,
    Its,
    Il,
    Ils,
    Irc,
    Ici,
    Ics,
    Idr,
    Ic,
    Principal,
    S,
    Ss,
    Si,
    Tts,
    Ta,
    Tls,
    To,
    PsiBbs,
    PsiBsa,
    PsiBbi,
    PsiBai,
    PsiS,
    Vs,
    Vd,
    Vf,
    GainsUnsec,
    GainsSec,
    Horizon,
}

impl Field {
    pub const ALL: [Field; 35] = [
        Field::Ii,
        Field::Ib,
        Field::If,
        Field::Is,
        Field::Ispv,
        Field::Ilc,
        Field::Im,
        Field::Ims,
        Field::Its,
        Field::Il,
        Field::Ils,
        Field::Irc,
        Field::Ici,
        Field::Ics,
        Field::Idr,
        Field::Ic,
        Field::Principal,
        Field::S,
        Field::Ss,
        Field::Si,
        Field::Tts,
        Field::Ta,
        Field::Tls,
        Field::To,
        Field::PsiBbs,
        Field::PsiBsa,
        Field::PsiBbi,
        Field::PsiBai,
        Field::PsiS,
        Field::Vs,
        Field::Vd,
        Field::Vf,
        Field::GainsUnsec,
        Field::GainsSec,
        Field::Horizon,
    ];

    /// Flat key used in required-input lists and alias maps.
    pub fn key(self) -> &'static str {
        self.info().0
    }

    /// Symbol name used in the derivative grammar.
    pub fn symbol(self) -> &'static str {
        self.info().1
    }

    /// Dotted location inside the scenario document.
    pub fn path(self) -> &'static str {
        self.info().2
    }

    fn info(self) -> (&'static str, &'static str, &'static str) {
        match self {
            Field::Ii => ("i_i", "I_i", "rates.i_i"),
            Field::Ib => ("i_b", "I_b", "rates.i_b"),
            Field::If => ("i_f", "I_f", "rates.i_f"),
            Field::Is => ("i_s", "I_s", "rates.i_s"),
            Field::Ispv => ("i_spv", "I_spv", "rates.i_spv"),
            Field::Ilc => ("i_lc", "I_lc", "rates.i_lc"),
            Field::Im => ("i_m", "I_m", "rates.i_m"),
            Field::Ims => ("i_ms", "I_ms", "rates.i_ms"),
            Field::Its => ("i_ts", "I_ts", "rates.i_ts"),
            Field::Il => ("i_l", "I_l", "rates.i_l"),
            Field::Ils => ("i_ls", "I_ls", "rates.i_ls"),
            Field::Irc => ("i_rc", "I_rc", "rates.i_rc"),
            Field::Ici => ("i_ci", "I_ci", "rates.i_ci"),
            Field::Ics => ("i_cs", "I_cs", "rates.i_cs"),
            Field::Idr => ("i_dr", "I_dr", "rates.i_dr"),
            Field::Ic => ("i_c", "I_c", "rates.i_c"),
            Field::Principal => ("p", "P", "principal"),
            Field::S => ("s", "S", "fractions.s"),
            Field::Ss => ("s_s", "S_s", "fractions.s_s"),
            Field::Si => ("s_i", "S_i", "fractions.s_i"),
            Field::Tts => ("t_ts", "T_ts", "taxes.t_ts"),
            Field::Ta => ("t_a", "T_a", "taxes.t_a"),
            Field::Tls => ("t_ls", "T_ls", "taxes.t_ls"),
            Field::To => ("t_o", "T_o", "taxes.t_o"),
            Field::PsiBbs => ("psi_bbs", "Psi_bbs", "probabilities.psi_bbs"),
            Field::PsiBsa => ("psi_bsa", "Psi_bsa", "probabilities.psi_bsa"),
            Field::PsiBbi => ("psi_bbi", "Psi_bbi", "probabilities.psi_bbi"),
            Field::PsiBai => ("psi_bai", "Psi_bai", "probabilities.psi_bai"),
            Field::PsiS => ("psi_s", "Psi_s", "probabilities.psi_s"),
            Field::Vs => ("v_s", "V_s", "volumes.v_s"),
            Field::Vd => ("v_d", "V_d", "volumes.v_d"),
            Field::Vf => ("v_f", "V_f", "volumes.v_f"),
            Field::GainsUnsec => ("future_gains_unsec", "I_gf", "future_gains.unsec"),
            Field::GainsSec => ("future_gains_sec", "I_gsf", "future_gains.sec"),
            Field::Horizon => ("horizon_t", "t", "horizon_t"),
        }
    }

    pub fn from_key(key: &str) -> Option<Field> {
        Field::ALL.iter().copied().find(|f| f.key() == key)
    }

    /// Case-insensitive lookup by grammar symbol.
    pub fn from_symbol(symbol: &str) -> Option<Field> {
        Field::ALL
            .iter()
            .copied()
            .find(|f| f.symbol().eq_ignore_ascii_case(symbol))
    }

    pub fn is_rate(self) -> bool {
        (self as usize) <= (Field::Ic as usize)
    }

    /// Economy-wide volumes enter no bank-level formula; derivatives with
    /// respect to them are market relationships, hence exogenous.
    pub fn is_economy_volume(self) -> bool {
        matches!(self, Field::Vs | Field::Vd | Field::Vf)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.key())
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let key = String::deserialize(d)?;
        Field::from_key(&key).ok_or_else(|| serde::de::Error::custom(format!("unknown scenario field `{key}`")))
    }
}

impl Scenario {
    pub fn get(&self, field: Field) -> f64 {
        let r = &self.rates;
        match field {
            Field::Ii => r.i_i,
            Field::Ib => r.i_b,
            Field::If => r.i_f,
            Field::Is => r.i_s,
            Field::Ispv => r.i_spv,
            Field::Ilc => r.i_lc,
            Field::Im => r.i_m,
            Field::Ims => r.i_ms,
            Field::Its => r.i_ts,
            Field::Il => r.i_l,
            Field::Ils => r.i_ls,
            Field::Irc => r.i_rc,
            Field::Ici => r.i_ci,
            Field::Ics => r.i_cs,
            Field::Idr => r.i_dr,
            Field::Ic => r.i_c,
            Field::Principal => self.principal,
            Field::S => self.fractions.s,
            Field::Ss => self.fractions.s_s,
            Field::Si => self.fractions.s_i,
            Field::Tts => self.taxes.t_ts,
            Field::Ta => self.taxes.t_a,
            Field::Tls => self.taxes.t_ls,
            Field::To => self.taxes.t_o,
            Field::PsiBbs => self.probabilities.psi_bbs,
            Field::PsiBsa => self.probabilities.psi_bsa,
            Field::PsiBbi => self.probabilities.psi_bbi,
            Field::PsiBai => self.probabilities.psi_bai,
            Field::PsiS => self.probabilities.psi_s,
            Field::Vs => self.volumes.v_s,
            Field::Vd => self.volumes.v_d,
            Field::Vf => self.volumes.v_f,
            Field::GainsUnsec => self.future_gains.unsec,
            Field::GainsSec => self.future_gains.sec,
            Field::Horizon => self.horizon_t,
        }
    }

    pub fn set(&mut self, field: Field, value: f64) {
        let slot = self.slot_mut(field);
        *slot = value;
    }

    fn slot_mut(&mut self, field: Field) -> &mut f64 {
        let r = &mut self.rates;
        match field {
            Field::Ii => &mut r.i_i,
            Field::Ib => &mut r.i_b,
            Field::If => &mut r.i_f,
            Field::Is => &mut r.i_s,
            Field::Ispv => &mut r.i_spv,
            Field::Ilc => &mut r.i_lc,
            Field::Im => &mut r.i_m,
            Field::Ims => &mut r.i_ms,
            Field::Its => &mut r.i_ts,
            Field::Il => &mut r.i_l,
            Field::Ils => &mut r.i_ls,
            Field::Irc => &mut r.i_rc,
            Field::Ici => &mut r.i_ci,
            Field::Ics => &mut r.i_cs,
            Field::Idr => &mut r.i_dr,
            Field::Ic => &mut r.i_c,
            Field::Principal => &mut self.principal,
            Field::S => &mut self.fractions.s,
            Field::Ss => &mut self.fractions.s_s,
            Field::Si => &mut self.fractions.s_i,
            Field::Tts => &mut self.taxes.t_ts,
            Field::Ta => &mut self.taxes.t_a,
            Field::Tls => &mut self.taxes.t_ls,
            Field::To => &mut self.taxes.t_o,
            Field::PsiBbs => &mut self.probabilities.psi_bbs,
            Field::PsiBsa => &mut self.probabilities.psi_bsa,
            Field::PsiBbi => &mut self.probabilities.psi_bbi,
            Field::PsiBai => &mut self.probabilities.psi_bai,
            Field::PsiS => &mut self.probabilities.psi_s,
            Field::Vs => &mut self.volumes.v_s,
            Field::Vd => &mut self.volumes.v_d,
            Field::Vf => &mut self.volumes.v_f,
            Field::GainsUnsec => &mut self.future_gains.unsec,
            Field::GainsSec => &mut self.future_gains.sec,
            Field::Horizon => &mut self.horizon_t,
        }
    }

    /// Every numeric field zero, except the principal and horizon which must be positive.
    pub fn zeroed() -> Self {
        Scenario {
            schema_version: SCHEMA_VERSION,
            units: None,
            rates: Rates {
                i_i: 0.0,
                i_b: 0.0,
                i_f: 0.0,
                i_s: 0.0,
                i_spv: 0.0,
                i_lc: 0.0,
                i_m: 0.0,
                i_ms: 0.0,
                i_ts: 0.0,
                i_l: 0.0,
                i_ls: 0.0,
                i_rc: 0.0,
                i_ci: 0.0,
                i_cs: 0.0,
                i_dr: 0.0,
                i_c: 0.0,
            },
            principal: 1.0,
            fractions: Fractions {
                s: 0.0,
                s_s: 0.0,
                s_i: 0.0,
            },
            taxes: Taxes {
                t_ts: 0.0,
                t_a: 0.0,
                t_ls: 0.0,
                t_o: 0.0,
            },
            probabilities: Probabilities {
                psi_bbs: 0.0,
                psi_bsa: 0.0,
                psi_bbi: 0.0,
                psi_bai: 0.0,
                psi_s: 0.0,
            },
            volumes: Volumes {
                v_s: 0.0,
                v_d: 0.0,
                v_f: 0.0,
            },
            future_gains: FutureGains { unsec: 0.0, sec: 0.0 },
            format_choice: FormatInputs::default(),
            spv_form: SpvFormInputs::default(),
            adverse: AdverseSelectionInputs::default(),
            horizon_t: 1.0,
            exo_derivatives: BTreeMap::new(),
            response_models: Vec::new(),
            alias_map: AliasMap::default(),
        }
    }

    /// Check every invariant, collecting all violations.
    pub fn validate(&self) -> Result<(), ValidationErrors> {
        let mut errs = ValidationErrors::default();
        if self.schema_version != SCHEMA_VERSION {
            errs.push(ValidationError::range(
                "schema_version",
                format!(
                    "unsupported schema version {} (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        for field in Field::ALL {
            let v = self.get(field);
            let path = field.path();
            if !check_finite(&mut errs, path, v) {
                continue;
            }
            match field {
                Field::Principal | Field::Horizon if v <= 0.0 => errs.push(ValidationError::range(path, "must be > 0")),
                Field::S | Field::Ss if !(0.0..=1.0).contains(&v) => {
                    errs.push(ValidationError::range(path, "must be in [0,1]"))
                }
                Field::Tts | Field::Ta | Field::Tls | Field::To if !(0.0..1.0).contains(&v) => {
                    errs.push(ValidationError::range(path, "must be in [0,1)"))
                }
                Field::PsiBbs | Field::PsiBsa | Field::PsiBbi | Field::PsiBai | Field::PsiS
                    if !(0.0..=1.0).contains(&v) =>
                {
                    errs.push(ValidationError::range(path, "must be in [0,1]"))
                }
                Field::Vs | Field::Vd | Field::Vf if v < 0.0 => errs.push(ValidationError::range(path, "must be >= 0")),
                _ => {}
            }
        }

        let f = &self.format_choice;
        check_finite(&mut errs, "format_choice.value_true_sale", f.value_true_sale);
        check_finite(&mut errs, "format_choice.value_assignment", f.value_assignment);

        let e = &self.spv_form;
        for (name, v) in [
            ("value_optimal", e.value_optimal),
            ("value_llc", e.value_llc),
            ("value_llp", e.value_llp),
            ("value_c_corp", e.value_c_corp),
            ("value_trust", e.value_trust),
        ] {
            check_finite(&mut errs, &format!("spv_form.{name}"), v);
        }

        let a = &self.adverse;
        check_finite(&mut errs, "adverse.c_a_total", a.c_a_total);
        for (name, v) in [("p_i", a.p_i), ("p_a", a.p_a)] {
            let path = format!("adverse.{name}");
            if check_finite(&mut errs, &path, v) && !(0.0..=1.0).contains(&v) {
                errs.push(ValidationError::range(path, "must be in [0,1]"));
            }
        }
        if a.steps == 0 {
            errs.push(ValidationError::range("adverse.steps", "must be >= 1"));
        }
        if let Some(d) = a.direct_value {
            check_finite(&mut errs, "adverse.direct_value", d);
        }

        for (key, value) in &self.exo_derivatives {
            let path = format!("exo_derivatives.{key}");
            match QuantityName::parse(key) {
                Err(e) => errs.push(e.at(&path)),
                Ok(name) => {
                    if name.to_string() != *key {
                        errs.push(ValidationError::new(
                            &path,
                            crate::error::ErrorKind::DerivativeName,
                            format!("name is not in canonical form (expected `{name}`)"),
                        ));
                    } else if let Err(msg) = name.check_suppliable() {
                        errs.push(ValidationError::new(
                            &path,
                            crate::error::ErrorKind::DerivativeName,
                            msg,
                        ));
                    }
                }
            }
            check_finite(&mut errs, &path, *value);
        }

        for (i, model) in self.response_models.iter().enumerate() {
            errs.extend(model.validate().prefixed(&format!("response_models[{i}]")));
        }

        for (slot, field) in [
            ("retained_funding", self.alias_map.retained_funding),
            ("i_is", self.alias_map.i_is),
            ("i_c", self.alias_map.i_c),
        ] {
            if let Some(field) = field {
                if !field.is_rate() {
                    errs.push(ValidationError::range(
                        format!("alias_map.{slot}"),
                        format!("`{field}` is not a rate field"),
                    ));
                }
            }
        }
        errs.into_result()
    }

    /// Value of a grammar symbol at this scenario: scenario fields, the two
    /// profit formulas, and differences of two fields (`Psi_bbs-Psi_bsa`).
    pub fn symbol_value(&self, symbol: &Symbol) -> Option<f64> {
        match symbol {
            Symbol::Plain(name) => {
                if let Some(f) = Field::from_symbol(name) {
                    return Some(self.get(f));
                }
                match name.as_str() {
                    "I_g" => Some(crate::model::profit_unsecuritized(self)),
                    "I_gs" => Some(crate::model::profit_securitized(self)),
                    _ => None,
                }
            }
            Symbol::Difference(a, b) => {
                let a = self.symbol_value(&Symbol::Plain(a.clone()))?;
                let b = self.symbol_value(&Symbol::Plain(b.clone()))?;
                Some(a - b)
            }
        }
    }
}

/// Parse and validate a scenario document. Exogenous quantity names are
/// canonicalized before validation; every invariant violation is reported.
pub fn parse_scenario(text: &str) -> Result<Scenario, ValidationErrors> {
    let value = parse_json_text(text)?;
    scenario_from_value(value)
}

pub fn scenario_from_value(value: serde_json::Value) -> Result<Scenario, ValidationErrors> {
    let mut scenario: Scenario = from_json_value(value)?;
    let mut errs = ValidationErrors::default();
    let mut canonical = BTreeMap::new();
    for (key, v) in std::mem::take(&mut scenario.exo_derivatives) {
        match QuantityName::parse(&key) {
            Ok(name) => {
                let c = name.to_string();
                if canonical.insert(c.clone(), v).is_some() {
                    errs.push(ValidationError::new(
                        format!("exo_derivatives.{key}"),
                        crate::error::ErrorKind::DerivativeName,
                        format!("duplicates another entry once canonicalized as `{c}`"),
                    ));
                }
            }
            Err(e) => errs.push(e.at(&format!("exo_derivatives.{key}"))),
        }
    }
    scenario.exo_derivatives = canonical;
    if let Err(e) = scenario.validate() {
        errs.extend(e);
    }
    errs.into_result().map(|_| scenario)
}

pub fn serialize_scenario(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario).expect("scenario serializes")
}

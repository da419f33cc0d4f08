#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use secdec_core::conditions::catalog;
use secdec_core::names::QuantityName;
use secdec_core::scenario::{AliasMap, Field, PenaltyMode, Scenario, SpvForm, TransferFormat};
use secdec_core::sensitivity::{ModelForm, ResponseModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every exogenous name the catalog can ask for.
pub fn exogenous_names() -> Vec<String> {
    let mut names: Vec<String> = catalog()
        .iter()
        .flat_map(|e| e.required_inputs.iter().cloned())
        .filter(|n| Field::from_key(n).is_none())
        .filter(|n| {
            QuantityName::parse(n)
                .map(|q| q.check_suppliable().is_ok())
                .unwrap_or(false)
        })
        .collect();
    names.sort();
    names.dedup();
    names
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    // Endpoints show up often enough to exercise ties and boundaries.
    match rng.gen_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen_range(0.0..=1.0),
    }
}

pub fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let mut s = Scenario::zeroed();
    for field in Field::ALL {
        let v = match field {
            Field::Principal => rng.gen_range(1.0..1e9),
            Field::Horizon => rng.gen_range(0.01..10.0),
            Field::S | Field::Ss | Field::Si => unit(rng),
            Field::Tts | Field::Ta | Field::Tls | Field::To => rng.gen_range(0.0..0.5),
            Field::PsiBbs | Field::PsiBsa | Field::PsiBbi | Field::PsiBai | Field::PsiS => unit(rng),
            Field::Vs | Field::Vd | Field::Vf => rng.gen_range(0.0..1e9),
            f if f.is_rate() => rng.gen_range(-0.05..0.25),
            _ => rng.gen_range(-0.02..0.02),
        };
        s.set(field, v);
    }
    s.format_choice.chosen = if rng.gen_bool(0.5) {
        TransferFormat::TrueSale
    } else {
        TransferFormat::Assignment
    };
    s.format_choice.value_true_sale = rng.gen_range(0.0..0.03);
    s.format_choice.value_assignment = rng.gen_range(0.0..0.03);
    s.format_choice.penalty_mode = if rng.gen_bool(0.8) {
        PenaltyMode::Conditional
    } else {
        PenaltyMode::Literal
    };
    s.spv_form.chosen = [SpvForm::Llc, SpvForm::Llp, SpvForm::CCorp, SpvForm::Trust][rng.gen_range(0..4)];
    s.spv_form.value_llc = rng.gen_range(0.0..0.03);
    s.spv_form.value_llp = rng.gen_range(0.0..0.03);
    s.spv_form.value_c_corp = rng.gen_range(0.0..0.03);
    s.spv_form.value_trust = rng.gen_range(0.0..0.03);
    s.spv_form.value_optimal = s
        .spv_form
        .value_llc
        .max(s.spv_form.value_llp)
        .max(s.spv_form.value_c_corp)
        .max(s.spv_form.value_trust);
    s.spv_form.penalty_mode = if rng.gen_bool(0.8) {
        PenaltyMode::Conditional
    } else {
        PenaltyMode::Literal
    };
    s.adverse.c_a_total = rng.gen_range(0.0..0.05);
    s.adverse.p_i = unit(rng);
    s.adverse.p_a = unit(rng);
    s.adverse.steps = rng.gen_range(1..20);
    if rng.gen_bool(0.1) {
        s.adverse.direct_value = Some(rng.gen_range(0.0..0.01));
    }
    let names = exogenous_names();
    for name in &names {
        if rng.gen_bool(0.5) {
            s.exo_derivatives.insert(name.clone(), rng.gen_range(-2.0..2.0));
        }
    }
    if rng.gen_bool(0.2) {
        s.response_models.push(ResponseModel {
            dependent: "I_spv".into(),
            independents: vec!["V_s".into()],
            form: ModelForm::Linear {
                intercept: rng.gen_range(0.0..0.1),
                slopes: BTreeMap::from([("V_s".to_string(), rng.gen_range(-1e-9..1e-9))]),
            },
        });
    }
    if rng.gen_bool(0.1) {
        s.alias_map = AliasMap {
            retained_funding: Some(Field::Il),
            i_is: Some(Field::Ils),
            i_c: None,
        };
    }
    s
}

/// A random scenario with every exogenous input the catalog needs supplied.
pub fn complete_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let mut s = random_scenario(rng);
    for name in exogenous_names() {
        let v = rng.gen_range(-2.0..2.0);
        s.exo_derivatives.entry(name).or_insert(v);
    }
    s
}

//! Profit formulas with and without securitization, and the three penalty
//! terms (transfer format, SPV organizational form, adverse selection).
//!
//! Every term is a fraction of principal; multiply by the principal with
//! [`to_currency`] for dollar amounts.

use crate::scenario::{
    AdverseSelectionInputs, FormatInputs, PenaltyMode, Scenario, SpvForm, SpvFormInputs, TransferFormat,
};

pub fn residual_rate(i_i: f64, i_s: f64) -> f64 {
    i_i - i_s
}

pub fn to_currency(rate: f64, principal: f64) -> f64 {
    rate * principal
}

/// `I_c`, or the field the alias map points it at.
pub(crate) fn i_c(s: &Scenario) -> f64 {
    s.alias_map.i_c.map_or(s.rates.i_c, |f| s.get(f))
}

/// Standalone funding term of the retained-loan bracket (`I_f` as written).
pub(crate) fn retained_funding(s: &Scenario) -> f64 {
    s.alias_map.retained_funding.map_or(s.rates.i_f, |f| s.get(f))
}

pub(crate) fn funding_max(s: &Scenario) -> f64 {
    s.rates.i_f.max(s.rates.i_b)
}

/// `I_i - I_lc - I_f - Max(I_f, I_b)`: spread on the part of the loan kept on balance sheet.
pub(crate) fn retained_bracket(s: &Scenario) -> f64 {
    let r = &s.rates;
    r.i_i - r.i_lc - retained_funding(s) - funding_max(s)
}

/// Profit without securitization, `I_g`.
pub fn profit_unsecuritized(s: &Scenario) -> f64 {
    let r = &s.rates;
    (r.i_i - r.i_lc - retained_funding(s) - r.i_m - funding_max(s)) + s.future_gains.unsec
}

pub fn profit_unsecuritized_currency(s: &Scenario) -> f64 {
    to_currency(profit_unsecuritized(s), s.principal)
}

/// The bracketed objective: securitized spread, realized-as-new-loan spread,
/// retained spread and future gains, before any penalty.
pub fn securitization_objective(s: &Scenario) -> f64 {
    let r = &s.rates;
    let (sec, real) = (s.fractions.s, s.fractions.s_s);
    let securitized = (r.i_f - i_c(s) - r.i_ci - r.i_ms - r.i_ts) * sec * real;
    let realized = (1.0 - real) * sec * (r.i_i - r.i_lc - r.i_ts);
    let retained = (1.0 - sec) * retained_bracket(s);
    securitized + realized + retained + s.future_gains.sec
}

/// Profit with securitization, `I_gs`: the objective less all three penalties.
pub fn profit_securitized(s: &Scenario) -> f64 {
    securitization_objective(s)
        - format_penalty(&s.format_choice)
        - spv_form_penalty(&s.spv_form)
        - adverse_selection_value(&s.adverse, s.horizon_t)
}

pub fn profit_securitized_currency(s: &Scenario) -> f64 {
    to_currency(profit_securitized(s), s.principal)
}

/// Loss from using the wrong transfer format.
pub fn format_penalty(f: &FormatInputs) -> f64 {
    let gap = (f.value_true_sale - f.value_assignment).abs().max(0.0);
    match f.penalty_mode {
        PenaltyMode::Literal => gap,
        PenaltyMode::Conditional => {
            let best = if f.value_true_sale >= f.value_assignment {
                TransferFormat::TrueSale
            } else {
                TransferFormat::Assignment
            };
            // equal values: either choice is correct
            if f.chosen == best || f.value_true_sale == f.value_assignment {
                0.0
            } else {
                gap
            }
        }
    }
}

/// Loss from a sub-optimal SPV organizational form.
pub fn spv_form_penalty(e: &SpvFormInputs) -> f64 {
    match e.penalty_mode {
        PenaltyMode::Conditional => (e.value_optimal - e.value_of(e.chosen)).abs(),
        PenaltyMode::Literal => [SpvForm::Llc, SpvForm::Llp, SpvForm::CCorp, SpvForm::Trust]
            .iter()
            .map(|form| (e.value_optimal - e.value_of(*form)).abs())
            .fold(0.0, f64::max),
    }
}

/// Value of the adverse selection problem over `[0, horizon]`, as a
/// left-Riemann sum of the (constant) integrand `C_a * P_i * (1 - P_a)`.
pub fn adverse_selection_value(a: &AdverseSelectionInputs, horizon: f64) -> f64 {
    if let Some(v) = a.direct_value {
        return v;
    }
    let integrand = |_t: f64| a.c_a_total * a.p_i * (1.0 - a.p_a);
    let steps = a.steps.max(1);
    let dt = horizon / steps as f64;
    // Neumaier summation keeps the result independent of `steps` to rounding
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for k in 0..steps {
        let term = integrand(k as f64 * dt) * dt;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `I_spv - I_b`; investors become indifferent as this closes.
pub fn spread_convergence_gap(s: &Scenario) -> f64 {
    s.rates.i_spv - s.rates.i_b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{base_scenario, zero_scenario};
    use crate::scenario::Field;

    const TOL: f64 = 1e-12;

    #[test]
    fn residual_rate_examples() {
        assert!((residual_rate(0.08, 0.05) - 0.03).abs() < TOL);
        assert_eq!(residual_rate(0.0, 0.0), 0.0);
        for x in [-3.5, 0.0, 0.123, 1e6] {
            assert_eq!(residual_rate(x, x), 0.0);
        }
    }

    #[test]
    fn residual_plus_funding_recovers_borrower_rate() {
        for (a, b) in [(0.08, 0.05), (0.25, 0.125), (0.5, 0.25)] {
            assert_eq!(residual_rate(a, b) + b, a);
        }
    }

    #[test]
    fn unsecuritized_profit_examples() {
        let base = base_scenario();
        let oracle = 0.08 - 0.01 - 0.02 - 0.005 - 0.02_f64.max(0.03) + 0.002;
        assert!((profit_unsecuritized(&base) - oracle).abs() < TOL);
        assert!((profit_unsecuritized(&base) - 0.017).abs() < TOL);
        assert_eq!(profit_unsecuritized(&zero_scenario()), 0.0);

        let mut low_deposit = base.clone();
        low_deposit.rates.i_b = 0.01;
        let oracle = 0.08 - 0.01 - 0.02 - 0.005 - 0.02_f64.max(0.01) + 0.002;
        assert!((profit_unsecuritized(&low_deposit) - oracle).abs() < TOL);
        assert!((profit_unsecuritized(&low_deposit) - 0.027).abs() < TOL);
        assert!((profit_unsecuritized_currency(&base) - 17_000.0).abs() < 1e-6);
    }

    #[test]
    fn securitized_profit_examples() {
        let base = base_scenario();
        let oracle =
            (0.02 - 0.005 - 0.003 - 0.002 - 0.004) * 1.0 * 0.95 + 0.05 * 1.0 * (0.08 - 0.01 - 0.004) + 0.0 + 0.003
                - 0.0
                - 0.0
                - 0.001;
        assert!((profit_securitized(&base) - oracle).abs() < TOL);
        assert!((profit_securitized(&base) - 0.011).abs() < TOL);
        assert_eq!(profit_securitized(&zero_scenario()), 0.0);

        let mut retained = base.clone();
        retained.fractions.s = 0.0;
        assert!((profit_securitized(&retained) - 0.022).abs() < TOL);
    }

    #[test]
    fn format_penalty_modes() {
        let mut f = FormatInputs {
            chosen: TransferFormat::TrueSale,
            value_true_sale: 0.01,
            value_assignment: 0.004,
            penalty_mode: PenaltyMode::Conditional,
        };
        assert_eq!(format_penalty(&f), 0.0);
        f.chosen = TransferFormat::Assignment;
        assert!((format_penalty(&f) - 0.006).abs() < TOL);
        f.penalty_mode = PenaltyMode::Literal;
        for chosen in [TransferFormat::TrueSale, TransferFormat::Assignment] {
            f.chosen = chosen;
            assert!((format_penalty(&f) - 0.006).abs() < TOL);
        }
    }

    #[test]
    fn spv_penalty_modes() {
        let mut e = SpvFormInputs {
            chosen: SpvForm::Llc,
            value_optimal: 0.02,
            value_llc: 0.02,
            value_llp: 0.015,
            value_c_corp: 0.01,
            value_trust: 0.018,
            penalty_mode: PenaltyMode::Conditional,
        };
        assert_eq!(spv_form_penalty(&e), 0.0);
        e.chosen = SpvForm::CCorp;
        assert!((spv_form_penalty(&e) - 0.01).abs() < TOL);
        e.penalty_mode = PenaltyMode::Literal;
        assert!((spv_form_penalty(&e) - 0.01).abs() < TOL);
    }

    #[test]
    fn adverse_selection_examples() {
        let mut a = AdverseSelectionInputs {
            c_a_total: 0.02,
            p_i: 0.1,
            p_a: 0.5,
            steps: 1,
            direct_value: None,
        };
        for steps in [1, 2, 7, 100, 1000] {
            a.steps = steps;
            assert!((adverse_selection_value(&a, 1.0) - 0.001).abs() < TOL, "steps={steps}");
        }
        a.p_i = 0.0;
        assert_eq!(adverse_selection_value(&a, 1.0), 0.0);
        a.p_i = 0.1;
        a.p_a = 1.0;
        assert_eq!(adverse_selection_value(&a, 1.0), 0.0);
        a.direct_value = Some(0.25);
        assert_eq!(adverse_selection_value(&a, 3.0), 0.25);
    }

    #[test]
    fn spread_gap_examples() {
        let mut s = base_scenario();
        assert!((spread_convergence_gap(&s) - 0.02).abs() < TOL);
        s.rates.i_b = s.rates.i_spv;
        assert_eq!(spread_convergence_gap(&s), 0.0);
        s.rates.i_spv = 0.04;
        s.rates.i_b = 0.05;
        assert!((spread_convergence_gap(&s) + 0.01).abs() < TOL);
    }

    #[test]
    fn alias_map_rewires_terms() {
        let mut s = base_scenario();
        s.alias_map.retained_funding = Some(Field::Il);
        s.rates.i_l = 0.0;
        // funding term drops out of I_g: 0.017 + 0.02
        assert!((profit_unsecuritized(&s) - 0.037).abs() < TOL);
        let mut s = base_scenario();
        s.alias_map.i_c = Some(Field::Ilc);
        // securitized coefficient loses 0.005 more: 0.01 - 0.005 = 0.005 vs 0.01 before
        let delta = profit_securitized(&base_scenario()) - profit_securitized(&s);
        assert!((delta - 0.005 * 0.95).abs() < TOL);
    }

    #[test]
    fn profit_securitized_decreasing_in_costs() {
        let base = base_scenario();
        for field in [Field::Its, Field::Ims, Field::Ici] {
            let mut bumped = base.clone();
            bumped.set(field, base.get(field) + 0.001);
            assert!(profit_securitized(&bumped) < profit_securitized(&base), "{field}");
        }
        let mut more_adverse = base.clone();
        more_adverse.adverse.c_a_total *= 2.0;
        assert!(profit_securitized(&more_adverse) < profit_securitized(&base));
    }
}

use secdec_core::conditions::evaluate_all_conditions;
use secdec_core::fixtures::base_scenario;
use secdec_core::model::{adverse_selection_value, profit_securitized, profit_unsecuritized, spread_convergence_gap};
use secdec_core::names::QuantityName;
use secdec_core::sensitivity::{central_difference, evaluate_names, mixed_difference, SensitivityContext};

const TOL: f64 = 1e-12;

#[test]
fn base_profit_rates() {
    let s = base_scenario();
    let r = &s.rates;
    let i_g = r.i_i - r.i_lc - r.i_f - r.i_m - r.i_f.max(r.i_b) + s.future_gains.unsec;
    assert!((i_g - 0.017).abs() < TOL);
    assert!((profit_unsecuritized(&s) - i_g).abs() < TOL);

    let (sv, ss) = (s.fractions.s, s.fractions.s_s);
    let adverse: f64 = 0.02 * 0.1 * (1.0 - 0.5) * 1.0;
    assert!((adverse - 0.001).abs() < TOL);
    let i_gs = (r.i_f - r.i_c - r.i_ci - r.i_ms - r.i_ts) * sv * ss
        + (1.0 - ss) * sv * (r.i_i - r.i_lc - r.i_ts)
        + (1.0 - sv) * i_g
        + s.future_gains.sec
        - adverse;
    assert!((i_gs - 0.011).abs() < TOL);
    assert!((profit_securitized(&s) - i_gs).abs() < TOL);
    assert!((adverse_selection_value(&s.adverse, s.horizon_t) - adverse).abs() < TOL);
    assert!((spread_convergence_gap(&s) - (r.i_spv - r.i_b)).abs() < TOL);
    assert!((spread_convergence_gap(&s) - 0.02).abs() < TOL);
}

#[test]
fn base_condition_and_derivative_oracles() {
    let s = base_scenario();
    let report = evaluate_all_conditions(&s, &SensitivityContext::default()).unwrap();
    let c1 = report.get(1).unwrap().margin.unwrap();
    assert!((c1 - 0.02).abs() < TOL, "{c1}");

    // dI_gs/dI_ts = -(s s_s) - (1 - s_s) s
    let oracle: f64 = -(1.0 * 0.95) - (1.0 - 0.95) * 1.0;
    let names = [QuantityName::parse("d1(I_gs|I_ts)").unwrap()];
    let v = evaluate_names(&names, &s, &SensitivityContext::default());
    let d = v[0].value.unwrap();
    assert!((d - oracle).abs() < TOL, "{d}");
    assert!((d + 1.0).abs() < TOL, "{d}");
}

fn relative_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

#[test]
fn pure_stencils_are_exact_on_low_degree_polynomials() {
    // Exactness is a property of the stencil weights; dyadic steps keep
    // round-off out of the comparison.
    let xs = [-3.5, -1.0, 0.0, 0.25, 2.0, 17.0];
    for h in [1.0, 0.25, 0.0625] {
        for &x in &xs {
            // order 1 on degree 2
            let f = |t: f64| 3.0 * t * t - 2.0 * t + 5.0;
            let d = central_difference(f, x, 1, Some(h)).unwrap();
            assert!(relative_close(d, 6.0 * x - 2.0), "order 1 at {x}, h={h}: {d}");
            // order 2 on degree 3
            let f = |t: f64| 0.5 * t * t * t - t * t + 4.0;
            let d = central_difference(f, x, 2, Some(h)).unwrap();
            assert!(relative_close(d, 3.0 * x - 2.0), "order 2 at {x}, h={h}: {d}");
            // order 3 on degree 4: d3(t^4) = 24 t
            let f = |t: f64| t.powi(4) - 2.0 * t.powi(3) + t;
            let d = central_difference(f, x, 3, Some(h)).unwrap();
            assert!(relative_close(d, 24.0 * x - 12.0), "order 3 at {x}, h={h}: {d}");
        }
    }
    for &x in &xs {
        let f = |t: f64| 3.0 * t * t - 2.0 * t + 5.0;
        let d = central_difference(f, x, 1, None).unwrap();
        assert!(relative_close(d, 6.0 * x - 2.0), "order 1 at {x}: {d}");
    }
    let d = central_difference(|t: f64| t * t * t, 2.0, 3, None).unwrap();
    assert!((d - 6.0).abs() < 1e-9);
}

#[test]
fn cross_stencils_are_exact_on_multilinear_functions() {
    let f2 = |p: &[f64]| 2.0 * p[0] * p[1] + p[0] - 7.0 * p[1] + 1.0;
    let d = mixed_difference(f2, &[1.5, -2.0], &[0, 1], Some(0.25)).unwrap();
    assert!(relative_close(d, 2.0));
    let f3 = |p: &[f64]| p[0] * p[1] * p[2];
    let d = mixed_difference(f3, &[1.0, 2.0, 3.0], &[0, 1, 2], None).unwrap();
    assert!(relative_close(d, 1.0));
    assert!((d - 1.0).abs() < 1e-9);
}

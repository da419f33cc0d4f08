//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;
mod support;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng;
use secdec_core::conditions::{evaluate_all_conditions, evaluate_all_unchecked, ConditionReport};
use secdec_core::decision::{decision_indicator, DecisionModel, IndeterminatePolicy};
use secdec_core::fixtures::{base_scenario, constant_market, example_market};
use secdec_core::model::{adverse_selection_value, profit_securitized, profit_unsecuritized, spread_convergence_gap};
use secdec_core::names::QuantityName;
use secdec_core::optimizer::{maximize_securitization_profit, Method, OptimizationConfig};
use secdec_core::outcome::Status;
use secdec_core::scenario::{parse_scenario, serialize_scenario};
use secdec_core::sensitivity::{central_difference, evaluate_names, mixed_difference, SensitivityContext};
use secdec_core::volume::feasible_volume_intervals;
use secdec_core::CONDITION_COUNT;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type PolynomialCase = (usize, fn(f64) -> f64, f64);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

fn close(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want} (tol {tol:e})"))
    }
}

fn fixture_oracle() -> Outcome {
    const TOL: f64 = 1e-12;
    let s = base_scenario();
    let r = &s.rates;
    // Hand oracles from the fixture's numbers.
    let i_g: f64 = 0.08 - 0.01 - 0.02 - 0.005 - 0.03 + 0.002;
    let adverse: f64 = 0.02 * 0.1 * (1.0 - 0.5) * 1.0;
    let i_gs: f64 = (0.02 - 0.005 - 0.003 - 0.002 - 0.004) * 1.0 * 0.95
        + (1.0 - 0.95) * 1.0 * (0.08 - 0.01 - 0.004)
        + 0.0 * i_g
        + 0.003
        - adverse;
    let gap: f64 = 0.05 - 0.03;
    let c1: f64 = (0.08_f64 - 0.05).min(0.05 - 0.03);
    let d_ts: f64 = -(1.0 * 0.95) - (1.0 - 0.95) * 1.0;
    for (label, want, hand) in [
        ("i_g", 0.017, i_g),
        ("i_gs", 0.011, i_gs),
        ("A", 0.001, adverse),
        ("spread gap", 0.02, gap),
        ("C1 margin", 0.02, c1),
        ("d1(I_gs|I_ts)", -1.0, d_ts),
    ] {
        close(&format!("hand {label}"), hand, want, TOL)?;
    }
    close("i_g", profit_unsecuritized(&s), i_g, TOL)?;
    close("i_gs", profit_securitized(&s), i_gs, TOL)?;
    close("A", adverse_selection_value(&s.adverse, s.horizon_t), adverse, TOL)?;
    close("spread gap", spread_convergence_gap(&s), gap, TOL)?;
    ensure!(r.i_spv - r.i_b == spread_convergence_gap(&s), "gap is not I_spv - I_b");
    let report = evaluate_all_conditions(&s, &SensitivityContext::default()).map_err(|e| e.to_string())?;
    let m = report.get(1).and_then(|c| c.margin).ok_or("C1 has no margin")?;
    close("C1 margin", m, c1, TOL)?;
    let names = [QuantityName::parse("d1(I_gs|I_ts)").map_err(|e| e.to_string())?];
    let d = evaluate_names(&names, &s, &SensitivityContext::default())[0]
        .value
        .ok_or("d1(I_gs|I_ts) unresolved")?;
    close("d1(I_gs|I_ts)", d, d_ts, TOL)?;
    Ok("6 values within 1e-12".into())
}

fn coherent(report: &ConditionReport) -> Result<(), String> {
    ensure!(
        report.results.len() == CONDITION_COUNT,
        "{} results",
        report.results.len()
    );
    for r in &report.results {
        match (r.status, r.margin) {
            (Status::Indeterminate, None) => ensure!(!r.missing_inputs.is_empty(), "C{} lists nothing missing", r.id),
            (Status::Satisfied, Some(m)) => ensure!(m.is_finite() && m >= 0.0, "C{} satisfied at {m}", r.id),
            (Status::Violated, Some(m)) => ensure!(m.is_finite() && m <= 0.0, "C{} violated at {m}", r.id),
            (st, m) => return Err(format!("C{}: {st:?} with margin {m:?}", r.id)),
        }
    }
    Ok(())
}

fn condition_totality() -> Outcome {
    let mut rng = common::rng(0xacc0_0002);
    let ctx = SensitivityContext::default();
    let mut counts = [0usize; 3];
    for i in 0..10_000 {
        let s = common::random_scenario(&mut rng);
        let report = evaluate_all_conditions(&s, &ctx).map_err(|e| format!("scenario {i}: {e}"))?;
        coherent(&report).map_err(|e| format!("scenario {i}: {e}"))?;
        counts[0] += report.count(Status::Satisfied);
        counts[1] += report.count(Status::Violated);
        counts[2] += report.count(Status::Indeterminate);
    }
    Ok(format!(
        "10000 scenarios, {} satisfied / {} violated / {} indeterminate",
        counts[0], counts[1], counts[2]
    ))
}

fn finite_difference_exactness() -> Outcome {
    let rel = |got: f64, want: f64| (got - want).abs() <= 1e-9 * want.abs().max(1.0);
    let mut checked = 0;
    for h in [1.0, 0.25, 0.0625] {
        for x in [-3.5, -1.0, 0.0, 0.25, 2.0, 17.0] {
            let cases: [PolynomialCase; 3] = [
                (1, |t| 3.0 * t * t - 2.0 * t + 5.0, 6.0 * x - 2.0),
                (2, |t| 0.5 * t * t * t - t * t + 4.0, 3.0 * x - 2.0),
                (3, |t| t.powi(4) - 2.0 * t.powi(3) + t, 24.0 * x - 12.0),
            ];
            for (order, f, want) in cases {
                let got = central_difference(f, x, order, Some(h)).map_err(|e| e.to_string())?;
                ensure!(rel(got, want), "order {order} at x={x}, h={h}: {got} vs {want}");
                checked += 1;
            }
        }
    }
    let got = central_difference(|t: f64| t * t * t, 2.0, 3, None).map_err(|e| e.to_string())?;
    ensure!(rel(got, 6.0), "x^3 third derivative {got}");
    let got = mixed_difference(|p: &[f64]| p[0] * p[1] * p[2], &[1.0, 2.0, 3.0], &[0, 1, 2], None)
        .map_err(|e| e.to_string())?;
    ensure!(rel(got, 1.0), "xyz third mixed {got}");
    let got = mixed_difference(|p: &[f64]| 2.0 * p[0] * p[1] + p[0], &[1.5, -2.0], &[0, 1], None)
        .map_err(|e| e.to_string())?;
    ensure!(rel(got, 2.0), "2xy mixed {got}");
    Ok(format!("{} polynomial checks within 1e-9", checked + 3))
}

fn optimizer_equivalence() -> Outcome {
    let mut rng = common::rng(0xacc0_0004);
    let grid = OptimizationConfig {
        corner_check: false,
        ..OptimizationConfig::default()
    };
    let corner = OptimizationConfig {
        engine: Method::Corner,
        corner_check: false,
        ..OptimizationConfig::default()
    };
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let s = common::random_scenario(&mut rng);
        let g = maximize_securitization_profit(&s, &grid).map_err(|e| e.to_string())?;
        let c = maximize_securitization_profit(&s, &corner).map_err(|e| e.to_string())?;
        ensure!(g.evaluations == 101 * 101, "grid used {} points", g.evaluations);
        let gap = (g.value - c.value).abs();
        ensure!(gap <= 1e-12, "scenario {i}: grid {} vs corner {}", g.value, c.value);
        worst = worst.max(gap);
    }
    Ok(format!("1000 scenarios, largest gap {worst:e}"))
}

fn volume_scan() -> Outcome {
    // Closed forms of the example market's conditions.
    let feasible = |v: f64| {
        let r_sn = 1.6 - 0.004 * 100.0 - 1e-5 * v * v;
        let r_ss = 0.5 + 0.1 * v.ln();
        v * 0.5 >= 0.5 * 100.0 && 100.0 > 0.5 * v && 5.0 >= 2.5 * r_sn + 2.5 * r_ss && 5.0 >= 5.0 * r_ss
    };
    let pts: Vec<f64> = (0..=15_000).map(|k| 50.0 + k as f64 * 0.01).collect();
    let ok: Vec<f64> = pts.iter().copied().filter(|&v| feasible(v)).collect();
    let (lo, hi) = (ok[0], ok[ok.len() - 1]);
    ensure!(
        ok.len() == ((hi - lo) / 0.01).round() as usize + 1,
        "brute scan found more than one interval"
    );
    let mp = example_market();
    let scan = feasible_volume_intervals(&mp, mp.scan.as_ref().ok_or("example market has no scan")?)
        .map_err(|e| e.to_string())?;
    ensure!(scan.intervals.len() == 1, "intervals {:?}", scan.intervals);
    let got = scan.intervals[0];
    close("lower endpoint", got.lo, lo, 0.1)?;
    close("upper endpoint", got.hi, hi, 0.1)?;
    close("lower endpoint vs 139.2", got.lo, 139.2, 0.1)?;
    close("upper endpoint vs 148.4", got.hi, 148.4, 0.1)?;
    let mp = constant_market();
    let empty = feasible_volume_intervals(&mp, mp.scan.as_ref().ok_or("constant market has no scan")?)
        .map_err(|e| e.to_string())?;
    ensure!(
        empty.intervals.is_empty(),
        "constant market intervals {:?}",
        empty.intervals
    );
    Ok(format!(
        "[{:.2}, {:.2}] vs brute [{lo:.2}, {hi:.2}]; constant market empty",
        got.lo, got.hi
    ))
}

fn decision_layer() -> Outcome {
    let base = evaluate_all_unchecked(&base_scenario(), &SensitivityContext::default());
    let with = |statuses: &[Status]| {
        let mut r = base.clone();
        for (res, st) in r.results.iter_mut().zip(statuses) {
            res.status = *st;
        }
        r
    };
    let mut worked = vec![Status::Satisfied; 20];
    worked.extend([Status::Violated; 6]);
    worked.extend([Status::Indeterminate; 3]);
    let mut model = DecisionModel::uniform();
    let x = decision_indicator(&with(&worked), &model);
    ensure!(x == 20.0 / 29.0, "score_zero indicator {x} != 20/29");
    model.indeterminate_policy = IndeterminatePolicy::ExcludeRenormalize;
    let y = decision_indicator(&with(&worked), &model);
    ensure!(y == 20.0 / 26.0, "exclude_renormalize indicator {y} != 20/26");

    let mut rng = common::rng(0xacc0_0006);
    for _ in 0..5000 {
        let raw: Vec<f64> = (0..CONDITION_COUNT).map(|_| rng.gen_range(0.0..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        let mut m = DecisionModel::uniform();
        m.weights = raw.iter().map(|w| w / sum).collect();
        m.validate().map_err(|e| e.to_string())?;
        let mut statuses: Vec<Status> = (0..CONDITION_COUNT)
            .map(|_| [Status::Satisfied, Status::Violated, Status::Indeterminate][rng.gen_range(0..3)])
            .collect();
        let before = decision_indicator(&with(&statuses), &m);
        ensure!((0.0..=1.0).contains(&before), "indicator {before}");
        if let Some(k) = statuses.iter().position(|s| *s == Status::Violated) {
            statuses[k] = Status::Satisfied;
            let after = decision_indicator(&with(&statuses), &m);
            ensure!(after >= before - 1e-15, "flip lowered indicator {before} -> {after}");
        }
    }
    Ok(format!(
        "20/29 -> {x}, 20/26 -> {y}; 5000 random weightings in range and monotone"
    ))
}

fn round_trip() -> Outcome {
    let mut rng = common::rng(0xacc0_0007);
    for i in 0..1000 {
        let s = common::random_scenario(&mut rng);
        let text = serialize_scenario(&s);
        let back = parse_scenario(&text).map_err(|e| format!("document {i}: {e}"))?;
        ensure!(back == s, "document {i} changed on round trip");
    }
    let mut endpoints = 0;
    for (args, method, path, body) in support::parity_cases() {
        let out = support::secdec(&args);
        ensure!(out.status.success(), "{args:?} exited {:?}", out.status.code());
        let (status, served) = support::service(method, path, &body);
        ensure!(status == 200, "{path} returned {status}");
        ensure!(support::stdout(&out) == served, "{path}: CLI and service bodies differ");
        endpoints += 1;
    }
    Ok(format!("1000 documents; CLI == service on {endpoints} endpoints"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("fixture oracle", fixture_oracle),
        ("condition totality", condition_totality),
        ("finite-difference exactness", finite_difference_exactness),
        ("optimizer equivalence", optimizer_equivalence),
        ("volume scan vs brute oracle", volume_scan),
        ("decision layer", decision_layer),
        ("round-trip and CLI/service parity", round_trip),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS  {name}  ({detail}; {secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}  ({why}; {secs:.1}s)");
            }
        }
    }
    println!(
        "acceptance: {} of 7 passed in {:.1}s",
        7 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

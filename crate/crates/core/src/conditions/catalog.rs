//! Definitions of conditions C1..C29. Every term is a fraction of principal.
//!
//! Clause closures evaluate all of their inputs before combining them, so a
//! single run on any scenario records the full set of names a condition reads.

use super::Eval;
use crate::outcome::{max_of, min_of, Relation, SubResult};
use crate::scenario::Field;

use Relation::{Gt, Lt};

pub const CONDITION_COUNT: usize = 29;

pub(crate) struct Definition {
    pub id: u32,
    pub rendering: &'static str,
    pub note: Option<&'static str>,
    pub clauses: fn(&Eval) -> Vec<SubResult>,
}

const C25_NOTE: &str =
    "the first inequality compares I_gs with itself and can never hold; its intended right-hand side is unknown";

/// `Max(I_f, I_b)`, reading `i_f` before `i_b`.
fn funding_max(e: &Eval) -> f64 {
    e.f(Field::If).max(e.f(Field::Ib))
}

/// Terms shared by C2/C3 (`tax` is `1 - Max(T_ts, T_a)`, or 1 pre-tax) and
/// C16/C17 (`sec_cost` differs).
struct Bracket {
    securitized: f64,
    realized: f64,
    retained: f64,
}

fn bracket(e: &Eval, include_ts_in_sec: bool, tax: f64) -> Bracket {
    let i_f = e.f(Field::If);
    let i_c = e.i_c();
    let sec_cost = if include_ts_in_sec {
        e.f(Field::Its)
    } else {
        e.f(Field::Ici) + e.f(Field::Ims)
    };
    let s = e.f(Field::S);
    let s_s = e.f(Field::Ss);
    let i_i = e.f(Field::Ii);
    let i_lc = e.f(Field::Ilc);
    let i_ts = e.f(Field::Its);
    let funding = e.retained_funding();
    let max = funding_max(e);
    Bracket {
        securitized: (i_f - i_c - sec_cost) * tax * s * s_s,
        realized: (1.0 - s_s) * tax * s * (i_i - i_lc - i_ts),
        retained: (1.0 - s) * tax * (i_i - i_lc - funding - max),
    }
}

/// C2 (after tax) and C3 (pre-tax): securitizing beats holding the loan.
fn securitize_vs_hold(e: &Eval, after_tax: bool) -> Vec<SubResult> {
    let (tax_sec, tax_hold) = if after_tax {
        let t_ts = e.f(Field::Tts);
        let t_a = e.f(Field::Ta);
        let t_o = e.f(Field::To);
        (1.0 - t_ts.max(t_a), 1.0 - t_ts.max(t_o))
    } else {
        (1.0, 1.0)
    };
    let b = bracket(e, false, tax_sec);
    let s_i = e.f(Field::Si);
    let gains = e.f(Field::GainsSec);
    let lhs = b.securitized + b.realized + b.retained + s_i + gains;

    let i_i = e.f(Field::Ii);
    let i_lc = e.f(Field::Ilc);
    let i_is = e.i_is();
    let max = funding_max(e);
    let i_m = e.f(Field::Im);
    let rhs = i_is.map(|i_is| (i_i - i_lc - i_is - max - i_m) * tax_hold);
    let text = if after_tax {
        "[(I_f - I_c - I_ci - I_ms)(1 - Max(T_ts, T_a))(S)(S_s) + (1 - S_s)(1 - Max(T_ts, T_a))(S)(I_i - I_lc - I_ts) + (1 - S)(1 - Max(T_ts, T_a))(I_i - I_lc - I_f - Max(I_f, I_b)) + S_i + I_gsf] > (I_i - I_lc - I_is - Max(I_f, I_b) - I_m)(1 - Max(T_ts, T_o))"
    } else {
        "[(I_f - I_c - I_ci - I_ms)(S)(S_s) + (1 - S_s)(S)(I_i - I_lc - I_ts) + (1 - S)(I_i - I_lc - I_f - Max(I_f, I_b)) + S_i + I_gsf] > (I_i - I_lc - I_is - Max(I_f, I_b) - I_m)"
    };
    vec![e.cmp(text, Gt, Some(lhs), rhs)]
}

/// C16 (with future gains) and C17 (without).
fn spread_negative(e: &Eval, with_gains: bool) -> Vec<SubResult> {
    let b = bracket(e, true, 1.0);
    let gains = if with_gains { e.f(Field::GainsSec) } else { 0.0 };
    let lhs = b.securitized + b.realized + b.retained + gains;
    let text = if with_gains {
        "[(I_f - I_c - I_ts)(S)(S_s) + (1 - S_s)(S)(I_i - I_lc - I_ts) + (1 - S)(I_i - I_lc - I_f - Max(I_f, I_b)) + I_gsf] < 0"
    } else {
        "[(I_f - I_c - I_ts)(S)(S_s) + (1 - S_s)(S)(I_i - I_lc - I_ts) + (1 - S)(I_i - I_lc - I_f - Max(I_f, I_b))] < 0"
    };
    vec![e.cmp(text, Lt, Some(lhs), Some(0.0))]
}

/// `lhs > Max(a, b, ...)` or `lhs > Min(...)` over quantity names and constants.
fn q_or(e: &Eval, term: Term) -> Option<f64> {
    match term {
        Term::Name(n) => e.q(n),
        Term::Const(c) => Some(c),
    }
}

#[derive(Clone, Copy)]
enum Term {
    Name(&'static str),
    Const(f64),
}

use Term::{Const, Name};

fn gt_max(e: &Eval, text: &str, lhs: &'static str, rhs: &[Term]) -> SubResult {
    let l = e.q(lhs);
    let r: Vec<Option<f64>> = rhs.iter().map(|t| q_or(e, *t)).collect();
    e.cmp(text, Gt, l, max_of(&r))
}

fn gt_min(e: &Eval, text: &str, lhs: &'static str, rhs: &[Term]) -> SubResult {
    let l = e.q(lhs);
    let r: Vec<Option<f64>> = rhs.iter().map(|t| q_or(e, *t)).collect();
    e.cmp(text, Gt, l, min_of(&r))
}

fn gt(e: &Eval, text: &str, lhs: &'static str, rhs: Term) -> SubResult {
    let l = e.q(lhs);
    let r = q_or(e, rhs);
    e.cmp(text, Gt, l, r)
}

pub(crate) static DEFINITIONS: [Definition; CONDITION_COUNT] = [
    Definition {
        id: 1,
        rendering: "I_i > I_spv > Max(I_b, I_f, 0)",
        note: None,
        clauses: |e| {
            let i_i = e.f(Field::Ii);
            let i_spv = e.f(Field::Ispv);
            let floor = e.f(Field::Ib).max(e.f(Field::If)).max(0.0);
            vec![
                e.cmp("I_i > I_spv", Gt, Some(i_i), Some(i_spv)),
                e.cmp("I_spv > Max(I_b, I_f, 0)", Gt, Some(i_spv), Some(floor)),
            ]
        },
    },
    Definition {
        id: 2,
        rendering: "[(I_f - I_c - I_ci - I_ms)(1 - Max(T_ts, T_a))(S)(S_s) + (1 - S_s)(1 - Max(T_ts, T_a))(S)(I_i - I_lc - I_ts) + (1 - S)(1 - Max(T_ts, T_a))(I_i - I_lc - I_f - Max(I_f, I_b)) + S_i + I_gsf] > (I_i - I_lc - I_is - Max(I_f, I_b) - I_m)(1 - Max(T_ts, T_o))",
        note: None,
        clauses: |e| securitize_vs_hold(e, true),
    },
    Definition {
        id: 3,
        rendering: "[(I_f - I_c - I_ci - I_ms)(S)(S_s) + (1 - S_s)(S)(I_i - I_lc - I_ts) + (1 - S)(I_i - I_lc - I_f - Max(I_f, I_b)) + S_i + I_gsf] > (I_i - I_lc - I_is - Max(I_f, I_b) - I_m)",
        note: None,
        clauses: |e| securitize_vs_hold(e, false),
    },
    Definition {
        id: 4,
        rendering: "d1(I_gs|I_ts) > Max(d1(I_g|I_i), 1)",
        note: None,
        clauses: |e| {
            vec![gt_max(
                e,
                "d1(I_gs|I_ts) > Max(d1(I_g|I_i), 1)",
                "d1(I_gs|I_ts)",
                &[Name("d1(I_g|I_i)"), Const(1.0)],
            )]
        },
    },
    Definition {
        id: 5,
        rendering: "d1(P_rp|I_g) < 1",
        note: None,
        clauses: |e| {
            let l = e.q("d1(P_rp|I_g)");
            vec![e.cmp("d1(P_rp|I_g) < 1", Lt, l, Some(1.0))]
        },
    },
    Definition {
        id: 6,
        rendering: "Max(d1(I_g|I_m), 1) < d1(I_gs|I_ms)",
        note: None,
        clauses: |e| {
            let l = max_of(&[e.q("d1(I_g|I_m)"), Some(1.0)]);
            let r = e.q("d1(I_gs|I_ms)");
            vec![e.cmp("Max(d1(I_g|I_m), 1) < d1(I_gs|I_ms)", Lt, l, r)]
        },
    },
    Definition {
        id: 7,
        rendering: "I_rc > I_i; I_gs > 0; Max(I_f, I_spv, I_b) < I_i",
        note: None,
        clauses: |e| {
            let i_rc = e.f(Field::Irc);
            let i_i = e.f(Field::Ii);
            let i_gs = e.q("I_gs");
            let top = e.f(Field::If).max(e.f(Field::Ispv)).max(e.f(Field::Ib));
            vec![
                e.cmp("I_rc > I_i", Gt, Some(i_rc), Some(i_i)),
                e.cmp("I_gs > 0", Gt, i_gs, Some(0.0)),
                e.cmp("Max(I_f, I_spv, I_b) < I_i", Lt, Some(top), Some(i_i)),
            ]
        },
    },
    Definition {
        id: 8,
        rendering: "d3(A|F,F,F) > 1",
        note: None,
        clauses: |e| vec![gt(e, "d3(A|F,F,F) > 1", "d3(A|F,F,F)", Const(1.0))],
    },
    Definition {
        id: 9,
        rendering: "d2(I_gs|I_f,I_f) > Max(d1(I_gs|I_f), d2(I_gs|I_b,I_b), 1); d1(I_gs|I_f) > Max(d1(I_gs|I_b), 1)",
        note: None,
        clauses: |e| {
            vec![
                gt_max(
                    e,
                    "d2(I_gs|I_f,I_f) > Max(d1(I_gs|I_f), d2(I_gs|I_b,I_b), 1)",
                    "d2(I_gs|I_f,I_f)",
                    &[Name("d1(I_gs|I_f)"), Name("d2(I_gs|I_b,I_b)"), Const(1.0)],
                ),
                gt_max(
                    e,
                    "d1(I_gs|I_f) > Max(d1(I_gs|I_b), 1)",
                    "d1(I_gs|I_f)",
                    &[Name("d1(I_gs|I_b)"), Const(1.0)],
                ),
            ]
        },
    },
    Definition {
        id: 10,
        rendering: "d3(I_b|P_rp,P_rp,P_rp) < Min(d3(I_i|P_rp,P_rp,P_rp), 0)",
        note: None,
        clauses: |e| {
            let l = e.q("d3(I_b|P_rp,P_rp,P_rp)");
            let r = min_of(&[e.q("d3(I_i|P_rp,P_rp,P_rp)"), Some(0.0)]);
            vec![e.cmp("d3(I_b|P_rp,P_rp,P_rp) < Min(d3(I_i|P_rp,P_rp,P_rp), 0)", Lt, l, r)]
        },
    },
    Definition {
        id: 11,
        rendering: "P_rp > P_ra; P_rp|E_max > P_ra|E_max",
        note: None,
        clauses: |e| {
            vec![
                gt(e, "P_rp > P_ra", "P_rp", Name("P_ra")),
                gt(e, "P_rp|E_max > P_ra|E_max", "P_rp|E_max", Name("P_ra|E_max")),
            ]
        },
    },
    Definition {
        id: 12,
        rendering: "I_m > I_ms; I_m|E_max > I_ms|E_max",
        note: None,
        clauses: |e| {
            let i_m = e.f(Field::Im);
            let i_ms = e.f(Field::Ims);
            vec![
                e.cmp("I_m > I_ms", Gt, Some(i_m), Some(i_ms)),
                gt(e, "I_m|E_max > I_ms|E_max", "I_m|E_max", Name("I_ms|E_max")),
            ]
        },
    },
    Definition {
        id: 13,
        rendering: "I_m|F_max > I_ms|F_max",
        note: None,
        clauses: |e| vec![gt(e, "I_m|F_max > I_ms|F_max", "I_m|F_max", Name("I_ms|F_max"))],
    },
    Definition {
        id: 14,
        rendering: "I_m|F_dev > I_ms|F_dev; P_rp|F_dev > P_ra|F_dev",
        note: None,
        clauses: |e| {
            vec![
                gt(e, "I_m|F_dev > I_ms|F_dev", "I_m|F_dev", Name("I_ms|F_dev")),
                gt(e, "P_rp|F_dev > P_ra|F_dev", "P_rp|F_dev", Name("P_ra|F_dev")),
            ]
        },
    },
    Definition {
        id: 15,
        rendering: "d1(I_f|t_m) > Max(d1(I_fs|t_m), 0)",
        note: None,
        clauses: |e| {
            vec![gt_max(
                e,
                "d1(I_f|t_m) > Max(d1(I_fs|t_m), 0)",
                "d1(I_f|t_m)",
                &[Name("d1(I_fs|t_m)"), Const(0.0)],
            )]
        },
    },
    Definition {
        id: 16,
        rendering: "[(I_f - I_c - I_ts)(S)(S_s) + (1 - S_s)(S)(I_i - I_lc - I_ts) + (1 - S)(I_i - I_lc - I_f - Max(I_f, I_b)) + I_gsf] < 0",
        note: None,
        clauses: |e| spread_negative(e, true),
    },
    Definition {
        id: 17,
        rendering: "[(I_f - I_c - I_ts)(S)(S_s) + (1 - S_s)(S)(I_i - I_lc - I_ts) + (1 - S)(I_i - I_lc - I_f - Max(I_f, I_b))] < 0",
        note: None,
        clauses: |e| spread_negative(e, false),
    },
    Definition {
        id: 18,
        rendering: "I_i - I_s - I_ts - I_c < 0",
        note: None,
        clauses: |e| {
            let v = e.f(Field::Ii) - e.f(Field::Is) - e.f(Field::Its) - e.i_c();
            vec![e.cmp("I_i - I_s - I_ts - I_c < 0", Lt, Some(v), Some(0.0))]
        },
    },
    Definition {
        id: 19,
        rendering: "d2(V_s|V_d,V_f) > 1",
        note: None,
        clauses: |e| vec![gt(e, "d2(V_s|V_d,V_f) > 1", "d2(V_s|V_d,V_f)", Const(1.0))],
    },
    Definition {
        id: 20,
        rendering: "d1(I_spv|V_s) > Max(d1(I_b|V_d), 0)",
        note: None,
        clauses: |e| {
            vec![gt_max(
                e,
                "d1(I_spv|V_s) > Max(d1(I_b|V_d), 0)",
                "d1(I_spv|V_s)",
                &[Name("d1(I_b|V_d)"), Const(0.0)],
            )]
        },
    },
    Definition {
        id: 21,
        rendering: "d2(I_spv|V_d,V_f) > 0; d2(I_b|V_d,V_f) > 0",
        note: None,
        clauses: |e| {
            vec![
                gt(e, "d2(I_spv|V_d,V_f) > 0", "d2(I_spv|V_d,V_f)", Const(0.0)),
                gt(e, "d2(I_b|V_d,V_f) > 0", "d2(I_b|V_d,V_f)", Const(0.0)),
            ]
        },
    },
    Definition {
        id: 22,
        rendering: "d3(I_gs|V_d,V_f,V_s) > 0",
        note: None,
        clauses: |e| vec![gt(e, "d3(I_gs|V_d,V_f,V_s) > 0", "d3(I_gs|V_d,V_f,V_s)", Const(0.0))],
    },
    Definition {
        id: 23,
        rendering: "d1(I_gs|V_s) > 1; d2(I_gs|V_d,V_f) > 0",
        note: None,
        clauses: |e| {
            vec![
                gt(e, "d1(I_gs|V_s) > 1", "d1(I_gs|V_s)", Const(1.0)),
                gt(e, "d2(I_gs|V_d,V_f) > 0", "d2(I_gs|V_d,V_f)", Const(0.0)),
            ]
        },
    },
    Definition {
        id: 24,
        rendering: "d1(I_f|V_f) > d1(I_d|V_d)",
        note: None,
        clauses: |e| vec![gt(e, "d1(I_f|V_f) > d1(I_d|V_d)", "d1(I_f|V_f)", Name("d1(I_d|V_d)"))],
    },
    Definition {
        id: 25,
        rendering: "I_gs > I_gs; d1(I_g|I_cs) > Min(d1(I_gs|I_ls), 1); d2(I_gs|I_cs,I_cs) > Min(d2(I_gs|I_ls,I_ls), 1)",
        note: Some(C25_NOTE),
        clauses: |e| {
            vec![
                gt(e, "I_gs > I_gs", "I_gs", Name("I_gs")),
                gt_min(
                    e,
                    "d1(I_g|I_cs) > Min(d1(I_gs|I_ls), 1)",
                    "d1(I_g|I_cs)",
                    &[Name("d1(I_gs|I_ls)"), Const(1.0)],
                ),
                gt_min(
                    e,
                    "d2(I_gs|I_cs,I_cs) > Min(d2(I_gs|I_ls,I_ls), 1)",
                    "d2(I_gs|I_cs,I_cs)",
                    &[Name("d2(I_gs|I_ls,I_ls)"), Const(1.0)],
                ),
            ]
        },
    },
    Definition {
        id: 26,
        rendering: "d1(S|I_i) > Max(d1(S|I_spv), 1); d2(S|I_i,I_i) > Max(d2(S|I_spv,I_spv), 1)",
        note: None,
        clauses: |e| {
            vec![
                gt_max(
                    e,
                    "d1(S|I_i) > Max(d1(S|I_spv), 1)",
                    "d1(S|I_i)",
                    &[Name("d1(S|I_spv)"), Const(1.0)],
                ),
                gt_max(
                    e,
                    "d2(S|I_i,I_i) > Max(d2(S|I_spv,I_spv), 1)",
                    "d2(S|I_i,I_i)",
                    &[Name("d2(S|I_spv,I_spv)"), Const(1.0)],
                ),
            ]
        },
    },
    Definition {
        id: 27,
        rendering: "d1(I_ms|I_ts) > 1",
        note: None,
        clauses: |e| vec![gt(e, "d1(I_ms|I_ts) > 1", "d1(I_ms|I_ts)", Const(1.0))],
    },
    Definition {
        id: 28,
        rendering: "d1(S|Psi_bbs-Psi_bsa) > Max(d1(P|Psi_bbi-Psi_bai), 1)",
        note: None,
        clauses: |e| {
            vec![gt_max(
                e,
                "d1(S|Psi_bbs-Psi_bsa) > Max(d1(P|Psi_bbi-Psi_bai), 1)",
                "d1(S|Psi_bbs-Psi_bsa)",
                &[Name("d1(P|Psi_bbi-Psi_bai)"), Const(1.0)],
            )]
        },
    },
    Definition {
        id: 29,
        rendering: "d2(S|S_s,Psi_bbs-Psi_bsa) > Max(d2(S|Psi_bbs-Psi_bsa,Psi_bbs-Psi_bsa), 0)",
        note: None,
        clauses: |e| {
            vec![gt_max(
                e,
                "d2(S|S_s,Psi_bbs-Psi_bsa) > Max(d2(S|Psi_bbs-Psi_bsa,Psi_bbs-Psi_bsa), 0)",
                "d2(S|S_s,Psi_bbs-Psi_bsa)",
                &[Name("d2(S|Psi_bbs-Psi_bsa,Psi_bbs-Psi_bsa)"), Const(0.0)],
            )]
        },
    },
];

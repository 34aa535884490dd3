mod common;

use common::{arb_document, arb_expr, arb_policy, arb_request, config, name};
use facpl_core::eval::{combine, eval_expr, eval_rule, Evaluate, ExprResult};
use facpl_core::model::{
    Binding, CombAlg, Decision, Document, EngineConfig, Expr, Policy, PolicySet, Request, Rule, Value,
};
use facpl_core::parser::{parse_policy, parse_request};
use proptest::prelude::*;

use Decision::{Deny as D, Indeterminate as I, NotApplicable as NA, Permit as P};

const ORDER: [Decision; 4] = [P, D, NA, I];

/// The permit-overrides matrix, row `d1`, column `d2`.
const PERMIT_OVERRIDES: [[Decision; 4]; 4] = [
    [P, P, P, P],
    [P, D, D, I],
    [P, D, NA, I],
    [P, I, I, I],
];

fn pos(d: Decision) -> usize {
    ORDER.iter().position(|&x| x == d).unwrap()
}

fn swap(d: Decision) -> Decision {
    match d {
        P => D,
        D => P,
        other => other,
    }
}

/// Reference combination by folding a pairwise matrix left to right.
fn fold(matrix: impl Fn(Decision, Decision) -> Decision, ds: &[Decision]) -> Decision {
    ds[1..].iter().fold(ds[0], |acc, &d| matrix(acc, d))
}

fn reference(alg: CombAlg, ds: &[Decision]) -> Decision {
    let po = |a: Decision, b: Decision| PERMIT_OVERRIDES[pos(a)][pos(b)];
    match alg {
        CombAlg::PermitOverrides => fold(po, ds),
        CombAlg::DenyOverrides => swap(fold(po, &ds.iter().map(|&d| swap(d)).collect::<Vec<_>>())),
        CombAlg::DenyUnlessPermit => {
            if ds.iter().filter(|&&d| d == P).count() > 0 {
                P
            } else {
                D
            }
        }
        CombAlg::PermitUnlessDeny => {
            if ds.iter().filter(|&&d| d == D).count() > 0 {
                D
            } else {
                P
            }
        }
        CombAlg::FirstApplicable => fold(|a, b| if a == NA { b } else { a }, ds),
        CombAlg::OnlyOneApplicable => fold(
            |a, b| match (a, b) {
                (I, _) | (_, I) => I,
                (NA, x) | (x, NA) => x,
                _ => I,
            },
            ds,
        ),
        CombAlg::WeakConsensus => fold(
            |a, b| match (a, b) {
                (I, _) | (_, I) => I,
                (NA, x) | (x, NA) => x,
                (x, y) if x == y => x,
                _ => I,
            },
            ds,
        ),
        CombAlg::StrongConsensus => fold(|a, b| if a == b { a } else { I }, ds),
    }
}

fn arb_decisions() -> impl Strategy<Value = Vec<Decision>> {
    prop::collection::vec(prop::sample::select(ORDER.to_vec()), 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn algorithms_match_reference_folds(alg in prop::sample::select(CombAlg::ALL.to_vec()), ds in arb_decisions()) {
        prop_assert_eq!(combine(alg, &ds).unwrap(), reference(alg, &ds));
    }

    #[test]
    fn order_matters_only_for_first_applicable(alg in prop::sample::select(CombAlg::ALL.to_vec()), mut ds in arb_decisions()) {
        prop_assume!(alg != CombAlg::FirstApplicable);
        let before = combine(alg, &ds).unwrap();
        ds.reverse();
        prop_assert_eq!(combine(alg, &ds).unwrap(), before);
    }

    #[test]
    fn unless_algorithms_are_total(ds in arb_decisions()) {
        prop_assert!(combine(CombAlg::DenyUnlessPermit, &ds).unwrap().is_applicable());
        prop_assert!(combine(CombAlg::PermitUnlessDeny, &ds).unwrap().is_applicable());
    }

    #[test]
    fn rules_yield_effect_not_applicable_or_indeterminate(p in arb_policy(), r in arb_request()) {
        if let Policy::Rule(rule) = &p {
            let d = eval_rule(rule, &r, &config());
            prop_assert!(d == rule.effect.into() || d == NA || d == I);
        }
    }

    #[test]
    fn evaluation_is_total_and_deterministic(doc in arb_document(), r in arb_request()) {
        let cfg = config();
        let d = doc.evaluate(&r, &cfg);
        prop_assert!(Decision::ALL.contains(&d));
        prop_assert_eq!(doc.evaluate(&r, &cfg), d);
        prop_assert_eq!(doc.evaluate(&r, &EngineConfig::default()), doc.evaluate(&r, &EngineConfig::default()));
    }

    #[test]
    fn false_targets_are_not_applicable(p in arb_policy(), r in arb_request(), alg in prop::sample::select(CombAlg::ALL.to_vec())) {
        let set = PolicySet::new(alg, Some(Expr::lit(false)), vec![p]).unwrap();
        prop_assert_eq!(set.evaluate(&r, &config()), NA);
    }

    #[test]
    fn omitted_target_equals_true_target(p in arb_policy(), r in arb_request(), alg in prop::sample::select(CombAlg::ALL.to_vec())) {
        let open = PolicySet::new(alg, None, vec![p.clone()]).unwrap();
        let t = PolicySet::new(alg, Some(Expr::lit(true)), vec![p]).unwrap();
        prop_assert_eq!(open.evaluate(&r, &config()), t.evaluate(&r, &config()));
    }

    #[test]
    fn absent_names_evaluate_to_absent_or_error(e in arb_expr()) {
        let r = Request::new();
        let res = eval_expr(&e, &r, &config());
        if let Expr::Name(_) = e {
            prop_assert_eq!(res, ExprResult::Absent);
        }
    }

    #[test]
    fn request_order_is_irrelevant(mut entries in prop::collection::vec((common::arb_name(), prop::sample::select(vec!["r1", "r2", "x"])), 0..6)) {
        let build = |es: &[(facpl_core::model::AttrName, &str)]| {
            Request::from_entries(es.iter().map(|(n, v)| (n.clone(), Binding::Value(Value::str(*v))))).unwrap()
        };
        let a = build(&entries);
        entries.reverse();
        prop_assert_eq!(build(&entries), a);
    }
}

#[test]
fn empty_sequences_are_rejected() {
    for alg in CombAlg::ALL {
        assert!(combine(alg, &[]).is_err());
    }
}

#[test]
fn kleene_connectives() {
    let cfg = EngineConfig::default();
    let r = parse_request("(a/t, true) (a/f, false) (a/n, 1.0)").unwrap();
    let ev = |s: &str| eval_expr(&facpl_core::parser::parse_expr(s).unwrap(), &r, &cfg);
    let t = ExprResult::Value(Value::Bool(true));
    let f = ExprResult::Value(Value::Bool(false));
    assert_eq!(ev("and(a/f, a/missing)"), f);
    assert_eq!(ev("or(a/t, a/missing)"), t);
    assert_eq!(ev("and(a/t, a/missing)"), ExprResult::Absent);
    assert_eq!(ev("not(a/missing)"), ExprResult::Absent);
    assert!(matches!(ev("and(a/n, a/f)"), ExprResult::Error(_)));
    assert!(matches!(ev("and(a/f, a/n)"), ExprResult::Error(_)));
    assert!(matches!(ev("greater-than(\"a\", 1.0)"), ExprResult::Error(_)));
    assert!(matches!(ev("divide(a/n, 0.0)"), ExprResult::Error(_)));
    assert!(matches!(ev("multiply(1e300, 1e300)"), ExprResult::Error(_)));
    assert_eq!(ev("add(a/n, a/missing)"), ExprResult::Absent);
}

#[test]
fn extension_functions_use_the_configuration() {
    let cfg = config();
    let r = parse_request("(s/lvl, L1) (s/roles, r1) (s/roles, r2) (s/role, x)").unwrap();
    let ev = |s: &str| eval_expr(&facpl_core::parser::parse_expr(s).unwrap(), &r, &cfg);
    assert!(ev("leq(s/lvl, \"L3\")").is_true());
    assert!(!ev("leq(\"L3\", s/lvl)").is_true());
    assert!(matches!(ev("leq(s/lvl, \"L9\")"), ExprResult::Error(_)));
    assert!(ev("sub-role(s/roles, \"r3\")").is_true());
    assert!(matches!(ev("sub-role(s/role, \"r3\")"), ExprResult::Error(_)));
    assert!(ev("in(\"r2\", s/roles)").is_true());
    assert!(matches!(ev("in(1.0, s/roles)"), ExprResult::Error(_)));
    let lookup = r.lookup(&name("s/roles")).unwrap();
    assert!(matches!(lookup, Binding::Set(s) if s.len() == 2));
}

#[test]
fn loan_doc_walkthrough() {
    let doc = parse_policy(facpl_core::casestudy::LOAN_DOC).unwrap();
    let cfg = EngineConfig::default();
    let cases = [
        (facpl_core::casestudy::LOAN_DOC_REQ, P),
        (facpl_core::casestudy::LOAN_DOC_OTHER_REQ, NA),
        (facpl_core::casestudy::LOAN_DOC_OFFICIER_REQ, D),
        (facpl_core::casestudy::LOAN_DOC_WRITE_REQ, D),
    ];
    for (text, expected) in cases {
        assert_eq!(doc.evaluate(&parse_request(text).unwrap(), &cfg), expected, "{text}");
    }
    let pdp = parse_policy(&format!("pdp {{ deny-unless-permit policies: {} }}", facpl_core::casestudy::LOAN_DOC)).unwrap();
    assert!(matches!(pdp, Document::Pdp(_)));
    assert_eq!(pdp.evaluate(&parse_request(facpl_core::casestudy::LOAN_DOC_OTHER_REQ).unwrap(), &cfg), D);
    let rule = Rule { effect: facpl_core::model::Effect::Permit, target: Expr::lit(true) };
    assert_eq!(rule.evaluate(&Request::new(), &cfg), P);
}

//! Shared generators for the integration tests.
#![allow(dead_code)]

use chrono::NaiveDate;
use facpl_core::model::{
    AttrDomain, AttrKind, AttrName, Binding, CombAlg, Document, DomainSpec, EngineConfig, Expr, Func, LevelOrder,
    Pdp, Policy, PolicySet, Request, RoleHierarchy, Rule, Value, ValueSet,
};
use proptest::prelude::*;
use proptest::sample::subsequence;

pub fn name(s: &str) -> AttrName {
    s.parse().expect("valid attribute name")
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}

fn strs(xs: &[&str]) -> Vec<Value> {
    xs.iter().map(|s| Value::str(*s)).collect()
}

/// Attribute pool shared by every generator: name, kind and the values a
/// domain may draw its universe from.
pub fn pool() -> Vec<(AttrName, AttrKind, Vec<Value>)> {
    vec![
        (name("s/role"), AttrKind::String, strs(&["r1", "r2", "x"])),
        (name("s/lvl"), AttrKind::String, strs(&["L1", "L2", "L3"])),
        (name("s/roles"), AttrKind::StringSet, strs(&["r1", "r2", "r3"])),
        (name("n/x"), AttrKind::Double, vec![Value::Double(-1.5), Value::Double(1.0), Value::Double(2.5)]),
        (name("b/flag"), AttrKind::Boolean, vec![Value::Bool(true), Value::Bool(false)]),
        (name("d/day"), AttrKind::Date, vec![Value::Date(date(2020, 1, 1)), Value::Date(date(2021, 6, 15))]),
    ]
}

/// Levels `L1 <= L2 <= L3`; roles `r1 -> r2 -> r3`.
pub fn config() -> EngineConfig {
    EngineConfig::new(
        LevelOrder::new(["L1", "L2", "L3"], [("L1", "L2"), ("L2", "L3")]).unwrap(),
        RoleHierarchy::new(["r1", "r2", "r3"], [("r1", "r2"), ("r2", "r3")]).unwrap(),
    )
}

/// Every pool attribute with its full universe, absence allowed.
pub fn full_domain() -> DomainSpec {
    let mut d = DomainSpec::new();
    for (n, kind, universe) in pool() {
        d.declare(n, AttrDomain::new(kind, universe, true).unwrap()).unwrap();
    }
    d
}

/// Domains over the whole pool with random non-empty universes and random
/// absence flags.
pub fn arb_domain() -> impl Strategy<Value = DomainSpec> {
    let parts: Vec<_> = pool()
        .into_iter()
        .map(|(n, kind, universe)| {
            let len = universe.len();
            (subsequence(universe, 1..=len), any::<bool>()).prop_map(move |(u, absent)| {
                (n.clone(), AttrDomain::new(kind, u, absent).expect("uniform universe"))
            })
        })
        .collect();
    parts.prop_map(|decls| {
        let mut d = DomainSpec::new();
        for (n, a) in decls {
            d.declare(n, a).unwrap();
        }
        d
    })
}

pub fn arb_value() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<bool>().prop_map(Value::Bool),
        prop::sample::select(vec![-1.5, 0.0, 1.0, 2.5, 4.0]).prop_map(Value::Double),
        prop::sample::select(vec!["r1", "r2", "r3", "x", "L1", "L2", "L3", "zz"]).prop_map(Value::str),
        (1000i32..=9999, 1u32..=12, 1u32..=28).prop_map(|(y, m, d)| Value::Date(date(y, m, d))),
        prop::sample::select(vec![date(2020, 1, 1), date(2021, 6, 15)]).prop_map(Value::Date),
    ]
}

pub fn arb_string_set() -> impl Strategy<Value = ValueSet> {
    subsequence(strs(&["r1", "r2", "r3", "x"]), 1..=3).prop_map(|v| ValueSet::new(v).unwrap())
}

pub fn arb_name() -> impl Strategy<Value = AttrName> {
    prop::sample::select(pool().into_iter().map(|(n, _, _)| n).collect::<Vec<_>>())
}

pub fn arb_func() -> impl Strategy<Value = Func> {
    prop::sample::select(Func::ALL.to_vec())
}

pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => arb_name().prop_map(Expr::Name),
        2 => arb_value().prop_map(Expr::Literal),
        1 => arb_string_set().prop_map(Expr::Set),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            1 => inner.clone().prop_map(Expr::not),
            4 => (arb_func(), inner.clone(), inner).prop_map(|(f, a, b)| Expr::call(f, a, b)),
        ]
    })
}

/// Mostly well-typed targets: comparisons of pool attributes against their
/// own universes, combined with the boolean connectives.
pub fn arb_target() -> impl Strategy<Value = Expr> {
    let atom = prop_oneof![
        (0usize..3).prop_map(|i| Expr::equal(Expr::Name(name("s/role")), Expr::lit(["r1", "r2", "x"][i]))),
        (0usize..3).prop_map(|i| Expr::call(Func::Leq, Expr::Name(name("s/lvl")), Expr::lit(["L1", "L2", "L3"][i]))),
        (0usize..3).prop_map(|i| Expr::call(Func::In, Expr::lit(["r1", "r2", "r3"][i]), Expr::Name(name("s/roles")))),
        (0usize..3).prop_map(|i| Expr::call(Func::SubRole, Expr::Name(name("s/roles")), Expr::lit(["r1", "r2", "r3"][i]))),
        (0usize..3).prop_map(|i| Expr::call(Func::SubRole, Expr::Name(name("s/role")), Expr::lit(["r1", "r2", "r3"][i]))),
        (0usize..3).prop_map(|i| Expr::call(
            Func::GreaterThan,
            Expr::call(Func::Add, Expr::Name(name("n/x")), Expr::lit(1.0)),
            Expr::lit([0.0, 2.0, 3.5][i])
        )),
        Just(Expr::Name(name("b/flag"))),
        Just(Expr::call(Func::GreaterThan, Expr::Name(name("d/day")), Expr::lit(date(2020, 6, 1)))),
        Just(Expr::lit(true)),
        arb_expr(),
    ];
    atom.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Expr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::or(a, b)),
        ]
    })
}

pub fn arb_alg() -> impl Strategy<Value = CombAlg> {
    prop::sample::select(CombAlg::ALL.to_vec())
}

fn arb_policy_with(target: BoxedStrategy<Expr>) -> impl Strategy<Value = Policy> {
    let effect = prop::sample::select(vec![facpl_core::model::Effect::Permit, facpl_core::model::Effect::Deny]);
    let rule = (effect, target.clone()).prop_map(|(effect, target)| Policy::Rule(Rule { effect, target }));
    rule.prop_recursive(3, 12, 3, move |inner| {
        (arb_alg(), proptest::option::of(target.clone()), prop::collection::vec(inner, 1..=3))
            .prop_map(|(alg, t, children)| Policy::Set(PolicySet::new(alg, t, children).unwrap()))
    })
}

/// Policies over arbitrary expressions, often ill-typed.
pub fn arb_policy() -> impl Strategy<Value = Policy> {
    arb_policy_with(arb_expr().boxed())
}

/// Policies whose targets are mostly well typed.
pub fn arb_typed_policy() -> impl Strategy<Value = Policy> {
    arb_policy_with(arb_target().boxed())
}

pub fn arb_document() -> impl Strategy<Value = Document> {
    prop_oneof![
        arb_policy().prop_map(Document::Policy),
        (arb_alg(), prop::collection::vec(arb_policy(), 1..=3))
            .prop_map(|(alg, ps)| Document::Pdp(Pdp::new(alg, ps).unwrap())),
    ]
}

pub fn arb_typed_document() -> impl Strategy<Value = Document> {
    prop_oneof![
        arb_typed_policy().prop_map(Document::Policy),
        (arb_alg(), prop::collection::vec(arb_typed_policy(), 1..=3))
            .prop_map(|(alg, ps)| Document::Pdp(Pdp::new(alg, ps).unwrap())),
    ]
}

/// Requests binding any subset of the pool, sometimes to values of the
/// wrong kind.
pub fn arb_request() -> impl Strategy<Value = Request> {
    let binding = prop_oneof![
        3 => arb_value().prop_map(Binding::Value),
        1 => arb_string_set().prop_map(Binding::Set),
    ];
    prop::collection::vec((arb_name(), binding), 0..=6)
        .prop_map(|entries| {
            let unique: std::collections::BTreeMap<_, _> = entries.into_iter().collect();
            Request::from_entries(unique).expect("one entry per name")
        })
}

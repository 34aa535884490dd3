//! Decision semantics.
//!
//! Expressions evaluate to a value, a value set, absence or an error.
//! `and`/`or`/`not` follow Kleene's three-valued logic on absence, with
//! errors dominating; every other function yields absence as soon as one
//! operand is absent. A rule applies when its target is exactly `true`, is
//! not applicable when it is `false` or absent, and is indeterminate
//! otherwise. Policy sets apply the same test to their target and then
//! combine their children.

mod combine;
mod expr;

pub use combine::combine;
pub(crate) use combine::combine_nonempty;
pub use expr::{apply, eval_expr, ExprResult};

use crate::model::{
    CombAlg, Decision, Document, EngineConfig, Expr, Pdp, Policy, PolicySet, Request, Rule,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("cannot combine an empty sequence of decisions")]
    EmptySequence,
}

/// How a target expression gates evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Applicability {
    Applies,
    NotApplicable,
    Indeterminate,
}

impl From<&ExprResult> for Applicability {
    fn from(r: &ExprResult) -> Self {
        match r {
            ExprResult::Value(crate::model::Value::Bool(true)) => Applicability::Applies,
            ExprResult::Value(crate::model::Value::Bool(false)) | ExprResult::Absent => {
                Applicability::NotApplicable
            }
            _ => Applicability::Indeterminate,
        }
    }
}

/// Applicability of an optional target; a missing target always applies.
pub fn applicability(target: Option<&Expr>, request: &Request, config: &EngineConfig) -> Applicability {
    match target {
        None => Applicability::Applies,
        Some(t) => (&eval_expr(t, request, config)).into(),
    }
}

pub fn eval_rule(rule: &Rule, request: &Request, config: &EngineConfig) -> Decision {
    match applicability(Some(&rule.target), request, config) {
        Applicability::Applies => rule.effect.into(),
        Applicability::NotApplicable => Decision::NotApplicable,
        Applicability::Indeterminate => Decision::Indeterminate,
    }
}

/// The decision of a policy set whose children have already been evaluated.
pub(crate) fn gate(applicability: Applicability, alg: CombAlg, children: &[Decision]) -> Decision {
    match applicability {
        Applicability::Applies => combine_nonempty(alg, children),
        Applicability::NotApplicable => Decision::NotApplicable,
        Applicability::Indeterminate => Decision::Indeterminate,
    }
}

pub fn eval_set(set: &PolicySet, request: &Request, config: &EngineConfig) -> Decision {
    let app = applicability(set.target(), request, config);
    if app != Applicability::Applies {
        return gate(app, set.alg(), &[]);
    }
    let children: Vec<Decision> =
        set.children().iter().map(|c| eval_policy(c, request, config)).collect();
    gate(app, set.alg(), &children)
}

pub fn eval_policy(policy: &Policy, request: &Request, config: &EngineConfig) -> Decision {
    match policy {
        Policy::Rule(r) => eval_rule(r, request, config),
        Policy::Set(s) => eval_set(s, request, config),
    }
}

pub fn eval_pdp(pdp: &Pdp, request: &Request, config: &EngineConfig) -> Decision {
    let children: Vec<Decision> =
        pdp.policies().iter().map(|c| eval_policy(c, request, config)).collect();
    combine_nonempty(pdp.alg(), &children)
}

/// Anything that maps a request to a decision.
pub trait Evaluate {
    fn evaluate(&self, request: &Request, config: &EngineConfig) -> Decision;
}

impl Evaluate for Rule {
    fn evaluate(&self, request: &Request, config: &EngineConfig) -> Decision {
        eval_rule(self, request, config)
    }
}

impl Evaluate for PolicySet {
    fn evaluate(&self, request: &Request, config: &EngineConfig) -> Decision {
        eval_set(self, request, config)
    }
}

impl Evaluate for Policy {
    fn evaluate(&self, request: &Request, config: &EngineConfig) -> Decision {
        eval_policy(self, request, config)
    }
}

impl Evaluate for Pdp {
    fn evaluate(&self, request: &Request, config: &EngineConfig) -> Decision {
        eval_pdp(self, request, config)
    }
}

impl Evaluate for Document {
    fn evaluate(&self, request: &Request, config: &EngineConfig) -> Decision {
        match self {
            Document::Pdp(p) => eval_pdp(p, request, config),
            Document::Policy(p) => eval_policy(p, request, config),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Effect, Value};
    use crate::parser::{parse_policy, parse_request};

    const LOAN_DOC: &str = r#"{ deny-unless-permit target: equal(resource/id, "loanDoc")
        policies: ( permit target: and(equal(action/id, "read"), equal(subject/role, "assistant")) ) }"#;

    fn decide(policy: &str, request: &str) -> Decision {
        let p = parse_policy(policy).unwrap();
        let r = parse_request(request).unwrap();
        p.evaluate(&r, &EngineConfig::default())
    }

    #[test]
    fn walkthrough_decisions() {
        let base = "(subject/id, clerk1) (resource/id, loanDoc)";
        assert_eq!(decide(LOAN_DOC, &format!("{base} (subject/role, assistant) (action/id, read)")), Decision::Permit);
        assert_eq!(decide(LOAN_DOC, "(subject/id, clerk1) (subject/role, assistant) (resource/id, other) (action/id, read)"), Decision::NotApplicable);
        assert_eq!(decide(LOAN_DOC, &format!("{base} (subject/role, officier) (action/id, read)")), Decision::Deny);
        assert_eq!(decide(LOAN_DOC, &format!("{base} (subject/role, assistant) (action/id, write)")), Decision::Deny);
    }

    #[test]
    fn rule_outcomes() {
        let r = Request::new();
        let c = EngineConfig::default();
        let rule = |t: Expr| Rule { effect: Effect::Deny, target: t };
        assert_eq!(eval_rule(&rule(Expr::lit(true)), &r, &c), Decision::Deny);
        assert_eq!(eval_rule(&rule(Expr::lit(false)), &r, &c), Decision::NotApplicable);
        let absent = Expr::Name("a/b".parse().unwrap());
        assert_eq!(eval_rule(&rule(absent), &r, &c), Decision::NotApplicable);
        let sum = Expr::call(crate::model::Func::Add, Expr::lit(1.0), Expr::lit(2.0));
        assert_eq!(eval_rule(&rule(sum), &r, &c), Decision::Indeterminate);
        assert_eq!(eval_rule(&rule(Expr::lit(Value::str("x"))), &r, &c), Decision::Indeterminate);
    }

    #[test]
    fn pdp_examples() {
        assert_eq!(decide(&format!("pdp {{ deny-unless-permit policies: {LOAN_DOC} }}"), "(resource/id, x)"), Decision::Deny);
        assert_eq!(decide("pdp { permit-overrides policies: (permit target: true) }", ""), Decision::Permit);
        assert_eq!(
            decide("pdp { strong-consensus policies: (permit target: true) (deny target: true) }", ""),
            Decision::Indeterminate
        );
    }

    #[test]
    fn set_target_gates_children() {
        let p = "{ permit-overrides target: divide(1.0, 0.0) policies: (permit target: true) }";
        assert_eq!(decide(p, ""), Decision::Indeterminate);
        let p = "{ permit-overrides policies: (permit target: false) }";
        assert_eq!(decide(p, ""), Decision::NotApplicable);
    }
}

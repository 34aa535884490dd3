use std::fmt;
use std::str::FromStr;

use super::{AttrName, ModelError, Value, ValueSet};

/// The four authorisation outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decision {
    Permit,
    Deny,
    NotApplicable,
    Indeterminate,
}

impl Decision {
    pub const ALL: [Decision; 4] = [
        Decision::Permit,
        Decision::Deny,
        Decision::NotApplicable,
        Decision::Indeterminate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Decision::Permit => "permit",
            Decision::Deny => "deny",
            Decision::NotApplicable => "not-applicable",
            Decision::Indeterminate => "indeterminate",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// `true` for permit and deny.
    pub fn is_applicable(self) -> bool {
        matches!(self, Decision::Permit | Decision::Deny)
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Decision {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Decision::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| ModelError::UnknownKeyword(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Effect {
    Permit,
    Deny,
}

impl Effect {
    pub fn name(self) -> &'static str {
        Decision::from(self).name()
    }
}

impl From<Effect> for Decision {
    fn from(e: Effect) -> Self {
        match e {
            Effect::Permit => Decision::Permit,
            Effect::Deny => Decision::Deny,
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Combining algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombAlg {
    PermitOverrides,
    DenyOverrides,
    DenyUnlessPermit,
    PermitUnlessDeny,
    FirstApplicable,
    OnlyOneApplicable,
    WeakConsensus,
    StrongConsensus,
}

impl CombAlg {
    pub const ALL: [CombAlg; 8] = [
        CombAlg::PermitOverrides,
        CombAlg::DenyOverrides,
        CombAlg::DenyUnlessPermit,
        CombAlg::PermitUnlessDeny,
        CombAlg::FirstApplicable,
        CombAlg::OnlyOneApplicable,
        CombAlg::WeakConsensus,
        CombAlg::StrongConsensus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CombAlg::PermitOverrides => "permit-overrides",
            CombAlg::DenyOverrides => "deny-overrides",
            CombAlg::DenyUnlessPermit => "deny-unless-permit",
            CombAlg::PermitUnlessDeny => "permit-unless-deny",
            CombAlg::FirstApplicable => "first-applicable",
            CombAlg::OnlyOneApplicable => "only-one-applicable",
            CombAlg::WeakConsensus => "weak-consensus",
            CombAlg::StrongConsensus => "strong-consensus",
        }
    }
}

impl fmt::Display for CombAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CombAlg {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CombAlg::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| ModelError::UnknownKeyword(s.to_owned()))
    }
}

/// Binary operators and extension functions, all written in call syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    And,
    Or,
    Equal,
    In,
    GreaterThan,
    Add,
    Subtract,
    Divide,
    Multiply,
    /// Level order lookup, `leq(a, b)` iff `a <= b`.
    Leq,
    /// Role hierarchy reachability.
    SubRole,
}

impl Func {
    pub const ALL: [Func; 11] = [
        Func::And,
        Func::Or,
        Func::Equal,
        Func::In,
        Func::GreaterThan,
        Func::Add,
        Func::Subtract,
        Func::Divide,
        Func::Multiply,
        Func::Leq,
        Func::SubRole,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::And => "and",
            Func::Or => "or",
            Func::Equal => "equal",
            Func::In => "in",
            Func::GreaterThan => "greater-than",
            Func::Add => "add",
            Func::Subtract => "subtract",
            Func::Divide => "divide",
            Func::Multiply => "multiply",
            Func::Leq => "leq",
            Func::SubRole => "sub-role",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Name(AttrName),
    Literal(Value),
    Set(ValueSet),
    Not(Box<Expr>),
    Call(Func, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn name(name: AttrName) -> Self {
        Expr::Name(name)
    }

    pub fn lit(value: impl Into<Value>) -> Self {
        Expr::Literal(value.into())
    }

    pub fn call(func: Func, lhs: Expr, rhs: Expr) -> Self {
        Expr::Call(func, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(lhs: Expr, rhs: Expr) -> Self {
        Expr::call(Func::And, lhs, rhs)
    }

    pub fn or(lhs: Expr, rhs: Expr) -> Self {
        Expr::call(Func::Or, lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Expr) -> Self {
        Expr::Not(Box::new(inner))
    }

    pub fn equal(lhs: Expr, rhs: Expr) -> Self {
        Expr::call(Func::Equal, lhs, rhs)
    }

    /// Every attribute name referenced by the expression.
    pub fn names(&self) -> Vec<&AttrName> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a AttrName>) {
        match self {
            Expr::Name(n) => out.push(n),
            Expr::Literal(_) | Expr::Set(_) => {}
            Expr::Not(e) => e.collect_names(out),
            Expr::Call(_, a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub effect: Effect,
    pub target: Expr,
}

/// A policy set: a target and a non-empty sequence of children.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolicySet {
    alg: CombAlg,
    target: Option<Expr>,
    children: Vec<Policy>,
}

impl PolicySet {
    pub fn new(alg: CombAlg, target: Option<Expr>, children: Vec<Policy>) -> Result<Self, ModelError> {
        if children.is_empty() {
            return Err(ModelError::EmptyPolicies);
        }
        Ok(PolicySet { alg, target, children })
    }

    pub fn alg(&self) -> CombAlg {
        self.alg
    }

    /// The declared target; `None` behaves as the literal `true`.
    pub fn target(&self) -> Option<&Expr> {
        self.target.as_ref()
    }

    pub fn children(&self) -> &[Policy] {
        &self.children
    }

    /// The same set with child `index` removed.
    pub fn without_child(&self, index: usize) -> Result<Self, ModelError> {
        if index >= self.children.len() {
            return Err(ModelError::ChildIndex { index, arity: self.children.len() });
        }
        let mut children = self.children.clone();
        children.remove(index);
        PolicySet::new(self.alg, self.target.clone(), children)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Policy {
    Rule(Rule),
    Set(PolicySet),
}

impl Policy {
    pub fn rule(effect: Effect, target: Expr) -> Self {
        Policy::Rule(Rule { effect, target })
    }
}

/// A policy decision point: a targetless top-level combination.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pdp {
    alg: CombAlg,
    policies: Vec<Policy>,
}

impl Pdp {
    pub fn new(alg: CombAlg, policies: Vec<Policy>) -> Result<Self, ModelError> {
        if policies.is_empty() {
            return Err(ModelError::EmptyPolicies);
        }
        Ok(Pdp { alg, policies })
    }

    pub fn alg(&self) -> CombAlg {
        self.alg
    }

    pub fn policies(&self) -> &[Policy] {
        &self.policies
    }

    pub fn without_policy(&self, index: usize) -> Result<Self, ModelError> {
        if index >= self.policies.len() {
            return Err(ModelError::ChildIndex { index, arity: self.policies.len() });
        }
        let mut policies = self.policies.clone();
        policies.remove(index);
        Pdp::new(self.alg, policies)
    }
}

/// Anything a policy file may contain at top level.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Document {
    Pdp(Pdp),
    Policy(Policy),
}

impl From<Policy> for Document {
    fn from(p: Policy) -> Self {
        Document::Policy(p)
    }
}

impl From<Pdp> for Document {
    fn from(p: Pdp) -> Self {
        Document::Pdp(p)
    }
}

impl From<PolicySet> for Document {
    fn from(s: PolicySet) -> Self {
        Document::Policy(Policy::Set(s))
    }
}

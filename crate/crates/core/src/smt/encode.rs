use std::collections::BTreeMap;

use super::formula::{Arena, Atom, FormulaId};
use super::EncodeError;
use crate::model::{
    AttrDomain, AttrName, Binding, CombAlg, Decision, Document, DomainSpec, EngineConfig, Expr,
    Func, Pdp, Policy, PolicySet, Request, Rule, Value, ValueKind, ValueSet,
};

/// What a sub-expression evaluates to under the assignments selected by a
/// guard.
#[derive(Debug, Clone, PartialEq)]
enum Outcome {
    Val(Value),
    Set(ValueSet),
    Absent,
    Error,
    /// The (present) value of set attribute `0`.
    SetAttr(usize),
}

type Cases = Vec<(FormulaId, Outcome)>;

/// The four decision formulas of one policy, in decision order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionFormulas([FormulaId; 4]);

impl DecisionFormulas {
    pub fn get(&self, d: Decision) -> FormulaId {
        self.0[d.index()]
    }

    pub fn all(&self) -> [FormulaId; 4] {
        self.0
    }
}

/// Per-request assignment of the encoding variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Slot {
    Scalar(Option<usize>),
    Set(Option<Vec<bool>>),
}

/// Formulas over the variables of one domain. Several policies and
/// constraints may be encoded into the same instance so that queries can
/// relate them.
#[derive(Debug, Clone)]
pub struct Encoding {
    arena: Arena,
    attrs: Vec<(AttrName, AttrDomain)>,
    index: BTreeMap<AttrName, usize>,
    config: EngineConfig,
}

impl Encoding {
    pub fn new(domain: &DomainSpec, config: &EngineConfig) -> Self {
        let attrs: Vec<(AttrName, AttrDomain)> =
            domain.iter().map(|(n, d)| (n.clone(), d.clone())).collect();
        let index = attrs.iter().enumerate().map(|(i, (n, _))| (n.clone(), i)).collect();
        Encoding { arena: Arena::new(), attrs, index, config: config.clone() }
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn arena_mut(&mut self) -> &mut Arena {
        &mut self.arena
    }

    pub(crate) fn attrs(&self) -> &[(AttrName, AttrDomain)] {
        &self.attrs
    }

    pub fn encode(&mut self, doc: &Document) -> Result<DecisionFormulas, EncodeError> {
        match doc {
            Document::Pdp(p) => self.pdp(p),
            Document::Policy(p) => self.policy(p),
        }
    }

    pub fn policy(&mut self, policy: &Policy) -> Result<DecisionFormulas, EncodeError> {
        match policy {
            Policy::Rule(r) => self.rule(r),
            Policy::Set(s) => self.set(s),
        }
    }

    /// Guard under which `constraint` evaluates to `true`.
    pub fn constraint(&mut self, constraint: &Expr) -> Result<FormulaId, EncodeError> {
        let cases = self.expr(constraint)?;
        Ok(self.guard_where(&cases, |o| *o == Outcome::Val(Value::Bool(true))))
    }

    fn rule(&mut self, rule: &Rule) -> Result<DecisionFormulas, EncodeError> {
        let [t, na, i] = self.target(Some(&rule.target))?;
        let mut quad = [Arena::FALSE, Arena::FALSE, na, i];
        quad[Decision::from(rule.effect).index()] = t;
        Ok(DecisionFormulas(quad))
    }

    fn set(&mut self, set: &PolicySet) -> Result<DecisionFormulas, EncodeError> {
        let [t, na_t, i_t] = self.target(set.target())?;
        let children = set.children().iter().map(|c| self.policy(c)).collect::<Result<Vec<_>, _>>()?;
        let c = self.combine(set.alg(), &children);
        let a = &mut self.arena;
        let p = a.and2(t, c[0]);
        let d = a.and2(t, c[1]);
        let na_c = a.and2(t, c[2]);
        let i_c = a.and2(t, c[3]);
        let na = a.or2(na_t, na_c);
        let i = a.or2(i_t, i_c);
        Ok(DecisionFormulas([p, d, na, i]))
    }

    fn pdp(&mut self, pdp: &Pdp) -> Result<DecisionFormulas, EncodeError> {
        let children = pdp.policies().iter().map(|c| self.policy(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(DecisionFormulas(self.combine(pdp.alg(), &children)))
    }

    /// `[applies, not-applicable, indeterminate]` for an optional target.
    fn target(&mut self, target: Option<&Expr>) -> Result<[FormulaId; 3], EncodeError> {
        let Some(target) = target else {
            return Ok([Arena::TRUE, Arena::FALSE, Arena::FALSE]);
        };
        let cases = self.expr(target)?;
        let t = self.guard_where(&cases, |o| *o == Outcome::Val(Value::Bool(true)));
        let na = self.guard_where(&cases, |o| {
            matches!(o, Outcome::Val(Value::Bool(false)) | Outcome::Absent)
        });
        let i = self.guard_where(&cases, |o| {
            !matches!(o, Outcome::Val(Value::Bool(_)) | Outcome::Absent)
        });
        Ok([t, na, i])
    }

    fn guard_where(&mut self, cases: &Cases, pred: impl Fn(&Outcome) -> bool) -> FormulaId {
        let guards: Vec<FormulaId> = cases.iter().filter(|(_, o)| pred(o)).map(|(g, _)| *g).collect();
        self.arena.or(guards)
    }

    /// Folds child quads through the algorithm's pairwise matrix.
    fn combine(&mut self, alg: CombAlg, children: &[DecisionFormulas]) -> [FormulaId; 4] {
        let mut acc = children[0].0;
        for child in &children[1..] {
            let mut next: [Vec<FormulaId>; 4] = Default::default();
            for x in Decision::ALL {
                for y in Decision::ALL {
                    let z = matrix(alg, x, y);
                    let g = self.arena.and2(acc[x.index()], child.0[y.index()]);
                    next[z.index()].push(g);
                }
            }
            acc = next.map(|gs| self.arena.or(gs));
        }
        let mut out: [Vec<FormulaId>; 4] = Default::default();
        for d in Decision::ALL {
            out[finish(alg, d).index()].push(acc[d.index()]);
        }
        out.map(|gs| self.arena.or(gs))
    }

    fn present(&mut self, attr: usize) -> FormulaId {
        if self.attrs[attr].1.allow_absent() {
            self.arena.atom(Atom::Present(attr))
        } else {
            Arena::TRUE
        }
    }

    fn expr(&mut self, expr: &Expr) -> Result<Cases, EncodeError> {
        Ok(match expr {
            Expr::Literal(v) => vec![(Arena::TRUE, Outcome::Val(v.clone()))],
            Expr::Set(s) => vec![(Arena::TRUE, Outcome::Set(s.clone()))],
            Expr::Name(n) => self.name(n)?,
            Expr::Not(e) => {
                let inner = self.expr(e)?;
                let mapped = inner
                    .into_iter()
                    .map(|(g, o)| {
                        let o = match o {
                            Outcome::Val(Value::Bool(b)) => Outcome::Val(Value::Bool(!b)),
                            Outcome::Absent => Outcome::Absent,
                            _ => Outcome::Error,
                        };
                        (g, o)
                    })
                    .collect();
                self.merge(mapped)
            }
            Expr::Call(f, a, b) => {
                let lhs = self.expr(a)?;
                let rhs = self.expr(b)?;
                let mut out = Vec::new();
                for (ga, oa) in &lhs {
                    for (gb, ob) in &rhs {
                        let g = self.arena.and2(*ga, *gb);
                        if g == Arena::FALSE {
                            continue;
                        }
                        for (gc, oc) in self.op(*f, oa, ob) {
                            let guard = self.arena.and2(g, gc);
                            out.push((guard, oc));
                        }
                    }
                }
                self.merge(out)
            }
        })
    }

    fn name(&mut self, name: &AttrName) -> Result<Cases, EncodeError> {
        let attr = *self.index.get(name).ok_or_else(|| EncodeError::Undeclared(name.clone()))?;
        let present = self.present(attr);
        let domain = self.attrs[attr].1.clone();
        let mut cases = Vec::new();
        if domain.kind().is_set() {
            cases.push((present, Outcome::SetAttr(attr)));
        } else {
            for (i, v) in domain.universe().iter().enumerate() {
                let eq = self.arena.atom(Atom::Eq(attr, i));
                let g = self.arena.and2(present, eq);
                cases.push((g, Outcome::Val(v.clone())));
            }
        }
        if domain.allow_absent() {
            let absent = self.arena.not(present);
            cases.push((absent, Outcome::Absent));
        }
        Ok(cases)
    }

    /// Groups guards by outcome, dropping unsatisfiable ones.
    fn merge(&mut self, cases: Cases) -> Cases {
        let mut grouped: Vec<(Vec<FormulaId>, Outcome)> = Vec::new();
        for (g, o) in cases {
            if g == Arena::FALSE {
                continue;
            }
            match grouped.iter_mut().find(|(_, existing)| *existing == o) {
                Some((gs, _)) => gs.push(g),
                None => grouped.push((vec![g], o)),
            }
        }
        grouped.into_iter().map(|(gs, o)| (self.arena.or(gs), o)).collect()
    }

    /// One function application, possibly split on symbolic set contents.
    fn op(&mut self, f: Func, a: &Outcome, b: &Outcome) -> Cases {
        use Outcome::*;
        let always = |o: Outcome| vec![(Arena::TRUE, o)];
        if matches!(f, Func::And | Func::Or) {
            return always(kleene(f == Func::And, a, b));
        }
        match (a, b) {
            (Error, _) | (_, Error) => return always(Error),
            (Absent, _) | (_, Absent) => return always(Absent),
            _ => {}
        }
        match (f, a, b) {
            (Func::Equal, SetAttr(x), Set(s)) | (Func::Equal, Set(s), SetAttr(x)) => {
                if s.kind() != ValueKind::String {
                    return always(Error);
                }
                let g = self.set_equals_literal(*x, s);
                self.split(g)
            }
            (Func::Equal, SetAttr(x), SetAttr(y)) => {
                let g = self.set_equals_attr(*x, *y);
                self.split(g)
            }
            (Func::In, Val(v), SetAttr(x)) => {
                if v.kind() != ValueKind::String {
                    return always(Error);
                }
                match self.attrs[*x].1.position(v) {
                    Some(j) => {
                        let m = self.arena.atom(Atom::Member(*x, j));
                        self.split(m)
                    }
                    None => always(Val(Value::Bool(false))),
                }
            }
            (Func::SubRole, SetAttr(x), Val(Value::Str(target))) => self.sub_role_attr(*x, target),
            (_, SetAttr(_), _) | (_, _, SetAttr(_)) => always(Error),
            _ => always(fold(f, a, b, &self.config)),
        }
    }

    /// `[(g, true), (not g, false)]`.
    fn split(&mut self, g: FormulaId) -> Cases {
        let ng = self.arena.not(g);
        vec![(g, Outcome::Val(Value::Bool(true))), (ng, Outcome::Val(Value::Bool(false)))]
    }

    fn set_equals_literal(&mut self, attr: usize, s: &ValueSet) -> FormulaId {
        let universe = self.attrs[attr].1.universe().to_vec();
        if s.iter().any(|v| !universe.contains(v)) {
            return Arena::FALSE;
        }
        let flags: Vec<FormulaId> = universe
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let m = self.arena.atom(Atom::Member(attr, j));
                if s.contains(v) {
                    m
                } else {
                    self.arena.not(m)
                }
            })
            .collect();
        self.arena.and(flags)
    }

    fn set_equals_attr(&mut self, x: usize, y: usize) -> FormulaId {
        if x == y {
            return Arena::TRUE;
        }
        let ux = self.attrs[x].1.universe().to_vec();
        let uy = self.attrs[y].1.universe().to_vec();
        let mut all: Vec<&Value> = ux.iter().chain(uy.iter()).collect();
        all.sort();
        all.dedup();
        let mut parts = Vec::new();
        for v in all {
            let fx = match ux.iter().position(|u| u == v) {
                Some(j) => self.arena.atom(Atom::Member(x, j)),
                None => Arena::FALSE,
            };
            let fy = match uy.iter().position(|u| u == v) {
                Some(j) => self.arena.atom(Atom::Member(y, j)),
                None => Arena::FALSE,
            };
            parts.push(self.arena.iff(fx, fy));
        }
        self.arena.and(parts)
    }

    fn sub_role_attr(&mut self, attr: usize, target: &str) -> Cases {
        if !self.config.roles.contains(target) {
            return vec![(Arena::TRUE, Outcome::Error)];
        }
        let universe = self.attrs[attr].1.universe().to_vec();
        let (mut unknown, mut reaching) = (Vec::new(), Vec::new());
        for (j, v) in universe.iter().enumerate() {
            let m = self.arena.atom(Atom::Member(attr, j));
            match v.as_str().and_then(|r| self.config.roles.is_sub_role(r, target)) {
                None => unknown.push(m),
                Some(true) => reaching.push(m),
                Some(false) => {}
            }
        }
        let err = self.arena.or(unknown);
        let ok = self.arena.not(err);
        let reach = self.arena.or(reaching);
        let no_reach = self.arena.not(reach);
        let t = self.arena.and2(ok, reach);
        let f = self.arena.and2(ok, no_reach);
        vec![(err, Outcome::Error), (t, Outcome::Val(Value::Bool(true))), (f, Outcome::Val(Value::Bool(false)))]
    }

    /// Variable assignment of a request; `None` if it leaves the domain.
    pub(crate) fn assignment(&self, request: &Request) -> Option<Vec<Slot>> {
        if request.iter().any(|(n, _)| !self.index.contains_key(n)) {
            return None;
        }
        self.attrs
            .iter()
            .map(|(name, domain)| match (request.lookup(name), domain.kind().is_set()) {
                (None, _) if domain.allow_absent() => Some(if domain.kind().is_set() {
                    Slot::Set(None)
                } else {
                    Slot::Scalar(None)
                }),
                (None, _) => None,
                (Some(Binding::Value(v)), false) => domain.position(v).map(|i| Slot::Scalar(Some(i))),
                (Some(Binding::Set(s)), true) => {
                    let flags: Vec<bool> = domain.universe().iter().map(|u| s.contains(u)).collect();
                    (flags.iter().filter(|&&b| b).count() == s.len()).then_some(Slot::Set(Some(flags)))
                }
                _ => None,
            })
            .collect()
    }

    /// Truth of `f` under the assignment of `request`; `None` if the request
    /// lies outside the domain.
    pub fn holds(&self, f: FormulaId, request: &Request) -> Option<bool> {
        let slots = self.assignment(request)?;
        Some(self.arena.eval(f, &|atom| atom_truth(&slots, atom)))
    }

    /// Decisions whose formula holds under `request`; exactly one for a
    /// correct encoding.
    pub fn decisions(&self, formulas: &DecisionFormulas, request: &Request) -> Option<Vec<Decision>> {
        let slots = self.assignment(request)?;
        let truth = |atom| atom_truth(&slots, atom);
        Some(Decision::ALL.into_iter().filter(|d| self.arena.eval(formulas.get(*d), &truth)).collect())
    }
}

fn atom_truth(slots: &[Slot], atom: Atom) -> bool {
    match atom {
        Atom::Present(a) => !matches!(slots[a], Slot::Scalar(None) | Slot::Set(None)),
        Atom::Eq(a, i) => slots[a] == Slot::Scalar(Some(i)),
        Atom::Member(a, j) => matches!(&slots[a], Slot::Set(Some(flags)) if flags[j]),
    }
}

/// Pairwise combination matrix, accumulator first.
fn matrix(alg: CombAlg, x: Decision, y: Decision) -> Decision {
    use Decision::{Deny as D, Indeterminate as I, NotApplicable as NA, Permit as P};
    let either = |d: Decision| x == d || y == d;
    match alg {
        CombAlg::PermitOverrides | CombAlg::DenyOverrides => {
            let (win, lose) = if alg == CombAlg::PermitOverrides { (P, D) } else { (D, P) };
            if either(win) {
                win
            } else if either(I) {
                I
            } else if either(lose) {
                lose
            } else {
                NA
            }
        }
        CombAlg::DenyUnlessPermit => {
            if either(P) {
                P
            } else {
                NA
            }
        }
        CombAlg::PermitUnlessDeny => {
            if either(D) {
                D
            } else {
                NA
            }
        }
        CombAlg::FirstApplicable => {
            if x != NA {
                x
            } else {
                y
            }
        }
        CombAlg::OnlyOneApplicable => match (x, y) {
            (NA, y) => y,
            (I, _) => I,
            (x, NA) => x,
            _ => I,
        },
        CombAlg::WeakConsensus => match (x, y) {
            (NA, y) => y,
            (I, _) => I,
            (x, y) if y == x || y == NA => x,
            _ => I,
        },
        CombAlg::StrongConsensus => {
            if x == y {
                x
            } else {
                I
            }
        }
    }
}

/// Post-processing of the folded decision.
fn finish(alg: CombAlg, d: Decision) -> Decision {
    match (alg, d) {
        (CombAlg::DenyUnlessPermit, Decision::Permit) => Decision::Permit,
        (CombAlg::DenyUnlessPermit, _) => Decision::Deny,
        (CombAlg::PermitUnlessDeny, Decision::Deny) => Decision::Deny,
        (CombAlg::PermitUnlessDeny, _) => Decision::Permit,
        _ => d,
    }
}

fn kleene(conj: bool, a: &Outcome, b: &Outcome) -> Outcome {
    let tri = |o: &Outcome| match o {
        Outcome::Val(Value::Bool(v)) => Some(Some(*v)),
        Outcome::Absent => Some(None),
        _ => None,
    };
    let (Some(x), Some(y)) = (tri(a), tri(b)) else {
        return Outcome::Error;
    };
    // and: false absorbs; or: true absorbs
    let absorbing = !conj;
    if x == Some(absorbing) || y == Some(absorbing) {
        Outcome::Val(Value::Bool(absorbing))
    } else if x.is_none() || y.is_none() {
        Outcome::Absent
    } else {
        Outcome::Val(Value::Bool(!absorbing))
    }
}

/// Concrete application on literal operands (neither absent nor erroneous).
fn fold(f: Func, a: &Outcome, b: &Outcome, config: &EngineConfig) -> Outcome {
    use Outcome::{Error, Set, Val};
    let bool_ = |b: bool| Val(Value::Bool(b));
    match (f, a, b) {
        (Func::Equal, Val(x), Val(y)) if x.kind() == y.kind() => bool_(x == y),
        (Func::Equal, Set(x), Set(y)) if x.kind() == y.kind() => bool_(x == y),
        (Func::In, Val(x), Set(s)) if x.kind() == s.kind() => bool_(s.contains(x)),
        (Func::In, Val(x), Val(y)) if x.kind() == y.kind() => bool_(x == y),
        (Func::GreaterThan, Val(Value::Double(x)), Val(Value::Double(y))) => bool_(x > y),
        (Func::GreaterThan, Val(Value::Date(x)), Val(Value::Date(y))) => bool_(x > y),
        (Func::Add | Func::Subtract | Func::Multiply | Func::Divide, Val(Value::Double(x)), Val(Value::Double(y))) => {
            let r = match f {
                Func::Add => x + y,
                Func::Subtract => x - y,
                Func::Multiply => x * y,
                _ if *y == 0.0 => return Error,
                _ => x / y,
            };
            if r.is_finite() {
                Val(Value::Double(r))
            } else {
                Error
            }
        }
        (Func::Leq, Val(Value::Str(x)), Val(Value::Str(y))) => match config.levels.leq(x, y) {
            Some(r) => bool_(r),
            None => Error,
        },
        (Func::SubRole, lhs, Val(Value::Str(target))) => {
            let roles: Vec<&Value> = match lhs {
                Val(v) => vec![v],
                Set(s) => s.iter().collect(),
                _ => return Error,
            };
            let mut any = false;
            for r in roles {
                match r.as_str().map(|r| config.roles.is_sub_role(r, target)) {
                    Some(Some(reach)) => any |= reach,
                    _ => return Error,
                }
            }
            bool_(any)
        }
        _ => Error,
    }
}

use std::time::Instant;

use rayon::prelude::*;

use super::{AnalysisError, CheckReport, Options, Property, RequestSpace, Statistics, Witness};
use crate::eval::{applicability, combine_nonempty, eval_expr, eval_policy, Applicability, Evaluate, ExprResult};
use crate::model::{
    CombAlg, Decision, Document, DomainSpec, EngineConfig, Expr, Policy, Request, RequestSetSpec,
};

const CHUNK: u64 = 2048;

/// What one request contributed to a report.
#[derive(Default)]
struct Probe {
    violation: Option<Witness>,
    defect: Option<Witness>,
    absent: bool,
}

#[derive(Default)]
struct Partial {
    violations: u64,
    errors: u64,
    absent: u64,
    witnesses: Vec<Witness>,
}

fn scan<F>(property: Property, space: &RequestSpace, opts: &Options, probe: F) -> CheckReport
where
    F: Fn(Request) -> Probe + Sync,
{
    let start = Instant::now();
    let keep = opts.witness_cap.max(1);
    let chunks = space.len().div_ceil(CHUNK);
    let parts: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut part = Partial::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(space.len()) {
                let p = probe(space.get(i));
                part.absent += u64::from(p.absent);
                for (w, counter) in [(p.defect, &mut part.errors), (p.violation, &mut part.violations)] {
                    if let Some(w) = w {
                        *counter += 1;
                        if part.witnesses.len() < keep {
                            part.witnesses.push(w);
                        }
                    }
                }
            }
            part
        })
        .collect();
    let mut stats = Statistics { examined: space.len(), ..Statistics::default() };
    let mut witnesses = Vec::new();
    for part in parts {
        stats.violations += part.violations;
        stats.constraint_errors += part.errors;
        stats.constraint_absent += part.absent;
        let room = keep - witnesses.len();
        witnesses.extend(part.witnesses.into_iter().take(room));
    }
    stats.elapsed = start.elapsed();
    CheckReport {
        property,
        holds: stats.violations == 0 && stats.constraint_errors == 0,
        witnesses,
        stats,
    }
}

enum Membership {
    In,
    Out,
    Absent,
    Error(String),
}

fn membership(constraint: &Expr, request: &Request, config: &EngineConfig) -> Membership {
    match eval_expr(constraint, request, config) {
        ExprResult::Value(crate::model::Value::Bool(true)) => Membership::In,
        ExprResult::Absent => Membership::Absent,
        ExprResult::Error(e) => Membership::Error(e),
        ExprResult::Value(crate::model::Value::Bool(false)) => Membership::Out,
        other => Membership::Error(format!("constraint is not boolean: {other}")),
    }
}

fn witness(request: Request, observed: Vec<Decision>, expected: Vec<Decision>, note: Option<String>) -> Witness {
    Witness { request, observed, expected, note }
}

/// Requests in `permit_set` must be permitted and requests in `deny_set`
/// denied.
pub fn check_enforcement<P: Evaluate + Sync + ?Sized>(
    policy: &P,
    permit_set: &RequestSetSpec,
    deny_set: &RequestSetSpec,
    config: &EngineConfig,
    opts: &Options,
) -> Result<CheckReport, AnalysisError> {
    if permit_set.domain != deny_set.domain {
        return Err(AnalysisError::DomainMismatch);
    }
    let space = RequestSpace::new(&permit_set.domain, opts.cap)?;
    Ok(scan(Property::Enforcement, &space, opts, |r| {
        let in_permit = membership(&permit_set.constraint, &r, config);
        let in_deny = membership(&deny_set.constraint, &r, config);
        expect_decisions(policy, r, config, [(in_permit, Decision::Permit, "permit"), (in_deny, Decision::Deny, "deny")])
    }))
}

/// Requests in `permit_set` must be permitted and every other request denied.
pub fn check_least_privilege<P: Evaluate + Sync + ?Sized>(
    policy: &P,
    permit_set: &RequestSetSpec,
    config: &EngineConfig,
    opts: &Options,
) -> Result<CheckReport, AnalysisError> {
    let space = RequestSpace::new(&permit_set.domain, opts.cap)?;
    Ok(scan(Property::LeastPrivilege, &space, opts, |r| {
        let m = membership(&permit_set.constraint, &r, config);
        let absent = matches!(m, Membership::Absent);
        let (permit, deny) = match m {
            Membership::In => (Membership::In, Membership::Out),
            Membership::Out | Membership::Absent => (Membership::Out, Membership::In),
            Membership::Error(e) => (Membership::Error(e), Membership::Out),
        };
        let mut probe = expect_decisions(policy, r, config, [(permit, Decision::Permit, "permit"), (deny, Decision::Deny, "deny")]);
        probe.absent = absent;
        probe
    }))
}

fn expect_decisions<P: Evaluate + ?Sized>(
    policy: &P,
    request: Request,
    config: &EngineConfig,
    sets: [(Membership, Decision, &str); 2],
) -> Probe {
    let mut probe = Probe::default();
    let mut expected = Vec::new();
    let mut defects = Vec::new();
    for (m, want, label) in sets {
        match m {
            Membership::In => expected.push(want),
            Membership::Absent => probe.absent = true,
            Membership::Error(e) => defects.push(format!("{label}-set constraint: {e}")),
            Membership::Out => {}
        }
    }
    let decision = policy.evaluate(&request, config);
    if !defects.is_empty() {
        probe.defect = Some(witness(request.clone(), vec![decision], vec![], Some(defects.join("; "))));
    }
    if expected.iter().any(|&d| d != decision) {
        probe.violation = Some(witness(request, vec![decision], expected, None));
    }
    probe
}

/// No request may be not-applicable; with `strict`, none may be
/// indeterminate either.
pub fn check_completeness<P: Evaluate + Sync + ?Sized>(
    policy: &P,
    domain: &DomainSpec,
    config: &EngineConfig,
    strict: bool,
    opts: &Options,
) -> Result<CheckReport, AnalysisError> {
    let space = RequestSpace::new(domain, opts.cap)?;
    let allowed: &[Decision] = if strict {
        &[Decision::Permit, Decision::Deny]
    } else {
        &[Decision::Permit, Decision::Deny, Decision::Indeterminate]
    };
    Ok(scan(Property::Completeness, &space, opts, |r| {
        let d = policy.evaluate(&r, config);
        let violation = (!allowed.contains(&d)).then(|| witness(r, vec![d], allowed.to_vec(), None));
        Probe { violation, ..Probe::default() }
    }))
}

/// Child `index` is redundant when removing it never changes the
/// container's decision. Child decisions are computed once per request and
/// recombined with and without the child.
pub fn check_redundancy(
    container: &Document,
    index: usize,
    domain: &DomainSpec,
    config: &EngineConfig,
    opts: &Options,
) -> Result<CheckReport, AnalysisError> {
    let (alg, target, children): (CombAlg, Option<&Expr>, &[Policy]) = match container {
        Document::Pdp(p) => (p.alg(), None, p.policies()),
        Document::Policy(Policy::Set(s)) => (s.alg(), s.target(), s.children()),
        Document::Policy(Policy::Rule(_)) => return Err(AnalysisError::NotAContainer),
    };
    if children.len() < 2 {
        return Err(AnalysisError::TooFewChildren { arity: children.len() });
    }
    if index >= children.len() {
        return Err(AnalysisError::ChildIndex { index, arity: children.len() });
    }
    let space = RequestSpace::new(domain, opts.cap)?;
    Ok(scan(Property::Redundancy, &space, opts, |r| {
        let app = applicability(target, &r, config);
        if app != Applicability::Applies {
            return Probe::default();
        }
        let mut ds: Vec<Decision> = children.iter().map(|c| eval_policy(c, &r, config)).collect();
        let with = combine_nonempty(alg, &ds);
        ds.remove(index);
        let without = combine_nonempty(alg, &ds);
        let violation = (with != without).then(|| {
            witness(r, vec![with, without], vec![with], Some(format!("removing child {index} changes the decision")))
        });
        Probe { violation, ..Probe::default() }
    }))
}

/// No request may be decided (permit or deny) by both policies.
pub fn check_disjointness<P: Evaluate + Sync + ?Sized, Q: Evaluate + Sync + ?Sized>(
    first: &P,
    second: &Q,
    domain: &DomainSpec,
    config: &EngineConfig,
    opts: &Options,
) -> Result<CheckReport, AnalysisError> {
    let space = RequestSpace::new(domain, opts.cap)?;
    Ok(scan(Property::Disjointness, &space, opts, |r| {
        let (a, b) = (first.evaluate(&r, config), second.evaluate(&r, config));
        let violation = (a.is_applicable() && b.is_applicable())
            .then(|| witness(r, vec![a, b], vec![], Some("both policies decide".into())));
        Probe { violation, ..Probe::default() }
    }))
}

/// `covering` covers `covered` on `requests` when, wherever `covered`
/// decides, `covering` reaches the same decision.
pub fn check_coverage<P: Evaluate + Sync + ?Sized, Q: Evaluate + Sync + ?Sized>(
    covering: &P,
    covered: &Q,
    requests: &RequestSetSpec,
    config: &EngineConfig,
    opts: &Options,
) -> Result<CheckReport, AnalysisError> {
    let space = RequestSpace::new(&requests.domain, opts.cap)?;
    Ok(scan(Property::Coverage, &space, opts, |r| {
        let mut probe = Probe::default();
        match membership(&requests.constraint, &r, config) {
            Membership::In => {}
            Membership::Out => return probe,
            Membership::Absent => {
                probe.absent = true;
                return probe;
            }
            Membership::Error(e) => {
                let d = covering.evaluate(&r, config);
                let d2 = covered.evaluate(&r, config);
                probe.defect = Some(witness(r, vec![d, d2], vec![], Some(format!("request-set constraint: {e}"))));
                return probe;
            }
        }
        let inner = covered.evaluate(&r, config);
        if inner.is_applicable() {
            let outer = covering.evaluate(&r, config);
            if outer != inner {
                probe.violation = Some(witness(r, vec![outer, inner], vec![inner], None));
            }
        }
        probe
    }))
}

//! Constraint encoding and SMT-LIB 2 emission.
//!
//! A policy is collapsed into four formulas, one per decision, over:
//!
//! - one typed variable per scalar attribute (`Bool`, `Real`, an enumerated
//!   `Str` sort, or `Int` days for dates), restricted to its universe;
//! - one presence flag per attribute that may be absent;
//! - one membership flag per element of a set attribute's universe.
//!
//! Each sub-expression is encoded as a list of guarded outcomes (a value, a
//! set, absence or an error). Operations on known operands are folded at
//! encoding time, so the emitted formulas are purely propositional over
//! equality atoms. Combining algorithms are unfolded through their pairwise
//! matrices. Under the domain constraints exactly one of the four formulas
//! holds for every assignment.

mod emit;
mod encode;
mod formula;
mod solver;

use std::time::Duration;

pub use encode::{DecisionFormulas, Encoding};
pub use formula::{Arena, Atom, FormulaId, Node};
pub use solver::{parse_output, parse_sexprs, solve, Model, SExpr, Solver, SolverOutput, Verdict, DEFAULT_TIMEOUT, SOLVER_ENV};

use crate::model::{AttrName, Decision, Document, DomainSpec, EngineConfig, Expr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("attribute `{0}` is not declared in the domain")]
    Undeclared(AttrName),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("solver `{0}` not found")]
    NotFound(String),
    #[error("solver timed out after {0:?}")]
    Timeout(Duration),
    #[error("unparseable solver output: {0}")]
    Unparseable(String),
    #[error("solver reported an error: {0}")]
    Failed(String),
    #[error("solver i/o: {0}")]
    Io(String),
}

/// What a script asks the solver. A `sat` answer always means a witness
/// request exists.
#[derive(Debug, Clone, Copy)]
pub enum Query<'a> {
    /// Some request gets this decision.
    Reach(Decision),
    /// Some request is not applicable (the policy is incomplete).
    Completeness,
    /// Some request is decided by both policies.
    Disjointness(&'a Document),
    /// Some request in the set is decided by the other policy but not the
    /// same way by this one.
    Coverage { covered: &'a Document, within: &'a Expr },
    /// Some request in the set gets this decision.
    Enforcement { members: &'a Expr, decision: Decision },
}

/// Encodes `doc` over `domain`.
pub fn encode(
    doc: &Document,
    domain: &DomainSpec,
    config: &EngineConfig,
) -> Result<(Encoding, DecisionFormulas), EncodeError> {
    let mut enc = Encoding::new(domain, config);
    let formulas = enc.encode(doc)?;
    Ok((enc, formulas))
}

/// Encodes `doc` and the query goal into one instance.
pub fn encode_query(
    doc: &Document,
    domain: &DomainSpec,
    config: &EngineConfig,
    query: Query<'_>,
) -> Result<(Encoding, FormulaId), EncodeError> {
    let (mut enc, f) = encode(doc, domain, config)?;
    let goal = match query {
        Query::Reach(d) => f.get(d),
        Query::Completeness => f.get(Decision::NotApplicable),
        Query::Disjointness(other) => {
            let g = enc.encode(other)?;
            let a = enc.arena_mut();
            let first = a.or2(f.get(Decision::Permit), f.get(Decision::Deny));
            let second = a.or2(g.get(Decision::Permit), g.get(Decision::Deny));
            a.and2(first, second)
        }
        Query::Coverage { covered, within } => {
            let g = enc.encode(covered)?;
            let member = enc.constraint(within)?;
            let a = enc.arena_mut();
            let mut misses = Vec::new();
            for d in [Decision::Permit, Decision::Deny] {
                let not_same = a.not(f.get(d));
                misses.push(a.and2(g.get(d), not_same));
            }
            let miss = a.or(misses);
            a.and2(member, miss)
        }
        Query::Enforcement { members, decision } => {
            let member = enc.constraint(members)?;
            enc.arena_mut().and2(member, f.get(decision))
        }
    };
    Ok((enc, goal))
}

/// The SMT-LIB script for `query` on `doc`.
pub fn emit_smtlib(
    doc: &Document,
    domain: &DomainSpec,
    config: &EngineConfig,
    query: Query<'_>,
) -> Result<String, EncodeError> {
    let (enc, goal) = encode_query(doc, domain, config, query)?;
    Ok(enc.emit(goal))
}

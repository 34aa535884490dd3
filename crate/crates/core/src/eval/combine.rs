use super::EvalError;
use crate::model::{CombAlg, Decision};

use Decision::{Deny as D, Indeterminate as I, NotApplicable as NA, Permit as P};

/// Combines child decisions, left to right, under `alg`.
pub fn combine(alg: CombAlg, decisions: &[Decision]) -> Result<Decision, EvalError> {
    if decisions.is_empty() {
        return Err(EvalError::EmptySequence);
    }
    Ok(combine_nonempty(alg, decisions))
}

pub(crate) fn combine_nonempty(alg: CombAlg, ds: &[Decision]) -> Decision {
    debug_assert!(!ds.is_empty());
    let any = |d: Decision| ds.contains(&d);
    let all = |d: Decision| ds.iter().all(|&x| x == d);
    match alg {
        CombAlg::PermitOverrides => overrides(ds, P, D),
        CombAlg::DenyOverrides => overrides(ds, D, P),
        CombAlg::DenyUnlessPermit => {
            if any(P) {
                P
            } else {
                D
            }
        }
        CombAlg::PermitUnlessDeny => {
            if any(D) {
                D
            } else {
                P
            }
        }
        CombAlg::FirstApplicable => ds.iter().copied().find(|d| *d != NA).unwrap_or(NA),
        CombAlg::OnlyOneApplicable => {
            if any(I) {
                return I;
            }
            let mut applicable = ds.iter().filter(|d| d.is_applicable());
            match (applicable.next(), applicable.next()) {
                (None, _) => NA,
                (Some(&d), None) => d,
                (Some(_), Some(_)) => I,
            }
        }
        CombAlg::WeakConsensus => {
            if any(I) || (any(P) && any(D)) {
                I
            } else if any(P) {
                P
            } else if any(D) {
                D
            } else {
                NA
            }
        }
        CombAlg::StrongConsensus => {
            if all(P) {
                P
            } else if all(D) {
                D
            } else if all(NA) {
                NA
            } else {
                I
            }
        }
    }
}

fn overrides(ds: &[Decision], winner: Decision, loser: Decision) -> Decision {
    if ds.contains(&winner) {
        winner
    } else if ds.contains(&I) {
        I
    } else if ds.contains(&loser) {
        loser
    } else {
        NA
    }
}

//! Exhaustive property checks over a finite request space.
//!
//! Every check enumerates the requests induced by a [`DomainSpec`], evaluates
//! the policies involved and collects a capped list of witnesses for each
//! request that breaks the property. The scan runs in parallel over index
//! ranges; results are merged in enumeration order so reports do not depend
//! on scheduling.

mod checks;
mod report;
mod space;

use std::fmt;
use std::time::Duration;

pub use checks::{
    check_completeness, check_coverage, check_disjointness, check_enforcement,
    check_least_privilege, check_redundancy,
};
pub use space::{enumerate_requests, RequestSpace};

use crate::model::{Decision, Request};

pub const DEFAULT_CAP: u64 = 10_000_000;
pub const DEFAULT_WITNESS_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("request space too large: {product} exceeds the cap of {cap}")]
    TooLarge { product: String, cap: u64 },
    #[error("the permit and deny sets are declared over different domains")]
    DomainMismatch,
    #[error("a rule has no children to remove")]
    NotAContainer,
    #[error("cannot remove a child from a container with {arity} child(ren); at least two are required")]
    TooFewChildren { arity: usize },
    #[error("child index {index} out of range for {arity} children")]
    ChildIndex { index: usize, arity: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Largest request space that will be enumerated.
    pub cap: u64,
    /// Witnesses kept per report; counting continues past the cap.
    pub witness_cap: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { cap: DEFAULT_CAP, witness_cap: DEFAULT_WITNESS_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    Enforcement,
    LeastPrivilege,
    Completeness,
    Redundancy,
    Disjointness,
    Coverage,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Enforcement => "enforcement",
            Property::LeastPrivilege => "least-privilege",
            Property::Completeness => "completeness",
            Property::Redundancy => "redundancy",
            Property::Disjointness => "disjointness",
            Property::Coverage => "coverage",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A request on which a property fails.
///
/// `observed` lists the decisions of the policies under check in argument
/// order; for redundancy it is the container with and without the child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub request: Request,
    pub observed: Vec<Decision>,
    pub expected: Vec<Decision>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Statistics {
    pub examined: u64,
    pub violations: u64,
    /// Requests whose set constraint evaluated to absent (treated as non-members).
    pub constraint_absent: u64,
    /// Requests whose set constraint evaluated to an error (reported as defects).
    pub constraint_errors: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub property: Property,
    pub holds: bool,
    pub witnesses: Vec<Witness>,
    pub stats: Statistics,
}

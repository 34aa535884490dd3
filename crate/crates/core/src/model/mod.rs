//! Shared domain types: values, requests, decisions, the policy tree, finite
//! attribute domains and the engine configuration behind `leq`/`sub-role`.
//!
//! Everything here is immutable once built and can be shared freely across
//! threads.

mod config;
mod domain;
mod policy;
mod request;
mod value;

pub use config::{EngineConfig, LevelOrder, RoleHierarchy};
pub use domain::{AttrDomain, AttrKind, DomainSpec, RequestSetSpec};
pub use policy::{CombAlg, Decision, Document, Effect, Expr, Func, Pdp, Policy, PolicySet, Rule};
pub use request::{AttrName, Binding, Request};
pub use value::{Value, ValueKind, ValueSet};


#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid attribute name `{0}`")]
    InvalidName(String),
    #[error("value sets must be non-empty")]
    EmptySet,
    #[error("value set mixes {0} and {1} values")]
    MixedKinds(ValueKind, ValueKind),
    #[error("binding for `{name}`: {source}")]
    InBinding {
        name: String,
        #[source]
        source: Box<ModelError>,
    },
    #[error("unknown keyword `{0}`")]
    UnknownKeyword(String),
    #[error("empty policy list")]
    EmptyPolicies,
    #[error("child index {index} out of range for {arity} children")]
    ChildIndex { index: usize, arity: usize },
    #[error("empty value universe")]
    EmptyUniverse,
    #[error("{found} value in a {expected} universe")]
    UniverseKind { expected: AttrKind, found: ValueKind },
    #[error("duplicate value {0} in universe")]
    DuplicateValue(String),
    #[error("attribute `{0}` declared twice")]
    DuplicateDeclaration(String),
    #[error("level order is not antisymmetric: {0} <= {1} and {1} <= {0}")]
    NotAntisymmetric(String, String),
    #[error("role cycle through `{0}`")]
    RoleCycle(String),
}

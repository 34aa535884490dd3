//! Policy evaluation and property verification for a light attribute-based
//! access control language.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: values, requests, decisions, policy trees, finite domains and
//!   the engine configuration (level order, role hierarchy).
//! - [`parser`]: the text formats for policies (`.facpl`), requests (`.req`),
//!   domains (`.dom`), request sets (`.spec`) and configuration (`.cfg`).
//! - [`eval`]: the decision semantics, including all eight combining
//!   algorithms.
//! - [`analyzer`]: exhaustive checks of enforcement, least privilege,
//!   completeness, redundancy, disjointness and coverage over a finite domain.
//! - [`smt`]: a per-decision constraint encoding, SMT-LIB 2 emission and an
//!   external solver driver.
//! - [`casestudy`]: the bundled banking fixtures.
//!
//! ```
//! use facpl_core::{eval::Evaluate, model::{Decision, EngineConfig}, parser};
//!
//! let policy = parser::parse_policy(r#"
//!     { deny-unless-permit
//!       target: equal(resource/id, "loanDoc")
//!       policies:
//!         ( permit target: and(equal(action/id, "read"), equal(subject/role, "assistant")) )
//!     }"#).unwrap();
//! let request = parser::parse_request(r#"
//!     (subject/id, "clerk1") (subject/role, "assistant")
//!     (resource/id, "loanDoc") (action/id, "read")"#).unwrap();
//! assert_eq!(policy.evaluate(&request, &EngineConfig::default()), Decision::Permit);
//! ```

pub mod analyzer;
pub mod casestudy;
pub mod eval;
pub mod model;
pub mod parser;
pub mod smt;

//! The bundled banking fixtures and the three-policy read-access replay.
//!
//! Policy A combines the no-read-up rule and the access control list rule
//! under permit-overrides, Policy B under deny-unless-permit, and Policy C
//! nests them in a strong-consensus set below a deny-unless-permit PDP.

use std::fmt::Write;

use crate::analyzer::{check_enforcement, check_least_privilege, AnalysisError, CheckReport, Options, Witness};
use crate::model::{Decision, Document, DomainSpec, EngineConfig, RequestSetSpec};
use crate::parser::{parse_config, parse_domain, parse_policy, parse_request_set};

pub const BANKING_DOM: &str = include_str!("../fixtures/banking.dom");
pub const BANKING_CFG: &str = include_str!("../fixtures/banking.cfg");
pub const WALKTHROUGH_DOM: &str = include_str!("../fixtures/walkthrough.dom");

pub const LOAN_DOC: &str = include_str!("../fixtures/loan_doc.facpl");
pub const LOAN_DOC_REQ: &str = include_str!("../fixtures/loan_doc.req");
pub const LOAN_DOC_OTHER_REQ: &str = include_str!("../fixtures/loan_doc_other.req");
pub const LOAN_DOC_OFFICIER_REQ: &str = include_str!("../fixtures/loan_doc_officier.req");
pub const LOAN_DOC_WRITE_REQ: &str = include_str!("../fixtures/loan_doc_write.req");

pub const POLICY_A: &str = include_str!("../fixtures/policy_a.facpl");
pub const POLICY_B: &str = include_str!("../fixtures/policy_b.facpl");
pub const POLICY_C: &str = include_str!("../fixtures/policy_c.facpl");
pub const READ_RULE: &str = include_str!("../fixtures/read_rule.facpl");
pub const WRITE_RULE: &str = include_str!("../fixtures/write_rule.facpl");
pub const SOD_RULE: &str = include_str!("../fixtures/sod_rule.facpl");
pub const HYBRID_RULE: &str = include_str!("../fixtures/hybrid_rule.facpl");
pub const BANKING_PDP: &str = include_str!("../fixtures/banking_pdp.facpl");
pub const NARROW: &str = include_str!("../fixtures/narrow.facpl");
pub const BROAD: &str = include_str!("../fixtures/broad.facpl");
pub const DUPLICATE: &str = include_str!("../fixtures/duplicate.facpl");

pub const NRU_SECURE: &str = include_str!("../fixtures/nru_secure.spec");
pub const NRU_NONSECURE: &str = include_str!("../fixtures/nru_nonsecure.spec");
pub const READ_SECURE: &str = include_str!("../fixtures/read_secure.spec");
pub const READ_NONSECURE: &str = include_str!("../fixtures/read_nonsecure.spec");
pub const LOAN_DOC_READS: &str = include_str!("../fixtures/loan_doc_reads.spec");

/// Every bundled policy with the domain it is analysed over.
pub const POLICIES: [(&str, &str, &str); 12] = [
    ("loan_doc", LOAN_DOC, WALKTHROUGH_DOM),
    ("policy_a", POLICY_A, BANKING_DOM),
    ("policy_b", POLICY_B, BANKING_DOM),
    ("policy_c", POLICY_C, BANKING_DOM),
    ("read_rule", READ_RULE, BANKING_DOM),
    ("write_rule", WRITE_RULE, BANKING_DOM),
    ("sod_rule", SOD_RULE, BANKING_DOM),
    ("hybrid_rule", HYBRID_RULE, BANKING_DOM),
    ("banking_pdp", BANKING_PDP, BANKING_DOM),
    ("narrow", NARROW, BANKING_DOM),
    ("broad", BROAD, BANKING_DOM),
    ("duplicate", DUPLICATE, BANKING_DOM),
];

/// Both bundled domains.
pub const DOMAINS: [(&str, &str); 2] = [("banking", BANKING_DOM), ("walkthrough", WALKTHROUGH_DOM)];

pub fn policy(text: &str) -> Document {
    parse_policy(text).expect("bundled policy parses")
}

pub fn domain(text: &str) -> DomainSpec {
    parse_domain(text).expect("bundled domain parses")
}

pub fn config() -> EngineConfig {
    parse_config(BANKING_CFG).expect("bundled configuration parses")
}

/// A bundled request set over the banking domain.
pub fn request_set(text: &str) -> RequestSetSpec {
    let parsed = parse_request_set(text).expect("bundled request set parses");
    RequestSetSpec::new(domain(BANKING_DOM), parsed.constraint)
}

/// One replayed check and whether its verdict is the expected one.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub policy: &'static str,
    pub claim: &'static str,
    pub report: CheckReport,
    /// The witness illustrating the failure, when one is expected.
    pub highlight: Option<Witness>,
    pub as_expected: bool,
}

#[derive(Debug, Clone)]
pub struct CaseStudy {
    pub outcomes: Vec<Outcome>,
}

impl CaseStudy {
    pub fn all_as_expected(&self) -> bool {
        self.outcomes.iter().all(|o| o.as_expected)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let verdict = if o.report.holds { "HOLDS" } else { "FAILS" };
            let _ = write!(out, "{}: {} {verdict}", o.policy, o.claim);
            if let Some(w) = &o.highlight {
                let _ = write!(out, " ({} witness)", describe(w));
            }
            let mark = if o.as_expected { "as expected" } else { "UNEXPECTED" };
            let _ = writeln!(out, " [{mark}]");
            if let Some(w) = &o.highlight {
                for (name, binding) in w.request.iter() {
                    let _ = writeln!(out, "    ({name}, {binding})");
                }
            }
        }
        out
    }

    /// Rows of `policy claim holds expected witness` followed by the
    /// witness bindings.
    pub fn render_tsv(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let witness = o.highlight.as_ref().map_or_else(|| "-".to_owned(), describe);
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{witness}", o.policy, o.claim, o.report.holds, o.as_expected);
            if let Some(w) = &o.highlight {
                for (name, binding) in w.request.iter() {
                    let _ = writeln!(out, "binding\t{}\t{name}\t{binding}", o.policy);
                }
            }
        }
        out
    }
}

fn describe(w: &Witness) -> String {
    match w.observed.first() {
        Some(Decision::NotApplicable) => "not-applicable".into(),
        Some(Decision::Permit) => "permit-despite-missing-access-list-entry".into(),
        Some(d) => d.name().into(),
        None => "-".into(),
    }
}

/// Replays the three read-access policies against the bundled request sets.
pub fn run(cap: u64) -> Result<CaseStudy, AnalysisError> {
    let cfg = config();
    let opts = Options { cap, witness_cap: usize::MAX };
    let (nru_secure, nru_nonsecure) = (request_set(NRU_SECURE), request_set(NRU_NONSECURE));
    let (read_secure, read_nonsecure) = (request_set(READ_SECURE), request_set(READ_NONSECURE));
    let (a, b, c) = (policy(POLICY_A), policy(POLICY_B), policy(POLICY_C));

    let mut outcomes = Vec::new();

    let report = check_enforcement(&a, &nru_secure, &nru_nonsecure, &cfg, &opts)?;
    let highlight = report.witnesses.iter().find(|w| w.observed == [Decision::NotApplicable]).cloned();
    let as_expected = !report.holds && highlight.is_some();
    outcomes.push(Outcome { policy: "A", claim: "no-read-up enforcement", report, highlight, as_expected });

    let report = check_enforcement(&b, &read_secure, &read_nonsecure, &cfg, &opts)?;
    let dac = crate::parser::parse_expr("in(subject/id, resource/read.ids)").expect("constant expression parses");
    let highlight = report
        .witnesses
        .iter()
        .find(|w| {
            w.observed == [Decision::Permit]
                && !crate::eval::eval_expr(&dac, &w.request, &cfg).is_true()
        })
        .cloned();
    let as_expected = !report.holds && highlight.is_some();
    outcomes.push(Outcome { policy: "B", claim: "no-read-up and access list enforcement", report, highlight, as_expected });

    let report = check_enforcement(&c, &read_secure, &read_nonsecure, &cfg, &opts)?;
    let as_expected = report.holds;
    outcomes.push(Outcome { policy: "C", claim: "no-read-up and access list enforcement", report, highlight: None, as_expected });

    let report = check_least_privilege(&c, &read_secure, &cfg, &opts)?;
    let as_expected = report.holds;
    outcomes.push(Outcome { policy: "C", claim: "least privilege", report, highlight: None, as_expected });

    Ok(CaseStudy { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        for (name, text, dom) in POLICIES {
            parse_policy(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            parse_domain(dom).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        for spec in [NRU_SECURE, NRU_NONSECURE, READ_SECURE, READ_NONSECURE, LOAN_DOC_READS] {
            let parsed = parse_request_set(spec).unwrap();
            assert_eq!(parsed.domain.as_deref(), Some("banking.dom"));
            assert_eq!(parsed.config.as_deref(), Some("banking.cfg"));
        }
        config();
    }

    #[test]
    fn banking_domain_size() {
        // 4 actions, 2 resources, 3 x 3 levels, 3 subjects, 7 non-empty
        // access lists, 3 non-empty role sets plus absence.
        assert_eq!(domain(BANKING_DOM).request_count(), 4 * 2 * 3 * 7 * 3 * 3 * 4);
        assert_eq!(domain(WALKTHROUGH_DOM).request_count(), 5 * 3 * 3 * 3);
    }

    #[test]
    fn replay_matches_narrative() {
        let study = run(crate::analyzer::DEFAULT_CAP).unwrap();
        assert_eq!(study.outcomes.len(), 4);
        assert!(study.all_as_expected(), "{}", study.render_text());
        assert_eq!(study.render_tsv(), run(crate::analyzer::DEFAULT_CAP).unwrap().render_tsv());
    }
}

mod common;

use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{arb_domain, arb_typed_document, config};
use facpl_core::analyzer::{check_completeness, check_disjointness, Options};
use facpl_core::casestudy::{self, POLICIES};
use facpl_core::eval::Evaluate;
use facpl_core::model::{Decision, Document, DomainSpec, EngineConfig};
use facpl_core::smt::{encode_query, Query, SolveError, Solver, Verdict};
use proptest::prelude::*;

fn fake_solver(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("facpl-fake-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
    path
}

/// The default solver, or `None` when none is installed.
fn real_solver() -> Option<Solver> {
    let solver = Solver::locate(None).with_timeout(Duration::from_secs(60));
    match solver.run("(check-sat)\n") {
        Ok(out) if out.verdict == Verdict::Sat => Some(solver),
        _ => {
            eprintln!("no SMT solver available; skipping");
            None
        }
    }
}

/// Solves `query` and checks the verdict against `expect_sat`; on sat the
/// decoded witness must satisfy the goal under the evaluator.
fn solve_and_check(
    solver: &Solver,
    doc: &Document,
    domain: &DomainSpec,
    cfg: &EngineConfig,
    query: Query<'_>,
    expect_sat: bool,
    witness_ok: impl Fn(&facpl_core::model::Request) -> bool,
) {
    let (enc, goal) = encode_query(doc, domain, cfg, query).unwrap();
    let out = solver.run(&enc.emit(goal)).unwrap();
    assert_eq!(out.verdict == Verdict::Sat, expect_sat, "{doc}");
    if expect_sat {
        let witness = enc.decode_model(out.model.as_ref().unwrap()).unwrap();
        assert!(witness_ok(&witness), "{doc}\n{witness}");
        assert_eq!(enc.holds(goal, &witness), Some(true));
    }
}

#[test]
fn trivial_scripts() {
    let Some(solver) = real_solver() else { return };
    assert_eq!(solver.run("(assert false)\n(check-sat)\n").unwrap().verdict, Verdict::Unsat);
    assert_eq!(solver.run("(assert true)\n(check-sat)\n(get-model)\n").unwrap().verdict, Verdict::Sat);
}

#[test]
fn fixture_verdicts_match_the_enumerator() {
    let Some(solver) = real_solver() else { return };
    let cfg = casestudy::config();
    let o = Options::default();
    for (name, text, dom) in POLICIES {
        let (doc, domain) = (casestudy::policy(text), casestudy::domain(dom));
        let na = check_completeness(&doc, &domain, &cfg, false, &o).unwrap().stats.violations > 0;
        let (enc, goal) = encode_query(&doc, &domain, &cfg, Query::Completeness).unwrap();
        let out = solver.run(&enc.emit(goal)).unwrap();
        assert_eq!(out.verdict == Verdict::Sat, na, "{name}");
        for (other_name, other_text, other_dom) in POLICIES {
            if other_dom != dom {
                continue;
            }
            let other = casestudy::policy(other_text);
            let overlap = !check_disjointness(&doc, &other, &domain, &cfg, &o).unwrap().holds;
            let (enc, goal) = encode_query(&doc, &domain, &cfg, Query::Disjointness(&other)).unwrap();
            let out = solver.run(&enc.emit(goal)).unwrap();
            assert_eq!(out.verdict == Verdict::Sat, overlap, "{name} / {other_name}");
        }
    }
}

#[test]
fn policy_a_reaches_not_applicable_on_a_nonsecure_request() {
    let Some(solver) = real_solver() else { return };
    let cfg = casestudy::config();
    let doc = casestudy::policy(casestudy::POLICY_A);
    let domain = casestudy::domain(casestudy::BANKING_DOM);
    let nonsecure = casestudy::request_set(casestudy::NRU_NONSECURE).constraint;
    let query = Query::Enforcement { members: &nonsecure, decision: Decision::NotApplicable };
    solve_and_check(&solver, &doc, &domain, &cfg, query, true, |r| {
        doc.evaluate(r, &cfg) == Decision::NotApplicable
            && facpl_core::eval::eval_expr(&nonsecure, r, &cfg).is_true()
    });
    let c = casestudy::policy(casestudy::POLICY_C);
    solve_and_check(&solver, &c, &domain, &cfg, Query::Completeness, false, |_| true);
}

#[test]
fn timeouts_kill_the_solver() {
    let path = fake_solver("slow", "sleep 5; echo sat");
    let start = Instant::now();
    let err = Solver::locate(Some(&path)).with_timeout(Duration::from_millis(200)).run("(check-sat)").unwrap_err();
    assert_eq!(err, SolveError::Timeout(Duration::from_millis(200)));
    assert!(start.elapsed() < Duration::from_secs(4));
}

#[test]
fn garbage_and_errors_are_reported() {
    let garbage = fake_solver("garbage", "cat > /dev/null; echo hello");
    assert!(matches!(Solver::locate(Some(&garbage)).run("(check-sat)"), Err(SolveError::Unparseable(_))));
    let broken_model = fake_solver("broken", "cat > /dev/null; echo sat; echo '(model (define-fun'");
    assert!(matches!(Solver::locate(Some(&broken_model)).run("(check-sat)"), Err(SolveError::Unparseable(_))));
    let failing = fake_solver("failing", "cat > /dev/null; echo '(error \"line 1: bad\")'");
    assert!(matches!(Solver::locate(Some(&failing)).run("(check-sat)"), Err(SolveError::Failed(_))));
    let missing = std::env::temp_dir().join("facpl-no-such-solver");
    assert!(matches!(Solver::locate(Some(&missing)).run("(check-sat)"), Err(SolveError::NotFound(_))));
}

#[test]
fn early_exit_does_not_hang() {
    let path = fake_solver("early", "echo unsat");
    let big = "(assert true)\n".repeat(200_000);
    assert_eq!(Solver::locate(Some(&path)).run(&big).unwrap().verdict, Verdict::Unsat);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_verdicts_match_the_enumerator(a in arb_typed_document(), b in arb_typed_document(), domain in arb_domain()) {
        let Some(solver) = real_solver() else { return Ok(()) };
        let cfg = config();
        let o = Options::default();
        let na = check_completeness(&a, &domain, &cfg, false, &o).unwrap();
        solve_and_check(&solver, &a, &domain, &cfg, Query::Completeness, !na.holds, |r| {
            a.evaluate(r, &cfg) == Decision::NotApplicable
        });
        let dis = check_disjointness(&a, &b, &domain, &cfg, &o).unwrap();
        solve_and_check(&solver, &a, &domain, &cfg, Query::Disjointness(&b), !dis.holds, |r| {
            a.evaluate(r, &cfg).is_applicable() && b.evaluate(r, &cfg).is_applicable()
        });
    }
}

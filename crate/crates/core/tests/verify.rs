mod common;

use std::collections::BTreeSet;

use common::{arb_system, listing, load, oracle_distances, oracle_inevitable, oracle_live, oracle_successors};
use imds::verify::ctl::{self, Formula};
use imds::verify::report::{Report, WitnessReport};
use imds::verify::*;
use imds::{build_lts, explore, Lts, NodeId, SystemSpec};
use proptest::prelude::*;

// Frozen from `oracle_distances` and the tagging rule applied by hand in
// `listing_deadlock_witnesses`.
const LISTING_DEADLOCK_DISTANCE: usize = 7;
const LISTING_CLASSIFICATION: Classification = Classification::Mixed;

fn agents(sys: &SystemSpec, names: &[&str]) -> AgentSet {
    names.iter().map(|n| sys.agent_by_name(n).unwrap()).collect()
}

fn single_robot() -> SystemSpec {
    load(
        "server: C(agents R; servers D), services {go}, states {free, occ},
actions { {R.C.go, C.free} -> {R.D.go, C.occ}, }
server: D(agents R; servers C), services {go}, states {free, occ},
actions { {R.D.go, D.free} -> {D.occ}, }
servers C, D; agents R;
init -> { C(R, D).free, D(R, C).free, R.C.go, }.",
    )
}

#[test]
fn listing_deadlock_witnesses() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let v = check_total_deadlock(&lts).unwrap();
    assert!(!v.holds);
    assert_eq!(v.summary.deadlock_sinks, 2);
    assert_eq!(v.summary.termination_sinks, 0);
    let dist = oracle_distances(&sys);
    let central = sys.server_by_name("CentralCh").unwrap();
    for w in &v.witnesses {
        validate_witness(&lts, w).unwrap();
        assert!(lts.is_sink(w.terminal));
        let end = lts.config(w.terminal);
        assert_eq!(sys.state_name(end.state(central)), "occ");
        assert_eq!(end.pending_messages().count(), 2);
        assert_eq!(w.prefix.len(), dist[end]);
        assert_eq!(w.prefix.len(), LISTING_DEADLOCK_DISTANCE);
        assert_eq!(w.blocked_agents, Some(agents(&sys, &["ROBOT[1]", "ROBOT[2]"])));
        assert_eq!(w.classification, Some(LISTING_CLASSIFICATION));
        assert_eq!(classify_deadlock(&lts, w).unwrap(), LISTING_CLASSIFICATION);
    }
}

#[test]
fn listing_termination_of_first_robot_fails_on_a_finite_path() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let pred = TerminationPredicate::from_names(&sys, &["ROBOT[1]"]).unwrap();
    let v = check_termination(&lts, &pred).unwrap();
    assert!(!v.holds);
    assert_eq!(v.witnesses.len(), 1);
    let w = &v.witnesses[0];
    assert_eq!(w.kind, TraceKind::FinitePath);
    assert!(lts.is_sink(w.terminal));
    validate_witness(&lts, w).unwrap();
    let robot1 = sys.agent_by_name("ROBOT[1]").unwrap();
    assert!(w.prefix.iter().all(|s| !lts.config(s.to).is_terminated(robot1)));
}

#[test]
fn listing_ctl_sees_sinks() {
    let lts_sys = listing();
    let lts = build_lts(&lts_sys, 1000).unwrap();
    let v = check_deadlock_free_ctl(&lts).unwrap();
    assert!(!v.holds);
    assert_eq!(v.summary.sinks, v.summary.deadlock_sinks + v.summary.termination_sinks);
}

#[test]
fn listing_partial_deadlocks() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let v = check_partial_deadlock(&lts).unwrap();
    assert!(!v.holds);
    let sets: BTreeSet<_> = v.witnesses.iter().map(|w| w.blocked_agents.unwrap()).collect();
    assert_eq!(sets.len(), v.witnesses.len());
    assert!(sets.contains(&agents(&sys, &["ROBOT[1]", "ROBOT[2]"])));
    for w in &v.witnesses {
        validate_witness(&lts, w).unwrap();
        let blocked = w.blocked_agents.unwrap();
        let live = oracle_live(&sys, lts.config(w.terminal));
        assert!(blocked.iter().all(|a| !live.contains(&a.index())));
        assert_eq!(w.degenerate, blocked == AgentSet::non_terminated(lts.config(w.terminal)));
    }
}

#[test]
fn single_robot_terminates() {
    let sys = single_robot();
    let lts = build_lts(&sys, 100).unwrap();
    let total = check_total_deadlock(&lts).unwrap();
    assert!(total.holds);
    assert_eq!((total.summary.sinks, total.summary.termination_sinks), (1, 1));
    assert!(check_partial_deadlock(&lts).unwrap().holds);
    let pred = TerminationPredicate::all(&sys);
    assert!(check_termination(&lts, &pred).unwrap().holds);
    // A termination sink still violates AG EX true.
    assert!(!check_deadlock_free_ctl(&lts).unwrap().holds);
}

#[test]
fn truncated_graph_is_rejected() {
    let sys = listing();
    let lts = explore(&sys, 3);
    assert!(!lts.is_complete());
    assert_eq!(check_total_deadlock(&lts).unwrap_err(), VerifyError::TruncatedLts);
}

#[test]
fn initial_target_has_empty_prefix() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let t = extract_trace(&lts, lts.initial()).unwrap();
    assert!(t.prefix.is_empty());
    assert_eq!(extract_trace(&lts, NodeId(10_000)).unwrap_err(), VerifyError::UnreachableTarget(10_000));
}

#[test]
fn empty_predicate_is_rejected() {
    assert_eq!(TerminationPredicate::new(AgentSet::EMPTY).unwrap_err(), VerifyError::EmptyPredicate);
    let sys = listing();
    assert!(matches!(TerminationPredicate::from_names(&sys, &["ROBOT[9]"]), Err(VerifyError::UnknownAgent(_))));
}

#[test]
fn classification_requires_a_deadlock_witness() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let t = extract_trace(&lts, lts.initial()).unwrap();
    assert_eq!(classify_deadlock(&lts, &t).unwrap_err(), VerifyError::NotADeadlockWitness);
}

#[test]
fn tampered_witness_fails_replay() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let mut w = check_total_deadlock(&lts).unwrap().witnesses[0].clone();
    w.prefix.swap(0, 1);
    assert!(matches!(validate_witness(&lts, &w), Err(VerifyError::InvalidTrace { .. })));
}

#[test]
fn report_round_trips_witnesses() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let v = check_total_deadlock(&lts).unwrap();
    let mut report = Report::new(&lts);
    report.push(&sys, &v, None);
    let parsed = Report::from_json(&report.to_json()).unwrap();
    assert_eq!(parsed, report);
    for (rec, w) in parsed.verdicts[0].witnesses.iter().zip(&v.witnesses) {
        let back = rec.resolve(&lts).unwrap();
        assert_eq!(&back, w);
        assert_eq!(&WitnessReport::new(&sys, &back), rec);
    }
    let text = report.to_text();
    assert!(text.starts_with("schema imds-report/1\n"));
    assert!(text.contains("verdict total-deadlock-freedom holds=false witnesses=2"));
}

/// Checks every verifier output on `lts` against the brute-force oracles.
fn check_against_oracles(sys: &SystemSpec, lts: &Lts) {
    let labels = progress_labels(lts);
    for n in lts.node_ids() {
        let c = lts.config(n);
        let oracle: BTreeSet<usize> = oracle_live(sys, c);
        let live: BTreeSet<usize> = labels.live_agents(n).iter().map(|a| a.index()).collect();
        assert_eq!(live, oracle);
        assert_eq!(labels.live_agents(n), brute_force_live_agents(lts, n));
        assert_eq!(lts.is_sink(n), oracle_successors(sys, c).is_empty());
    }

    let ex = ctl::eval(lts, &Formula::ex(Formula::True));
    for n in lts.node_ids() {
        assert_eq!(ex[n.index()], !lts.is_sink(n));
    }

    let total = check_total_deadlock(lts).unwrap();
    let ctl_v = check_deadlock_free_ctl(lts).unwrap();
    assert_eq!(total.holds, total.witnesses.is_empty());
    assert_eq!(ctl_v.summary.sinks, ctl_v.summary.deadlock_sinks + ctl_v.summary.termination_sinks);
    assert_eq!(ctl_v.summary.sinks, lts.sinks().count());
    assert_eq!(ctl_v.holds, total.holds && total.summary.termination_sinks == 0);
    for w in total.witnesses.iter().chain(&ctl_v.witnesses) {
        validate_witness(lts, w).unwrap();
        assert!(lts.is_sink(w.terminal));
    }

    let partial = check_partial_deadlock(lts).unwrap();
    assert_eq!(partial.holds, partial.witnesses.is_empty());
    let dist = oracle_distances(sys);
    let mut expected_sets = BTreeSet::new();
    for n in lts.node_ids() {
        let c = lts.config(n);
        let live = oracle_live(sys, c);
        let blocked: BTreeSet<usize> = (0..sys.agents().len())
            .filter(|&a| !c.is_terminated(imds::AgentId(a as u32)) && !live.contains(&a))
            .collect();
        if !blocked.is_empty() {
            expected_sets.insert(blocked);
        }
    }
    let got: BTreeSet<BTreeSet<usize>> =
        partial.witnesses.iter().map(|w| w.blocked_agents.unwrap().iter().map(|a| a.index()).collect()).collect();
    assert_eq!(got, expected_sets);
    for w in &partial.witnesses {
        validate_witness(lts, w).unwrap();
        let blocked = w.blocked_agents.unwrap();
        // Minimal distance among nodes with the same blocked set.
        let best = lts
            .node_ids()
            .filter(|&n| labels.blocked_agents(lts, n) == blocked)
            .map(|n| dist[lts.config(n)])
            .min()
            .unwrap();
        assert_eq!(w.prefix.len(), best);
        classify_deadlock(lts, w).unwrap();
    }
    for w in &total.witnesses {
        assert!(partial.witnesses.iter().any(|p| p.blocked_agents == w.blocked_agents));
    }

    let all = TerminationPredicate::all(sys);
    let subsets: Vec<AgentSet> = (1u32..(1 << sys.agents().len()))
        .map(|bits| (0..sys.agents().len() as u32).filter(|i| bits & (1 << i) != 0).map(imds::AgentId).collect())
        .collect();
    for s in &subsets {
        let pred = TerminationPredicate::new(*s).unwrap();
        let v = check_termination(lts, &pred).unwrap();
        let oracle = oracle_inevitable(sys, &s.iter().map(|a| a.index()).collect());
        assert_eq!(v.holds, oracle, "subset {s}");
        assert_eq!(v.holds, ctl::holds(lts, &Formula::af(Formula::Terminated(*s))));
        assert_eq!(v.witnesses.len(), usize::from(!v.holds));
        for w in &v.witnesses {
            validate_witness(lts, w).unwrap();
            let goal = |n: NodeId| s.is_subset(AgentSet::terminated(lts.config(n)));
            assert!(w.steps().all(|st| !goal(st.to)) && !goal(lts.initial()));
            match w.kind {
                TraceKind::FinitePath => assert!(lts.is_sink(w.terminal)),
                TraceKind::Lasso => assert!(!w.cycle.is_empty()),
            }
        }
        if v.holds {
            for t in &subsets {
                if t.is_subset(*s) {
                    assert!(check_termination(lts, &TerminationPredicate::new(*t).unwrap()).unwrap().holds);
                }
            }
        }
    }
    if !total.holds {
        assert!(!check_termination(lts, &all).unwrap().holds);
    }
}

#[test]
fn listing_agrees_with_oracles() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    check_against_oracles(&sys, &lts);
}

#[test]
fn lasso_on_a_ring() {
    // A keeps circling while B waits for a state T never returns to.
    let sys = load(
        "server: S(agents A, B; servers T), services {go, ask}, states {a, b},
actions {
{A.S.go, S.a} -> {A.S.go, S.b},
{A.S.go, S.b} -> {A.S.go, S.a},
}
server: T(agents A, B; servers S), services {ask}, states {x, y},
actions { {B.T.ask, T.y} -> {T.x}, }
servers S, T; agents A, B;
init -> { S(A, B, T).a, T(A, B, S).x, A.S.go, B.T.ask, }.",
    );
    let lts = build_lts(&sys, 100).unwrap();
    let pred = TerminationPredicate::from_names(&sys, &["B"]).unwrap();
    let v = check_termination(&lts, &pred).unwrap();
    assert!(!v.holds);
    let w = &v.witnesses[0];
    assert_eq!(w.kind, TraceKind::Lasso);
    assert_eq!(w.prefix.len(), 0);
    assert_eq!(w.cycle.len(), 2);
    let a = sys.agent_by_name("A").unwrap();
    assert!(w.cycle.iter().all(|s| sys.action(s.action).agent() == a));
    assert!(check_total_deadlock(&lts).unwrap().holds);
    let partial = check_partial_deadlock(&lts).unwrap();
    assert_eq!(partial.witnesses.len(), 1);
    assert_eq!(partial.witnesses[0].blocked_agents, Some(AgentSet::singleton(sys.agent_by_name("B").unwrap())));
    assert!(!partial.witnesses[0].degenerate);
    assert_eq!(partial.witnesses[0].classification, Some(Classification::Resource));
    check_against_oracles(&sys, &lts);
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generated_systems_agree_with_oracles(g in arb_system()) {
        let sys = load(&g.text());
        let lts = build_lts(&sys, 100_000).unwrap();
        check_against_oracles(&sys, &lts);
    }
}

use imds::verify::{check_termination, Counterexample, TerminationPredicate, TraceKind, VerifyError};
use imds::{build_lts, ActionId, SystemSpec};
use imds_cli::{render_sequence_diagram, Ending};

fn load(text: &str) -> SystemSpec {
    imds::lang::load_system(text).map(|(s, _)| s).unwrap_or_else(|d| panic!("{}", d.render("input")))
}

fn listing() -> SystemSpec {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/two_robots_central.imds");
    load(&std::fs::read_to_string(path).unwrap())
}

const RING: &str = "server: S(agents A, B; servers T), services {go}, states {a, b},
actions {
{A.S.go, S.a} -> {A.S.go, S.b},
{A.S.go, S.b} -> {A.S.go, S.a},
}
server: T(agents A, B; servers S), services {ask}, states {x, y},
actions { {B.T.ask, T.y} -> {T.x}, }
servers S, T; agents A, B;
init -> { S(A, B, T).a, T(A, B, S).x, A.S.go, B.T.ask, }.";

const LISTING_TERMINATION: &str = "     ROBOT[1]   ROBOT[2]   SideCh[1]  SideCh[2]  CentralCh
     |          |          |          |          |
   1 o- start ------------>|          |          |  occ->occ
   2 |          o- start ------------>|          |  occ->occ
   3 o- tryC[1] -------------------------------->|  free->resC[1]
   4 o- okS[1] ----------->|          |          |  occ->free
   5 o- takeC[1] ------------------------------->|  resC[1]->occ
   6 o- switch[2] ------------------------------>|  occ->occ
   7 o- tryS[2] --------------------->|          |  occ->occ
     -- deadlock: ROBOT[1], ROBOT[2] waiting --
     |          |          |          |          |
";

#[test]
fn empty_trace_has_lanes_only() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let cx = Counterexample {
        kind: TraceKind::FinitePath,
        prefix: Vec::new(),
        cycle: Vec::new(),
        terminal: lts.initial(),
        blocked_agents: None,
        classification: None,
        degenerate: false,
    };
    let d = render_sequence_diagram(&lts, &cx).unwrap();
    assert_eq!(d.lanes, ["ROBOT[1]", "ROBOT[2]", "SideCh[1]", "SideCh[2]", "CentralCh"]);
    assert!(d.events.is_empty());
    assert_eq!(d.ending, Ending::Open);
    let text = d.to_text();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.trim().chars().all(|c| c == '|' || c == ' ')));
}

#[test]
fn listing_termination_witness_starts_both_robots() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let pred = TerminationPredicate::from_names(&sys, &["ROBOT[1]"]).unwrap();
    let v = check_termination(&lts, &pred).unwrap();
    let d = render_sequence_diagram(&lts, &v.witnesses[0]).unwrap();
    let lane = |i: usize| d.lanes[i].as_str();
    let first: Vec<(&str, &str, &str)> =
        d.events[..2].iter().map(|e| (lane(e.agent), e.service.as_str(), lane(e.server))).collect();
    assert_eq!(first, [("ROBOT[1]", "start", "SideCh[1]"), ("ROBOT[2]", "start", "SideCh[2]")]);
    assert_eq!(d.ending, Ending::Deadlock(vec!["ROBOT[1]".into(), "ROBOT[2]".into()]));
    for (i, e) in d.events.iter().enumerate() {
        assert_eq!(e.step, i + 1);
        assert!(e.agent < sys.agents().len() && e.server >= sys.agents().len() && e.server < d.lanes.len());
    }
    assert_eq!(d.to_text(), LISTING_TERMINATION);
}

#[test]
fn lasso_marks_the_repeated_section() {
    let sys = load(RING);
    let lts = build_lts(&sys, 100).unwrap();
    let pred = TerminationPredicate::from_names(&sys, &["B"]).unwrap();
    let v = check_termination(&lts, &pred).unwrap();
    let d = render_sequence_diagram(&lts, &v.witnesses[0]).unwrap();
    assert_eq!(d.cycle_start, Some(0));
    assert_eq!(d.events.len(), 2);
    let text = d.to_text();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[2].trim(), "-- cycle starts --");
    assert_eq!(lines[5].trim(), "-- cycle repeats --");
    assert!(lines[3].ends_with("a->b") && lines[4].ends_with("b->a"));
}

#[test]
fn long_labels_move_beside_the_arrow() {
    let sys = load(
        "server: S(agents A), services {a_rather_long_service}, states {p, q},
actions { {A.S.a_rather_long_service, S.p} -> {S.q}, }
servers S; agents A;
init -> { S(A).p, A.S.a_rather_long_service, }.",
    );
    let lts = build_lts(&sys, 10).unwrap();
    let all = TerminationPredicate::all(&sys);
    assert!(check_termination(&lts, &all).unwrap().holds);
    let cx = imds::verify::extract_trace(&lts, imds::NodeId(1)).unwrap();
    let d = render_sequence_diagram(&lts, &cx).unwrap();
    assert_eq!(d.ending, Ending::Terminated);
    let text = d.to_text();
    assert!(text.contains("   1 o-------->|  a_rather_long_service p->q (terminates)"), "{text}");
    assert!(text.contains("-- all agents terminated --"));
}

#[test]
fn tampered_trace_is_rejected() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let pred = TerminationPredicate::from_names(&sys, &["ROBOT[1]"]).unwrap();
    let mut cx = check_termination(&lts, &pred).unwrap().witnesses.remove(0);
    cx.prefix[2].action = ActionId(cx.prefix[2].action.0 + 1);
    assert!(matches!(render_sequence_diagram(&lts, &cx), Err(VerifyError::InvalidTrace { step: 2, .. })));
}

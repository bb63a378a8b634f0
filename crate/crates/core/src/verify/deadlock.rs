use super::classify::classify_blocked;
use super::ctl::{self, Formula};
use super::trace::BfsTree;
use super::{require_complete, AgentSet, Counterexample, Property, Summary, TraceKind, Verdict, VerifyError};
use crate::lts::Lts;

/// Sinks with at least one pending message are deadlocks; sinks in which
/// every agent terminated are counted as terminations. One shortest-path
/// witness per deadlock sink, in node order.
pub fn check_total_deadlock(lts: &Lts) -> Result<Verdict, VerifyError> {
    require_complete(lts)?;
    let tree = BfsTree::new(lts, lts.initial(), |_| true);
    let mut summary = Summary { nodes_checked: lts.node_count(), ..Summary::default() };
    let mut witnesses = Vec::new();
    for sink in lts.sinks() {
        summary.sinks += 1;
        let config = lts.config(sink);
        if config.all_terminated() {
            summary.termination_sinks += 1;
            continue;
        }
        summary.deadlock_sinks += 1;
        let blocked = AgentSet::non_terminated(config);
        witnesses.push(Counterexample {
            kind: TraceKind::FinitePath,
            prefix: tree.path_to(lts, sink).expect("every node is reachable"),
            cycle: Vec::new(),
            terminal: sink,
            blocked_agents: Some(blocked),
            classification: Some(classify_blocked(lts, sink, blocked)),
            degenerate: false,
        });
    }
    summary.blocked_sets =
        witnesses.iter().filter_map(|w| w.blocked_agents).collect::<std::collections::BTreeSet<_>>().len();
    Ok(Verdict { property: Property::TotalDeadlockFreedom, holds: witnesses.is_empty(), witnesses, summary })
}

/// `AG EX true`, evaluated by the CTL fixpoint engine. Any sink violates it,
/// including one where every agent terminated. The witness is a shortest path
/// to the first sink.
pub fn check_deadlock_free_ctl(lts: &Lts) -> Result<Verdict, VerifyError> {
    require_complete(lts)?;
    let sat = ctl::eval(lts, &Formula::ag(Formula::ex(Formula::True)));
    let mut summary = Summary { nodes_checked: lts.node_count(), ..Summary::default() };
    for sink in lts.sinks() {
        summary.sinks += 1;
        if lts.config(sink).all_terminated() {
            summary.termination_sinks += 1;
        } else {
            summary.deadlock_sinks += 1;
        }
    }
    let holds = sat[lts.initial().index()];
    let mut witnesses = Vec::new();
    if !holds {
        let tree = BfsTree::new(lts, lts.initial(), |_| true);
        let sink = tree.order.iter().copied().find(|&n| lts.is_sink(n)).expect("violated AG EX true has a sink");
        witnesses.push(Counterexample {
            kind: TraceKind::FinitePath,
            prefix: tree.path_to(lts, sink).expect("reached"),
            cycle: Vec::new(),
            terminal: sink,
            blocked_agents: None,
            classification: None,
            degenerate: false,
        });
    }
    Ok(Verdict { property: Property::DeadlockFreeCtl, holds, witnesses, summary })
}

use std::collections::{BTreeSet, HashSet};

use super::classify::classify_blocked;
use super::scc::sccs;
use super::trace::BfsTree;
use super::{require_complete, AgentSet, Counterexample, Property, Summary, TraceKind, Verdict, VerifyError};
use crate::lts::{Lts, NodeId};

/// For every node, the agents that act somewhere in its forward-reachable
/// subgraph.
pub struct ProgressLabels {
    live: Vec<AgentSet>,
}

impl ProgressLabels {
    pub fn live_agents(&self, n: NodeId) -> AgentSet {
        self.live[n.index()]
    }

    /// Non-terminated agents that never act again from `n`.
    pub fn blocked_agents(&self, lts: &Lts, n: NodeId) -> AgentSet {
        AgentSet::non_terminated(lts.config(n)).difference(self.live[n.index()])
    }
}

/// Accumulates live agents over the SCC condensation in reverse topological
/// order; all nodes of a component share one label.
pub fn progress_labels(lts: &Lts) -> ProgressLabels {
    let sys = lts.system();
    let sccs = sccs(lts, |_| true);
    let mut comp_live = vec![AgentSet::EMPTY; sccs.len()];
    for (c, members) in sccs.members.iter().enumerate() {
        let mut live = AgentSet::EMPTY;
        for &n in members {
            for e in lts.out_edges(n) {
                live.insert(sys.action(e.action).agent());
                let d = sccs.component(e.to).expect("unrestricted");
                if d != c {
                    live = live.union(comp_live[d]);
                }
            }
        }
        comp_live[c] = live;
    }
    let live = lts.node_ids().map(|n| comp_live[sccs.component(n).expect("unrestricted")]).collect();
    ProgressLabels { live }
}

/// Agents appearing on some edge reachable from `n`, by plain search.
pub fn brute_force_live_agents(lts: &Lts, n: NodeId) -> AgentSet {
    let sys = lts.system();
    let mut seen = HashSet::from([n]);
    let mut stack = vec![n];
    let mut live = AgentSet::EMPTY;
    while let Some(v) = stack.pop() {
        for e in lts.out_edges(v) {
            live.insert(sys.action(e.action).agent());
            if seen.insert(e.to) {
                stack.push(e.to);
            }
        }
    }
    live
}

/// Reports one witness per distinct non-empty blocked set, at the first node
/// in breadth-first order that exhibits it. A witness whose blocked set is
/// every non-terminated agent is a total deadlock seen through this lens and
/// is flagged `degenerate`.
pub fn check_partial_deadlock(lts: &Lts) -> Result<Verdict, VerifyError> {
    require_complete(lts)?;
    let labels = progress_labels(lts);
    let tree = BfsTree::new(lts, lts.initial(), |_| true);
    let mut seen = BTreeSet::new();
    let mut witnesses = Vec::new();
    for &n in &tree.order {
        let blocked = labels.blocked_agents(lts, n);
        if blocked.is_empty() || !seen.insert(blocked) {
            continue;
        }
        let degenerate = blocked == AgentSet::non_terminated(lts.config(n));
        witnesses.push(Counterexample {
            kind: TraceKind::FinitePath,
            prefix: tree.path_to(lts, n).expect("reached"),
            cycle: Vec::new(),
            terminal: n,
            blocked_agents: Some(blocked),
            classification: Some(classify_blocked(lts, n, blocked)),
            degenerate,
        });
    }
    let summary = Summary {
        nodes_checked: lts.node_count(),
        sinks: lts.sinks().count(),
        blocked_sets: seen.len(),
        ..Summary::default()
    };
    Ok(Verdict { property: Property::PartialDeadlockFreedom, holds: witnesses.is_empty(), witnesses, summary })
}

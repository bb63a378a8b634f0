use std::collections::VecDeque;

use super::{Counterexample, Step, TraceKind, VerifyError};
use crate::config::{apply_action, initial_configuration, is_enabled};
use crate::lts::{Lts, NodeId};

const UNSEEN: u32 = u32::MAX;

/// Breadth-first tree from `root` over nodes with `keep(n)`. Paths read off
/// the tree are shortest, and among shortest paths the least as a sequence
/// of action ids.
pub(crate) struct BfsTree {
    pub dist: Vec<u32>,
    /// Visited nodes in discovery order, hence by distance.
    pub order: Vec<NodeId>,
}
impl BfsTree {
    pub fn new(lts: &Lts, root: NodeId, keep: impl Fn(NodeId) -> bool) -> Self {
        let n = lts.node_count();
        let mut dist = vec![UNSEEN; n];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        if keep(root) {
            dist[root.index()] = 0;
            queue.push_back(root);
        }
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for e in lts.out_edges(v) {
                let w = e.to;
                if dist[w.index()] == UNSEEN && keep(w) {
                    dist[w.index()] = dist[v.index()] + 1;
                    queue.push_back(w);
                }
            }
        }
        BfsTree { dist, order }
    }

    pub fn reached(&self, n: NodeId) -> bool {
        self.dist[n.index()] != UNSEEN
    }

    pub fn path_to(&self, lts: &Lts, target: NodeId) -> Option<Vec<Step>> {
        if !self.reached(target) {
            return None;
        }
        let d = self.dist[target.index()];
        let layer = |v: NodeId| self.dist[v.index()];
        // Nodes lying on some shortest path to the target.
        let mut on_path = vec![false; self.dist.len()];
        on_path[target.index()] = true;
        for &v in self.order.iter().rev().filter(|&&v| layer(v) < d) {
            on_path[v.index()] = lts.out_edges(v).iter().any(|e| on_path[e.to.index()] && layer(e.to) == layer(v) + 1);
        }
        let mut path = Vec::with_capacity(d as usize);
        let mut cur = self.order[0];
        while cur != target {
            let e = lts
                .out_edges(cur)
                .iter()
                .filter(|e| on_path[e.to.index()] && layer(e.to) == layer(cur) + 1)
                .min_by_key(|e| e.action)
                .expect("a shortest path continues");
            path.push(Step { from: cur, action: e.action, to: e.to });
            cur = e.to;
        }
        Some(path)
    }
}

/// Shortest path from the initial node to `target`.
pub fn extract_trace(lts: &Lts, target: NodeId) -> Result<Counterexample, VerifyError> {
    if target.index() >= lts.node_count() {
        return Err(VerifyError::UnreachableTarget(target.0));
    }
    let tree = BfsTree::new(lts, lts.initial(), |_| true);
    let prefix = tree.path_to(lts, target).ok_or(VerifyError::UnreachableTarget(target.0))?;
    Ok(Counterexample {
        kind: TraceKind::FinitePath,
        prefix,
        cycle: Vec::new(),
        terminal: target,
        blocked_agents: None,
        classification: None,
        degenerate: false,
    })
}

/// Shortest path to `entry` followed by a shortest cycle through `entry`
/// that stays within `within`.
pub fn extract_lasso(lts: &Lts, entry: NodeId, within: impl Fn(NodeId) -> bool) -> Result<Counterexample, VerifyError> {
    let mut cx = extract_trace(lts, entry)?;
    let tree = BfsTree::new(lts, entry, &within);
    let closing = tree.order.iter().find_map(|&v| {
        lts.out_edges(v).iter().find(|e| e.to == entry).map(|e| Step { from: v, action: e.action, to: entry })
    });
    let closing = closing.ok_or(VerifyError::NoCycle(entry.0))?;
    let mut cycle = tree.path_to(lts, closing.from).expect("closing node was reached");
    cycle.push(closing);
    cx.kind = TraceKind::Lasso;
    cx.cycle = cycle;
    Ok(cx)
}

/// Replays `cx` from the initial configuration and checks that every step
/// is an enabled action leading to the recorded node, that a lasso closes on
/// its entry, and that blocked agents are indeed not terminated at the end.
pub fn validate_witness(lts: &Lts, cx: &Counterexample) -> Result<(), VerifyError> {
    let sys = lts.system();
    let mut config = initial_configuration(sys);
    let mut node = lts.initial();
    if lts.config(node) != &config {
        return Err(VerifyError::InvalidTrace { step: 0, reason: "initial node mismatch".into() });
    }
    for (i, step) in cx.steps().enumerate() {
        let bad = |reason: &str| VerifyError::InvalidTrace { step: i, reason: reason.to_string() };
        if step.from != node {
            return Err(bad("step does not start where the previous one ended"));
        }
        let action = sys.action(step.action);
        if !is_enabled(&config, action) {
            return Err(bad("action is not enabled"));
        }
        config = apply_action(&config, action);
        if step.to.index() >= lts.node_count() || lts.config(step.to) != &config {
            return Err(bad("successor does not match the replayed configuration"));
        }
        if !lts.out_edges(step.from).iter().any(|e| e.action == step.action && e.to == step.to) {
            return Err(bad("step is not an edge of the graph"));
        }
        node = step.to;
        if i + 1 == cx.prefix.len() && node != cx.terminal {
            return Err(bad("prefix does not end at the terminal node"));
        }
    }
    let end = cx.steps().count();
    match cx.kind {
        TraceKind::FinitePath => {
            if !cx.cycle.is_empty() {
                return Err(VerifyError::InvalidTrace { step: end, reason: "finite path with a cycle".into() });
            }
        }
        TraceKind::Lasso => {
            if cx.cycle.is_empty() || node != cx.terminal {
                return Err(VerifyError::InvalidTrace { step: end, reason: "lasso cycle does not close".into() });
            }
        }
    }
    if cx.prefix.is_empty() && cx.terminal != lts.initial() {
        return Err(VerifyError::InvalidTrace { step: 0, reason: "empty prefix away from the initial node".into() });
    }
    if let Some(blocked) = cx.blocked_agents {
        let at = lts.config(cx.terminal);
        if blocked.is_empty() || blocked.iter().any(|a| at.is_terminated(a)) {
            return Err(VerifyError::InvalidTrace {
                step: end,
                reason: "blocked set contains a terminated agent".into(),
            });
        }
    }
    Ok(())
}

//! Reachability graph construction.

use std::collections::VecDeque;
use std::fmt::Write;

use indexmap::IndexSet;
use thiserror::Error;

use crate::config::{apply_action, enabled_into, initial_configuration, Configuration};
use crate::system::{ActionId, SystemSpec};

pub const DEFAULT_NODE_LIMIT: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: NodeId,
    pub action: ActionId,
    pub to: NodeId,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LtsStats {
    pub nodes: usize,
    pub edges: usize,
    pub frontier_peak: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("state space exceeds the limit of {limit} nodes ({discovered} discovered, {frontier} unexplored)")]
    StateSpaceExceeded { limit: usize, discovered: usize, frontier: usize },
}

/// The reachable state space of a system. Node 0 is the initial configuration;
/// nodes are numbered in breadth-first discovery order and edges are grouped
/// by source node, in canonical action order.
#[derive(Debug, Clone)]
pub struct Lts<'s> {
    sys: &'s SystemSpec,
    nodes: IndexSet<Configuration>,
    edges: Vec<Edge>,
    /// `edges[out_start[n]..out_start[n + 1]]` are the out-edges of `n`.
    out_start: Vec<u32>,
    frontier_peak: usize,
    complete: bool,
}

/// Explores breadth-first from the initial configuration.
pub fn build_lts(sys: &SystemSpec, limit: usize) -> Result<Lts<'_>, LtsError> {
    let lts = explore(sys, limit);
    if lts.complete {
        Ok(lts)
    } else {
        Err(LtsError::StateSpaceExceeded {
            limit,
            discovered: lts.nodes.len(),
            frontier: lts.nodes.len() - (lts.out_start.len() - 1),
        })
    }
}

/// Like [`build_lts`] but returns the truncated graph instead of failing.
/// Nodes past the last expanded one have no recorded out-edges.
pub fn explore(sys: &SystemSpec, limit: usize) -> Lts<'_> {
    let mut nodes = IndexSet::new();
    let mut edges = Vec::new();
    let mut out_start = vec![0u32];
    let mut queue = VecDeque::new();
    let mut frontier_peak = 0;
    let mut complete = true;
    let mut enabled = Vec::new();

    nodes.insert(initial_configuration(sys));
    queue.push_back(0usize);
    'outer: while let Some(i) = queue.pop_front() {
        frontier_peak = frontier_peak.max(queue.len() + 1);
        enabled_into(sys, &nodes[i], &mut enabled);
        let mut local = Vec::with_capacity(enabled.len());
        for &aid in &enabled {
            let next = apply_action(&nodes[i], sys.action(aid));
            let (j, fresh) = match nodes.get_index_of(&next) {
                Some(j) => (j, false),
                None => {
                    if nodes.len() >= limit {
                        complete = false;
                        break 'outer;
                    }
                    (nodes.insert_full(next).0, true)
                }
            };
            if fresh {
                queue.push_back(j);
            }
            local.push(Edge { from: NodeId(i as u32), action: aid, to: NodeId(j as u32) });
        }
        edges.extend(local);
        out_start.push(edges.len() as u32);
    }
    if !queue.is_empty() {
        complete = false;
    }
    Lts { sys, nodes, edges, out_start, frontier_peak, complete }
}

impl<'s> Lts<'s> {
    pub fn system(&self) -> &'s SystemSpec {
        self.sys
    }

    pub fn initial(&self) -> NodeId {
        NodeId(0)
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn stats(&self) -> LtsStats {
        LtsStats { nodes: self.nodes.len(), edges: self.edges.len(), frontier_peak: self.frontier_peak }
    }

    pub fn config(&self, n: NodeId) -> &Configuration {
        &self.nodes[n.index()]
    }

    pub fn node_of(&self, c: &Configuration) -> Option<NodeId> {
        self.nodes.get_index_of(c).map(|i| NodeId(i as u32))
    }

    pub fn node_ids(&self) -> impl DoubleEndedIterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, n: NodeId) -> &[Edge] {
        let i = n.index();
        if i + 1 >= self.out_start.len() {
            return &[];
        }
        &self.edges[self.out_start[i] as usize..self.out_start[i + 1] as usize]
    }

    pub fn successors(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.out_edges(n).iter().map(|e| e.to)
    }

    pub fn is_sink(&self, n: NodeId) -> bool {
        self.out_edges(n).is_empty()
    }

    pub fn sinks(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.node_ids().filter(|&n| self.is_sink(n))
    }

    /// Line-oriented dump: `node <id>: ...` lines, then `edge <from> <to> <agent>.<server>.<service>` lines.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for n in self.node_ids() {
            writeln!(out, "node {}: {}", n.0, self.config(n).display(self.sys)).unwrap();
        }
        for e in &self.edges {
            let a = self.sys.action(e.action);
            writeln!(out, "edge {} {} {}", e.from.0, e.to.0, self.sys.display_message(&a.in_msg)).unwrap();
        }
        out
    }
}

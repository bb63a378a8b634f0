//! Strongly connected components (iterative Tarjan).

use crate::lts::{Lts, NodeId};

pub struct Sccs {
    /// Component of each node, `u32::MAX` for nodes outside the restriction.
    comp: Vec<u32>,
    /// Members of each component. Components are listed in reverse
    /// topological order: every edge leads to the same or an earlier one.
    pub members: Vec<Vec<NodeId>>,
}

impl Sccs {
    pub fn component(&self, n: NodeId) -> Option<usize> {
        match self.comp[n.index()] {
            u32::MAX => None,
            c => Some(c as usize),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// A component is non-trivial if it contains a cycle, i.e. it has more
    /// than one node or a self-loop.
    pub fn is_nontrivial(&self, lts: &Lts, c: usize) -> bool {
        let m = &self.members[c];
        m.len() > 1 || lts.successors(m[0]).any(|s| s == m[0])
    }
}

/// SCCs of the subgraph induced by the nodes with `keep(n)`, over all nodes.
pub fn sccs(lts: &Lts, keep: impl Fn(NodeId) -> bool) -> Sccs {
    const UNSEEN: u32 = u32::MAX;
    let n = lts.node_count();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![u32::MAX; n];
    let mut stack: Vec<NodeId> = Vec::new();
    let mut members = Vec::new();
    let mut next = 0u32;
    // (node, position in its out-edge list)
    let mut call: Vec<(NodeId, usize)> = Vec::new();

    for root in lts.node_ids() {
        if index[root.index()] != UNSEEN || !keep(root) {
            continue;
        }
        call.push((root, 0));
        index[root.index()] = next;
        low[root.index()] = next;
        next += 1;
        stack.push(root);
        on_stack[root.index()] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let out = lts.out_edges(v);
            if *pos < out.len() {
                let w = out[*pos].to;
                *pos += 1;
                if !keep(w) {
                    continue;
                }
                if index[w.index()] == UNSEEN {
                    index[w.index()] = next;
                    low[w.index()] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w.index()] = true;
                    call.push((w, 0));
                } else if on_stack[w.index()] {
                    low[v.index()] = low[v.index()].min(index[w.index()]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent.index()] = low[parent.index()].min(low[v.index()]);
            }
            if low[v.index()] == index[v.index()] {
                let c = members.len() as u32;
                let mut m = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w.index()] = false;
                    comp[w.index()] = c;
                    m.push(w);
                    if w == v {
                        break;
                    }
                }
                m.sort();
                members.push(m);
            }
        }
    }
    Sccs { comp, members }
}

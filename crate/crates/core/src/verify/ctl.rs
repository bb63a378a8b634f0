//! A small CTL evaluator over maximal paths of an [`Lts`]. A path that reaches
//! a sink ends there, so `AX` holds vacuously at sinks and `AF p` holds at a
//! sink only if `p` does.

use super::AgentSet;
use crate::lts::{Lts, NodeId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    /// Every agent of the set has terminated.
    Terminated(AgentSet),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Ex(Box<Formula>),
    Ax(Box<Formula>),
    Ef(Box<Formula>),
    Af(Box<Formula>),
    Eg(Box<Formula>),
    Ag(Box<Formula>),
}

impl Formula {
    pub fn negate(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn ex(f: Formula) -> Self {
        Formula::Ex(Box::new(f))
    }
    pub fn ax(f: Formula) -> Self {
        Formula::Ax(Box::new(f))
    }
    pub fn ef(f: Formula) -> Self {
        Formula::Ef(Box::new(f))
    }
    pub fn af(f: Formula) -> Self {
        Formula::Af(Box::new(f))
    }
    pub fn eg(f: Formula) -> Self {
        Formula::Eg(Box::new(f))
    }
    pub fn ag(f: Formula) -> Self {
        Formula::Ag(Box::new(f))
    }
}

/// The set of nodes satisfying `f`, indexed by node.
pub fn eval(lts: &Lts, f: &Formula) -> Vec<bool> {
    let preds = predecessors(lts);
    Eval { lts, preds: &preds }.eval(f)
}

/// Whether the initial node satisfies `f`.
pub fn holds(lts: &Lts, f: &Formula) -> bool {
    eval(lts, f)[lts.initial().index()]
}

fn predecessors(lts: &Lts) -> Vec<Vec<NodeId>> {
    let mut preds = vec![Vec::new(); lts.node_count()];
    for e in lts.edges() {
        preds[e.to.index()].push(e.from);
    }
    preds
}

struct Eval<'a, 'l> {
    lts: &'a Lts<'l>,
    preds: &'a [Vec<NodeId>],
}

impl Eval<'_, '_> {
    fn eval(&self, f: &Formula) -> Vec<bool> {
        let lts = self.lts;
        match f {
            Formula::True => vec![true; lts.node_count()],
            Formula::Terminated(s) => {
                lts.node_ids().map(|n| s.is_subset(AgentSet::terminated(lts.config(n)))).collect()
            }
            Formula::Not(g) => self.eval(g).into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => zip(self.eval(a), self.eval(b), |x, y| x && y),
            Formula::Or(a, b) => zip(self.eval(a), self.eval(b), |x, y| x || y),
            Formula::Ex(g) => {
                let s = self.eval(g);
                lts.node_ids().map(|n| lts.successors(n).any(|m| s[m.index()])).collect()
            }
            Formula::Ax(g) => {
                let s = self.eval(g);
                lts.node_ids().map(|n| lts.successors(n).all(|m| s[m.index()])).collect()
            }
            Formula::Ef(g) => self.ef(self.eval(g)),
            Formula::Af(g) => self.af(self.eval(g)),
            Formula::Eg(g) => negate(self.af(negate(self.eval(g)))),
            Formula::Ag(g) => negate(self.ef(negate(self.eval(g)))),
        }
    }

    /// Backward reachability from the nodes satisfying the argument.
    fn ef(&self, mut sat: Vec<bool>) -> Vec<bool> {
        let mut work: Vec<NodeId> = self.lts.node_ids().filter(|n| sat[n.index()]).collect();
        while let Some(n) = work.pop() {
            for &p in &self.preds[n.index()] {
                if !sat[p.index()] {
                    sat[p.index()] = true;
                    work.push(p);
                }
            }
        }
        sat
    }

    /// Least fixpoint of `Z = p | (EX true & AX Z)`, counting unsatisfied
    /// out-edges per node.
    fn af(&self, mut sat: Vec<bool>) -> Vec<bool> {
        let lts = self.lts;
        let mut remaining: Vec<usize> = lts.node_ids().map(|n| lts.out_edges(n).len()).collect();
        let mut work: Vec<NodeId> = lts.node_ids().filter(|n| sat[n.index()]).collect();
        while let Some(n) = work.pop() {
            for &p in &self.preds[n.index()] {
                let r = &mut remaining[p.index()];
                *r -= 1;
                if *r == 0 && !sat[p.index()] {
                    sat[p.index()] = true;
                    work.push(p);
                }
            }
        }
        sat
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

fn negate(v: Vec<bool>) -> Vec<bool> {
    v.into_iter().map(|b| !b).collect()
}

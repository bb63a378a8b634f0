use std::fmt;

use crate::config::Configuration;
use crate::lang::MAX_AGENTS;
use crate::system::{AgentId, SystemSpec};

/// A set of agents as a bitmask; expansion caps systems at 128 agents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentSet(u128);

const _: () = assert!(MAX_AGENTS <= 128);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    pub fn singleton(a: AgentId) -> Self {
        AgentSet(1u128 << a.0)
    }

    pub fn all(n: usize) -> Self {
        if n >= 128 {
            AgentSet(u128::MAX)
        } else {
            AgentSet((1u128 << n) - 1)
        }
    }

    pub fn insert(&mut self, a: AgentId) {
        self.0 |= 1u128 << a.0;
    }

    pub fn contains(self, a: AgentId) -> bool {
        self.0 & (1u128 << a.0) != 0
    }

    pub fn union(self, other: Self) -> Self {
        AgentSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        AgentSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        AgentSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = AgentId> {
        (0..128u32).filter(move |&i| self.0 & (1u128 << i) != 0).map(AgentId)
    }

    pub fn terminated(c: &Configuration) -> Self {
        c.terminated().collect()
    }

    pub fn non_terminated(c: &Configuration) -> Self {
        AgentSet::all(c.agent_count()).difference(Self::terminated(c))
    }

    pub fn names(self, sys: &SystemSpec) -> Vec<String> {
        self.iter().map(|a| sys.agent_name(a).to_string()).collect()
    }
}

impl FromIterator<AgentId> for AgentSet {
    fn from_iter<I: IntoIterator<Item = AgentId>>(iter: I) -> Self {
        let mut s = AgentSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.iter().map(|a| a.0.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

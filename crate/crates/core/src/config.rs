//! Configurations and the one-step transition relation.

use std::fmt;

use crate::system::{ActionId, AgentId, GroundAction, Message, ServerId, StateId, SystemSpec};

/// Global state: one current state per server and, per agent, either its
/// single pending message or `None` once the agent has terminated.
///
/// Both vectors are indexed by declaration order, which makes equality and
/// hashing extensional.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    states: Box<[StateId]>,
    pending: Box<[Option<Message>]>,
}

impl Configuration {
    pub fn new(states: Vec<StateId>, pending: Vec<Option<Message>>) -> Self {
        Self { states: states.into_boxed_slice(), pending: pending.into_boxed_slice() }
    }

    pub fn state(&self, server: ServerId) -> StateId {
        self.states[server.index()]
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn pending(&self, agent: AgentId) -> Option<&Message> {
        self.pending[agent.index()].as_ref()
    }

    pub fn pending_all(&self) -> &[Option<Message>] {
        &self.pending
    }

    pub fn is_terminated(&self, agent: AgentId) -> bool {
        self.pending[agent.index()].is_none()
    }

    pub fn terminated(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.pending.iter().enumerate().filter(|(_, m)| m.is_none()).map(|(i, _)| AgentId(i as u32))
    }

    pub fn pending_messages(&self) -> impl Iterator<Item = &Message> + '_ {
        self.pending.iter().flatten()
    }

    pub fn all_terminated(&self) -> bool {
        self.pending.iter().all(Option::is_none)
    }

    pub fn agent_count(&self) -> usize {
        self.pending.len()
    }

    /// Renders `S=st ...; pending A:S.svc ...; terminated A ...`.
    pub fn display<'a>(&'a self, sys: &'a SystemSpec) -> impl fmt::Display + 'a {
        DisplayConfig { c: self, sys }
    }
}

struct DisplayConfig<'a> {
    c: &'a Configuration,
    sys: &'a SystemSpec,
}

impl fmt::Display for DisplayConfig<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sys = self.sys;
        let states: Vec<String> =
            sys.server_ids().map(|s| format!("{}={}", sys.server_name(s), sys.state_name(self.c.state(s)))).collect();
        let pending: Vec<String> = self
            .c
            .pending_messages()
            .map(|m| {
                format!("{}:{}.{}", sys.agent_name(m.agent), sys.server_name(m.server), sys.service_name(m.service))
            })
            .collect();
        let terminated: Vec<&str> = self.c.terminated().map(|a| sys.agent_name(a)).collect();
        let or_dash = |v: String| if v.is_empty() { "-".to_string() } else { v };
        write!(
            f,
            "{}; pending {}; terminated {}",
            states.join(" "),
            or_dash(pending.join(" ")),
            or_dash(terminated.join(" "))
        )
    }
}

/// The initial configuration given by the init block.
///
/// Expects a system that passed validation: exactly one initial state per
/// server and one initial message per agent.
pub fn initial_configuration(sys: &SystemSpec) -> Configuration {
    let states = sys.servers().iter().map(|s| s.initial[0]).collect();
    let mut pending = vec![None; sys.agents().len()];
    for (m, _) in sys.initial_messages() {
        pending[m.agent.index()] = Some(*m);
    }
    Configuration::new(states, pending)
}

/// Actions enabled in `c`: the input message is pending and the target
/// server is in the required state. Ordered by agent, then server, then
/// action index.
pub fn enabled_actions(sys: &SystemSpec, c: &Configuration) -> Vec<ActionId> {
    let mut out = Vec::new();
    enabled_into(sys, c, &mut out);
    out
}

pub(crate) fn enabled_into(sys: &SystemSpec, c: &Configuration, out: &mut Vec<ActionId>) {
    out.clear();
    // One pending message per agent, and agents are visited in order.
    for m in c.pending_messages() {
        let current = c.state(m.server);
        out.extend(sys.actions_consuming(m).iter().copied().filter(|&id| sys.action(id).in_state.state == current));
    }
}

pub fn is_enabled(c: &Configuration, a: &GroundAction) -> bool {
    c.pending(a.in_msg.agent) == Some(&a.in_msg) && c.state(a.in_state.server) == a.in_state.state
}

/// Fires `a` in `c`.
///
/// # Panics
///
/// If `a` is not enabled in `c`; callers obtain actions from
/// [`enabled_actions`].
pub fn apply_action(c: &Configuration, a: &GroundAction) -> Configuration {
    assert!(is_enabled(c, a), "apply_action: action is not enabled");
    let mut next = c.clone();
    next.states[a.out_state.server.index()] = a.out_state.state;
    next.pending[a.in_msg.agent.index()] = a.out_msg;
    next
}

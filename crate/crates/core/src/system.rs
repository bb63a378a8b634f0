//! Ground (fully instantiated) IMDS systems.
//!
//! A system is a set of server instances, each holding one current state,
//! and a set of agents, each carrying at most one pending message. Actions
//! consume a pending message together with the target server's state and
//! produce a new state plus, unless the action is terminating, the agent's
//! next message.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

id_type!(
    /// Server instance index, in declaration order.
    ServerId
);
id_type!(
    /// Agent index, in declaration order.
    AgentId
);
id_type!(ServiceId);
id_type!(StateId);
id_type!(
    /// Index into [`SystemSpec::actions`].
    ActionId
);

/// String interner mapping ground names (`tryS[1]`, `occ`) to dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Names {
    names: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl Names {
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.lookup.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.lookup.insert(name.to_string(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// `p = (server, state)`
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ServerState {
    pub server: ServerId,
    pub state: StateId,
}

/// `m = (agent, server, service)`
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Message {
    pub agent: AgentId,
    pub server: ServerId,
    pub service: ServiceId,
}

/// `((m, p), (m', p'))`, or `((m, p), (p'))` when terminating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAction {
    pub in_msg: Message,
    pub in_state: ServerState,
    pub out_msg: Option<Message>,
    pub out_state: ServerState,
}

impl GroundAction {
    pub fn terminating(&self) -> bool {
        self.out_msg.is_none()
    }

    pub fn agent(&self) -> AgentId {
        self.in_msg.agent
    }

    pub fn server(&self) -> ServerId {
        self.in_state.server
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerInstance {
    pub name: String,
    /// Name of the server definition this instance was created from.
    pub def: String,
    /// Declared ground services, in declaration order.
    pub services: Vec<ServiceId>,
    /// Declared ground states, in declaration order.
    pub states: Vec<StateId>,
    /// Initial states given in the init block; well-formed systems have exactly one.
    pub initial: Vec<StateId>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentInstance {
    pub name: String,
    pub pos: SourcePos,
}

/// Location of the construct a ground item was produced from.
pub type SourcePos = crate::lang::Pos;

/// A fully instantiated system: only ground names and ground actions remain.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    servers: Vec<ServerInstance>,
    agents: Vec<AgentInstance>,
    services: Names,
    states: Names,
    actions: Vec<GroundAction>,
    action_pos: Vec<SourcePos>,
    initial_messages: Vec<(Message, SourcePos)>,
    by_message: HashMap<Message, Vec<ActionId>>,
}

/// The raw parts a [`SystemSpec`] is assembled from.
#[derive(Debug, Clone, Default)]
pub struct SystemParts {
    pub servers: Vec<ServerInstance>,
    pub agents: Vec<AgentInstance>,
    pub services: Names,
    pub states: Names,
    pub actions: Vec<(GroundAction, SourcePos)>,
    pub initial_messages: Vec<(Message, SourcePos)>,
}

impl SystemSpec {
    /// Assembles a system, dropping duplicate ground actions (first occurrence wins).
    pub fn new(parts: SystemParts) -> Self {
        let mut seen = std::collections::HashSet::new();
        let mut actions = Vec::new();
        let mut action_pos = Vec::new();
        for (a, pos) in parts.actions {
            if seen.insert(a) {
                actions.push(a);
                action_pos.push(pos);
            }
        }
        let mut by_message: HashMap<Message, Vec<ActionId>> = HashMap::new();
        for (i, a) in actions.iter().enumerate() {
            by_message.entry(a.in_msg).or_default().push(ActionId(i as u32));
        }
        Self {
            servers: parts.servers,
            agents: parts.agents,
            services: parts.services,
            states: parts.states,
            actions,
            action_pos,
            initial_messages: parts.initial_messages,
            by_message,
        }
    }

    pub fn servers(&self) -> &[ServerInstance] {
        &self.servers
    }

    pub fn agents(&self) -> &[AgentInstance] {
        &self.agents
    }

    pub fn server(&self, id: ServerId) -> &ServerInstance {
        &self.servers[id.index()]
    }

    pub fn actions(&self) -> &[GroundAction] {
        &self.actions
    }

    pub fn action(&self, id: ActionId) -> &GroundAction {
        &self.actions[id.index()]
    }

    pub fn action_pos(&self, id: ActionId) -> SourcePos {
        self.action_pos[id.index()]
    }

    pub fn initial_messages(&self) -> &[(Message, SourcePos)] {
        &self.initial_messages
    }

    /// Actions whose input message is `m`, in canonical order.
    pub fn actions_consuming(&self, m: &Message) -> &[ActionId] {
        self.by_message.get(m).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn service_names(&self) -> &Names {
        &self.services
    }

    pub fn state_names(&self) -> &Names {
        &self.states
    }

    pub fn server_name(&self, id: ServerId) -> &str {
        &self.servers[id.index()].name
    }

    pub fn agent_name(&self, id: AgentId) -> &str {
        &self.agents[id.index()].name
    }

    pub fn service_name(&self, id: ServiceId) -> &str {
        self.services.name(id.0)
    }

    pub fn state_name(&self, id: StateId) -> &str {
        self.states.name(id.0)
    }

    pub fn server_by_name(&self, name: &str) -> Option<ServerId> {
        self.servers.iter().position(|s| s.name == name).map(|i| ServerId(i as u32))
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a.name == name).map(|i| AgentId(i as u32))
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.states.get(name).map(StateId)
    }

    pub fn service_by_name(&self, name: &str) -> Option<ServiceId> {
        self.services.get(name).map(ServiceId)
    }

    pub fn server_ids(&self) -> impl Iterator<Item = ServerId> {
        (0..self.servers.len() as u32).map(ServerId)
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.len() as u32).map(AgentId)
    }

    pub fn display_message(&self, m: &Message) -> String {
        format!("{}.{}.{}", self.agent_name(m.agent), self.server_name(m.server), self.service_name(m.service))
    }

    pub fn display_action(&self, a: &GroundAction) -> String {
        let lhs = format!(
            "{{{}, {}.{}}}",
            self.display_message(&a.in_msg),
            self.server_name(a.in_state.server),
            self.state_name(a.in_state.state)
        );
        let out_state = format!("{}.{}", self.server_name(a.out_state.server), self.state_name(a.out_state.state));
        match &a.out_msg {
            Some(m) => format!("{lhs} -> {{{}, {out_state}}}", self.display_message(m)),
            None => format!("{lhs} -> {{{out_state}}}"),
        }
    }
}

impl fmt::Display for SystemSpec {
    /// Lists instances and ground actions, one per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.servers {
            let states: Vec<_> = s.states.iter().map(|&x| self.state_name(x)).collect();
            writeln!(f, "server {} : {} states {{{}}}", s.name, s.def, states.join(","))?;
        }
        for a in &self.agents {
            writeln!(f, "agent {}", a.name)?;
        }
        for a in &self.actions {
            writeln!(f, "action {}", self.display_action(a))?;
        }
        Ok(())
    }
}

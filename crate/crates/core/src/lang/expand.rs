//! Expansion of a [`RawSpec`] into a ground [`SystemSpec`].
//!
//! Constants are substituted, quantifiers unrolled (cartesian product,
//! outermost first, ascending), index arithmetic evaluated and arrays
//! flattened into indexed instances. Inside a server definition the
//! definition's own name denotes the instance being expanded; formal
//! parameters resolve positionally to the actuals given at instantiation.

use std::collections::HashMap;

use thiserror::Error;

use super::ast::*;
use super::diag::{Diagnostic, Pos};
use crate::system::{
    AgentId, AgentInstance, GroundAction, Message, ServerId, ServerInstance, ServerState, ServiceId, StateId,
    SystemParts, SystemSpec,
};

/// Upper bound on `#DEFINE` values and array sizes.
pub const MAX_ARRAY_SIZE: i64 = 64;
/// Agent sets are bitmasks; more agents than this are rejected.
pub const MAX_AGENTS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("{pos}: undefined name `{name}`")]
    Undefined { pos: Pos, name: String },
    #[error("{pos}: index {index} of `{name}` is out of declared bounds 1..{size}")]
    IndexOutOfBounds { pos: Pos, name: String, index: i64, size: i64 },
    #[error("{pos}: `{instance}` expects {expected} actual parameters, found {found}")]
    ArityMismatch { pos: Pos, instance: String, expected: usize, found: usize },
    #[error("{pos}: quantifier `{var}` has empty or reversed range {lo}..{hi}")]
    EmptyRange { pos: Pos, var: String, lo: i64, hi: i64 },
    #[error("{pos}: {what} {value} exceeds the limit of {limit}")]
    Limit { pos: Pos, what: String, value: i64, limit: i64 },
    #[error("{pos}: {message}")]
    Invalid { pos: Pos, message: String },
}

impl ExpandError {
    pub fn pos(&self) -> Pos {
        match self {
            ExpandError::Undefined { pos, .. }
            | ExpandError::IndexOutOfBounds { pos, .. }
            | ExpandError::ArityMismatch { pos, .. }
            | ExpandError::EmptyRange { pos, .. }
            | ExpandError::Limit { pos, .. }
            | ExpandError::Invalid { pos, .. } => *pos,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        let text = self.to_string();
        // Strip the leading "line:col: " that Display adds.
        let message = text.splitn(3, ':').nth(2).map(str::trim_start).unwrap_or(&text).to_string();
        Diagnostic::error(self.pos(), message)
    }
}

type EResult<T> = Result<T, ExpandError>;

fn invalid<T>(pos: Pos, message: impl Into<String>) -> EResult<T> {
    Err(ExpandError::Invalid { pos, message: message.into() })
}

/// Variable scope: quantifier bindings on top of the defines.
#[derive(Clone)]
struct Scope<'a> {
    defines: &'a HashMap<String, i64>,
    vars: Vec<(String, i64)>,
}

impl<'a> Scope<'a> {
    fn lookup(&self, name: &str) -> Option<i64> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, v)| *v).or_else(|| self.defines.get(name).copied())
    }

    fn eval(&self, e: &Expr, pos: Pos) -> EResult<i64> {
        match e {
            Expr::Int(v) => Ok(*v),
            Expr::Var(name) => self.lookup(name).ok_or_else(|| ExpandError::Undefined { pos, name: name.clone() }),
            Expr::Add(a, b) => Ok(self.eval(a, pos)? + self.eval(b, pos)?),
            Expr::Sub(a, b) => Ok(self.eval(a, pos)? - self.eval(b, pos)?),
        }
    }

    /// Calls `f` once per assignment of the quantifiers, outermost first.
    fn for_each_assignment(&self, qs: &[Quantifier], f: &mut dyn FnMut(&Scope<'a>) -> EResult<()>) -> EResult<()> {
        let Some((q, rest)) = qs.split_first() else {
            return f(self);
        };
        let lo = self.eval(&q.lo, q.loc.0)?;
        let hi = self.eval(&q.hi, q.loc.0)?;
        if lo > hi {
            return Err(ExpandError::EmptyRange { pos: q.loc.0, var: q.var.clone(), lo, hi });
        }
        for v in lo..=hi {
            let mut inner = self.clone();
            inner.vars.push((q.var.clone(), v));
            inner.for_each_assignment(rest, f)?;
        }
        Ok(())
    }
}

fn check_size(scope: &Scope, d: &Decl) -> EResult<Option<i64>> {
    let Some(e) = &d.size else { return Ok(None) };
    let size = scope.eval(e, d.loc.0)?;
    if size < 1 {
        return invalid(d.loc.0, format!("array `{}` must have positive size, got {size}", d.name));
    }
    if size > MAX_ARRAY_SIZE {
        return Err(ExpandError::Limit {
            pos: d.loc.0,
            what: format!("size of `{}`", d.name),
            value: size,
            limit: MAX_ARRAY_SIZE,
        });
    }
    Ok(Some(size))
}

fn ground_name(base: &str, index: Option<i64>) -> String {
    match index {
        Some(i) => format!("{base}[{i}]"),
        None => base.to_string(),
    }
}

/// Expands a declaration list into ground names.
fn ground_decls(scope: &Scope, decls: &[Decl]) -> EResult<Vec<String>> {
    let mut out = Vec::new();
    for d in decls {
        match check_size(scope, d)? {
            Some(n) => out.extend((1..=n).map(|i| ground_name(&d.name, Some(i)))),
            None => out.push(d.name.clone()),
        }
    }
    Ok(out)
}

/// Evaluates a reference's index against an optional declaration.
fn ground_ref(scope: &Scope, r: &Ref, decl_size: Option<Option<i64>>) -> EResult<String> {
    let pos = r.loc.0;
    let index = r.index.as_ref().map(|e| scope.eval(e, pos)).transpose()?;
    match (decl_size, index) {
        (Some(Some(size)), Some(i)) if i < 1 || i > size => {
            Err(ExpandError::IndexOutOfBounds { pos, name: r.name.clone(), index: i, size })
        }
        (Some(Some(_)), None) => invalid(pos, format!("`{}` is an array and needs an index", r.name)),
        (Some(None), Some(_)) => invalid(pos, format!("`{}` is not an array", r.name)),
        _ => Ok(ground_name(&r.name, index)),
    }
}

/// An array or scalar of global instances (servers or agents).
struct Family<T> {
    size: Option<i64>,
    members: Vec<T>,
}

impl<T: Copy> Family<T> {
    fn pick(&self, name: &str, index: Option<i64>, pos: Pos) -> EResult<T> {
        match (self.size, index) {
            (None, None) => Ok(self.members[0]),
            (Some(size), Some(i)) => {
                if i < 1 || i > size {
                    Err(ExpandError::IndexOutOfBounds { pos, name: name.to_string(), index: i, size })
                } else {
                    Ok(self.members[(i - 1) as usize])
                }
            }
            (Some(_), None) => invalid(pos, format!("`{name}` is an array and needs an index")),
            (None, Some(_)) => invalid(pos, format!("`{name}` is not an array")),
        }
    }
}

/// Formal-to-actual binding of one server instance.
#[derive(Default)]
struct Binding {
    agents: HashMap<String, Family<AgentId>>,
    servers: HashMap<String, Family<ServerId>>,
}

enum ActualId {
    Agent(AgentId),
    Server(ServerId),
}

struct Expander<'a> {
    raw: &'a RawSpec,
    defines: HashMap<String, i64>,
    server_families: HashMap<String, Family<ServerId>>,
    agent_families: HashMap<String, Family<AgentId>>,
    parts: SystemParts,
    bindings: Vec<Option<Binding>>,
}

pub fn expand_spec(raw: &RawSpec) -> Result<SystemSpec, ExpandError> {
    let mut defines = HashMap::new();
    for d in &raw.defines {
        if d.value > MAX_ARRAY_SIZE {
            return Err(ExpandError::Limit {
                pos: d.loc.0,
                what: format!("#DEFINE `{}`", d.name),
                value: d.value,
                limit: MAX_ARRAY_SIZE,
            });
        }
        defines.insert(d.name.clone(), d.value);
    }
    let mut ex = Expander {
        raw,
        defines,
        server_families: HashMap::new(),
        agent_families: HashMap::new(),
        parts: SystemParts::default(),
        bindings: Vec::new(),
    };
    ex.declare_instances()?;
    ex.process_init()?;
    ex.expand_actions()?;
    Ok(SystemSpec::new(ex.parts))
}

impl<'a> Expander<'a> {
    fn scope(&self) -> Scope<'_> {
        Scope { defines: &self.defines, vars: Vec::new() }
    }

    fn declare_instances(&mut self) -> EResult<()> {
        let raw = self.raw;
        for d in &raw.global_servers {
            let Some(def) = raw.server_def(&d.name) else {
                return Err(ExpandError::Undefined { pos: d.loc.0, name: d.name.clone() });
            };
            if self.server_families.contains_key(&d.name) {
                return invalid(d.loc.0, format!("server `{}` declared twice", d.name));
            }
            let scope = self.scope();
            let size = check_size(&scope, d)?;
            let services = ground_decls(&scope, &def.services)?;
            let states = ground_decls(&scope, &def.states)?;
            let indices: Vec<Option<i64>> = match size {
                Some(n) => (1..=n).map(Some).collect(),
                None => vec![None],
            };
            let mut members = Vec::new();
            for i in indices {
                let id = ServerId(self.parts.servers.len() as u32);
                let services: Vec<ServiceId> =
                    services.iter().map(|s| ServiceId(self.parts.services.intern(s))).collect();
                let states: Vec<StateId> = states.iter().map(|s| StateId(self.parts.states.intern(s))).collect();
                self.parts.servers.push(ServerInstance {
                    name: ground_name(&d.name, i),
                    def: def.name.clone(),
                    services,
                    states,
                    initial: Vec::new(),
                    pos: d.loc.0,
                });
                self.bindings.push(None);
                members.push(id);
            }
            self.server_families.insert(d.name.clone(), Family { size, members });
        }
        for d in &raw.global_agents {
            if self.agent_families.contains_key(&d.name) || self.server_families.contains_key(&d.name) {
                return invalid(d.loc.0, format!("name `{}` declared twice", d.name));
            }
            let size = check_size(&self.scope(), d)?;
            let indices: Vec<Option<i64>> = match size {
                Some(n) => (1..=n).map(Some).collect(),
                None => vec![None],
            };
            let mut members = Vec::new();
            for i in indices {
                let id = AgentId(self.parts.agents.len() as u32);
                self.parts.agents.push(AgentInstance { name: ground_name(&d.name, i), pos: d.loc.0 });
                members.push(id);
            }
            self.agent_families.insert(d.name.clone(), Family { size, members });
        }
        if self.parts.agents.len() > MAX_AGENTS {
            let pos = raw.global_agents.first().map(|d| d.loc.0).unwrap_or_default();
            return Err(ExpandError::Limit {
                pos,
                what: "number of agents".into(),
                value: self.parts.agents.len() as i64,
                limit: MAX_AGENTS as i64,
            });
        }
        Ok(())
    }

    fn global_server(&self, scope: &Scope, r: &Ref) -> EResult<ServerId> {
        let fam = self
            .server_families
            .get(&r.name)
            .ok_or_else(|| ExpandError::Undefined { pos: r.loc.0, name: r.name.clone() })?;
        let index = r.index.as_ref().map(|e| scope.eval(e, r.loc.0)).transpose()?;
        fam.pick(&r.name, index, r.loc.0)
    }

    fn global_agent(&self, scope: &Scope, r: &Ref) -> EResult<AgentId> {
        let fam = self
            .agent_families
            .get(&r.name)
            .ok_or_else(|| ExpandError::Undefined { pos: r.loc.0, name: r.name.clone() })?;
        let index = r.index.as_ref().map(|e| scope.eval(e, r.loc.0)).transpose()?;
        fam.pick(&r.name, index, r.loc.0)
    }

    fn expand_actuals(&self, scope: &Scope, actuals: &[Actual]) -> EResult<Vec<ActualId>> {
        let mut out = Vec::new();
        for a in actuals {
            let pos = a.loc.0;
            let indices: Vec<Option<i64>> = match &a.index {
                ActualIndex::None => vec![None],
                ActualIndex::Single(e) => vec![Some(scope.eval(e, pos)?)],
                ActualIndex::Range(lo, hi) => {
                    let (lo, hi) = (scope.eval(lo, pos)?, scope.eval(hi, pos)?);
                    if lo > hi {
                        return Err(ExpandError::EmptyRange { pos, var: a.name.clone(), lo, hi });
                    }
                    (lo..=hi).map(Some).collect()
                }
                ActualIndex::List(items) => {
                    items.iter().map(|e| scope.eval(e, pos).map(Some)).collect::<EResult<_>>()?
                }
            };
            if let Some(fam) = self.agent_families.get(&a.name) {
                if fam.size.is_some() && indices == [None] {
                    out.extend(fam.members.iter().map(|&m| ActualId::Agent(m)));
                } else {
                    for i in indices {
                        out.push(ActualId::Agent(fam.pick(&a.name, i, pos)?));
                    }
                }
            } else if let Some(fam) = self.server_families.get(&a.name) {
                if fam.size.is_some() && indices == [None] {
                    out.extend(fam.members.iter().map(|&m| ActualId::Server(m)));
                } else {
                    for i in indices {
                        out.push(ActualId::Server(fam.pick(&a.name, i, pos)?));
                    }
                }
            } else {
                return Err(ExpandError::Undefined { pos, name: a.name.clone() });
            }
        }
        Ok(out)
    }

    fn process_init(&mut self) -> EResult<()> {
        let raw = self.raw;
        let defines = self.defines.clone();
        let root = Scope { defines: &defines, vars: Vec::new() };
        for item in &raw.init {
            let pos = item.loc.0;
            root.for_each_assignment(&item.quantifiers, &mut |scope| match &item.kind {
                InitKind::Server(init) => self.init_server(scope, init, pos),
                InitKind::Message(m) => {
                    let agent = self.global_agent(scope, &m.agent)?;
                    let server = self.global_server(scope, &m.server)?;
                    let def = raw.server_def(&self.parts.servers[server.index()].def).unwrap();
                    let service = ground_ref(scope, &m.service, decl_size(scope, &def.services, &m.service.name)?)?;
                    let service = ServiceId(self.parts.services.intern(&service));
                    self.parts.initial_messages.push((Message { agent, server, service }, pos));
                    Ok(())
                }
            })?;
        }
        Ok(())
    }

    fn init_server(&mut self, scope: &Scope, init: &ServerInit, pos: Pos) -> EResult<()> {
        let raw = self.raw;
        let server = self.global_server(scope, &init.instance)?;
        let instance_name = self.parts.servers[server.index()].name.clone();
        let def = raw.server_def(&self.parts.servers[server.index()].def).unwrap();
        let actuals = self.expand_actuals(scope, &init.actuals)?;

        let mut agent_slots = Vec::new();
        for d in &def.formal_agents {
            agent_slots.push((d.name.clone(), check_size(scope, d)?));
        }
        let mut server_slots = Vec::new();
        for d in &def.formal_servers {
            server_slots.push((d.name.clone(), check_size(scope, d)?));
        }
        let width =
            |slots: &[(String, Option<i64>)]| -> usize { slots.iter().map(|(_, s)| s.unwrap_or(1) as usize).sum() };
        let expected = width(&agent_slots) + width(&server_slots);
        if actuals.len() != expected {
            return Err(ExpandError::ArityMismatch { pos, instance: instance_name, expected, found: actuals.len() });
        }
        let mut binding = Binding::default();
        let mut it = actuals.into_iter();
        for (name, size) in agent_slots {
            let mut members = Vec::new();
            for _ in 0..size.unwrap_or(1) {
                match it.next().unwrap() {
                    ActualId::Agent(a) => members.push(a),
                    ActualId::Server(s) => {
                        return invalid(
                            pos,
                            format!(
                                "formal agent `{name}` of `{instance_name}` bound to server `{}`",
                                self.parts.servers[s.index()].name
                            ),
                        )
                    }
                }
            }
            binding.agents.insert(name, Family { size, members });
        }
        for (name, size) in server_slots {
            let mut members = Vec::new();
            for _ in 0..size.unwrap_or(1) {
                match it.next().unwrap() {
                    ActualId::Server(s) => members.push(s),
                    ActualId::Agent(a) => {
                        return invalid(
                            pos,
                            format!(
                                "formal server `{name}` of `{instance_name}` bound to agent `{}`",
                                self.parts.agents[a.index()].name
                            ),
                        )
                    }
                }
            }
            binding.servers.insert(name, Family { size, members });
        }

        let state = ground_ref(scope, &init.state, decl_size(scope, &def.states, &init.state.name)?)?;
        let state = StateId(self.parts.states.intern(&state));
        self.parts.servers[server.index()].initial.push(state);
        // The first instantiation determines the binding; duplicates are
        // reported by validation.
        if self.bindings[server.index()].is_none() {
            self.bindings[server.index()] = Some(binding);
        }
        Ok(())
    }

    fn expand_actions(&mut self) -> EResult<()> {
        let raw = self.raw;
        let defines = self.defines.clone();
        let root = Scope { defines: &defines, vars: Vec::new() };
        for sid in 0..self.parts.servers.len() {
            let server = ServerId(sid as u32);
            let Some(binding) = self.bindings[sid].take() else { continue };
            let def = raw.server_def(&self.parts.servers[sid].def).unwrap();
            for t in &def.actions {
                let pos = t.loc.0;
                root.for_each_assignment(&t.quantifiers, &mut |scope| {
                    let action = self.ground_action(scope, def, server, &binding, t)?;
                    self.parts.actions.push((action, pos));
                    Ok(())
                })?;
            }
            self.bindings[sid] = Some(binding);
        }
        Ok(())
    }

    fn resolve_agent(&self, scope: &Scope, binding: &Binding, r: &Ref) -> EResult<AgentId> {
        let fam =
            binding.agents.get(&r.name).ok_or_else(|| ExpandError::Undefined { pos: r.loc.0, name: r.name.clone() })?;
        let index = r.index.as_ref().map(|e| scope.eval(e, r.loc.0)).transpose()?;
        fam.pick(&r.name, index, r.loc.0)
    }

    fn resolve_server(
        &self,
        scope: &Scope,
        def: &ServerDef,
        this: ServerId,
        binding: &Binding,
        r: &Ref,
    ) -> EResult<ServerId> {
        if r.name == def.name && r.index.is_none() && !binding.servers.contains_key(&r.name) {
            return Ok(this);
        }
        let fam = binding
            .servers
            .get(&r.name)
            .ok_or_else(|| ExpandError::Undefined { pos: r.loc.0, name: r.name.clone() })?;
        let index = r.index.as_ref().map(|e| scope.eval(e, r.loc.0)).transpose()?;
        fam.pick(&r.name, index, r.loc.0)
    }

    fn message(
        &mut self,
        scope: &Scope,
        def: &ServerDef,
        this: ServerId,
        binding: &Binding,
        m: &MsgRef,
    ) -> EResult<Message> {
        let agent = self.resolve_agent(scope, binding, &m.agent)?;
        let server = self.resolve_server(scope, def, this, binding, &m.server)?;
        let target_def = self.raw.server_def(&self.parts.servers[server.index()].def).unwrap();
        let service = ground_ref(scope, &m.service, decl_size(scope, &target_def.services, &m.service.name)?)?;
        let service = ServiceId(self.parts.services.intern(&service));
        Ok(Message { agent, server, service })
    }

    fn own_state(
        &mut self,
        scope: &Scope,
        def: &ServerDef,
        this: ServerId,
        binding: &Binding,
        s: &StateRef,
    ) -> EResult<ServerState> {
        let server = self.resolve_server(scope, def, this, binding, &s.server)?;
        if server != this {
            return invalid(
                s.server.loc.0,
                format!("state reference `{}` must name the defining server `{}`", s.server.name, def.name),
            );
        }
        let state = ground_ref(scope, &s.state, decl_size(scope, &def.states, &s.state.name)?)?;
        Ok(ServerState { server, state: StateId(self.parts.states.intern(&state)) })
    }

    fn ground_action(
        &mut self,
        scope: &Scope,
        def: &ServerDef,
        this: ServerId,
        binding: &Binding,
        t: &ActionTemplate,
    ) -> EResult<GroundAction> {
        let in_msg = self.message(scope, def, this, binding, &t.in_msg)?;
        if in_msg.server != this {
            return invalid(
                t.in_msg.server.loc.0,
                format!("input message must be addressed to the defining server `{}`", def.name),
            );
        }
        let in_state = self.own_state(scope, def, this, binding, &t.in_state)?;
        let out_msg = match &t.out_msg {
            Some(m) => {
                let out = self.message(scope, def, this, binding, m)?;
                if out.agent != in_msg.agent {
                    return invalid(m.agent.loc.0, "output message must belong to the same agent as the input message");
                }
                Some(out)
            }
            None => None,
        };
        let out_state = self.own_state(scope, def, this, binding, &t.out_state)?;
        Ok(GroundAction { in_msg, in_state, out_msg, out_state })
    }
}

/// `Some(size)` if `name` is declared in `decls`, `None` if undeclared.
fn decl_size(scope: &Scope, decls: &[Decl], name: &str) -> EResult<Option<Option<i64>>> {
    match decls.iter().find(|d| d.name == name) {
        Some(d) => Ok(Some(check_size(scope, d)?)),
        None => Ok(None),
    }
}

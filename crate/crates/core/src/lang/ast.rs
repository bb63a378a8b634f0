//! Syntax tree mirroring the source structure, before any expansion.

use super::diag::Loc;

/// Index arithmetic: variables, integer literals, `+` and `-`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
}

/// `name` or `name[size]` in a declaration list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub size: Option<Expr>,
    pub loc: Loc,
}

/// `name` or `name[index]` in a reference position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ref {
    pub name: String,
    pub index: Option<Expr>,
    pub loc: Loc,
}

/// `<var=lo..hi>`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantifier {
    pub var: String,
    pub lo: Expr,
    pub hi: Expr,
    pub loc: Loc,
}

/// `agent.server.service`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MsgRef {
    pub agent: Ref,
    pub server: Ref,
    pub service: Ref,
}

/// `server.state`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateRef {
    pub server: Ref,
    pub state: Ref,
}

/// `<q>* {in_msg, in_state} -> {out_msg, out_state}`; `out_msg` is absent for
/// terminating actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionTemplate {
    pub quantifiers: Vec<Quantifier>,
    pub in_msg: MsgRef,
    pub in_state: StateRef,
    pub out_msg: Option<MsgRef>,
    pub out_state: StateRef,
    pub loc: Loc,
}

impl ActionTemplate {
    pub fn is_terminating(&self) -> bool {
        self.out_msg.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerDef {
    pub name: String,
    pub formal_agents: Vec<Decl>,
    pub formal_servers: Vec<Decl>,
    pub services: Vec<Decl>,
    pub states: Vec<Decl>,
    pub actions: Vec<ActionTemplate>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Define {
    pub name: String,
    pub value: i64,
    pub loc: Loc,
}

/// Index part of an actual parameter in a server instantiation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActualIndex {
    None,
    Single(Expr),
    /// `ROBOT[1..N]`
    Range(Expr, Expr),
    /// `SideCh[1,2]`
    List(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actual {
    pub name: String,
    pub index: ActualIndex,
    pub loc: Loc,
}

/// `SideCh[j](ROBOT[1..N],CentralCh).occ`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerInit {
    pub instance: Ref,
    pub actuals: Vec<Actual>,
    pub state: Ref,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitKind {
    Server(ServerInit),
    /// `ROBOT[j].SideCh[j].start`
    Message(MsgRef),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitItem {
    pub quantifiers: Vec<Quantifier>,
    pub kind: InitKind,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawSpec {
    pub defines: Vec<Define>,
    pub server_defs: Vec<ServerDef>,
    pub global_servers: Vec<Decl>,
    pub global_agents: Vec<Decl>,
    pub init: Vec<InitItem>,
}

impl RawSpec {
    pub fn server_def(&self, name: &str) -> Option<&ServerDef> {
        self.server_defs.iter().find(|d| d.name == name)
    }
}

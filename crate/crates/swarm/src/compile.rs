//! Translation of route plans into an IMDS specification.
//!
//! Every used chamber becomes a server. A move along plan edge `e` from
//! chamber `U` to chamber `V` runs three messages: the robot's `try` waits at
//! `V` until `V` has room, `V` reserves a place and sends `ok` back to `U`,
//! `U` releases the robot and sends `take` to `V`, which turns the
//! reservation into occupancy. When the robot stands at a branch point, a
//! full `V` answers `busy` and the robot picks a branch again.
//!
//! Capacity-1 chambers use the states `free`, `res` and `occ`. Other chambers
//! count robots present or reserved in states `c0`, `c1`, ...

use std::collections::BTreeMap;
use std::fmt::Write as _;

use imds::{AgentId, Lts, NodeId, SystemSpec};
use thiserror::Error;

use crate::plan::{RouteError, RoutePlan};
use crate::topology::{Capacity, EnvGraph};

const RESERVED_WORDS: [&str; 7] = ["server", "servers", "agents", "services", "states", "actions", "init"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("name collision: {0}")]
    NameCollision(String),
    #[error("robot `{robot}`: {source}")]
    Route { robot: String, source: RouteError },
    #[error("{robots} robots start in `{chamber}`, which holds {capacity}")]
    CapacityExceeded { chamber: String, robots: usize, capacity: Capacity },
    #[error("occupancy of `{0}` would drop below zero")]
    CapacityUnderflow(String),
    #[error("no robots to compile")]
    NoRobots,
}

/// What a compiled service means for the robot that sends it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageRole {
    Start,
    Try(usize),
    Busy(usize),
    Ok(usize),
    Take(usize),
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub text: String,
    pub graph: EnvGraph,
    pub plans: Vec<RoutePlan>,
    roles: BTreeMap<String, (usize, MessageRole)>,
}

pub fn compile_to_imds(g: &EnvGraph, plans: &[RoutePlan]) -> Result<String, CompileError> {
    compile(g, plans).map(|c| c.text)
}

/// Capacity bound used for the counting states of a chamber.
fn bound(cap: Capacity, robots: usize) -> usize {
    match cap {
        Capacity::Finite(n) => (n as usize).min(robots),
        Capacity::Unbounded => robots,
    }
}

fn state(cap: Capacity, k: usize) -> String {
    if cap == Capacity::Finite(1) {
        ["free", "occ"][k].to_string()
    } else {
        format!("c{k}")
    }
}

fn release(chamber: &str, k: usize) -> Result<usize, CompileError> {
    k.checked_sub(1).ok_or_else(|| CompileError::CapacityUnderflow(chamber.to_string()))
}

fn service(role: MessageRole, robot: &str) -> String {
    match role {
        MessageRole::Start => format!("start_{robot}"),
        MessageRole::Try(e) => format!("try_{robot}_{e}"),
        MessageRole::Busy(e) => format!("busy_{robot}_{e}"),
        MessageRole::Ok(e) => format!("ok_{robot}_{e}"),
        MessageRole::Take(e) => format!("take_{robot}_{e}"),
    }
}

struct Server {
    services: Vec<String>,
    targets: Vec<usize>,
    actions: Vec<String>,
}

impl Server {
    fn action(&mut self, robot: &str, input: &str, name: &str, from: &str, out: Option<(&str, &str)>, to: &str) {
        let lhs = format!("{{{robot}.{name}.{input}, {name}.{from}}}");
        self.actions.push(match out {
            Some((server, svc)) => format!("{lhs} -> {{{robot}.{server}.{svc}, {name}.{to}}}"),
            None => format!("{lhs} -> {{{name}.{to}}}"),
        });
    }
}

fn check_names(g: &EnvGraph, plans: &[RoutePlan]) -> Result<(), CompileError> {
    let mut seen = std::collections::BTreeSet::new();
    for p in plans {
        let r = p.robot.as_str();
        if !crate::topology::is_identifier(r) {
            return Err(CompileError::NameCollision(format!("`{r}` is not a valid robot name")));
        }
        if RESERVED_WORDS.contains(&r) {
            return Err(CompileError::NameCollision(format!("robot `{r}` uses a reserved word")));
        }
        if g.contains(r) {
            return Err(CompileError::NameCollision(format!("robot `{r}` shares its name with a chamber")));
        }
        if !seen.insert(r) {
            return Err(CompileError::NameCollision(format!("robot `{r}` appears twice")));
        }
    }
    for c in g.chambers() {
        if RESERVED_WORDS.contains(&c.name.as_str()) {
            return Err(CompileError::NameCollision(format!("chamber `{}` uses a reserved word", c.name)));
        }
    }
    Ok(())
}

pub fn compile(g: &EnvGraph, plans: &[RoutePlan]) -> Result<Compiled, CompileError> {
    if plans.is_empty() {
        return Err(CompileError::NoRobots);
    }
    check_names(g, plans)?;
    for p in plans {
        p.validate(g).map_err(|source| CompileError::Route { robot: p.robot.clone(), source })?;
    }
    let robots = plans.len();
    let n = g.chambers().len();
    let mut servers: Vec<Server> =
        (0..n).map(|_| Server { services: Vec::new(), targets: Vec::new(), actions: Vec::new() }).collect();
    let mut roles = BTreeMap::new();
    let idx = |c: &str| g.index(c).expect("plans were validated");
    // A try can be refused only at a branch point and by a chamber that can fill up.
    let refusable = |p: &RoutePlan, u: usize, v: usize| {
        let cap = g.chambers()[idx(p.chamber(v))].capacity;
        p.successors(u).len() > 1 && (cap == Capacity::Finite(1) || bound(cap, robots) < robots)
    };

    for (ri, p) in plans.iter().enumerate() {
        let r = p.robot.as_str();
        let edges = p.edges();
        let out_edges = |node: usize| -> Vec<usize> { (0..edges.len()).filter(|&e| edges[e].0 == node).collect() };
        let mut declare = |server: usize, role: MessageRole| {
            let name = service(role, r);
            servers[server].services.push(name.clone());
            roles.insert(name, (ri, role));
        };
        declare(idx(p.start_chamber()), MessageRole::Start);
        for (e, &(u, v)) in edges.iter().enumerate() {
            let (cu, cv) = (idx(p.chamber(u)), idx(p.chamber(v)));
            declare(cv, MessageRole::Try(e));
            declare(cu, MessageRole::Ok(e));
            declare(cv, MessageRole::Take(e));
            if refusable(p, u, v) {
                declare(cu, MessageRole::Busy(e));
            }
        }

        let tries = |node: usize| -> Vec<(String, String)> {
            out_edges(node)
                .into_iter()
                .map(|f| (p.chamber(edges[f].1).to_string(), service(MessageRole::Try(f), r)))
                .collect()
        };
        let holding = |c: usize| -> Vec<String> {
            let cap = g.chambers()[c].capacity;
            (1..=bound(cap, robots)).map(|k| state(cap, k)).collect()
        };

        let s = idx(p.start_chamber());
        let sname = p.start_chamber();
        for h in holding(s) {
            for (to, svc) in tries(0) {
                servers[s].action(r, &service(MessageRole::Start, r), sname, &h, Some((&to, &svc)), &h);
                servers[s].targets.push(idx(&to));
            }
        }

        for (e, &(u, v)) in edges.iter().enumerate() {
            let (un, vn) = (p.chamber(u), p.chamber(v));
            let (cu, cv) = (idx(un), idx(vn));
            let (capu, capv) = (g.chambers()[cu].capacity, g.chambers()[cv].capacity);
            let (try_s, ok_s, take_s, busy_s) = (
                service(MessageRole::Try(e), r),
                service(MessageRole::Ok(e), r),
                service(MessageRole::Take(e), r),
                service(MessageRole::Busy(e), r),
            );
            let kv = bound(capv, robots);
            let refusable = refusable(p, u, v);

            // try at V
            if capv == Capacity::Finite(1) {
                servers[cv].action(r, &try_s, vn, "free", Some((un, &ok_s)), "res");
                if refusable {
                    for full in ["res", "occ"] {
                        servers[cv].action(r, &try_s, vn, full, Some((un, &busy_s)), full);
                    }
                }
            } else {
                for k in 0..kv {
                    servers[cv].action(r, &try_s, vn, &state(capv, k), Some((un, &ok_s)), &state(capv, k + 1));
                }
                if refusable {
                    let full = state(capv, kv);
                    servers[cv].action(r, &try_s, vn, &full, Some((un, &busy_s)), &full);
                }
            }
            servers[cv].targets.push(cu);

            // ok at U
            let ku = bound(capu, robots);
            for k in 1..=ku {
                let to = if capu == Capacity::Finite(1) { "free".to_string() } else { state(capu, release(un, k)?) };
                servers[cu].action(r, &ok_s, un, &state(capu, k), Some((vn, &take_s)), &to);
            }
            servers[cu].targets.push(cv);

            // take at V
            let reserved: Vec<String> = if capv == Capacity::Finite(1) {
                vec!["res".into()]
            } else {
                (1..=kv).map(|k| state(capv, k)).collect()
            };
            let next = tries(v);
            for (k, from) in reserved.iter().enumerate() {
                if next.is_empty() {
                    let to =
                        if capv == Capacity::Finite(1) { "free".to_string() } else { state(capv, release(vn, k + 1)?) };
                    servers[cv].action(r, &take_s, vn, from, None, &to);
                } else {
                    let to = if capv == Capacity::Finite(1) { "occ" } else { from.as_str() };
                    for (target, svc) in &next {
                        servers[cv].action(r, &take_s, vn, from, Some((target, svc)), to);
                        servers[cv].targets.push(idx(target));
                    }
                }
            }

            // busy at U
            if refusable {
                for h in holding(cu) {
                    for (to, svc) in tries(u) {
                        servers[cu].action(r, &busy_s, un, &h, Some((&to, &svc)), &h);
                        servers[cu].targets.push(idx(&to));
                    }
                }
            }
        }
    }

    let mut start_count = vec![0usize; n];
    for p in plans {
        start_count[idx(p.start_chamber())] += 1;
    }
    for (c, &count) in start_count.iter().enumerate() {
        let ch = &g.chambers()[c];
        let fits = match ch.capacity {
            Capacity::Finite(k) => count <= k as usize,
            Capacity::Unbounded => true,
        };
        if !fits {
            return Err(CompileError::CapacityExceeded {
                chamber: ch.name.clone(),
                robots: count,
                capacity: ch.capacity,
            });
        }
    }

    let agents: Vec<&str> = plans.iter().map(|p| p.robot.as_str()).collect();
    let used: Vec<usize> = (0..n).filter(|&c| !servers[c].services.is_empty()).collect();
    let mut text = String::new();
    let formal_servers = |c: usize| -> Vec<&str> {
        let mut t = servers[c].targets.clone();
        t.sort();
        t.dedup();
        t.into_iter().map(|i| g.chambers()[i].name.as_str()).collect()
    };
    for &c in &used {
        let ch = &g.chambers()[c];
        let states: Vec<String> = if ch.capacity == Capacity::Finite(1) {
            vec!["free".into(), "res".into(), "occ".into()]
        } else {
            (0..=bound(ch.capacity, robots)).map(|k| state(ch.capacity, k)).collect()
        };
        let others = formal_servers(c);
        let _ = write!(text, "server: {}(agents {}", ch.name, agents.join(","));
        if !others.is_empty() {
            let _ = write!(text, ";servers {}", others.join(","));
        }
        let _ = writeln!(text, "),");
        let _ = writeln!(text, "services {{{}}},", servers[c].services.join(","));
        let _ = writeln!(text, "states {{{}}},", states.join(","));
        let _ = writeln!(text, "actions {{");
        for a in &servers[c].actions {
            let _ = writeln!(text, "{a},");
        }
        let _ = writeln!(text, "}}\n");
    }
    let names: Vec<&str> = used.iter().map(|&c| g.chambers()[c].name.as_str()).collect();
    let _ = writeln!(text, "servers {};", names.join(","));
    let _ = writeln!(text, "agents {};", agents.join(","));
    let _ = writeln!(text, "init -> {{");
    for &c in &used {
        let ch = &g.chambers()[c];
        let mut actuals: Vec<&str> = agents.clone();
        actuals.extend(formal_servers(c));
        let _ = writeln!(text, "{}({}).{},", ch.name, actuals.join(","), state(ch.capacity, start_count[c]));
    }
    for p in plans {
        let _ = writeln!(text, "{}.{}.{},", p.robot, p.start_chamber(), service(MessageRole::Start, &p.robot));
    }
    let _ = writeln!(text, "}}.");

    Ok(Compiled { text, graph: g.clone(), plans: plans.to_vec(), roles })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {node}: chamber `{chamber}` {problem}")]
pub struct SafetyViolation {
    pub node: u32,
    pub chamber: String,
    pub problem: String,
}

impl Compiled {
    /// Meaning of a compiled service name.
    pub fn role(&self, service: &str) -> Option<(usize, MessageRole)> {
        self.roles.get(service).copied()
    }

    /// Chambers held and reserved by each robot at `node`, read off its
    /// pending message.
    pub fn attribution(&self, sys: &SystemSpec, lts: &Lts, node: NodeId) -> Vec<(Option<String>, Option<String>)> {
        let c = lts.config(node);
        sys.agent_ids()
            .map(|a| {
                let Some(m) = c.pending(a) else { return (None, None) };
                let (ri, role) = self.role(sys.service_name(m.service)).expect("compiled service");
                let p = &self.plans[ri];
                let edge = |e: usize| p.edges()[e];
                let ch = |n: usize| Some(p.chamber(n).to_string());
                match role {
                    MessageRole::Start => (Some(p.start_chamber().to_string()), None),
                    MessageRole::Try(e) | MessageRole::Busy(e) => (ch(edge(e).0), None),
                    MessageRole::Ok(e) => (ch(edge(e).0), ch(edge(e).1)),
                    MessageRole::Take(e) => (None, ch(edge(e).1)),
                }
            })
            .collect()
    }

    /// Checks at every reached node that chamber states agree with the
    /// robots attributed to them and that no capacity is exceeded.
    pub fn check_safety(&self, lts: &Lts) -> Result<(), SafetyViolation> {
        let sys = lts.system();
        let robots = self.plans.len();
        for node in lts.node_ids() {
            let attr = self.attribution(sys, lts, node);
            let c = lts.config(node);
            for (a, (held, reserved)) in attr.iter().enumerate() {
                if held.is_none() && reserved.is_none() && c.pending(AgentId(a as u32)).is_some() {
                    return Err(SafetyViolation {
                        node: node.0,
                        chamber: "-".into(),
                        problem: format!("loses robot `{}`", sys.agent_name(AgentId(a as u32))),
                    });
                }
            }
            for ch in self.graph.chambers() {
                let Some(sid) = sys.server_by_name(&ch.name) else { continue };
                let holders = attr.iter().filter(|(h, _)| h.as_deref() == Some(&ch.name)).count();
                let reservers = attr.iter().filter(|(_, r)| r.as_deref() == Some(&ch.name)).count();
                let st = sys.state_name(c.state(sid));
                let violation = |problem: String| SafetyViolation { node: node.0, chamber: ch.name.clone(), problem };
                if ch.capacity == Capacity::Finite(1) {
                    let expected = match (holders, reservers) {
                        (0, 0) => "free",
                        (0, 1) => "res",
                        (1, 0) => "occ",
                        _ => return Err(violation(format!("hosts {holders} robots and {reservers} reservations"))),
                    };
                    if st != expected {
                        return Err(violation(format!("is `{st}` but should be `{expected}`")));
                    }
                } else {
                    let k = holders + reservers;
                    let limit = bound(ch.capacity, robots);
                    if k > limit || st != state(ch.capacity, k) {
                        return Err(violation(format!("is `{st}` with {k} robots attributed (limit {limit})")));
                    }
                }
            }
        }
        Ok(())
    }
}

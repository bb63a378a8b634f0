#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use imds::{ActionId, Configuration, SystemSpec};
use proptest::prelude::*;

pub fn corpus(name: &str) -> String {
    let path = format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn load(text: &str) -> SystemSpec {
    match imds::lang::load_system(text) {
        Ok((sys, _)) => sys,
        Err(d) => panic!("{}", d.render("input")),
    }
}

pub fn listing() -> SystemSpec {
    load(&corpus("two_robots_central.imds"))
}

/// One generated action inside the definition of server `server`.
#[derive(Debug, Clone)]
pub struct GenAction {
    pub agent: usize,
    pub service: usize,
    pub from: usize,
    pub to: usize,
    /// `(server, service)` of the produced message, or termination.
    pub sends: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct GenSystem {
    pub servers: usize,
    pub agents: usize,
    pub services: usize,
    pub states: usize,
    /// Per server, its actions.
    pub actions: Vec<Vec<GenAction>>,
    /// Per server, the initial state.
    pub init_state: Vec<usize>,
    /// Per agent, the `(server, service)` of its initial message.
    pub init_msg: Vec<(usize, usize)>,
}

impl GenSystem {
    /// Source text with one server definition per server, each named after
    /// its single instance.
    pub fn text(&self) -> String {
        let mut out = String::new();
        let names: Vec<String> = (1..=self.servers).map(|i| format!("S{i}")).collect();
        for (i, name) in names.iter().enumerate() {
            let others: Vec<&str> = names.iter().filter(|n| *n != name).map(String::as_str).collect();
            out += &format!("server: {name}(agents A[{}]", self.agents);
            if !others.is_empty() {
                out += &format!("; servers {}", others.join(","));
            }
            out += "),\n";
            let svcs: Vec<String> = (1..=self.services).map(|v| format!("v{v}")).collect();
            let sts: Vec<String> = (1..=self.states).map(|p| format!("p{p}")).collect();
            out += &format!("services {{{}}},\nstates {{{}}},\nactions {{\n", svcs.join(","), sts.join(","));
            for a in &self.actions[i] {
                out += &format!("{{A[{}].{name}.v{}, {name}.p{}}} -> {{", a.agent + 1, a.service + 1, a.from + 1);
                if let Some((s, v)) = a.sends {
                    out += &format!("A[{}].{}.v{}, ", a.agent + 1, names[s], v + 1);
                }
                out += &format!("{name}.p{}}},\n", a.to + 1);
            }
            out += "}\n";
        }
        out += &format!("servers {};\nagents A[{}];\ninit -> {{\n", names.join(","), self.agents);
        for (i, name) in names.iter().enumerate() {
            let others: Vec<&str> = names.iter().filter(|n| *n != name).map(String::as_str).collect();
            let mut actuals = vec![format!("A[1..{}]", self.agents)];
            actuals.extend(others.iter().map(|s| s.to_string()));
            out += &format!("{name}({}).p{},\n", actuals.join(","), self.init_state[i] + 1);
        }
        for (a, (s, v)) in self.init_msg.iter().enumerate() {
            out += &format!("A[{}].{}.v{},\n", a + 1, names[*s], v + 1);
        }
        out += "}.\n";
        out
    }
}

pub fn arb_system() -> impl Strategy<Value = GenSystem> {
    (1usize..=3, 1usize..=3, 1usize..=3, 2usize..=3).prop_flat_map(|(servers, agents, services, states)| {
        let action =
            (0..agents, 0..services, 0..states, 0..states, prop::option::weighted(0.8, (0..servers, 0..services)))
                .prop_map(|(agent, service, from, to, sends)| GenAction { agent, service, from, to, sends });
        (
            prop::collection::vec(prop::collection::vec(action, 1..6), servers),
            prop::collection::vec(0..states, servers),
            prop::collection::vec((0..servers, 0..services), agents),
        )
            .prop_map(move |(actions, init_state, init_msg)| GenSystem {
                servers,
                agents,
                services,
                states,
                actions,
                init_state,
                init_msg,
            })
    })
}

pub type EdgeTriple = (Configuration, ActionId, Configuration);

/// Naive depth-first enumeration that scans every ground action for each
/// configuration and fires it by hand.
pub fn oracle_explore(sys: &SystemSpec) -> (BTreeSet<Configuration>, BTreeSet<EdgeTriple>) {
    let init = imds::initial_configuration(sys);
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    visit(sys, init, &mut nodes, &mut edges);
    (nodes, edges)
}

fn visit(sys: &SystemSpec, c: Configuration, nodes: &mut BTreeSet<Configuration>, edges: &mut BTreeSet<EdgeTriple>) {
    if !nodes.insert(c.clone()) {
        return;
    }
    for next in oracle_successors(sys, &c) {
        edges.insert((c.clone(), next.0, next.1.clone()));
        visit(sys, next.1, nodes, edges);
    }
}

pub fn oracle_successors(sys: &SystemSpec, c: &Configuration) -> Vec<(ActionId, Configuration)> {
    let mut out = Vec::new();
    for (i, a) in sys.actions().iter().enumerate() {
        let agent = a.in_msg.agent.index();
        let server = a.in_msg.server.index();
        if c.pending_all()[agent] != Some(a.in_msg) || c.states()[server] != a.in_state.state {
            continue;
        }
        let mut states = c.states().to_vec();
        states[server] = a.out_state.state;
        let mut pending = c.pending_all().to_vec();
        pending[agent] = a.out_msg;
        out.push((ActionId(i as u32), Configuration::new(states, pending)));
    }
    out
}

/// Breadth-first distances from the initial configuration over the oracle
/// transition relation.
pub fn oracle_distances(sys: &SystemSpec) -> BTreeMap<Configuration, usize> {
    let init = imds::initial_configuration(sys);
    let mut dist = BTreeMap::from([(init.clone(), 0)]);
    let mut queue = VecDeque::from([init]);
    while let Some(c) = queue.pop_front() {
        let d = dist[&c];
        for (_, next) in oracle_successors(sys, &c) {
            if !dist.contains_key(&next) {
                dist.insert(next.clone(), d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}

/// Agents that act somewhere reachable from `c`, by explicit enumeration.
pub fn oracle_live(sys: &SystemSpec, c: &Configuration) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([c.clone()]);
    let mut stack = vec![c.clone()];
    let mut live = BTreeSet::new();
    while let Some(v) = stack.pop() {
        for (a, next) in oracle_successors(sys, &v) {
            live.insert(sys.action(a).in_msg.agent.index());
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    live
}

/// Whether every maximal path from `c` reaches a configuration where all
/// `agents` have terminated, by memoized search with cycle detection.
pub fn oracle_inevitable(sys: &SystemSpec, agents: &BTreeSet<usize>) -> bool {
    fn goal(c: &Configuration, agents: &BTreeSet<usize>) -> bool {
        agents.iter().all(|&a| c.pending_all()[a].is_none())
    }
    // 0 = on stack, 1 = inevitable, 2 = not inevitable
    fn go(
        sys: &SystemSpec,
        c: &Configuration,
        agents: &BTreeSet<usize>,
        memo: &mut BTreeMap<Configuration, u8>,
    ) -> bool {
        if goal(c, agents) {
            return true;
        }
        match memo.get(c) {
            Some(0) | Some(2) => return false,
            Some(_) => return true,
            None => {}
        }
        memo.insert(c.clone(), 0);
        let succ = oracle_successors(sys, c);
        let ok = !succ.is_empty() && succ.iter().all(|(_, n)| go(sys, n, agents, memo));
        memo.insert(c.clone(), if ok { 1 } else { 2 });
        ok
    }
    let mut memo = BTreeMap::new();
    go(sys, &imds::initial_configuration(sys), agents, &mut memo)
}

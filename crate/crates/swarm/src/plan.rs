//! Route plans: a robot's intended moves as a graph of route nodes, each
//! labeled by a chamber.
//!
//! Plan file format:
//!
//! ```text
//! robot R1 start AW
//! step AW QSW
//! step QSW AS
//! end AS
//! ```
//!
//! A node token is a chamber name, or `chamber/label` when the same chamber
//! occurs at several nodes of one plan. Several plans may share a file; each
//! starts with its `robot` line.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::topology::{is_identifier, EnvGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown chamber `{0}`")]
    UnknownChamber(String),
    #[error("no door between `{from}` and `{to}`")]
    NotADoor { from: String, to: String },
    #[error("chamber `{0}` repeats along an acyclic route")]
    RepeatedChamber(String),
    #[error("route has no steps")]
    EmptyRoute,
    #[error("no rotation maps `{from}` to `{to}`")]
    NoAutomorphism { from: String, to: String },
    #[error("topology lacks the four-fold quadrant symmetry")]
    UnsupportedTopology,
    #[error("no route from `{start}` reaches any of {targets:?}")]
    NoRouteExists { start: String, targets: Vec<String> },
    #[error("fragment starts at `{start}` but the route so far ends at `{end}`")]
    DiscontinuousFragments { end: String, start: String },
    #[error("cycle through `{0}` visits no side chamber")]
    UnanchorableCycle(String),
    #[error("cycle needs at least two cut points, found {0}")]
    TooFewCutPoints(usize),
    #[error("operation requires a route without branches")]
    Branching,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutePlan {
    pub robot: String,
    /// Chamber of each node; node 0 is the start.
    chambers: Vec<String>,
    succ: Vec<Vec<usize>>,
}

impl RoutePlan {
    /// A single node at `start`, to be extended with [`RoutePlan::push_node`].
    pub fn rooted(robot: impl Into<String>, start: impl Into<String>) -> Self {
        RoutePlan { robot: robot.into(), chambers: vec![start.into()], succ: vec![Vec::new()] }
    }

    pub fn push_node(&mut self, chamber: impl Into<String>) -> usize {
        self.chambers.push(chamber.into());
        self.succ.push(Vec::new());
        self.chambers.len() - 1
    }

    pub fn push_edge(&mut self, from: usize, to: usize) {
        if !self.succ[from].contains(&to) {
            self.succ[from].push(to);
        }
    }

    /// A path visiting `chambers` in order, ending with a terminating step.
    pub fn linear<S: AsRef<str>>(robot: impl Into<String>, chambers: &[S]) -> Result<Self, RouteError> {
        let first = chambers.first().ok_or(RouteError::EmptyRoute)?;
        let mut plan = RoutePlan::rooted(robot, first.as_ref());
        let mut seen = BTreeSet::from([first.as_ref()]);
        for c in &chambers[1..] {
            if !seen.insert(c.as_ref()) {
                return Err(RouteError::RepeatedChamber(c.as_ref().to_string()));
            }
            let n = plan.push_node(c.as_ref());
            plan.push_edge(n - 1, n);
        }
        Ok(plan)
    }

    /// A closed walk through `chambers`, returning from the last to the first.
    pub fn cycle<S: AsRef<str>>(robot: impl Into<String>, chambers: &[S]) -> Result<Self, RouteError> {
        let mut plan = RoutePlan::linear(robot, chambers)?;
        if chambers.len() < 2 {
            return Err(RouteError::EmptyRoute);
        }
        let last = plan.len() - 1;
        plan.push_edge(last, 0);
        Ok(plan)
    }

    pub fn with_robot(mut self, robot: impl Into<String>) -> Self {
        self.robot = robot.into();
        self
    }

    pub fn len(&self) -> usize {
        self.chambers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chambers.is_empty()
    }

    pub fn start(&self) -> usize {
        0
    }

    pub fn start_chamber(&self) -> &str {
        &self.chambers[0]
    }

    pub fn chamber(&self, node: usize) -> &str {
        &self.chambers[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    /// All edges, grouped by source node in node order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.succ.iter().enumerate().flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v))).collect()
    }

    /// Nodes without successors; the robot terminates there.
    pub fn ends(&self) -> Vec<usize> {
        (0..self.len()).filter(|&n| self.succ[n].is_empty()).collect()
    }

    pub fn terminator_chambers(&self) -> BTreeSet<&str> {
        self.ends().into_iter().map(|n| self.chamber(n)).collect()
    }

    pub fn is_linear(&self) -> bool {
        self.succ.iter().all(|s| s.len() <= 1)
    }

    pub fn is_cyclic(&self) -> bool {
        // Kahn's algorithm leaves nodes on a cycle unprocessed.
        let mut indeg = vec![0usize; self.len()];
        for (_, v) in self.edges() {
            indeg[v] += 1;
        }
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&n| indeg[n] == 0).collect();
        let mut done = 0;
        while let Some(n) = queue.pop_front() {
            done += 1;
            for &v in &self.succ[n] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        done < self.len()
    }

    /// Chambers along a plan without branches, from the start. A closed walk
    /// repeats its first chamber at the end.
    pub fn chamber_walk(&self) -> Result<Vec<String>, RouteError> {
        if !self.is_linear() {
            return Err(RouteError::Branching);
        }
        let mut out = vec![self.chambers[0].clone()];
        let mut seen = vec![false; self.len()];
        let mut n = 0;
        seen[0] = true;
        while let Some(&next) = self.succ[n].first() {
            out.push(self.chambers[next].clone());
            if seen[next] {
                break;
            }
            seen[next] = true;
            n = next;
        }
        Ok(out)
    }

    /// Renames chambers, keeping the graph shape.
    pub fn map_chambers(&self, f: impl Fn(&str) -> String) -> Self {
        RoutePlan {
            robot: self.robot.clone(),
            chambers: self.chambers.iter().map(|c| f(c)).collect(),
            succ: self.succ.clone(),
        }
    }

    /// Renumbers nodes in breadth-first order from the start and drops
    /// unreachable nodes.
    pub fn canonical(&self) -> Self {
        let mut order = vec![0];
        let mut index = vec![usize::MAX; self.len()];
        index[0] = 0;
        let mut i = 0;
        while i < order.len() {
            for &v in &self.succ[order[i]] {
                if index[v] == usize::MAX {
                    index[v] = order.len();
                    order.push(v);
                }
            }
            i += 1;
        }
        RoutePlan {
            robot: self.robot.clone(),
            chambers: order.iter().map(|&n| self.chambers[n].clone()).collect(),
            succ: order.iter().map(|&n| self.succ[n].iter().map(|&v| index[v]).collect()).collect(),
        }
    }

    /// Checks chambers and doors against `g`, and that acyclic plans never
    /// revisit a chamber along a path.
    pub fn validate(&self, g: &EnvGraph) -> Result<(), RouteError> {
        for c in &self.chambers {
            if !g.contains(c) {
                return Err(RouteError::UnknownChamber(c.clone()));
            }
        }
        if self.edges().is_empty() {
            return Err(RouteError::EmptyRoute);
        }
        for (u, v) in self.edges() {
            if !g.has_door(&self.chambers[u], &self.chambers[v]) {
                return Err(RouteError::NotADoor { from: self.chambers[u].clone(), to: self.chambers[v].clone() });
            }
        }
        if !self.is_cyclic() {
            let mut path = Vec::new();
            self.check_simple(0, &mut path)?;
        }
        Ok(())
    }

    fn check_simple<'a>(&'a self, n: usize, path: &mut Vec<&'a str>) -> Result<(), RouteError> {
        if path.contains(&self.chambers[n].as_str()) {
            return Err(RouteError::RepeatedChamber(self.chambers[n].clone()));
        }
        path.push(&self.chambers[n]);
        for &v in &self.succ[n] {
            self.check_simple(v, path)?;
        }
        path.pop();
        Ok(())
    }

    /// Plan file text; see the module docs.
    pub fn to_text(&self) -> String {
        let mut count: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &self.chambers {
            *count.entry(c.as_str()).or_default() += 1;
        }
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        let tokens: Vec<String> = self
            .chambers
            .iter()
            .map(|c| {
                if count[c.as_str()] == 1 {
                    c.clone()
                } else {
                    let k = seen.entry(c.as_str()).or_default();
                    *k += 1;
                    format!("{c}/{k}")
                }
            })
            .collect();
        let mut out = format!("robot {} start {}\n", self.robot, tokens[0]);
        for (u, v) in self.edges() {
            out += &format!("step {} {}\n", tokens[u], tokens[v]);
        }
        for n in self.ends() {
            out += &format!("end {}\n", tokens[n]);
        }
        out
    }
}

/// Reads every plan in `text`.
pub fn parse_plans(text: &str) -> Result<Vec<RoutePlan>, RouteError> {
    let mut plans = Vec::new();
    let mut current: Option<PlanBuilder> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let err = |message: String| RouteError::Parse { line, message };
        match words.as_slice() {
            [] => {}
            ["robot", name, "start", start] => {
                if !is_identifier(name) {
                    return Err(err(format!("invalid robot name `{name}`")));
                }
                if let Some(b) = current.take() {
                    plans.push(b.finish()?);
                }
                let mut b =
                    PlanBuilder { plan: RoutePlan::rooted(*name, ""), tokens: BTreeMap::new(), ends: Vec::new(), line };
                b.node(start, line)?;
                current = Some(b);
            }
            ["step", from, to] => {
                let b = current.as_mut().ok_or_else(|| err("`step` before `robot`".into()))?;
                let u = b.node(from, line)?;
                let v = b.node(to, line)?;
                b.plan.push_edge(u, v);
            }
            ["end", at] => {
                let b = current.as_mut().ok_or_else(|| err("`end` before `robot`".into()))?;
                let n = b.node(at, line)?;
                b.ends.push((n, line));
            }
            [kw, ..] if ["robot", "step", "end"].contains(kw) => return Err(err(format!("malformed `{kw}` line"))),
            [other, ..] => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    if let Some(b) = current {
        plans.push(b.finish()?);
    }
    Ok(plans)
}

/// Reads a file holding exactly one plan.
pub fn parse_plan(text: &str) -> Result<RoutePlan, RouteError> {
    let mut plans = parse_plans(text)?;
    match plans.len() {
        1 => Ok(plans.pop().unwrap()),
        n => Err(RouteError::Parse { line: 1, message: format!("expected one plan, found {n}") }),
    }
}

struct PlanBuilder {
    plan: RoutePlan,
    tokens: BTreeMap<String, usize>,
    ends: Vec<(usize, usize)>,
    line: usize,
}

impl PlanBuilder {
    fn node(&mut self, token: &str, line: usize) -> Result<usize, RouteError> {
        if let Some(&n) = self.tokens.get(token) {
            return Ok(n);
        }
        let chamber = token.split_once('/').map_or(token, |(c, _)| c);
        if !is_identifier(chamber) {
            return Err(RouteError::Parse { line, message: format!("invalid node `{token}`") });
        }
        let n = if self.tokens.is_empty() {
            self.plan.chambers[0] = chamber.to_string();
            0
        } else {
            self.plan.push_node(chamber)
        };
        self.tokens.insert(token.to_string(), n);
        Ok(n)
    }

    fn finish(self) -> Result<RoutePlan, RouteError> {
        let sinks: BTreeSet<usize> = self.plan.ends().into_iter().collect();
        let declared: BTreeSet<usize> = self.ends.iter().map(|&(n, _)| n).collect();
        if let Some(&(n, line)) = self.ends.iter().find(|(n, _)| !sinks.contains(n)) {
            let message = format!("`end {}` names a node with outgoing steps", self.plan.chamber(n));
            return Err(RouteError::Parse { line, message });
        }
        if let Some(&n) = sinks.difference(&declared).next() {
            let message = format!("route stops at `{}` without an `end` line", self.plan.chamber(n));
            return Err(RouteError::Parse { line: self.line, message });
        }
        Ok(self.plan)
    }
}

//! Behavior generators: rotations, fleets, path enumeration and fragment
//! composition.

use std::collections::BTreeSet;

use crate::plan::{RouteError, RoutePlan};
use crate::topology::EnvGraph;

pub const DEFAULT_ROBOT: &str = "ROBOT";

const SIDE_ORBIT: [&str; 4] = ["AW", "AN", "AE", "AS"];
const CENTRAL_ORBIT: [&str; 4] = ["QNW", "QNE", "QSE", "QSW"];

/// Quarter-turn rotation applied `k` times, or `None` for a chamber outside
/// the quadrant layout.
pub fn rotate_chamber(name: &str, k: usize) -> Option<&'static str> {
    for orbit in [SIDE_ORBIT, CENTRAL_ORBIT] {
        if let Some(i) = orbit.iter().position(|c| *c == name) {
            return Some(orbit[(i + k) % 4]);
        }
    }
    None
}

fn check_symmetric(g: &EnvGraph) -> Result<(), RouteError> {
    for c in g.chambers() {
        if rotate_chamber(&c.name, 1).is_none() {
            return Err(RouteError::UnsupportedTopology);
        }
    }
    for (a, b) in g.doors() {
        let (ra, rb) = (rotate_chamber(a, 1).unwrap(), rotate_chamber(b, 1).unwrap());
        if !g.has_door(ra, rb) || g.chamber(a).map(|c| c.kind) != g.chamber(ra).map(|c| c.kind) {
            return Err(RouteError::UnsupportedTopology);
        }
    }
    Ok(())
}

/// Number of quarter turns taking `from` to `to`.
fn turns(from: &str, to: &str) -> Result<usize, RouteError> {
    (0..4)
        .find(|&k| rotate_chamber(from, k) == Some(to))
        .ok_or_else(|| RouteError::NoAutomorphism { from: from.to_string(), to: to.to_string() })
}

/// The plan rotated so that it starts at `start`; turns at every chamber are
/// kept.
pub fn generate_similar_behavior(g: &EnvGraph, plan: &RoutePlan, start: &str) -> Result<RoutePlan, RouteError> {
    check_symmetric(g)?;
    let k = turns(plan.start_chamber(), start)?;
    if let Some(c) = (0..plan.len()).map(|n| plan.chamber(n)).find(|c| rotate_chamber(c, 0).is_none()) {
        return Err(RouteError::UnknownChamber(c.to_string()));
    }
    Ok(plan.map_chambers(|c| rotate_chamber(c, k).unwrap().to_string()))
}

/// `count` copies of `plan` for robots named `<robot>1..<robot>count`.
pub fn generate_identical_fleet(plan: &RoutePlan, count: usize) -> Vec<RoutePlan> {
    (1..=count).map(|i| plan.clone().with_robot(format!("{}{i}", plan.robot))).collect()
}

/// Every simple path from `start` that ends at a side chamber, in
/// lexicographic order of chamber sequences.
pub fn generate_all_behaviors(g: &EnvGraph, start: &str) -> Result<Vec<RoutePlan>, RouteError> {
    if !g.contains(start) {
        return Err(RouteError::UnknownChamber(start.to_string()));
    }
    fn walk<'g>(g: &'g EnvGraph, path: &mut Vec<&'g str>, out: &mut Vec<Vec<&'g str>>) {
        let last = *path.last().unwrap();
        if path.len() > 1 && g.is_side(last) {
            out.push(path.clone());
        }
        for next in g.neighbors(last) {
            if !path.contains(&next) {
                path.push(next);
                walk(g, path, out);
                path.pop();
            }
        }
    }
    let start = g.chamber(start).map(|c| c.name.as_str()).unwrap();
    let mut paths = Vec::new();
    walk(g, &mut vec![start], &mut paths);
    paths.sort();
    paths.iter().map(|p| RoutePlan::linear(DEFAULT_ROBOT, p)).collect()
}

/// One branching plan holding every simple path from `start` to a target
/// that avoids the `forbidden` directed steps. Paths stop at the first target
/// they reach.
pub fn generate_many_behaviors(
    g: &EnvGraph,
    start: &str,
    targets: &BTreeSet<String>,
    forbidden: &BTreeSet<(String, String)>,
) -> Result<RoutePlan, RouteError> {
    for c in std::iter::once(start).chain(targets.iter().map(String::as_str)) {
        if !g.contains(c) {
            return Err(RouteError::UnknownChamber(c.to_string()));
        }
    }
    let mut plan = RoutePlan::rooted(DEFAULT_ROBOT, start);
    let mut path = vec![start.to_string()];
    let found = extend(g, targets, forbidden, &mut plan, 0, &mut path);
    if !found {
        return Err(RouteError::NoRouteExists { start: start.to_string(), targets: targets.iter().cloned().collect() });
    }
    Ok(plan.canonical())
}

fn extend(
    g: &EnvGraph,
    targets: &BTreeSet<String>,
    forbidden: &BTreeSet<(String, String)>,
    plan: &mut RoutePlan,
    node: usize,
    path: &mut Vec<String>,
) -> bool {
    let here = path.last().unwrap().clone();
    let mut any = false;
    for next in g.neighbors(&here) {
        if path.iter().any(|c| c == next) || forbidden.contains(&(here.clone(), next.to_string())) {
            continue;
        }
        let child = plan.push_node(next);
        let reached = if targets.contains(next) {
            true
        } else {
            path.push(next.to_string());
            let r = extend(g, targets, forbidden, plan, child, path);
            path.pop();
            r
        };
        if reached {
            plan.push_edge(node, child);
            any = true;
        }
    }
    any
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComposeMode {
    /// Fragments are joined as given.
    Identical,
    /// The first fragment is rotated to start at the given chamber and each
    /// later one to start where the route so far ends.
    Similar(String),
}

/// Concatenates linear fragments. A result that returns to its first
/// chamber becomes a closed walk.
pub fn compose_subroutes(g: &EnvGraph, parts: &[RoutePlan], mode: &ComposeMode) -> Result<RoutePlan, RouteError> {
    let first = parts.first().ok_or(RouteError::EmptyRoute)?;
    let mut walk: Vec<String> = Vec::new();
    for part in parts {
        let part = match mode {
            ComposeMode::Identical => part.clone(),
            ComposeMode::Similar(start) => {
                let at = walk.last().unwrap_or(start);
                generate_similar_behavior(g, part, at)?
            }
        };
        let steps = part.chamber_walk()?;
        if part.is_cyclic() {
            return Err(RouteError::Branching);
        }
        match walk.last() {
            None => walk.extend(steps),
            Some(end) if *end == steps[0] => walk.extend(steps.into_iter().skip(1)),
            Some(end) => return Err(RouteError::DiscontinuousFragments { end: end.clone(), start: steps[0].clone() }),
        }
    }
    if walk.len() > 2 && walk.first() == walk.last() {
        walk.pop();
        RoutePlan::cycle(first.robot.clone(), &walk)
    } else {
        RoutePlan::linear(first.robot.clone(), &walk)
    }
}

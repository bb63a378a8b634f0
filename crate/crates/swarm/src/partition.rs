//! Cutting routes into short terminating sub-routes.

use std::collections::{BTreeMap, VecDeque};

use crate::plan::{RouteError, RoutePlan};
use crate::topology::EnvGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionMethod {
    /// Cut at every side-chamber visit.
    SideAnchored,
    /// Cut at side chambers and at the given central chamber; pieces ending
    /// or starting in a central chamber are padded to the nearest side
    /// chamber.
    CycleBreak(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubRoute {
    /// Robot of the route this piece came from.
    pub parent: String,
    pub steps: Vec<String>,
    /// Whether the cut piece began at a side chamber before any padding.
    pub starts_at_side: bool,
    pub ends_at_side: bool,
}

impl SubRoute {
    pub fn to_plan(&self) -> RoutePlan {
        RoutePlan::linear(self.parent.clone(), &self.steps).expect("sub-routes do not repeat chambers")
    }
}

pub fn partition_route(g: &EnvGraph, plan: &RoutePlan, method: &PartitionMethod) -> Result<Vec<SubRoute>, RouteError> {
    let mut walk = plan.chamber_walk()?;
    let cyclic = plan.is_cyclic();
    if cyclic {
        walk.pop();
    }
    let is_cut = |c: &str| match method {
        PartitionMethod::SideAnchored => g.is_side(c),
        PartitionMethod::CycleBreak(at) => g.is_side(c) || c == at,
    };
    let cuts: Vec<usize> = (0..walk.len()).filter(|&i| is_cut(&walk[i])).collect();
    let mut pieces: Vec<Vec<String>> = Vec::new();
    if cyclic {
        match (method, cuts.len()) {
            (PartitionMethod::SideAnchored, 0) => return Err(RouteError::UnanchorableCycle(walk[0].clone())),
            (PartitionMethod::CycleBreak(_), n) if n < 2 => return Err(RouteError::TooFewCutPoints(n)),
            _ => {}
        }
        let n = walk.len();
        for (j, &from) in cuts.iter().enumerate() {
            let to = if j + 1 < cuts.len() { cuts[j + 1] } else { cuts[0] + n };
            pieces.push((from..=to).map(|i| walk[i % n].clone()).collect());
        }
    } else {
        let mut bounds = vec![0];
        bounds.extend(cuts.iter().copied().filter(|&i| i > 0 && i + 1 < walk.len()));
        bounds.push(walk.len() - 1);
        for w in bounds.windows(2) {
            pieces.push(walk[w[0]..=w[1]].to_vec());
        }
    }
    let mut out = Vec::new();
    for mut steps in pieces {
        let starts_at_side = g.is_side(&steps[0]);
        let ends_at_side = g.is_side(steps.last().unwrap());
        if let PartitionMethod::CycleBreak(_) = method {
            if !ends_at_side {
                if let Some(tail) = nearest_side(g, steps.last().unwrap(), &steps) {
                    steps.extend(tail.into_iter().skip(1));
                }
            }
            if !starts_at_side {
                if let Some(mut head) = nearest_side(g, &steps[0], &steps) {
                    head.reverse();
                    head.pop();
                    head.extend(steps);
                    steps = head;
                }
            }
        }
        out.push(SubRoute { parent: plan.robot.clone(), steps, starts_at_side, ends_at_side });
    }
    Ok(out)
}

/// Shortest path from `from` to a side chamber avoiding `avoid` (other than
/// `from` itself). Neighbors are expanded in name order, so ties go to the
/// path found first.
fn nearest_side(g: &EnvGraph, from: &str, avoid: &[String]) -> Option<Vec<String>> {
    let mut parent: BTreeMap<String, String> = BTreeMap::new();
    let mut queue = VecDeque::from([from.to_string()]);
    let mut seen: Vec<String> = vec![from.to_string()];
    while let Some(c) = queue.pop_front() {
        if c != from && g.is_side(&c) {
            let mut path = vec![c.clone()];
            while let Some(p) = parent.get(path.last().unwrap()) {
                path.push(p.clone());
            }
            path.reverse();
            return Some(path);
        }
        for n in g.neighbors(&c) {
            if !seen.iter().any(|s| s == n) && !avoid.iter().any(|a| a == n) {
                seen.push(n.to_string());
                parent.insert(n.to_string(), c.clone());
                queue.push_back(n.to_string());
            }
        }
    }
    None
}

/// Plans for stage `k`: every robot placed on its `k`-th sub-route, wrapping
/// around for robots with fewer pieces.
pub fn stage_plans(partitions: &[Vec<SubRoute>], k: usize) -> Vec<RoutePlan> {
    partitions.iter().filter(|p| !p.is_empty()).map(|p| p[k % p.len()].to_plan()).collect()
}

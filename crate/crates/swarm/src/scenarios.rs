//! Named robot scenarios on the quadrant topology.

use std::collections::BTreeSet;

use crate::generate::{compose_subroutes, generate_identical_fleet, generate_many_behaviors, ComposeMode};
use crate::partition::{partition_route, stage_plans, PartitionMethod};
use crate::plan::RoutePlan;
use crate::topology::{quadrant_topology, EnvGraph};

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub graph: EnvGraph,
    pub plans: Vec<RoutePlan>,
}

fn linear(robot: &str, chambers: &[&str]) -> RoutePlan {
    RoutePlan::linear(robot, chambers).expect("scenario routes are simple")
}

fn cycle(robot: &str, chambers: &[&str]) -> RoutePlan {
    RoutePlan::cycle(robot, chambers).expect("scenario routes are simple")
}

/// The side-to-side behavior that turns right once.
pub fn right_turn() -> RoutePlan {
    linear("ROBOT", &["AE", "QNE", "AN"])
}

const PATROL: [&str; 7] = ["AW", "QSW", "QSE", "AE", "QNE", "AN", "QNW"];

/// The patrol cycle started at `at`.
pub fn patrol_from(robot: &str, at: &str) -> RoutePlan {
    let k = PATROL.iter().position(|c| *c == at).expect("patrol chamber");
    let walk: Vec<&str> = PATROL[k..].iter().chain(&PATROL[..k]).copied().collect();
    cycle(robot, &walk)
}

/// Four robots whose next moves form a cycle through the central chambers.
pub fn crossing_four() -> Scenario {
    Scenario {
        name: "crossing_four",
        graph: quadrant_topology(),
        plans: vec![
            linear("R1", &["AW", "QNW", "QNE", "AE"]),
            linear("R2", &["AN", "QNE", "QSE", "AS"]),
            linear("R3", &["AE", "QSE", "QSW", "AW"]),
            linear("R4", &["AS", "QSW", "QNW", "AN"]),
        ],
    }
}

/// Two robots swapping through the northern chambers and two shuttles in the
/// south that never stop.
pub fn swap_with_shuttles() -> Scenario {
    Scenario {
        name: "swap_with_shuttles",
        graph: quadrant_topology(),
        plans: vec![
            linear("A", &["AW", "QNW", "QNE", "AE"]),
            linear("B", &["AE", "QNE", "QNW", "AW"]),
            cycle("C", &["AS", "QSW"]),
            cycle("D", &["AS", "QSE"]),
        ],
    }
}

/// Four patrol robots and a fifth robot crossing from the south.
pub fn patrol_with_intruder() -> Scenario {
    Scenario {
        name: "patrol_with_intruder",
        graph: quadrant_topology(),
        plans: vec![
            patrol_from("P1", "AW"),
            patrol_from("P2", "AE"),
            patrol_from("P3", "AN"),
            patrol_from("P4", "AW"),
            linear("R5", &["AS", "QSE", "AE"]),
        ],
    }
}

/// The right-turn behavior chained four times into a loop around the
/// central ring.
pub fn outer_loop(robot: &str, start: &str) -> RoutePlan {
    let g = quadrant_topology();
    let parts = vec![right_turn(); 4];
    compose_subroutes(&g, &parts, &ComposeMode::Similar(start.to_string()))
        .expect("right turns chain")
        .with_robot(robot)
}

/// Four robots looping forever, one starting at each side chamber.
pub fn outer_patrol() -> Scenario {
    Scenario {
        name: "outer_patrol",
        graph: quadrant_topology(),
        plans: ["AW", "AN", "AE", "AS"]
            .iter()
            .enumerate()
            .map(|(i, s)| outer_loop(&format!("P{}", i + 1), s))
            .collect(),
    }
}

const STAGE_NAMES: [&str; 4] =
    ["outer_patrol_stage1", "outer_patrol_stage2", "outer_patrol_stage3", "outer_patrol_stage4"];

/// Stage `k` of the outer patrol cut at side chambers.
pub fn outer_patrol_stage(k: usize) -> Scenario {
    let g = quadrant_topology();
    let parts: Vec<_> = outer_patrol()
        .plans
        .iter()
        .map(|p| partition_route(&g, p, &PartitionMethod::SideAnchored).expect("loop visits side chambers"))
        .collect();
    Scenario { name: STAGE_NAMES[k % 4], graph: g, plans: stage_plans(&parts, k) }
}

/// Two copies of the right-turn behavior.
pub fn right_turn_pair() -> Scenario {
    Scenario { name: "right_turn_pair", graph: quadrant_topology(), plans: generate_identical_fleet(&right_turn(), 2) }
}

/// A single robot taking the right turn once.
pub fn single_robot() -> Scenario {
    Scenario { name: "single_robot", graph: quadrant_topology(), plans: vec![right_turn().with_robot("ROBOT1")] }
}

/// A robot crossing from `start` to `target` over any central chambers,
/// never entering another side chamber.
pub fn free_crossing(robot: &str, start: &str, target: &str) -> RoutePlan {
    let g = quadrant_topology();
    let forbidden: BTreeSet<(String, String)> = g
        .doors()
        .flat_map(|(a, b)| [(a.to_string(), b.to_string()), (b.to_string(), a.to_string())])
        .filter(|(_, to)| g.is_side(to) && to != target)
        .collect();
    let targets = BTreeSet::from([target.to_string()]);
    generate_many_behaviors(&g, start, &targets, &forbidden).expect("crossing exists").with_robot(robot)
}

/// Routes of the two restricted robots, found by searching single paths
/// until neither deadlock check fails.
pub const RESTRICTED_WEST: [&str; 5] = ["AW", "QNW", "AN", "QNE", "AE"];
pub const RESTRICTED_NORTH: [&str; 5] = ["AN", "QNE", "AE", "QSE", "AS"];

/// Two robots on fixed routes and two choosing among all crossings.
pub fn restricted_crossing() -> Scenario {
    Scenario {
        name: "restricted_crossing",
        graph: quadrant_topology(),
        plans: vec![
            linear("RW", &RESTRICTED_WEST),
            linear("RN", &RESTRICTED_NORTH),
            free_crossing("RE", "AE", "AW"),
            free_crossing("RS", "AS", "AN"),
        ],
    }
}

pub fn all() -> Vec<Scenario> {
    let mut out = vec![
        crossing_four(),
        swap_with_shuttles(),
        patrol_with_intruder(),
        outer_patrol(),
        right_turn_pair(),
        single_robot(),
        restricted_crossing(),
    ];
    out.extend((0..4).map(outer_patrol_stage));
    out
}

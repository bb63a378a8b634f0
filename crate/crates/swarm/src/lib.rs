//! Chamber topologies, robot route plans and their compilation into IMDS
//! specifications.

pub mod compile;
pub mod generate;
pub mod partition;
pub mod plan;
pub mod scenarios;
pub mod topology;

pub use compile::{compile, compile_to_imds, CompileError, Compiled, MessageRole, SafetyViolation};
pub use generate::{
    compose_subroutes, generate_all_behaviors, generate_identical_fleet, generate_many_behaviors,
    generate_similar_behavior, rotate_chamber, ComposeMode, DEFAULT_ROBOT,
};
pub use partition::{partition_route, stage_plans, PartitionMethod, SubRoute};
pub use plan::{parse_plan, parse_plans, RouteError, RoutePlan};
pub use topology::{load_env_graph, quadrant_topology, Capacity, Chamber, ChamberKind, EnvGraph, TopologyError};

//! Explicit-state verification of IMDS systems.
//!
//! A system is described in a small specification language ([`lang`]),
//! expanded to ground servers, agents and actions ([`system`]), explored into
//! its full reachability graph ([`lts`]) and checked for total deadlock,
//! partial deadlock and inevitable termination ([`verify`]).

pub mod config;
pub mod lang;
pub mod lts;
pub mod system;
pub mod verify;

pub use config::{apply_action, enabled_actions, initial_configuration, Configuration};
pub use lts::{build_lts, explore, Edge, Lts, LtsError, NodeId, DEFAULT_NODE_LIMIT};
pub use system::{ActionId, AgentId, GroundAction, Message, ServerId, ServerState, ServiceId, StateId, SystemSpec};

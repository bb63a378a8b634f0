//! Verification over a complete [`Lts`]: total and partial deadlock,
//! inevitability of termination, and counterexample extraction.
//!
//! Every `Verdict::holds` states whether the system *satisfies* the property:
//! `holds == false` for a deadlock property means a deadlock was found.

mod agents;
mod classify;
pub mod ctl;
mod deadlock;
mod partial;
pub mod report;
pub mod scc;
mod termination;
mod trace;

use std::fmt;

use thiserror::Error;

pub use agents::AgentSet;
pub use classify::classify_deadlock;
pub use deadlock::{check_deadlock_free_ctl, check_total_deadlock};
pub use partial::{brute_force_live_agents, check_partial_deadlock, progress_labels, ProgressLabels};
pub use termination::{check_termination, TerminationPredicate};
pub use trace::{extract_lasso, extract_trace, validate_witness};

use crate::lts::NodeId;
use crate::system::ActionId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Property {
    /// No reachable sink with a non-terminated agent.
    TotalDeadlockFreedom,
    /// No reachable node where some non-terminated agent can never act again.
    PartialDeadlockFreedom,
    /// `AF (phi_1 & ... & phi_k)` for the agents of a [`TerminationPredicate`].
    TerminationInevitable,
    /// `AG EX true`.
    DeadlockFreeCtl,
}

impl Property {
    pub fn key(self) -> &'static str {
        match self {
            Property::TotalDeadlockFreedom => "total-deadlock-freedom",
            Property::PartialDeadlockFreedom => "partial-deadlock-freedom",
            Property::TerminationInevitable => "termination-inevitable",
            Property::DeadlockFreeCtl => "deadlock-free-ctl",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceKind {
    FinitePath,
    Lasso,
}

impl TraceKind {
    pub fn key(self) -> &'static str {
        match self {
            TraceKind::FinitePath => "finite-path",
            TraceKind::Lasso => "lasso",
        }
    }
}

/// Who a blocked agent is waiting for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// The target server will never act again and cannot accept the message.
    Communication,
    /// The target server could accept the message, but not in the states it will visit.
    Resource,
    Mixed,
}

impl Classification {
    pub fn key(self) -> &'static str {
        match self {
            Classification::Communication => "communication",
            Classification::Resource => "resource",
            Classification::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub from: NodeId,
    pub action: ActionId,
    pub to: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub kind: TraceKind,
    /// Path from the initial node.
    pub prefix: Vec<Step>,
    /// Non-empty for lassos; starts and ends at [`Counterexample::terminal`].
    pub cycle: Vec<Step>,
    /// Last node of the prefix (the cycle entry for lassos).
    pub terminal: NodeId,
    pub blocked_agents: Option<AgentSet>,
    pub classification: Option<Classification>,
    /// Set for partial-deadlock witnesses in which every non-terminated agent is blocked.
    pub degenerate: bool,
}

impl Counterexample {
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.prefix.iter().chain(self.cycle.iter())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary {
    pub nodes_checked: usize,
    pub sinks: usize,
    pub deadlock_sinks: usize,
    pub termination_sinks: usize,
    pub blocked_sets: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub property: Property,
    pub holds: bool,
    pub witnesses: Vec<Counterexample>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("the state space was truncated; verdicts require the complete graph")]
    TruncatedLts,
    #[error("node {0} is not reachable from the initial node")]
    UnreachableTarget(u32),
    #[error("no cycle through node {0}")]
    NoCycle(u32),
    #[error("counterexample is not a deadlock witness")]
    NotADeadlockWitness,
    #[error("termination predicate is empty")]
    EmptyPredicate,
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("invalid trace at step {step}: {reason}")]
    InvalidTrace { step: usize, reason: String },
}

fn require_complete(lts: &crate::lts::Lts) -> Result<(), VerifyError> {
    if lts.is_complete() {
        Ok(())
    } else {
        Err(VerifyError::TruncatedLts)
    }
}

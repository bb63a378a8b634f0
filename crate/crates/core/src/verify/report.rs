//! Verification reports, as line-oriented text and as JSON.
//!
//! A step is recorded as `(agent, server, service, from_state, to_state)`
//! plus the message it sends (`agent.server.service`, absent when the agent
//! terminates). Witnesses can be read back with [`WitnessReport::resolve`].

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Counterexample, Step, TraceKind, Verdict, VerifyError};
use crate::config::{apply_action, initial_configuration, is_enabled};
use crate::lts::{Lts, NodeId};
use crate::system::{ActionId, SystemSpec};

pub const SCHEMA: &str = "imds-report/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub system: SystemInfo,
    pub lts: LtsInfo,
    pub verdicts: Vec<VerdictReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemInfo {
    pub servers: usize,
    pub agents: usize,
    pub actions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtsInfo {
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub property: String,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<String>>,
    pub nodes_checked: usize,
    pub sinks: usize,
    pub deadlock_sinks: usize,
    pub termination_sinks: usize,
    pub blocked_sets: usize,
    pub witnesses: Vec<WitnessReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub kind: String,
    pub terminal: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocked: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
    #[serde(default)]
    pub degenerate: bool,
    pub prefix: Vec<StepReport>,
    #[serde(default)]
    pub cycle: Vec<StepReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub agent: String,
    pub server: String,
    pub service: String,
    pub from_state: String,
    pub to_state: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sends: Option<String>,
}

impl StepReport {
    pub fn new(sys: &SystemSpec, action: ActionId) -> Self {
        let a = sys.action(action);
        StepReport {
            agent: sys.agent_name(a.agent()).to_string(),
            server: sys.server_name(a.server()).to_string(),
            service: sys.service_name(a.in_msg.service).to_string(),
            from_state: sys.state_name(a.in_state.state).to_string(),
            to_state: sys.state_name(a.out_state.state).to_string(),
            sends: a.out_msg.map(|m| sys.display_message(&m)),
        }
    }

    fn matches(&self, sys: &SystemSpec, action: ActionId) -> bool {
        &StepReport::new(sys, action) == self
    }
}

impl WitnessReport {
    pub fn new(sys: &SystemSpec, cx: &Counterexample) -> Self {
        let steps = |v: &[Step]| v.iter().map(|s| StepReport::new(sys, s.action)).collect();
        WitnessReport {
            kind: cx.kind.key().to_string(),
            terminal: cx.terminal.0,
            blocked: cx.blocked_agents.map(|b| b.names(sys)),
            classification: cx.classification.map(|c| c.key().to_string()),
            degenerate: cx.degenerate,
            prefix: steps(&cx.prefix),
            cycle: steps(&cx.cycle),
        }
    }

    /// Rebuilds the counterexample against `sys` by replaying the recorded
    /// steps from the initial configuration. Node ids are looked up in `lts`.
    pub fn resolve(&self, lts: &Lts) -> Result<Counterexample, VerifyError> {
        let sys = lts.system();
        let kind = match self.kind.as_str() {
            "finite-path" => TraceKind::FinitePath,
            "lasso" => TraceKind::Lasso,
            other => return Err(invalid(0, format!("unknown witness kind `{other}`"))),
        };
        let mut config = initial_configuration(sys);
        let mut node = lts.initial();
        let mut resolve_steps = |steps: &[StepReport], offset: usize| -> Result<Vec<Step>, VerifyError> {
            let mut out = Vec::with_capacity(steps.len());
            for (i, rec) in steps.iter().enumerate() {
                let action = (0..sys.actions().len() as u32)
                    .map(ActionId)
                    .find(|&id| rec.matches(sys, id) && is_enabled(&config, sys.action(id)))
                    .ok_or_else(|| {
                        invalid(
                            offset + i,
                            format!("no enabled action matches {}.{}.{}", rec.agent, rec.server, rec.service),
                        )
                    })?;
                config = apply_action(&config, sys.action(action));
                let to =
                    lts.node_of(&config).ok_or_else(|| invalid(offset + i, "configuration not in the graph".into()))?;
                out.push(Step { from: node, action, to });
                node = to;
            }
            Ok(out)
        };
        let prefix = resolve_steps(&self.prefix, 0)?;
        let cycle = resolve_steps(&self.cycle, prefix.len())?;
        let terminal = prefix.last().map_or(lts.initial(), |s| s.to);
        let blocked_agents = match &self.blocked {
            None => None,
            Some(names) => {
                let mut set = super::AgentSet::EMPTY;
                for n in names {
                    set.insert(sys.agent_by_name(n).ok_or_else(|| VerifyError::UnknownAgent(n.clone()))?);
                }
                Some(set)
            }
        };
        let classification = self.classification.as_deref().map(|c| match c {
            "communication" => super::Classification::Communication,
            "resource" => super::Classification::Resource,
            _ => super::Classification::Mixed,
        });
        Ok(Counterexample {
            kind,
            prefix,
            cycle,
            terminal,
            blocked_agents,
            classification,
            degenerate: self.degenerate,
        })
    }
}

fn invalid(step: usize, reason: String) -> VerifyError {
    VerifyError::InvalidTrace { step, reason }
}

impl VerdictReport {
    pub fn new(sys: &SystemSpec, v: &Verdict, subset: Option<Vec<String>>) -> Self {
        VerdictReport {
            property: v.property.key().to_string(),
            holds: v.holds,
            subset,
            nodes_checked: v.summary.nodes_checked,
            sinks: v.summary.sinks,
            deadlock_sinks: v.summary.deadlock_sinks,
            termination_sinks: v.summary.termination_sinks,
            blocked_sets: v.summary.blocked_sets,
            witnesses: v.witnesses.iter().map(|w| WitnessReport::new(sys, w)).collect(),
        }
    }
}

impl Report {
    pub fn new(lts: &Lts) -> Self {
        let sys = lts.system();
        Report {
            schema: SCHEMA.to_string(),
            system: SystemInfo {
                servers: sys.servers().len(),
                agents: sys.agents().len(),
                actions: sys.actions().len(),
            },
            lts: LtsInfo { nodes: lts.node_count(), edges: lts.edge_count() },
            verdicts: Vec::new(),
        }
    }

    pub fn push(&mut self, sys: &SystemSpec, v: &Verdict, subset: Option<Vec<String>>) {
        self.verdicts.push(VerdictReport::new(sys, v, subset));
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(w, "schema {}", self.schema).unwrap();
        let s = &self.system;
        writeln!(w, "system servers={} agents={} actions={}", s.servers, s.agents, s.actions).unwrap();
        writeln!(w, "lts nodes={} edges={}", self.lts.nodes, self.lts.edges).unwrap();
        for v in &self.verdicts {
            write!(w, "verdict {} holds={}", v.property, v.holds).unwrap();
            if let Some(subset) = &v.subset {
                write!(w, " subset={}", subset.join(",")).unwrap();
            }
            writeln!(
                w,
                " witnesses={} nodes_checked={} sinks={} deadlock_sinks={} termination_sinks={} blocked_sets={}",
                v.witnesses.len(),
                v.nodes_checked,
                v.sinks,
                v.deadlock_sinks,
                v.termination_sinks,
                v.blocked_sets
            )
            .unwrap();
            for (i, x) in v.witnesses.iter().enumerate() {
                write!(
                    w,
                    "  witness {} kind={} terminal={} length={}",
                    i + 1,
                    x.kind,
                    x.terminal,
                    x.prefix.len() + x.cycle.len()
                )
                .unwrap();
                if let Some(b) = &x.blocked {
                    write!(w, " blocked={}", b.join(",")).unwrap();
                }
                if let Some(c) = &x.classification {
                    write!(w, " classification={c}").unwrap();
                }
                if x.degenerate {
                    write!(w, " degenerate=true").unwrap();
                }
                writeln!(w).unwrap();
                for (j, st) in x.prefix.iter().enumerate() {
                    write_step(w, "step", j + 1, st);
                }
                for (j, st) in x.cycle.iter().enumerate() {
                    write_step(w, "cycle", j + 1, st);
                }
            }
        }
        out
    }
}

fn write_step(w: &mut String, tag: &str, n: usize, st: &StepReport) {
    write!(w, "    {tag} {n} {} {}.{} {}->{}", st.agent, st.server, st.service, st.from_state, st.to_state).unwrap();
    match &st.sends {
        Some(m) => writeln!(w, " sends {m}").unwrap(),
        None => writeln!(w, " terminates").unwrap(),
    }
}

/// Node ids along a counterexample, starting at the initial node.
pub fn nodes_of(cx: &Counterexample, initial: NodeId) -> Vec<NodeId> {
    std::iter::once(initial).chain(cx.steps().map(|s| s.to)).collect()
}

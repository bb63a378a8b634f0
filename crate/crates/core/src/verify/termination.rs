use super::scc::sccs;
use super::trace::{extract_lasso, BfsTree};
use super::{require_complete, AgentSet, Counterexample, Property, Summary, TraceKind, Verdict, VerifyError};
use crate::lts::Lts;
use crate::system::SystemSpec;

/// The agents that must all terminate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TerminationPredicate {
    subset: AgentSet,
}

impl TerminationPredicate {
    pub fn new(subset: AgentSet) -> Result<Self, VerifyError> {
        if subset.is_empty() {
            return Err(VerifyError::EmptyPredicate);
        }
        Ok(Self { subset })
    }

    pub fn from_names<S: AsRef<str>>(sys: &SystemSpec, names: &[S]) -> Result<Self, VerifyError> {
        let mut subset = AgentSet::EMPTY;
        for name in names {
            let name = name.as_ref().trim();
            let a = sys.agent_by_name(name).ok_or_else(|| VerifyError::UnknownAgent(name.to_string()))?;
            subset.insert(a);
        }
        Self::new(subset)
    }

    pub fn all(sys: &SystemSpec) -> Self {
        Self { subset: AgentSet::all(sys.agents().len()) }
    }

    pub fn subset(&self) -> AgentSet {
        self.subset
    }
}

/// Decides whether every maximal path from the initial node reaches a node
/// where all agents of `pred` have terminated.
///
/// Works in the region of nodes violating the goal that is reachable from
/// the initial node. A sink there yields a finite-path counterexample; failing
/// that, a cycle yields a lasso entered at its nearest node.
pub fn check_termination(lts: &Lts, pred: &TerminationPredicate) -> Result<Verdict, VerifyError> {
    require_complete(lts)?;
    let agents = lts.system().agents().len();
    if pred.subset.iter().any(|a| a.index() >= agents) {
        return Err(VerifyError::UnknownAgent(pred.subset.to_string()));
    }
    let goal = |n| pred.subset.is_subset(AgentSet::terminated(lts.config(n)));
    let region = BfsTree::new(lts, lts.initial(), |n| !goal(n));
    let mut summary = Summary { nodes_checked: region.order.len(), sinks: lts.sinks().count(), ..Summary::default() };
    let verdict = |witness: Option<Counterexample>, summary| Verdict {
        property: Property::TerminationInevitable,
        holds: witness.is_none(),
        witnesses: witness.into_iter().collect(),
        summary,
    };

    if let Some(&sink) = region.order.iter().find(|&&n| lts.is_sink(n)) {
        summary.deadlock_sinks = region.order.iter().filter(|&&n| lts.is_sink(n)).count();
        let cx = Counterexample {
            kind: TraceKind::FinitePath,
            prefix: region.path_to(lts, sink).expect("reached"),
            cycle: Vec::new(),
            terminal: sink,
            blocked_agents: None,
            classification: None,
            degenerate: false,
        };
        return Ok(verdict(Some(cx), summary));
    }

    let in_region = |n: crate::lts::NodeId| region.reached(n);
    let comps = sccs(lts, in_region);
    let cyclic = |n| {
        let c = comps.component(n).expect("region node");
        comps.is_nontrivial(lts, c)
    };
    let Some(&entry) = region.order.iter().find(|&&n| cyclic(n)) else {
        return Ok(verdict(None, summary));
    };
    let comp = comps.component(entry);
    let cx = extract_lasso(lts, entry, |n| comps.component(n) == comp)?;
    Ok(verdict(Some(cx), summary))
}

use super::partial::brute_force_live_agents;
use super::trace::BfsTree;
use super::{AgentSet, Classification, Counterexample, VerifyError};
use crate::lts::{Lts, NodeId};

/// Tags each blocked agent by the server its pending message waits at.
///
/// The tag is `resource` if that server still changes state somewhere in the
/// region reachable from the terminal node, or if some action of the server
/// accepts the message in some state. Otherwise the server is waiting for
/// messages that never come, and the tag is `communication`.
pub fn classify_deadlock(lts: &Lts, witness: &Counterexample) -> Result<Classification, VerifyError> {
    let blocked = witness.blocked_agents.ok_or(VerifyError::NotADeadlockWitness)?;
    if witness.terminal.index() >= lts.node_count() || blocked.is_empty() {
        return Err(VerifyError::NotADeadlockWitness);
    }
    let config = lts.config(witness.terminal);
    let live = brute_force_live_agents(lts, witness.terminal);
    if blocked.iter().any(|a| config.is_terminated(a) || live.contains(a)) {
        return Err(VerifyError::NotADeadlockWitness);
    }
    Ok(classify_blocked(lts, witness.terminal, blocked))
}

pub(crate) fn classify_blocked(lts: &Lts, terminal: NodeId, blocked: AgentSet) -> Classification {
    let sys = lts.system();
    let region = BfsTree::new(lts, terminal, |_| true).order;
    let config = lts.config(terminal);
    let (mut communication, mut resource) = (false, false);
    for a in blocked.iter() {
        let Some(m) = config.pending(a) else { continue };
        let server_moves = {
            let first = config.state(m.server);
            region.iter().any(|&n| lts.config(n).state(m.server) != first)
        };
        let accepts = !sys.actions_consuming(m).is_empty();
        if server_moves || accepts {
            resource = true;
        } else {
            communication = true;
        }
    }
    match (communication, resource) {
        (true, true) => Classification::Mixed,
        (true, false) => Classification::Communication,
        _ => Classification::Resource,
    }
}

//! Well-formedness checks on a ground system.

use std::collections::BTreeSet;

use super::diag::{Diagnostic, Diagnostics};
use crate::system::{AgentId, ServerId, ServiceId, StateId, SystemSpec};

pub fn validate_spec(sys: &SystemSpec) -> Diagnostics {
    let mut diags = Diagnostics::new();

    for (i, a) in sys.actions().iter().enumerate() {
        let pos = sys.action_pos(crate::system::ActionId(i as u32));
        let mut check_service = |server: ServerId, service: ServiceId| {
            if !sys.server(server).services.contains(&service) {
                diags.push(Diagnostic::error(
                    pos,
                    format!(
                        "action references undeclared service `{}` of `{}`",
                        sys.service_name(service),
                        sys.server_name(server)
                    ),
                ));
            }
        };
        check_service(a.in_msg.server, a.in_msg.service);
        if let Some(m) = a.out_msg {
            check_service(m.server, m.service);
        }
        for st in [a.in_state, a.out_state] {
            if !sys.server(st.server).states.contains(&st.state) {
                diags.push(Diagnostic::error(
                    pos,
                    format!(
                        "action references undeclared state `{}` of `{}`",
                        sys.state_name(st.state),
                        sys.server_name(st.server)
                    ),
                ));
            }
        }
    }

    for s in sys.servers() {
        match s.initial.len() {
            0 => diags.push(Diagnostic::error(s.pos, format!("server `{}` has no initial state", s.name))),
            1 => {}
            n => {
                diags.push(Diagnostic::error(s.pos, format!("server `{}` has {n} initial states, expected 1", s.name)))
            }
        }
        for &st in &s.initial {
            if !s.states.contains(&st) {
                diags.push(Diagnostic::error(
                    s.pos,
                    format!("initial state `{}` is not a state of `{}`", sys.state_name(st), s.name),
                ));
            }
        }
    }

    for (aid, agent) in sys.agents().iter().enumerate() {
        let count = sys.initial_messages().iter().filter(|(m, _)| m.agent.index() == aid).count();
        if count != 1 {
            diags.push(Diagnostic::error(
                agent.pos,
                format!("agent `{}` has {count} initial messages, expected 1", agent.name),
            ));
        }
    }
    for (m, pos) in sys.initial_messages() {
        if !sys.server(m.server).services.contains(&m.service) {
            diags.push(Diagnostic::error(
                *pos,
                format!(
                    "initial message uses undeclared service `{}` of `{}`",
                    sys.service_name(m.service),
                    sys.server_name(m.server)
                ),
            ));
        }
    }

    // Syntactic reachability warnings.
    let mut sent: BTreeSet<(ServerId, ServiceId)> =
        sys.initial_messages().iter().map(|(m, _)| (m.server, m.service)).collect();
    let mut consumed: BTreeSet<(ServerId, ServiceId)> = BTreeSet::new();
    let mut produced_states: BTreeSet<(ServerId, StateId)> = BTreeSet::new();
    let mut terminating_agents: BTreeSet<AgentId> = BTreeSet::new();
    for a in sys.actions() {
        consumed.insert((a.in_msg.server, a.in_msg.service));
        if let Some(m) = a.out_msg {
            sent.insert((m.server, m.service));
        } else {
            terminating_agents.insert(a.agent());
        }
        produced_states.insert((a.out_state.server, a.out_state.state));
    }
    for sid in sys.server_ids() {
        let s = sys.server(sid);
        for &svc in &s.services {
            let name = sys.service_name(svc);
            if !sent.contains(&(sid, svc)) {
                diags.push(Diagnostic::warning(s.pos, format!("service `{name}` of `{}` is never sent", s.name)));
            } else if !consumed.contains(&(sid, svc)) {
                diags.push(Diagnostic::warning(
                    s.pos,
                    format!("service `{name}` of `{}` is never consumed by any `{}` action", s.name, s.name),
                ));
            }
        }
        for &st in &s.states {
            if !s.initial.contains(&st) && !produced_states.contains(&(sid, st)) {
                diags.push(Diagnostic::warning(
                    s.pos,
                    format!("state `{}` of `{}` is never reached", sys.state_name(st), s.name),
                ));
            }
        }
    }
    for aid in sys.agent_ids() {
        if !terminating_agents.contains(&aid) {
            let agent = &sys.agents()[aid.index()];
            diags.push(Diagnostic::warning(
                agent.pos,
                format!("agent `{}` can never terminate: no terminating action consumes its messages", agent.name),
            ));
        }
    }
    diags
}

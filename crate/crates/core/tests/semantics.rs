mod common;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use common::{arb_system, listing, load, oracle_distances, oracle_explore};
use imds::{apply_action, build_lts, enabled_actions, initial_configuration, Configuration, LtsError, SystemSpec};
use proptest::prelude::*;

// Frozen from the depth-first oracle in `lts_matches_oracle_on_listing`.
const LISTING_NODES: usize = 24;
const LISTING_EDGES: usize = 34;
const LISTING_SINKS: usize = 2;

fn names(sys: &SystemSpec, ids: &[imds::ActionId]) -> Vec<String> {
    ids.iter().map(|&a| sys.display_action(sys.action(a))).collect()
}

#[test]
fn listing_initial_configuration() {
    let sys = listing();
    let c = initial_configuration(&sys);
    assert_eq!(
        c.display(&sys).to_string(),
        "SideCh[1]=occ SideCh[2]=occ CentralCh=free; pending ROBOT[1]:SideCh[1].start ROBOT[2]:SideCh[2].start; terminated -"
    );
}

#[test]
fn listing_initially_enables_both_starts() {
    let sys = listing();
    let c = initial_configuration(&sys);
    assert_eq!(
        names(&sys, &enabled_actions(&sys, &c)),
        [
            "{ROBOT[1].SideCh[1].start, SideCh[1].occ} -> {ROBOT[1].CentralCh.tryC[1], SideCh[1].occ}",
            "{ROBOT[2].SideCh[2].start, SideCh[2].occ} -> {ROBOT[2].CentralCh.tryC[2], SideCh[2].occ}",
        ]
    );
}

#[test]
fn start_action_sends_try_to_central() {
    let sys = listing();
    let c = initial_configuration(&sys);
    let first = enabled_actions(&sys, &c)[0];
    let next = apply_action(&c, sys.action(first));
    let r1 = sys.agent_by_name("ROBOT[1]").unwrap();
    assert_eq!(sys.display_message(next.pending(r1).unwrap()), "ROBOT[1].CentralCh.tryC[1]");
    let side1 = sys.server_by_name("SideCh[1]").unwrap();
    assert_eq!(sys.state_name(next.state(side1)), "occ");
}

#[test]
fn terminating_action_removes_pending_message() {
    let sys = listing();
    let side1 = sys.server_by_name("SideCh[1]").unwrap();
    let r2 = sys.agent_by_name("ROBOT[2]").unwrap();
    let (id, action) = sys
        .actions()
        .iter()
        .enumerate()
        .find(|(_, a)| a.terminating() && a.server() == side1 && a.agent() == r2)
        .unwrap();
    let mut states = initial_configuration(&sys).states().to_vec();
    states[side1.index()] = action.in_state.state;
    let mut pending = initial_configuration(&sys).pending_all().to_vec();
    pending[r2.index()] = Some(action.in_msg);
    let c = Configuration::new(states, pending);
    assert!(enabled_actions(&sys, &c).contains(&imds::ActionId(id as u32)));
    let next = apply_action(&c, action);
    assert_eq!(sys.state_name(next.state(side1)), "end");
    assert!(next.is_terminated(r2));
    assert_eq!(next.terminated().count() + next.pending_messages().count(), 2);
}

#[test]
fn listing_deadlock_configuration_enables_nothing() {
    let sys = listing();
    let lts = build_lts(&sys, 1000).unwrap();
    let central = sys.server_by_name("CentralCh").unwrap();
    let mut found = 0;
    for n in lts.sinks() {
        let c = lts.config(n);
        assert!(enabled_actions(&sys, c).is_empty());
        assert_eq!(sys.state_name(c.state(central)), "occ");
        let pending: BTreeSet<String> = c.pending_messages().map(|m| sys.display_message(m)).collect();
        assert_eq!(pending.len(), 2);
        assert!(pending.iter().all(|m| m.contains(".CentralCh.")));
        if pending.contains("ROBOT[1].CentralCh.notC[2]") && pending.contains("ROBOT[2].CentralCh.tryC[2]") {
            found += 1;
        }
    }
    assert_eq!(found, 1);
}

#[test]
fn all_terminated_enables_nothing() {
    let sys = load(
        "server: S(agents A), services {go}, states {idle, done},
actions { {A.S.go, S.idle} -> {S.done}, }
servers S; agents A;
init -> { S(A).idle, A.S.go, }.",
    );
    let lts = build_lts(&sys, 10).unwrap();
    assert_eq!((lts.node_count(), lts.edge_count()), (2, 1));
    let end = lts.config(imds::NodeId(1));
    assert!(end.all_terminated());
    assert!(enabled_actions(&sys, end).is_empty());
}

#[test]
fn three_agents_start_pending() {
    let sys = load(
        "server: S(agents A[3]), services {go}, states {idle},
actions { <i=1..3> {A[i].S.go, S.idle} -> {S.idle}, }
servers S; agents A[3];
init -> { S(A[1..3]).idle, <i=1..3> A[i].S.go, }.",
    );
    let c = initial_configuration(&sys);
    assert_eq!((c.pending_messages().count(), c.terminated().count()), (3, 0));
}

#[test]
fn lts_matches_oracle_on_listing() {
    let sys = listing();
    let lts = build_lts(&sys, 10_000).unwrap();
    let (nodes, edges) = oracle_explore(&sys);
    assert_eq!(nodes.len(), LISTING_NODES);
    assert_eq!(edges.len(), LISTING_EDGES);
    assert_eq!(lts.node_count(), LISTING_NODES);
    assert_eq!(lts.edge_count(), LISTING_EDGES);
    assert_eq!(lts.sinks().count(), LISTING_SINKS);
    assert_lts_equals_oracle(&sys);
}

fn assert_lts_equals_oracle(sys: &SystemSpec) {
    let lts = build_lts(sys, 100_000).unwrap();
    let (nodes, edges) = oracle_explore(sys);
    let built: BTreeSet<Configuration> = lts.node_ids().map(|n| lts.config(n).clone()).collect();
    assert_eq!(built.len(), lts.node_count(), "duplicate configurations");
    assert_eq!(built, nodes);
    let built_edges: BTreeSet<_> =
        lts.edges().iter().map(|e| (lts.config(e.from).clone(), e.action, lts.config(e.to).clone())).collect();
    assert_eq!(built_edges.len(), lts.edge_count());
    assert_eq!(built_edges, edges);
    let dist = oracle_distances(sys);
    let mut last = 0;
    for n in lts.node_ids() {
        let d = dist[lts.config(n)];
        assert!(d >= last, "nodes are not in breadth-first order");
        last = d;
    }
}

#[test]
fn limit_one_is_exceeded() {
    let sys = listing();
    match build_lts(&sys, 1) {
        Err(LtsError::StateSpaceExceeded { limit, discovered, frontier }) => {
            assert_eq!(limit, 1);
            assert_eq!(discovered, 1);
            assert!(frontier <= 1);
        }
        other => panic!("expected StateSpaceExceeded, got {:?}", other.map(|l| l.stats())),
    }
    assert!(build_lts(&sys, LISTING_NODES).is_ok());
    assert!(build_lts(&sys, LISTING_NODES - 1).is_err());
}

#[test]
fn dump_is_stable() {
    let sys = listing();
    let a = build_lts(&sys, 1000).unwrap().dump();
    let b = build_lts(&sys, 1000).unwrap().dump();
    assert_eq!(a, b);
    assert!(a.starts_with("node 0: SideCh[1]=occ SideCh[2]=occ CentralCh=free; pending "));
    assert!(a.contains("\nedge 0 1 ROBOT[1].SideCh[1].start\n"));
    assert_eq!(a.lines().count(), LISTING_NODES + LISTING_EDGES);
}

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Checks the partition and frame properties on every edge and that the
/// terminated set only grows.
fn assert_step_properties(sys: &SystemSpec) {
    let lts = build_lts(sys, 100_000).unwrap();
    for e in lts.edges() {
        let (c, d) = (lts.config(e.from), lts.config(e.to));
        for x in [c, d] {
            assert_eq!(x.states().len(), sys.servers().len());
            assert_eq!(x.agent_count(), sys.agents().len());
            assert_eq!(x.pending_messages().count() + x.terminated().count(), sys.agents().len());
            for (i, m) in x.pending_all().iter().enumerate() {
                if let Some(m) = m {
                    assert_eq!(m.agent.index(), i);
                }
            }
            for s in sys.server_ids() {
                assert!(sys.server(s).states.contains(&x.state(s)));
            }
        }
        let a = sys.action(e.action);
        let changed_servers: Vec<usize> = (0..c.states().len()).filter(|&i| c.states()[i] != d.states()[i]).collect();
        assert!(changed_servers.iter().all(|&i| i == a.server().index()));
        if a.in_state.state != a.out_state.state {
            assert_eq!(changed_servers, [a.server().index()]);
        }
        for i in 0..c.agent_count() {
            if i != a.agent().index() {
                assert_eq!(c.pending_all()[i], d.pending_all()[i]);
            }
        }
        assert_eq!(d.pending_all()[a.agent().index()], a.out_msg);
        let before: BTreeSet<_> = c.terminated().collect();
        let after: BTreeSet<_> = d.terminated().collect();
        assert!(before.is_subset(&after));
    }
}

#[test]
fn listing_step_properties() {
    assert_step_properties(&listing());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generated_lts_matches_oracle(g in arb_system()) {
        let sys = load(&g.text());
        assert_lts_equals_oracle(&sys);
        assert_step_properties(&sys);
    }

    #[test]
    fn configuration_hash_ignores_construction_order(g in arb_system(), seed in any::<u64>()) {
        let sys = load(&g.text());
        let lts = build_lts(&sys, 100_000).unwrap();
        for n in lts.node_ids() {
            let c = lts.config(n);
            // Rebuild through maps filled in a scrambled order.
            let k = c.states().len();
            let mut states = HashMap::new();
            for i in 0..k {
                let j = (i + seed as usize) % k;
                states.insert(j, c.states()[j]);
            }
            let m = c.agent_count();
            let mut pending = HashMap::new();
            for i in (0..m).rev() {
                let j = (i * 7 + seed as usize) % m;
                pending.insert(j, c.pending_all()[j]);
            }
            for j in 0..m {
                pending.entry(j).or_insert(c.pending_all()[j]);
            }
            let rebuilt = Configuration::new(
                (0..k).map(|i| states[&i]).collect(),
                (0..m).map(|i| pending[&i]).collect(),
            );
            prop_assert_eq!(&rebuilt, c);
            prop_assert_eq!(hash_of(&rebuilt), hash_of(c));
            prop_assert_eq!(lts.node_of(&rebuilt), Some(n));
        }
    }
}

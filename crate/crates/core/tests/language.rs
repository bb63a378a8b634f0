mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{arb_system, corpus, listing, load};
use imds::lang::ast::{ActionTemplate, Expr, InitKind, MsgRef, Ref, StateRef};
use imds::lang::{expand_spec, load_system, parse_spec, print_spec, validate_spec, ExpandError};
use proptest::prelude::*;

#[test]
fn listing_parses_to_expected_shape() {
    let raw = parse_spec(&corpus("two_robots_central.imds")).unwrap();
    assert_eq!(raw.defines.len(), 1);
    assert_eq!((raw.defines[0].name.as_str(), raw.defines[0].value), ("N", 2));
    let defs: Vec<&str> = raw.server_defs.iter().map(|d| d.name.as_str()).collect();
    assert_eq!(defs, ["SideCh", "CentralCh"]);
    let servers: Vec<&str> = raw.global_servers.iter().map(|d| d.name.as_str()).collect();
    assert_eq!(servers, ["SideCh", "CentralCh"]);
    assert!(raw.global_servers[0].size.is_some());
    assert!(raw.global_servers[1].size.is_none());
    assert_eq!(raw.global_agents.len(), 1);
    assert_eq!(raw.global_agents[0].name, "ROBOT");
    assert_eq!(raw.global_agents[0].size, Some(Expr::Var("N".into())));

    let mut array_inits = 0;
    let mut single_inits = 0;
    let mut messages = 0;
    for item in &raw.init {
        match &item.kind {
            InitKind::Server(_) if !item.quantifiers.is_empty() => array_inits += 1,
            InitKind::Server(_) => single_inits += 1,
            InitKind::Message(_) => messages += 1,
        }
    }
    // `<j=1..2>SideCh[j](..)` instantiates both side chambers from one item.
    assert_eq!((array_inits, single_inits, messages), (1, 1, 1));
    let sys = listing();
    let msgs = sys.initial_messages().len();
    let side = sys.servers().iter().filter(|s| s.def == "SideCh").count();
    let central = sys.servers().iter().filter(|s| s.def == "CentralCh").count();
    assert_eq!((side, central, msgs), (2, 1, 2));
}

#[test]
fn listing_expands_to_three_servers_and_two_agents() {
    let sys = listing();
    let servers: Vec<&str> = sys.servers().iter().map(|s| s.name.as_str()).collect();
    assert_eq!(servers, ["SideCh[1]", "SideCh[2]", "CentralCh"]);
    let agents: Vec<&str> = sys.agents().iter().map(|a| a.name.as_str()).collect();
    assert_eq!(agents, ["ROBOT[1]", "ROBOT[2]"]);
    for side in ["SideCh[1]", "SideCh[2]"] {
        let id = sys.server_by_name(side).unwrap();
        assert_eq!(sys.actions().iter().filter(|a| a.server() == id).count(), 2 + 4 + 4 + 4 + 2);
    }
}

#[test]
fn listing_switch_index_arithmetic() {
    let sys = listing();
    let central = sys.server_by_name("CentralCh").unwrap();
    let mut produced = BTreeMap::new();
    for a in sys.actions().iter().filter(|a| a.server() == central) {
        let input = sys.service_name(a.in_msg.service);
        if let (Some(j), Some(out)) = (input.strip_prefix("takeC"), a.out_msg) {
            produced.insert(j.to_string(), sys.service_name(out.service).to_string());
        }
    }
    assert_eq!(produced["[1]"], "switch[2]");
    assert_eq!(produced["[2]"], "switch[1]");
}

#[test]
fn listing_validates_without_errors() {
    let sys = listing();
    let diags = validate_spec(&sys);
    assert!(!diags.has_errors(), "{}", diags.render("listing"));
    let warnings: Vec<&str> = diags.warnings().map(|d| d.message.as_str()).collect();
    for j in 1..=2 {
        let expected = format!("service `notC[{j}]` of `CentralCh` is never consumed by any `CentralCh` action");
        assert!(warnings.contains(&expected.as_str()), "{warnings:?}");
    }
}

/// Independent unroller: walks each template's quantifier ranges, evaluates
/// indices, and maps names through the listing's bindings by hand.
fn unroll_listing() -> BTreeSet<String> {
    let raw = parse_spec(&corpus("two_robots_central.imds")).unwrap();
    let n = raw.defines[0].value;
    fn eval(e: &Expr, env: &BTreeMap<String, i64>) -> i64 {
        match e {
            Expr::Int(v) => *v,
            Expr::Var(x) => env[x],
            Expr::Add(a, b) => eval(a, env) + eval(b, env),
            Expr::Sub(a, b) => eval(a, env) - eval(b, env),
        }
    }
    fn name(r: &Ref, env: &BTreeMap<String, i64>) -> String {
        match &r.index {
            Some(e) => format!("{}[{}]", r.name, eval(e, env)),
            None => r.name.clone(),
        }
    }
    let mut out = BTreeSet::new();
    for def in &raw.server_defs {
        let instances: Vec<String> = if def.name == "SideCh" {
            (1..=2).map(|j| format!("SideCh[{j}]")).collect()
        } else {
            vec![def.name.clone()]
        };
        for inst in &instances {
            let server = |r: &Ref, env: &BTreeMap<String, i64>| -> String {
                if r.name == def.name && r.index.is_none() {
                    inst.clone()
                } else {
                    name(r, env)
                }
            };
            let msg = |m: &MsgRef, env: &BTreeMap<String, i64>| {
                format!("{}.{}.{}", name(&m.agent, env), server(&m.server, env), name(&m.service, env))
            };
            let st = |s: &StateRef, env: &BTreeMap<String, i64>| {
                format!("{}.{}", server(&s.server, env), name(&s.state, env))
            };
            for t in &def.actions {
                let mut envs = vec![BTreeMap::from([("N".to_string(), n)])];
                for q in &t.quantifiers {
                    envs = envs
                        .into_iter()
                        .flat_map(|env| {
                            let (lo, hi) = (eval(&q.lo, &env), eval(&q.hi, &env));
                            (lo..=hi).map(move |v| {
                                let mut e = env.clone();
                                e.insert(q.var.clone(), v);
                                e
                            })
                        })
                        .collect();
                }
                for env in envs {
                    out.insert(render(t, &env, &msg, &st));
                }
            }
        }
    }
    out
}

fn render(
    t: &ActionTemplate,
    env: &BTreeMap<String, i64>,
    msg: &dyn Fn(&MsgRef, &BTreeMap<String, i64>) -> String,
    st: &dyn Fn(&StateRef, &BTreeMap<String, i64>) -> String,
) -> String {
    let lhs = format!("{{{}, {}}}", msg(&t.in_msg, env), st(&t.in_state, env));
    match &t.out_msg {
        Some(m) => format!("{lhs} -> {{{}, {}}}", msg(m, env), st(&t.out_state, env)),
        None => format!("{lhs} -> {{{}}}", st(&t.out_state, env)),
    }
}

#[test]
fn listing_ground_actions_match_manual_unrolling() {
    let sys = listing();
    let expanded: BTreeSet<String> = sys.actions().iter().map(|a| sys.display_action(a)).collect();
    assert_eq!(expanded.len(), sys.actions().len());
    assert_eq!(expanded, unroll_listing());
}

#[test]
fn every_input_message_targets_its_server() {
    let sys = listing();
    for a in sys.actions() {
        assert_eq!(a.in_msg.server, a.in_state.server);
        assert_eq!(a.in_state.server, a.out_state.server);
        if let Some(m) = a.out_msg {
            assert_eq!(m.agent, a.in_msg.agent);
        }
    }
}

#[test]
fn expansion_is_deterministic() {
    let raw = parse_spec(&corpus("two_robots_central.imds")).unwrap();
    let a = expand_spec(&raw).unwrap();
    let b = expand_spec(&raw.clone()).unwrap();
    assert_eq!(a.actions(), b.actions());
}

#[test]
fn empty_input_is_rejected() {
    let err = parse_spec("").unwrap_err();
    assert!(err.message.contains("expected #DEFINE or server or servers"), "{}", err.message);
}

#[test]
fn deleting_an_arrow_reports_its_line() {
    let text = corpus("two_robots_central.imds");
    let (idx, line) = text.lines().enumerate().find(|(_, l)| l.contains("} ->")).unwrap();
    let mutated: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i == idx { l.replacen("->", "", 1) } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    let err = parse_spec(&mutated).unwrap_err();
    assert!(err.pos.line as usize == idx + 1 || err.pos.line as usize == idx + 2, "{line}: {err:?}");
    assert!(err.expected.iter().any(|e| e.contains("->")), "{:?}", err.expected);
}

const TINY: &str = "server: S(agents A), services {go}, states {idle, done},
actions { {A.S.go, S.idle} -> {S.done}, }
servers S; agents A;
init -> { S(A).idle, A.S.go, }.";

#[test]
fn spec_without_arrays_is_ground_already() {
    let sys = load(TINY);
    assert_eq!(sys.actions().len(), 1);
    assert_eq!(sys.display_action(&sys.actions()[0]), "{A.S.go, S.idle} -> {S.done}");
}

#[test]
fn duplicate_initial_message_is_an_error() {
    let text = TINY.replace("A.S.go, }", "A.S.go, A.S.go, }");
    let diags = load_system(&text).unwrap_err();
    let msgs: Vec<&str> = diags.errors().map(|d| d.message.as_str()).collect();
    assert_eq!(msgs, ["agent `A` has 2 initial messages, expected 1"]);
}

#[test]
fn agent_without_terminating_action_warns() {
    let text = TINY.replace("{S.done}", "{A.S.go, S.done}");
    let (_, diags) = load_system(&text).unwrap();
    assert!(diags.warnings().any(|d| d.message.starts_with("agent `A` can never terminate")));
}

#[test]
fn server_without_initial_state_is_an_error() {
    let text = "server: S(agents A), services {go}, states {idle},
actions { {A.S.go, S.idle} -> {S.idle}, }
servers S, T; agents A;
init -> { S(A).idle, A.S.go, }.";
    assert!(load_system(text).is_err());
}

#[test]
fn expansion_errors() {
    let out_of_bounds = TINY.replace("services {go}", "services {go[2]}").replace("A.S.go,", "A.S.go[3],");
    let raw = parse_spec(&out_of_bounds).unwrap();
    assert!(matches!(
        expand_spec(&raw),
        Err(ExpandError::IndexOutOfBounds { .. }) | Err(ExpandError::Undefined { .. })
    ));

    let undefined = TINY.replace("agents A;", "agents A[M];");
    let raw = parse_spec(&undefined).unwrap();
    assert!(matches!(expand_spec(&raw), Err(ExpandError::Undefined { .. })));

    let reversed = TINY.replace("actions { {", "actions { <i=2..1> {");
    let raw = parse_spec(&reversed).unwrap();
    assert!(matches!(expand_spec(&raw), Err(ExpandError::EmptyRange { .. })));

    let arity = TINY.replace("S(A).idle", "S(A, A).idle");
    let raw = parse_spec(&arity).unwrap();
    assert!(matches!(expand_spec(&raw), Err(ExpandError::ArityMismatch { .. })));

    let huge = format!("#DEFINE N 65\n{}", TINY.replace("agents A;", "agents A[N];"));
    let raw = parse_spec(&huge).unwrap();
    assert!(matches!(expand_spec(&raw), Err(ExpandError::Limit { .. })));
}

#[test]
fn listing_round_trips_through_printer() {
    let raw = parse_spec(&corpus("two_robots_central.imds")).unwrap();
    let printed = print_spec(&raw);
    assert_eq!(parse_spec(&printed).unwrap(), raw);
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generated_specs_round_trip(g in arb_system()) {
        let raw = parse_spec(&g.text()).unwrap();
        let printed = print_spec(&raw);
        prop_assert_eq!(parse_spec(&printed).unwrap(), raw.clone());
        prop_assert_eq!(print_spec(&parse_spec(&printed).unwrap()), printed);
        prop_assert!(load_system(&g.text()).is_ok());
    }
}

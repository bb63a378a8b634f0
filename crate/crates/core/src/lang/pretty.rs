//! Canonical source rendering of a [`RawSpec`]. Parsing the output yields a
//! structurally equal tree.

use std::fmt::Write;

use super::ast::*;

pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::Int(v) => v.to_string(),
        Expr::Var(v) => v.clone(),
        Expr::Add(a, b) => format!("{}+{}", print_expr(a), print_term(b)),
        Expr::Sub(a, b) => format!("{}-{}", print_expr(a), print_term(b)),
    }
}

// The grammar has no parentheses, so a compound right operand cannot be
// expressed; the parser never produces one.
fn print_term(e: &Expr) -> String {
    debug_assert!(matches!(e, Expr::Int(_) | Expr::Var(_)));
    print_expr(e)
}

fn print_decl(d: &Decl) -> String {
    match &d.size {
        Some(s) => format!("{}[{}]", d.name, print_expr(s)),
        None => d.name.clone(),
    }
}

fn print_decls(ds: &[Decl]) -> String {
    ds.iter().map(print_decl).collect::<Vec<_>>().join(",")
}

fn print_ref(r: &Ref) -> String {
    match &r.index {
        Some(i) => format!("{}[{}]", r.name, print_expr(i)),
        None => r.name.clone(),
    }
}

fn print_msg(m: &MsgRef) -> String {
    format!("{}.{}.{}", print_ref(&m.agent), print_ref(&m.server), print_ref(&m.service))
}

fn print_state(s: &StateRef) -> String {
    format!("{}.{}", print_ref(&s.server), print_ref(&s.state))
}

fn print_quantifiers(qs: &[Quantifier]) -> String {
    qs.iter().map(|q| format!("<{}={}..{}>", q.var, print_expr(&q.lo), print_expr(&q.hi))).collect()
}

fn print_actual(a: &Actual) -> String {
    match &a.index {
        ActualIndex::None => a.name.clone(),
        ActualIndex::Single(e) => format!("{}[{}]", a.name, print_expr(e)),
        ActualIndex::Range(lo, hi) => format!("{}[{}..{}]", a.name, print_expr(lo), print_expr(hi)),
        ActualIndex::List(items) => {
            format!("{}[{}]", a.name, items.iter().map(print_expr).collect::<Vec<_>>().join(","))
        }
    }
}

pub fn print_spec(spec: &RawSpec) -> String {
    let mut out = String::new();
    for d in &spec.defines {
        writeln!(out, "#DEFINE {} {}", d.name, d.value).unwrap();
    }
    for def in &spec.server_defs {
        let mut formals = Vec::new();
        if !def.formal_agents.is_empty() {
            formals.push(format!("agents {}", print_decls(&def.formal_agents)));
        }
        if !def.formal_servers.is_empty() {
            formals.push(format!("servers {}", print_decls(&def.formal_servers)));
        }
        writeln!(out, "server: {}({}),", def.name, formals.join(";")).unwrap();
        writeln!(out, "services {{{}}},", print_decls(&def.services)).unwrap();
        writeln!(out, "states {{{}}},", print_decls(&def.states)).unwrap();
        writeln!(out, "actions {{").unwrap();
        for a in &def.actions {
            let rhs = match &a.out_msg {
                Some(m) => format!("{}, {}", print_msg(m), print_state(&a.out_state)),
                None => print_state(&a.out_state),
            };
            writeln!(
                out,
                "  {}{{{}, {}}} -> {{{}}},",
                print_quantifiers(&a.quantifiers),
                print_msg(&a.in_msg),
                print_state(&a.in_state),
                rhs
            )
            .unwrap();
        }
        writeln!(out, "}}\n").unwrap();
    }
    writeln!(out, "servers {};", print_decls(&spec.global_servers)).unwrap();
    writeln!(out, "agents {};", print_decls(&spec.global_agents)).unwrap();
    writeln!(out, "\ninit -> {{").unwrap();
    for item in &spec.init {
        let body = match &item.kind {
            InitKind::Server(s) => format!(
                "{}({}).{}",
                print_ref(&s.instance),
                s.actuals.iter().map(print_actual).collect::<Vec<_>>().join(","),
                print_ref(&s.state)
            ),
            InitKind::Message(m) => print_msg(m),
        };
        writeln!(out, "  {}{},", print_quantifiers(&item.quantifiers), body).unwrap();
    }
    writeln!(out, "}}.").unwrap();
    out
}

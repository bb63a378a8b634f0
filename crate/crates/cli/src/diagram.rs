//! Plain-text sequence diagrams of verification witnesses.

use std::fmt::Write;

use imds::verify::{validate_witness, Counterexample, Step, TraceKind, VerifyError};
use imds::Lts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramEvent {
    pub step: usize,
    /// Lane indices; the agent lane always precedes the server lane.
    pub agent: usize,
    pub server: usize,
    pub service: String,
    pub from_state: String,
    pub to_state: String,
    pub terminates: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ending {
    /// Nothing to annotate: empty trace, or a path that stops elsewhere.
    Open,
    /// A sink where the listed agents still have messages pending.
    Deadlock(Vec<String>),
    /// Every agent has terminated.
    Terminated,
    /// A partial-deadlock witness with the listed agents blocked.
    Blocked(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceDiagram {
    /// Agents, then servers.
    pub lanes: Vec<String>,
    pub events: Vec<DiagramEvent>,
    /// Index into `events` where a lasso cycle begins.
    pub cycle_start: Option<usize>,
    pub ending: Ending,
}

/// Replays `cx` on `lts` and lays it out as a diagram.
pub fn render_sequence_diagram(lts: &Lts, cx: &Counterexample) -> Result<SequenceDiagram, VerifyError> {
    validate_witness(lts, cx)?;
    let sys = lts.system();
    let agents = sys.agents().len();
    let mut lanes: Vec<String> = sys.agent_ids().map(|a| sys.agent_name(a).to_string()).collect();
    lanes.extend(sys.server_ids().map(|s| sys.server_name(s).to_string()));
    let event = |i: usize, st: &Step| {
        let a = sys.action(st.action);
        DiagramEvent {
            step: i + 1,
            agent: a.agent().index(),
            server: agents + a.server().index(),
            service: sys.service_name(a.in_msg.service).to_string(),
            from_state: sys.state_name(a.in_state.state).to_string(),
            to_state: sys.state_name(a.out_state.state).to_string(),
            terminates: a.terminating(),
        }
    };
    let events: Vec<DiagramEvent> = cx.steps().enumerate().map(|(i, st)| event(i, st)).collect();
    let cycle_start = (cx.kind == TraceKind::Lasso).then_some(cx.prefix.len());
    let end = lts.config(cx.terminal);
    let waiting =
        || sys.agent_ids().filter(|&a| !end.is_terminated(a)).map(|a| sys.agent_name(a).to_string()).collect();
    let ending = if events.is_empty() || cx.kind == TraceKind::Lasso {
        Ending::Open
    } else if let Some(b) = cx.blocked_agents.filter(|_| !lts.is_sink(cx.terminal)) {
        Ending::Blocked(b.names(sys))
    } else if lts.is_sink(cx.terminal) && end.all_terminated() {
        Ending::Terminated
    } else if lts.is_sink(cx.terminal) {
        Ending::Deadlock(waiting())
    } else {
        Ending::Open
    };
    Ok(SequenceDiagram { lanes, events, cycle_start, ending })
}

const MARGIN: usize = 5;

impl SequenceDiagram {
    fn width(&self) -> usize {
        self.lanes.iter().map(String::len).max().unwrap_or(0).max(8) + 2
    }

    fn lane_row(&self, w: usize) -> Vec<u8> {
        let mut row = vec![b' '; MARGIN + w * self.lanes.len()];
        for i in 0..self.lanes.len() {
            row[MARGIN + i * w] = b'|';
        }
        row
    }

    pub fn to_text(&self) -> String {
        let w = self.width();
        let mut out = String::new();
        let mut header = " ".repeat(MARGIN);
        for l in &self.lanes {
            write!(header, "{l:<w$}").unwrap();
        }
        let finish = |out: &mut String, row: &[u8]| {
            out.push_str(String::from_utf8_lossy(row).trim_end());
            out.push('\n');
        };
        finish(&mut out, header.as_bytes());
        finish(&mut out, &self.lane_row(w));
        for (i, e) in self.events.iter().enumerate() {
            if self.cycle_start == Some(i) {
                out.push_str("     -- cycle starts --\n");
            }
            let mut row = self.lane_row(w);
            let step = format!("{:>4}", e.step);
            row[..4].copy_from_slice(step.as_bytes());
            let (from, to) = (MARGIN + e.agent * w, MARGIN + e.server * w);
            row[from] = b'o';
            row[from + 1..to].fill(b'-');
            row[to - 1] = b'>';
            let label = format!(" {} ", e.service);
            let on_arrow = to - from >= label.len() + 3;
            if on_arrow {
                row[from + 2..from + 2 + label.len()].copy_from_slice(label.as_bytes());
            }
            let mut note = String::from_utf8_lossy(&row).trim_end().to_string();
            note.push_str("  ");
            if !on_arrow {
                write!(note, "{} ", e.service).unwrap();
            }
            write!(note, "{}->{}", e.from_state, e.to_state).unwrap();
            if e.terminates {
                note.push_str(" (terminates)");
            }
            out.push_str(&note);
            out.push('\n');
        }
        if self.cycle_start.is_some() {
            out.push_str("     -- cycle repeats --\n");
        }
        match &self.ending {
            Ending::Open => {}
            Ending::Deadlock(agents) => writeln!(out, "     -- deadlock: {} waiting --", agents.join(", ")).unwrap(),
            Ending::Terminated => out.push_str("     -- all agents terminated --\n"),
            Ending::Blocked(agents) => writeln!(out, "     -- blocked forever: {} --", agents.join(", ")).unwrap(),
        }
        finish(&mut out, &self.lane_row(w));
        out
    }
}

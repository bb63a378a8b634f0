//! Chamber graphs.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capacity {
    Finite(u32),
    Unbounded,
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(n) => write!(f, "{n}"),
            Capacity::Unbounded => f.write_str("inf"),
        }
    }
}

/// Side chambers host any number of robots and anchor sub-routes; central
/// chambers are the contended resources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChamberKind {
    Side,
    Central,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub name: String,
    pub capacity: Capacity,
    pub kind: ChamberKind,
}

impl Chamber {
    pub fn new(name: impl Into<String>, capacity: Capacity) -> Self {
        let kind = match capacity {
            Capacity::Unbounded => ChamberKind::Side,
            Capacity::Finite(_) => ChamberKind::Central,
        };
        Chamber { name: name.into(), capacity, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate chamber `{name}`")]
    DuplicateChamber { line: usize, name: String },
    #[error("line {line}: door references undeclared chamber `{name}`")]
    UnknownChamber { line: usize, name: String },
    #[error("chamber `{0}` is not connected to `{1}`")]
    Disconnected(String, String),
    #[error("topology declares no chambers")]
    Empty,
}

/// Chambers plus undirected doors. Chambers keep declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvGraph {
    chambers: Vec<Chamber>,
    /// Index pairs with `a < b`.
    doors: BTreeSet<(usize, usize)>,
}

impl EnvGraph {
    /// Builds a graph, rejecting unknown door endpoints, duplicate chambers
    /// and disconnected graphs.
    pub fn new(chambers: Vec<Chamber>, doors: &[(&str, &str)]) -> Result<Self, TopologyError> {
        let mut g = EnvGraph { chambers: Vec::new(), doors: BTreeSet::new() };
        for c in chambers {
            g.add_chamber(c, 0)?;
        }
        for (a, b) in doors {
            g.add_door(a, b, 0)?;
        }
        g.check_connected()?;
        Ok(g)
    }

    fn add_chamber(&mut self, c: Chamber, line: usize) -> Result<(), TopologyError> {
        if self.index(&c.name).is_some() {
            return Err(TopologyError::DuplicateChamber { line, name: c.name });
        }
        self.chambers.push(c);
        Ok(())
    }

    fn add_door(&mut self, a: &str, b: &str, line: usize) -> Result<(), TopologyError> {
        let ia = self.index(a).ok_or_else(|| TopologyError::UnknownChamber { line, name: a.to_string() })?;
        let ib = self.index(b).ok_or_else(|| TopologyError::UnknownChamber { line, name: b.to_string() })?;
        if ia == ib {
            return Err(TopologyError::Parse { line, message: format!("door from `{a}` to itself") });
        }
        self.doors.insert((ia.min(ib), ia.max(ib)));
        Ok(())
    }

    fn check_connected(&self) -> Result<(), TopologyError> {
        let Some(first) = self.chambers.first() else {
            return Err(TopologyError::Empty);
        };
        let mut seen = vec![false; self.chambers.len()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for j in self.neighbor_indices(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(TopologyError::Disconnected(self.chambers[i].name.clone(), first.name.clone())),
            None => Ok(()),
        }
    }

    fn neighbor_indices(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.doors.iter().filter_map(move |&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn chambers(&self) -> &[Chamber] {
        &self.chambers
    }

    pub fn chamber(&self, name: &str) -> Option<&Chamber> {
        self.chambers.iter().find(|c| c.name == name)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.chambers.iter().position(|c| c.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index(name).is_some()
    }

    pub fn door_count(&self) -> usize {
        self.doors.len()
    }

    /// Doors as name pairs, in declaration order of their endpoints.
    pub fn doors(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.doors.iter().map(|&(a, b)| (self.chambers[a].name.as_str(), self.chambers[b].name.as_str()))
    }

    pub fn has_door(&self, a: &str, b: &str) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(x), Some(y)) => self.doors.contains(&(x.min(y), x.max(y))),
            _ => false,
        }
    }

    /// Neighbors in lexicographic order.
    pub fn neighbors(&self, name: &str) -> Vec<&str> {
        let Some(i) = self.index(name) else { return Vec::new() };
        let mut out: Vec<&str> = self.neighbor_indices(i).map(|j| self.chambers[j].name.as_str()).collect();
        out.sort();
        out
    }

    pub fn degree(&self, name: &str) -> usize {
        self.neighbors(name).len()
    }

    pub fn is_side(&self, name: &str) -> bool {
        self.chamber(name).is_some_and(|c| c.kind == ChamberKind::Side)
    }

    /// Topology file text accepted by [`load_env_graph`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.chambers {
            out += &format!("chamber {} capacity {}\n", c.name, c.capacity);
        }
        for (a, b) in self.doors() {
            out += &format!("door {a} {b}\n");
        }
        out
    }
}

/// Four side chambers around a ring of four capacity-1 central chambers.
pub fn quadrant_topology() -> EnvGraph {
    let mut chambers: Vec<Chamber> =
        ["AW", "AN", "AE", "AS"].iter().map(|n| Chamber::new(*n, Capacity::Unbounded)).collect();
    chambers.extend(["QNW", "QNE", "QSW", "QSE"].iter().map(|n| Chamber::new(*n, Capacity::Finite(1))));
    let doors = [
        ("QNW", "QNE"),
        ("QNE", "QSE"),
        ("QSE", "QSW"),
        ("QSW", "QNW"),
        ("QNW", "AW"),
        ("QNW", "AN"),
        ("QNE", "AN"),
        ("QNE", "AE"),
        ("QSE", "AE"),
        ("QSE", "AS"),
        ("QSW", "AS"),
        ("QSW", "AW"),
    ];
    EnvGraph::new(chambers, &doors).expect("built-in topology is valid")
}

/// Parses `chamber <name> capacity <n|inf>` and `door <a> <b>` lines; `#`
/// starts a comment.
pub fn load_env_graph(text: &str) -> Result<EnvGraph, TopologyError> {
    let mut g = EnvGraph { chambers: Vec::new(), doors: BTreeSet::new() };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let parse_err = |message: String| TopologyError::Parse { line, message };
        match words.as_slice() {
            [] => {}
            ["chamber", name, "capacity", cap] => {
                let capacity = match *cap {
                    "inf" => Capacity::Unbounded,
                    n => match n.parse::<u32>() {
                        Ok(v) if v > 0 => Capacity::Finite(v),
                        _ => return Err(parse_err(format!("invalid capacity `{n}`"))),
                    },
                };
                if !is_identifier(name) {
                    return Err(parse_err(format!("invalid chamber name `{name}`")));
                }
                g.add_chamber(Chamber::new(*name, capacity), line)?;
            }
            ["door", a, b] => g.add_door(a, b, line)?,
            [kw, ..] if *kw == "chamber" || *kw == "door" => {
                return Err(parse_err(format!("malformed `{kw}` line")));
            }
            [other, ..] => return Err(parse_err(format!("unknown directive `{other}`"))),
        }
    }
    g.check_connected()?;
    Ok(g)
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

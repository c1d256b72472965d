// SPDX-License-Identifier: Apache-2.0

//! ISCAS-85 `.bench` netlists as DAGs, node classification and path enumeration.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateType {
    And,
    Nand,
    Or,
    Nor,
    Not,
    Xor,
    Xnor,
    Buf,
}

impl GateType {
    fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_uppercase().as_str() {
            "AND" => GateType::And,
            "NAND" => GateType::Nand,
            "OR" => GateType::Or,
            "NOR" => GateType::Nor,
            "NOT" | "INV" => GateType::Not,
            "XOR" => GateType::Xor,
            "XNOR" => GateType::Xnor,
            "BUF" | "BUFF" => GateType::Buf,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateType::And => "AND",
            GateType::Nand => "NAND",
            GateType::Or => "OR",
            GateType::Nor => "NOR",
            GateType::Not => "NOT",
            GateType::Xor => "XOR",
            GateType::Xnor => "XNOR",
            GateType::Buf => "BUFF",
        }
    }

    fn unary(self) -> bool {
        matches!(self, GateType::Not | GateType::Buf)
    }
}

impl fmt::Display for GateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Input,
    /// Sink created for an `OUTPUT` declaration; its only fan-in is the named signal.
    Output,
    Gate(GateType),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    pub fanin: Vec<usize>,
}

/// How `OUTPUT(s)` declarations map to primary-output nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputPolicy {
    /// `s` itself is the output unless it also drives gates, in which case a
    /// sink `s:po` is added.
    #[default]
    Auto,
    /// Every declared output gets its own sink `s:po`, so all gates are interior.
    DedicatedSink,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetlistError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("more than {cap} paths; use the arrival-time delay formulation instead")]
    PathOverflow { cap: usize },
}

pub const SINK_SUFFIX: &str = ":po";

/// DAG of a combinational circuit. Node ids index the lexicographically
/// sorted signal names.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitGraph {
    nodes: Vec<Node>,
    fanout: Vec<Vec<usize>>,
    lookup: HashMap<String, usize>,
    outputs: Vec<String>,
    topo: Vec<usize>,
}

struct Def {
    kind: NodeKind,
    args: Vec<(String, usize)>,
    line: usize,
}

pub fn parse_bench(text: &str) -> Result<CircuitGraph, ParseError> {
    parse_bench_with(text, OutputPolicy::Auto)
}

pub fn parse_bench_with(text: &str, policy: OutputPolicy) -> Result<CircuitGraph, ParseError> {
    let err = |line: usize, column: usize, msg: String| ParseError { line, column, msg };
    let mut defs: BTreeMap<String, Def> = BTreeMap::new();
    let mut outputs: Vec<(String, usize, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let lead = body.len() - body.trim_start().len();
        let line = body.trim();
        if line.is_empty() {
            continue;
        }
        let col = |off: usize| lead + off + 1;
        if let Some(eq) = line.find('=') {
            let name = line[..eq].trim();
            if !valid_name(name) {
                return Err(err(ln, col(0), format!("invalid signal name `{name}`")));
            }
            let rhs = &line[eq + 1..];
            let rhs_off = eq + 1 + (rhs.len() - rhs.trim_start().len());
            let (gate, args) = call(rhs.trim()).map_err(|(o, m)| err(ln, col(rhs_off + o), m))?;
            let ty = GateType::parse(gate).ok_or_else(|| {
                err(ln, col(rhs_off), format!("unsupported gate type `{gate}`"))
            })?;
            if args.is_empty() || (ty.unary() && args.len() != 1) {
                return Err(err(ln, col(rhs_off), format!("wrong operand count for {ty}")));
            }
            if defs.contains_key(name) {
                return Err(err(ln, col(0), format!("signal `{name}` is defined twice")));
            }
            let args = args
                .into_iter()
                .map(|(a, o)| (a.to_string(), col(rhs_off + o)))
                .collect();
            defs.insert(
                name.to_string(),
                Def {
                    kind: NodeKind::Gate(ty),
                    args,
                    line: ln,
                },
            );
        } else {
            let (kw, args) = call(line).map_err(|(o, m)| err(ln, col(o), m))?;
            if args.len() != 1 {
                return Err(err(ln, col(0), format!("{kw} takes exactly one signal")));
            }
            let (name, off) = args[0];
            match kw.to_ascii_uppercase().as_str() {
                "INPUT" => {
                    if defs.contains_key(name) {
                        return Err(err(ln, col(off), format!("signal `{name}` is defined twice")));
                    }
                    defs.insert(
                        name.to_string(),
                        Def {
                            kind: NodeKind::Input,
                            args: vec![],
                            line: ln,
                        },
                    );
                }
                "OUTPUT" => outputs.push((name.to_string(), ln, col(off))),
                _ => {
                    return Err(err(
                        ln,
                        col(0),
                        format!("expected INPUT(..), OUTPUT(..) or `name = GATE(..)`, found `{kw}`"),
                    ))
                }
            }
        }
    }
    for d in defs.values() {
        for (a, c) in &d.args {
            if !defs.contains_key(a) {
                return Err(err(d.line, *c, format!("undeclared signal `{a}`")));
            }
        }
    }
    let mut seen_out = std::collections::HashSet::new();
    for (o, ln, c) in &outputs {
        if !defs.contains_key(o) {
            return Err(err(*ln, *c, format!("output `{o}` is never defined")));
        }
        if !seen_out.insert(o.clone()) {
            return Err(err(*ln, *c, format!("output `{o}` is declared twice")));
        }
    }
    let drives: std::collections::HashSet<&str> = defs
        .values()
        .flat_map(|d| d.args.iter().map(|(a, _)| a.as_str()))
        .collect();
    let mut sinks = Vec::new();
    for (o, ln, _) in &outputs {
        let needs = match policy {
            OutputPolicy::DedicatedSink => true,
            OutputPolicy::Auto => drives.contains(o.as_str()),
        };
        if needs {
            let sink = format!("{o}{SINK_SUFFIX}");
            if defs.contains_key(&sink) {
                return Err(err(*ln, 1, format!("sink name `{sink}` collides with a signal")));
            }
            sinks.push((
                sink,
                Def {
                    kind: NodeKind::Output,
                    args: vec![(o.clone(), 0)],
                    line: *ln,
                },
            ));
        }
    }
    defs.extend(sinks);

    let lookup: HashMap<String, usize> = defs.keys().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    let mut lines = Vec::with_capacity(defs.len());
    let nodes: Vec<Node> = defs
        .into_iter()
        .map(|(name, d)| {
            let mut fanin: Vec<usize> = d.args.iter().map(|(a, _)| lookup[a]).collect();
            fanin.sort_unstable();
            fanin.dedup();
            lines.push(d.line);
            Node {
                name,
                kind: d.kind,
                fanin,
            }
        })
        .collect();
    let mut fanout = vec![Vec::new(); nodes.len()];
    for (i, n) in nodes.iter().enumerate() {
        for &j in &n.fanin {
            fanout[j].push(i);
        }
    }
    let topo = topological(&nodes, &fanout).map_err(|i| {
        err(lines[i], 1, format!("combinational cycle through `{}`", nodes[i].name))
    })?;
    Ok(CircuitGraph {
        nodes,
        fanout,
        lookup,
        outputs: outputs.into_iter().map(|o| o.0).collect(),
        topo,
    })
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.contains(|c: char| c.is_whitespace() || "(),=#".contains(c))
}

/// Keyword and its arguments, each with its byte offset.
type Call<'a> = (&'a str, Vec<(&'a str, usize)>);

/// Splits `KW(a, b, ...)` into the keyword and its arguments with byte offsets.
fn call(s: &str) -> Result<Call<'_>, (usize, String)> {
    let open = s.find('(').ok_or((0, "expected `(`".to_string()))?;
    let kw = s[..open].trim();
    if kw.is_empty() {
        return Err((0, "missing keyword before `(`".into()));
    }
    let close = s
        .rfind(')')
        .ok_or((s.len(), "unbalanced parenthesis: missing `)`".to_string()))?;
    if close < open {
        return Err((close, "unbalanced parenthesis".into()));
    }
    if !s[close + 1..].trim().is_empty() {
        return Err((close + 1, "unexpected text after `)`".into()));
    }
    let inner = &s[open + 1..close];
    let mut args = Vec::new();
    let mut off = open + 1;
    for part in inner.split(',') {
        let t = part.trim();
        let at = off + (part.len() - part.trim_start().len());
        if !valid_name(t) {
            return Err((at, format!("invalid signal name `{t}`")));
        }
        args.push((t, at));
        off += part.len() + 1;
    }
    Ok((kw, args))
}

/// Kahn's algorithm with a sorted ready set; `Err` names a node on a cycle.
fn topological(nodes: &[Node], fanout: &[Vec<usize>]) -> Result<Vec<usize>, usize> {
    let mut indeg: Vec<usize> = nodes.iter().map(|n| n.fanin.len()).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..nodes.len()).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &j in &fanout[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if order.len() == nodes.len() {
        Ok(order)
    } else {
        Err((0..nodes.len()).find(|&i| indeg[i] > 0).expect("a node is left"))
    }
}

impl CircuitGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.nodes[i].name
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn fanin(&self, i: usize) -> &[usize] {
        &self.nodes[i].fanin
    }

    pub fn fanout(&self, i: usize) -> &[usize] {
        &self.fanout[i]
    }

    /// Signals named in `OUTPUT` declarations, in file order.
    pub fn declared_outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .flat_map(|(i, n)| n.fanin.iter().map(move |&j| (j, i)))
    }

    pub fn is_pi(&self, i: usize) -> bool {
        self.nodes[i].fanin.is_empty()
    }

    pub fn is_po(&self, i: usize) -> bool {
        self.fanout[i].is_empty()
    }

    pub fn is_cb(&self, i: usize) -> bool {
        !self.is_pi(i) && !self.is_po(i)
    }

    pub fn pi(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_pi(i)).collect()
    }

    pub fn po(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_po(i)).collect()
    }

    pub fn cb(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_cb(i)).collect()
    }

    pub fn gates(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| matches!(self.nodes[i].kind, NodeKind::Gate(_)))
            .collect()
    }

    /// `.bench` text that parses back to an isomorphic graph.
    pub fn to_bench(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            if n.kind == NodeKind::Input {
                s.push_str(&format!("INPUT({})\n", n.name));
            }
        }
        for o in &self.outputs {
            s.push_str(&format!("OUTPUT({o})\n"));
        }
        for &i in &self.topo {
            let n = &self.nodes[i];
            if let NodeKind::Gate(ty) = n.kind {
                let args: Vec<&str> = n.fanin.iter().map(|&j| self.name(j)).collect();
                s.push_str(&format!("{} = {}({})\n", n.name, ty, args.join(", ")));
            }
        }
        s
    }
}

/// All PI → PO paths as node-id tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathList {
    pub paths: Vec<Vec<usize>>,
}

impl PathList {
    pub fn count(&self) -> usize {
        self.paths.len()
    }

    /// `path_id,node_sequence` with space-separated signal names.
    pub fn to_csv(&self, g: &CircuitGraph) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["path_id", "node_sequence"]).expect("in-memory write");
        for (k, p) in self.paths.iter().enumerate() {
            let seq: Vec<&str> = p.iter().map(|&i| g.name(i)).collect();
            w.write_record([k.to_string(), seq.join(" ")]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

pub const DEFAULT_PATH_CAP: usize = 1_000_000;

/// Depth-first enumeration from each PI in id order, visiting fan-outs in id order.
pub fn enumerate_paths(g: &CircuitGraph, cap: usize) -> Result<PathList, NetlistError> {
    let mut paths = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut cur = Vec::new();
    for s in g.pi() {
        stack.push((s, 0));
        cur.push(s);
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let fo = g.fanout(node);
            if fo.is_empty() {
                if paths.len() == cap {
                    return Err(NetlistError::PathOverflow { cap });
                }
                paths.push(cur.clone());
            }
            if *next < fo.len() {
                let child = fo[*next];
                *next += 1;
                stack.push((child, 0));
                cur.push(child);
            } else {
                stack.pop();
                cur.pop();
            }
        }
    }
    Ok(PathList { paths })
}

/// Path count by dynamic programming over the topological order.
pub fn count_paths_dp(g: &CircuitGraph) -> u128 {
    let mut from_pi = vec![0u128; g.len()];
    for &i in g.topo_order() {
        from_pi[i] = if g.is_pi(i) {
            1
        } else {
            g.fanin(i).iter().map(|&j| from_pi[j]).sum()
        };
    }
    g.po().iter().map(|&i| from_pi[i]).sum()
}

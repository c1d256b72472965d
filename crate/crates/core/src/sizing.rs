// SPDX-License-Identifier: Apache-2.0

//! Gate sizing: capacitance and power posynomials, worst-case path delay and
//! the sizing GGP over per-gate scale factors.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::expr::{GenExpr, ModelError, Monomial, Posynomial, VarId, VarRegistry};
use crate::netlist::{enumerate_paths, CircuitGraph, NetlistError, PathList, SINK_SUFFIX};
use crate::problem::{GgpProblem, Inequality};
use crate::solver::{solve_ggp, GgpSolution, SolverConfig, SolverError};

pub const DEFAULT_X_MAX: f64 = 100.0;
pub const DEFAULT_DELAY_COEFF: f64 = 0.69;

#[derive(Debug, Error)]
pub enum SizingError {
    #[error("node `{node}`: missing `{field}`")]
    MissingParam { node: String, field: &'static str },
    #[error("node `{node}`: `{field}` = {value} is out of range")]
    InvalidParam {
        node: String,
        field: &'static str,
        value: f64,
    },
    #[error("parameter row for unknown node `{0}`")]
    UnknownNode(String),
    #[error("infeasible bounds: {0}")]
    Bounds(String),
    #[error("no path passes through a sizable gate")]
    NoDelay,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Unit-scaling parameters of one sizable gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateParams {
    pub r: f64,
    pub c_in: f64,
    pub c_int: f64,
    pub vol: f64,
    pub leak: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizingParams {
    /// Keyed by CB node name.
    pub gates: BTreeMap<String, GateParams>,
    /// Activity frequency of PI and CB nodes.
    pub freq: BTreeMap<String, f64>,
    /// Fixed input capacitance of PO nodes. A sink `s:po` may also be keyed by `s`.
    pub po_cap: BTreeMap<String, f64>,
    pub x_max: BTreeMap<String, f64>,
    pub vdd: f64,
    pub delay_coeff: f64,
}

#[derive(Debug, Deserialize)]
struct Row {
    node: String,
    #[serde(default)]
    r: Option<f64>,
    #[serde(default)]
    c_in: Option<f64>,
    #[serde(default)]
    c_int: Option<f64>,
    #[serde(default)]
    vol: Option<f64>,
    #[serde(default)]
    leak: Option<f64>,
    #[serde(default)]
    freq: Option<f64>,
    #[serde(default)]
    c_po: Option<f64>,
    #[serde(default)]
    x_max: Option<f64>,
}

impl SizingParams {
    /// The same parameters on every node of `g`.
    pub fn uniform(g: &CircuitGraph, gate: GateParams, freq: f64, c_po: f64) -> Self {
        let mut p = SizingParams::empty();
        for i in 0..g.len() {
            let name = g.name(i).to_string();
            if g.is_cb(i) {
                p.gates.insert(name.clone(), gate);
            }
            if !g.is_po(i) {
                p.freq.insert(name.clone(), freq);
            }
            if g.is_po(i) {
                p.po_cap.insert(name, c_po);
            }
        }
        p
    }

    pub fn empty() -> Self {
        SizingParams {
            gates: BTreeMap::new(),
            freq: BTreeMap::new(),
            po_cap: BTreeMap::new(),
            x_max: BTreeMap::new(),
            vdd: 1.0,
            delay_coeff: DEFAULT_DELAY_COEFF,
        }
    }

    /// Reads `node,r,c_in,c_int,vol,leak,freq,c_po,x_max`; absent columns and
    /// empty cells are allowed. Gate columns must be complete when any is given.
    pub fn from_csv(text: &str) -> Result<Self, SizingError> {
        let mut p = SizingParams::empty();
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        for row in rdr.deserialize() {
            let row: Row = row?;
            let gate = [row.r, row.c_in, row.c_int, row.vol, row.leak];
            if gate.iter().any(Option::is_some) {
                let names = ["r", "c_in", "c_int", "vol", "leak"];
                for (v, f) in gate.iter().zip(names) {
                    if v.is_none() {
                        return Err(SizingError::MissingParam {
                            node: row.node.clone(),
                            field: f,
                        });
                    }
                }
                p.gates.insert(
                    row.node.clone(),
                    GateParams {
                        r: row.r.unwrap(),
                        c_in: row.c_in.unwrap(),
                        c_int: row.c_int.unwrap(),
                        vol: row.vol.unwrap(),
                        leak: row.leak.unwrap(),
                    },
                );
            }
            if let Some(f) = row.freq {
                p.freq.insert(row.node.clone(), f);
            }
            if let Some(c) = row.c_po {
                p.po_cap.insert(row.node.clone(), c);
            }
            if let Some(x) = row.x_max {
                p.x_max.insert(row.node.clone(), x);
            }
        }
        Ok(p)
    }

    pub fn to_csv(&self) -> String {
        let mut names: Vec<&String> = self
            .gates
            .keys()
            .chain(self.freq.keys())
            .chain(self.po_cap.keys())
            .chain(self.x_max.keys())
            .collect();
        names.sort();
        names.dedup();
        let opt = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["node", "r", "c_in", "c_int", "vol", "leak", "freq", "c_po", "x_max"])
            .expect("in-memory write");
        for n in names {
            let g = self.gates.get(n);
            w.write_record([
                n.clone(),
                opt(g.map(|g| g.r)),
                opt(g.map(|g| g.c_in)),
                opt(g.map(|g| g.c_int)),
                opt(g.map(|g| g.vol)),
                opt(g.map(|g| g.leak)),
                opt(self.freq.get(n).copied()),
                opt(self.po_cap.get(n).copied()),
                opt(self.x_max.get(n).copied()),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn po_cap_of(&self, name: &str) -> Option<f64> {
        self.po_cap
            .get(name)
            .or_else(|| name.strip_suffix(SINK_SUFFIX).and_then(|s| self.po_cap.get(s)))
            .copied()
    }

    /// Checks that `g` is fully covered and every value is in range.
    pub fn validate(&self, g: &CircuitGraph) -> Result<(), SizingError> {
        let bad = |node: &str, field, value| SizingError::InvalidParam {
            node: node.to_string(),
            field,
            value,
        };
        let pos = |v: f64| v > 0.0 && v.is_finite();
        let nonneg = |v: f64| v >= 0.0 && v.is_finite();
        for k in self.gates.keys().chain(self.freq.keys()).chain(self.x_max.keys()) {
            if g.id(k).is_none() {
                return Err(SizingError::UnknownNode(k.clone()));
            }
        }
        if !pos(self.vdd) {
            return Err(bad("*", "vdd", self.vdd));
        }
        if !pos(self.delay_coeff) {
            return Err(bad("*", "delay_coeff", self.delay_coeff));
        }
        for i in 0..g.len() {
            let name = g.name(i);
            let missing = |field| SizingError::MissingParam {
                node: name.to_string(),
                field,
            };
            if g.is_cb(i) {
                let gp = self.gates.get(name).ok_or_else(|| missing("r"))?;
                for (f, v) in [("r", gp.r), ("c_in", gp.c_in), ("c_int", gp.c_int), ("vol", gp.vol)] {
                    if !pos(v) {
                        return Err(bad(name, f, v));
                    }
                }
                if !nonneg(gp.leak) {
                    return Err(bad(name, "leak", gp.leak));
                }
            }
            if !g.is_po(i) {
                let f = *self.freq.get(name).ok_or_else(|| missing("freq"))?;
                if !nonneg(f) {
                    return Err(bad(name, "freq", f));
                }
            }
            if g.is_po(i) {
                let c = self.po_cap_of(name).ok_or_else(|| missing("c_po"))?;
                if !pos(c) {
                    return Err(bad(name, "c_po", c));
                }
            }
        }
        Ok(())
    }
}

/// One scale variable `x_{name}` per CB gate, in node-id order.
#[derive(Clone, Debug)]
pub struct SizingVars {
    pub registry: VarRegistry,
    pub gates: Vec<usize>,
    of_node: Vec<Option<VarId>>,
}

impl SizingVars {
    pub fn new(g: &CircuitGraph) -> Self {
        let mut registry = VarRegistry::new();
        let gates = g.cb();
        let mut of_node = vec![None; g.len()];
        for &i in &gates {
            of_node[i] = Some(registry.add(format!("x_{}", g.name(i))).expect("node names are unique"));
        }
        SizingVars {
            registry,
            gates,
            of_node,
        }
    }

    pub fn var(&self, node: usize) -> Option<VarId> {
        self.of_node[node]
    }
}

/// Per-node capacitance posynomials; `None` where the quantity is undefined.
#[derive(Clone, Debug)]
pub struct Capacitances {
    /// CB and PO nodes.
    pub c_in: Vec<Option<Posynomial>>,
    /// PI and CB nodes.
    pub c_load: Vec<Option<Posynomial>>,
    /// PI and CB nodes.
    pub c_total: Vec<Option<Posynomial>>,
}

pub fn build_capacitances(
    g: &CircuitGraph,
    params: &SizingParams,
    vars: &SizingVars,
) -> Result<Capacitances, SizingError> {
    params.validate(g)?;
    let n = g.len();
    let mut c_in = vec![None; n];
    for (i, c) in c_in.iter_mut().enumerate() {
        if let Some(v) = vars.var(i) {
            *c = Some(Monomial::new(params.gates[g.name(i)].c_in, [(v, 1.0)])?.into());
        } else if g.is_po(i) {
            *c = Some(Posynomial::constant(params.po_cap_of(g.name(i)).expect("validated"))?);
        }
    }
    let mut c_load = vec![None; n];
    let mut c_total = vec![None; n];
    for i in 0..n {
        if g.is_po(i) {
            continue;
        }
        let terms = g
            .fanout(i)
            .iter()
            .flat_map(|&j| c_in[j].as_ref().map(|p| p.terms().to_vec()).unwrap_or_default());
        let load = Posynomial::from_terms(terms)?;
        let total = match vars.var(i) {
            Some(v) => load.add(&Monomial::new(params.gates[g.name(i)].c_int, [(v, 1.0)])?.into()),
            None => load.clone(),
        };
        c_load[i] = Some(load);
        c_total[i] = Some(total);
    }
    Ok(Capacitances {
        c_in,
        c_load,
        c_total,
    })
}

/// Dynamic plus leakage power; `None` when every frequency and leakage is zero.
pub fn build_power(
    g: &CircuitGraph,
    params: &SizingParams,
    vars: &SizingVars,
    caps: &Capacitances,
) -> Result<Option<Posynomial>, SizingError> {
    let v2 = params.vdd * params.vdd;
    let mut terms = Vec::new();
    for i in 0..g.len() {
        let name = g.name(i);
        if let Some(c) = &caps.c_total[i] {
            let f = params.freq[name];
            if f > 0.0 {
                terms.extend(c.scale(f * v2)?.terms().iter().cloned());
            }
        }
        if let Some(v) = vars.var(i) {
            let leak = params.gates[name].leak;
            if leak > 0.0 {
                terms.push(Monomial::new(leak * params.vdd, [(v, 1.0)])?);
            }
        }
    }
    if terms.is_empty() {
        Ok(None)
    } else {
        Ok(Some(Posynomial::from_terms(terms)?))
    }
}

/// `delay_coeff · R̄ᵢ xᵢ⁻¹ · Cᵢ` for every CB gate.
pub fn gate_delays(
    g: &CircuitGraph,
    params: &SizingParams,
    vars: &SizingVars,
    caps: &Capacitances,
) -> Result<Vec<Option<Posynomial>>, SizingError> {
    (0..g.len())
        .map(|i| match vars.var(i) {
            Some(v) => {
                let r = Monomial::new(params.delay_coeff * params.gates[g.name(i)].r, [(v, -1.0)])?;
                Ok(Some(caps.c_total[i].as_ref().expect("CB has a total").mul_monomial(&r)))
            }
            None => Ok(None),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DelayMode {
    /// Maximum over explicitly enumerated paths.
    #[default]
    PathEnumeration,
    /// Per-gate arrival times `T_i` with `T_j + D_i <= T_i`.
    ArrivalTime,
}

/// Worst-case delay expression plus any constraints and variables it needs.
#[derive(Clone, Debug)]
pub struct DelayModel {
    pub objective: GenExpr,
    pub constraints: Vec<Inequality>,
}

/// Sum of gate delays along one path; `None` when it has no sizable gate.
fn path_delay(path: &[usize], d: &[Option<Posynomial>]) -> Option<Posynomial> {
    let terms: Vec<Monomial> = path
        .iter()
        .filter_map(|&i| d[i].as_ref())
        .flat_map(|p| p.terms().iter().cloned())
        .collect();
    Posynomial::from_terms(terms).ok()
}

pub fn build_delay(
    g: &CircuitGraph,
    d: &[Option<Posynomial>],
    vars: &mut VarRegistry,
    mode: DelayMode,
    paths: Option<&PathList>,
    cap: usize,
) -> Result<DelayModel, SizingError> {
    match mode {
        DelayMode::PathEnumeration => {
            let owned;
            let paths = match paths {
                Some(p) => p,
                None => {
                    owned = enumerate_paths(g, cap)?;
                    &owned
                }
            };
            let branches: Vec<GenExpr> = paths
                .paths
                .iter()
                .filter_map(|p| path_delay(p, d))
                .map(GenExpr::from)
                .collect();
            if branches.is_empty() {
                return Err(SizingError::NoDelay);
            }
            Ok(DelayModel {
                objective: GenExpr::max(branches)?,
                constraints: Vec::new(),
            })
        }
        DelayMode::ArrivalTime => {
            let mut t = vec![None; g.len()];
            for i in 0..g.len() {
                if d[i].is_some() {
                    t[i] = Some(vars.add(format!("T_{}", g.name(i)))?);
                }
            }
            let mut constraints = Vec::new();
            for &i in g.topo_order() {
                let (Some(di), Some(ti)) = (&d[i], t[i]) else {
                    continue;
                };
                let mut direct = false;
                for &j in g.fanin(i) {
                    match t[j] {
                        Some(tj) => constraints.push(Inequality {
                            lhs: di.add(&Posynomial::var(tj)).into(),
                            rhs: Monomial::var(ti),
                            label: format!("arrival:{}<-{}", g.name(i), g.name(j)),
                        }),
                        None => direct = true,
                    }
                }
                if direct {
                    constraints.push(Inequality {
                        lhs: di.clone().into(),
                        rhs: Monomial::var(ti),
                        label: format!("arrival:{}", g.name(i)),
                    });
                }
            }
            let mut ends: Vec<usize> = g
                .po()
                .iter()
                .flat_map(|&o| std::iter::once(o).chain(g.fanin(o).iter().copied()))
                .filter(|&i| t[i].is_some())
                .collect();
            ends.sort_unstable();
            ends.dedup();
            if ends.is_empty() {
                return Err(SizingError::NoDelay);
            }
            let branches = ends.iter().map(|&i| Monomial::var(t[i].unwrap()).into()).collect();
            Ok(DelayModel {
                objective: GenExpr::max(branches)?,
                constraints,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizingConstraints {
    /// Power cap; infinite drops the constraint.
    pub p_max: f64,
    /// Volume cap; infinite drops the constraint.
    pub vol_max: f64,
    /// Overrides every per-gate `x_max` when set; infinite drops the upper bounds.
    pub x_max: Option<f64>,
}

impl Default for SizingConstraints {
    fn default() -> Self {
        SizingConstraints {
            p_max: f64::INFINITY,
            vol_max: f64::INFINITY,
            x_max: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SizingProblem {
    pub ggp: GgpProblem,
    /// CB node ids; the first `gates.len()` variables are their scale factors.
    pub gates: Vec<usize>,
    pub power: Option<Posynomial>,
    pub volume: Posynomial,
}

pub fn build_sizing_ggp(
    g: &CircuitGraph,
    params: &SizingParams,
    cons: &SizingConstraints,
    mode: DelayMode,
    paths: Option<&PathList>,
    cap: usize,
) -> Result<SizingProblem, SizingError> {
    for (what, v) in [("p_max", cons.p_max), ("vol_max", cons.vol_max)] {
        if !(v > 0.0) {
            return Err(SizingError::Bounds(format!("{what} = {v} must be positive")));
        }
    }
    let vars = SizingVars::new(g);
    if vars.gates.is_empty() {
        return Err(SizingError::NoDelay);
    }
    let caps = build_capacitances(g, params, &vars)?;
    let power = build_power(g, params, &vars, &caps)?;
    let d = gate_delays(g, params, &vars, &caps)?;
    let mut registry = vars.registry.clone();
    let delay = build_delay(g, &d, &mut registry, mode, paths, cap)?;
    let volume = Posynomial::from_terms(
        vars.gates
            .iter()
            .map(|&i| Monomial::new(params.gates[g.name(i)].vol, [(vars.var(i).unwrap(), 1.0)]))
            .collect::<Result<Vec<_>, _>>()?,
    )?;
    let mut ggp = GgpProblem::new(registry, delay.objective);
    ggp.inequalities.extend(delay.constraints);
    if let (Some(p), true) = (&power, cons.p_max.is_finite()) {
        ggp.add_le(p.clone(), Monomial::constant(cons.p_max)?, "power");
    }
    if cons.vol_max.is_finite() {
        ggp.add_le(volume.clone(), Monomial::constant(cons.vol_max)?, "volume");
    }
    for &i in &vars.gates {
        let v = vars.var(i).unwrap();
        let name = g.name(i);
        let x_max = cons
            .x_max
            .unwrap_or_else(|| params.x_max.get(name).copied().unwrap_or(DEFAULT_X_MAX));
        if !(x_max >= 1.0) {
            return Err(SizingError::Bounds(format!("x_max = {x_max} < 1 at `{name}`")));
        }
        ggp.add_ge(Monomial::var(v), Monomial::one(), format!("x_min:{name}"));
        if x_max.is_finite() {
            ggp.add_le(Monomial::var(v), Monomial::constant(x_max)?, format!("x_max:{name}"));
        }
    }
    Ok(SizingProblem {
        ggp,
        gates: vars.gates,
        power,
        volume,
    })
}

/// Scale factors per node id: `x` for CB gates in id order, 1 elsewhere.
fn per_node(g: &CircuitGraph, x: &[f64]) -> Vec<f64> {
    let mut full = vec![1.0; g.len()];
    for (k, i) in g.cb().into_iter().enumerate() {
        full[i] = x[k];
    }
    full
}

/// Gate delays by direct numeric evaluation, zero off CB.
pub fn numeric_gate_delays(g: &CircuitGraph, params: &SizingParams, x: &[f64]) -> Vec<f64> {
    let xs = per_node(g, x);
    let c_in = |j: usize| -> f64 {
        if g.is_cb(j) {
            params.gates[g.name(j)].c_in * xs[j]
        } else {
            params.po_cap_of(g.name(j)).unwrap_or(0.0)
        }
    };
    (0..g.len())
        .map(|i| {
            if !g.is_cb(i) {
                return 0.0;
            }
            let gp = &params.gates[g.name(i)];
            let load: f64 = g.fanout(i).iter().map(|&j| c_in(j)).sum();
            params.delay_coeff * gp.r / xs[i] * (load + gp.c_int * xs[i])
        })
        .collect()
}

/// Power by direct numeric summation.
pub fn numeric_power(g: &CircuitGraph, params: &SizingParams, x: &[f64]) -> f64 {
    let xs = per_node(g, x);
    let mut p = 0.0;
    for i in 0..g.len() {
        if g.is_po(i) {
            continue;
        }
        let mut c = 0.0;
        for &j in g.fanout(i) {
            c += if g.is_cb(j) {
                params.gates[g.name(j)].c_in * xs[j]
            } else {
                params.po_cap_of(g.name(j)).unwrap_or(0.0)
            };
        }
        if g.is_cb(i) {
            let gp = &params.gates[g.name(i)];
            c += gp.c_int * xs[i];
            p += xs[i] * gp.leak * params.vdd;
        }
        p += params.freq[g.name(i)] * c * params.vdd * params.vdd;
    }
    p
}

/// Longest PI → PO path by dynamic programming over gate delays.
pub fn longest_path_delay(g: &CircuitGraph, params: &SizingParams, x: &[f64]) -> f64 {
    let d = numeric_gate_delays(g, params, x);
    let mut arr = vec![0.0f64; g.len()];
    for &i in g.topo_order() {
        let before = g.fanin(i).iter().map(|&j| arr[j]).fold(0.0, f64::max);
        arr[i] = before + d[i];
    }
    g.po().iter().map(|&i| arr[i]).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizingReport {
    pub gates: Vec<String>,
    pub x: Vec<f64>,
    pub delay_before: Vec<f64>,
    pub delay_after: Vec<f64>,
    pub worst_before: f64,
    pub worst_after: f64,
    pub improvement_pct: f64,
}

/// Per-path delays at `x = 1` and at `x`, by traversal of each path.
pub fn evaluate_report(
    g: &CircuitGraph,
    params: &SizingParams,
    paths: &PathList,
    x: &[f64],
) -> SizingReport {
    let ones = vec![1.0; x.len()];
    let along = |d: &[f64]| -> Vec<f64> {
        paths
            .paths
            .iter()
            .map(|p| p.iter().map(|&i| d[i]).sum())
            .collect()
    };
    let delay_before = along(&numeric_gate_delays(g, params, &ones));
    let delay_after = along(&numeric_gate_delays(g, params, x));
    let worst = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let worst_before = worst(&delay_before);
    let worst_after = worst(&delay_after);
    SizingReport {
        gates: g.cb().iter().map(|&i| g.name(i).to_string()).collect(),
        x: x.to_vec(),
        delay_before,
        delay_after,
        worst_before,
        worst_after,
        improvement_pct: (worst_before - worst_after) / worst_before * 100.0,
    }
}

impl SizingReport {
    /// `path_id,delay_before,delay_after`.
    pub fn report_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["path_id", "delay_before", "delay_after"]).expect("in-memory write");
        for (k, (b, a)) in self.delay_before.iter().zip(&self.delay_after).enumerate() {
            w.write_record([k.to_string(), format!("{b:.12e}"), format!("{a:.12e}")])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// `gate,x_star`.
    pub fn sizes_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["gate", "x_star"]).expect("in-memory write");
        for (n, x) in self.gates.iter().zip(&self.x) {
            w.write_record([n.clone(), format!("{x:.12e}")]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

#[derive(Clone, Debug)]
pub struct SizingOutcome {
    pub problem: SizingProblem,
    pub solution: GgpSolution,
    /// Scale factors of the CB gates in id order.
    pub x: Vec<f64>,
}

pub fn solve_sizing(
    g: &CircuitGraph,
    params: &SizingParams,
    cons: &SizingConstraints,
    mode: DelayMode,
    paths: Option<&PathList>,
    cfg: &SolverConfig,
) -> Result<SizingOutcome, SizingError> {
    let problem = build_sizing_ggp(g, params, cons, mode, paths, crate::netlist::DEFAULT_PATH_CAP)?;
    let solution = solve_ggp(&problem.ggp, cfg)?;
    let x = solution.x[..problem.gates.len()].to_vec();
    Ok(SizingOutcome {
        problem,
        solution,
        x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;

    fn unit() -> GateParams {
        GateParams {
            r: 1.0,
            c_in: 1.0,
            c_int: 1.0,
            vol: 1.0,
            leak: 1.0,
        }
    }

    fn chain(c: f64) -> (CircuitGraph, SizingParams) {
        let g = parse_bench("INPUT(a)\nOUTPUT(z)\ng = NOT(a)\nz = BUF(g)").unwrap();
        let mut p = SizingParams::uniform(&g, unit(), 1.0, c);
        p.po_cap.insert("z".into(), c);
        (g, p)
    }

    #[test]
    fn single_gate_power_and_delay() {
        let (g, p) = chain(1.0);
        let vars = SizingVars::new(&g);
        assert_eq!(vars.gates.len(), 1);
        let caps = build_capacitances(&g, &p, &vars).unwrap();
        let gi = g.id("g").unwrap();
        assert_eq!(caps.c_load[gi].as_ref().unwrap().as_monomial().unwrap().coeff(), 1.0);
        // PI frequency set to zero isolates the gate's own terms.
        let mut p0 = p.clone();
        p0.freq.insert("a".into(), 0.0);
        let pw = build_power(&g, &p0, &vars, &caps).unwrap().unwrap();
        for x in [0.5, 1.0, 3.0] {
            assert!((pw.eval(&[x]).unwrap() - (1.0 + 2.0 * x)).abs() < 1e-14);
        }
        let d = gate_delays(&g, &p, &vars, &caps).unwrap();
        for x in [0.5, 2.0] {
            let want = 0.69 / x * (1.0 + x);
            assert!((d[gi].as_ref().unwrap().eval(&[x]).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn leakage_only_when_frequencies_vanish() {
        let g = parse_bench(include_str!("../fixtures/c17.bench")).unwrap();
        let p = SizingParams::uniform(&g, unit(), 0.0, 1.0);
        let vars = SizingVars::new(&g);
        let caps = build_capacitances(&g, &p, &vars).unwrap();
        let pw = build_power(&g, &p, &vars, &caps).unwrap().unwrap();
        assert_eq!(pw.len(), vars.gates.len());
    }

    #[test]
    fn vdd_scaling() {
        let (g, mut p) = chain(1.0);
        let x = [1.7];
        let leak_only = {
            let mut q = p.clone();
            q.freq.values_mut().for_each(|f| *f = 0.0);
            numeric_power(&g, &q, &x)
        };
        let dyn1 = numeric_power(&g, &p, &x) - leak_only;
        p.vdd = 2.0;
        let mut q = p.clone();
        q.freq.values_mut().for_each(|f| *f = 0.0);
        let leak2 = numeric_power(&g, &q, &x);
        let dyn2 = numeric_power(&g, &p, &x) - leak2;
        assert!((dyn2 - 4.0 * dyn1).abs() < 1e-12);
        assert!((leak2 - 2.0 * leak_only).abs() < 1e-12);
    }

    #[test]
    fn missing_po_capacitance() {
        let (g, mut p) = chain(1.0);
        p.po_cap.clear();
        let vars = SizingVars::new(&g);
        assert!(matches!(
            build_capacitances(&g, &p, &vars),
            Err(SizingError::MissingParam { field: "c_po", .. })
        ));
    }

    #[test]
    fn params_csv_round_trip() {
        let (g, p) = chain(2.5);
        let q = SizingParams::from_csv(&p.to_csv()).unwrap();
        assert_eq!(p, q);
        q.validate(&g).unwrap();
        assert!(SizingParams::from_csv("node,r\ng,1\n").is_err());
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Temperature-aware 3D floorplanning over fixed axis-chain arrangements.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{GenExpr, ModelError, Monomial, Posynomial, VarId, VarRegistry};
use crate::problem::GgpProblem;
use crate::solver::{solve_ggp, GgpSolution, SolverConfig, SolverError};

#[derive(Debug, Error)]
pub enum FloorplanError {
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error("module `{0}` is defined twice")]
    Duplicate(String),
    #[error("unknown module `{0}` in the arrangement")]
    UnknownModule(String),
    #[error("module `{module}` appears in no {axis} chain")]
    Uncovered { module: String, axis: Axis },
    #[error("module `{module}` is repeated in a {axis} chain")]
    RepeatedInChain { module: String, axis: Axis },
    #[error("alpha = {0} must lie in [0, 1]")]
    Alpha(f64),
    #[error("objective is empty: alpha = 0 and no module dissipates heat")]
    EmptyObjective,
    #[error("invalid arrangement: {0}")]
    Arrangement(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        self as usize
    }

    fn parse(s: &str) -> Option<Axis> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X" => Some(Axis::X),
            "Y" => Some(Axis::Y),
            "Z" => Some(Axis::Z),
            _ => None,
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModuleKind {
    CircuitElement { power: f64, conductivity: f64 },
    HeatRemoval,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleSpec {
    pub id: String,
    pub kind: ModuleKind,
    /// Minimum extents along X, Y and Z.
    pub min: [f64; 3],
    /// Thickness axis.
    pub orientation: Axis,
}

#[derive(Debug, Deserialize)]
struct Row {
    id: String,
    kind: String,
    xmin: f64,
    ymin: f64,
    zmin: f64,
    orientation: String,
    #[serde(rename = "P", default)]
    p: Option<f64>,
    #[serde(rename = "K", default)]
    k: Option<f64>,
}

/// Reads `id,kind,xmin,ymin,zmin,orientation,P,K`; `kind` is `circuit` or `heat`.
pub fn parse_modules(text: &str) -> Result<Vec<ModuleSpec>, FloorplanError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (k, r) in rdr.deserialize().enumerate() {
        let r: Row = r?;
        let row = k + 1;
        let err = |msg: String| FloorplanError::Row { row, msg };
        if !seen.insert(r.id.clone()) {
            return Err(FloorplanError::Duplicate(r.id));
        }
        let orientation =
            Axis::parse(&r.orientation).ok_or_else(|| err(format!("bad orientation `{}`", r.orientation)))?;
        let kind = match r.kind.to_ascii_lowercase().as_str() {
            "circuit" | "circuitelement" | "c" => {
                let (Some(power), Some(conductivity)) = (r.p, r.k) else {
                    return Err(err("circuit elements need P and K".into()));
                };
                if !(power > 0.0 && conductivity > 0.0) {
                    return Err(err("P and K must be positive".into()));
                }
                ModuleKind::CircuitElement { power, conductivity }
            }
            "heat" | "heatremoval" | "h" => ModuleKind::HeatRemoval,
            other => return Err(err(format!("unknown module kind `{other}`"))),
        };
        let min = [r.xmin, r.ymin, r.zmin];
        if !min.iter().all(|v| *v > 0.0 && v.is_finite()) {
            return Err(err("minimum dimensions must be positive".into()));
        }
        out.push(ModuleSpec {
            id: r.id,
            kind,
            min,
            orientation,
        });
    }
    Ok(out)
}

pub fn modules_to_csv(mods: &[ModuleSpec]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "kind", "xmin", "ymin", "zmin", "orientation", "P", "K"])
        .expect("in-memory write");
    for m in mods {
        let (kind, p, k) = match m.kind {
            ModuleKind::CircuitElement { power, conductivity } => {
                ("circuit", format!("{power:e}"), format!("{conductivity:e}"))
            }
            ModuleKind::HeatRemoval => ("heat", String::new(), String::new()),
        };
        let mut rec = vec![m.id.clone(), kind.to_string()];
        rec.extend(m.min.iter().map(|v| format!("{v:e}")));
        rec.extend([m.orientation.to_string(), p, k]);
        w.write_record(rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Module ids may be written as JSON strings or numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum IdRepr {
    Str(String),
    Num(u64),
}

impl IdRepr {
    fn into_string(self) -> String {
        match self {
            IdRepr::Str(s) => s,
            IdRepr::Num(n) => n.to_string(),
        }
    }
}

#[derive(Deserialize)]
struct ArrangementRepr {
    chains: BTreeMap<String, Vec<Vec<IdRepr>>>,
    zmax: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArrangementSpec {
    pub chains: BTreeMap<Axis, Vec<Vec<String>>>,
    pub zmax: f64,
}

impl ArrangementSpec {
    /// `{"chains": {"X": [[ids]...], "Y": ..., "Z": ...}, "zmax": v}`.
    pub fn from_json(text: &str) -> Result<Self, FloorplanError> {
        let r: ArrangementRepr = serde_json::from_str(text)?;
        let mut chains = BTreeMap::new();
        for (k, v) in r.chains {
            let axis = Axis::parse(&k).ok_or_else(|| FloorplanError::Arrangement(format!("unknown axis `{k}`")))?;
            let v = v
                .into_iter()
                .map(|c| c.into_iter().map(IdRepr::into_string).collect())
                .collect();
            chains.insert(axis, v);
        }
        if !(r.zmax > 0.0) {
            return Err(FloorplanError::Arrangement(format!("zmax = {} must be positive", r.zmax)));
        }
        Ok(ArrangementSpec { chains, zmax: r.zmax })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn chains(&self, axis: Axis) -> &[Vec<String>] {
        self.chains.get(&axis).map_or(&[], Vec::as_slice)
    }

    pub fn validate(&self, mods: &[ModuleSpec]) -> Result<(), FloorplanError> {
        let ids: HashSet<&str> = mods.iter().map(|m| m.id.as_str()).collect();
        for axis in Axis::ALL {
            let mut covered = HashSet::new();
            for chain in self.chains(axis) {
                if chain.is_empty() {
                    return Err(FloorplanError::Arrangement(format!("empty {axis} chain")));
                }
                let mut here = HashSet::new();
                for id in chain {
                    if !ids.contains(id.as_str()) {
                        return Err(FloorplanError::UnknownModule(id.clone()));
                    }
                    if !here.insert(id.as_str()) {
                        return Err(FloorplanError::RepeatedInChain {
                            module: id.clone(),
                            axis,
                        });
                    }
                    covered.insert(id.as_str());
                }
            }
            if let Some(m) = mods.iter().find(|m| !covered.contains(m.id.as_str())) {
                return Err(FloorplanError::Uncovered {
                    module: m.id.clone(),
                    axis,
                });
            }
        }
        Ok(())
    }
}

/// Variables `x_i, y_i, z_i` per module, then `X, Y, Z`.
pub fn floorplan_vars(mods: &[ModuleSpec]) -> VarRegistry {
    let mut r = VarRegistry::new();
    for m in mods {
        for a in ["x", "y", "z"] {
            r.add(format!("{a}_{}", m.id)).expect("ids are unique");
        }
    }
    for a in ["X", "Y", "Z"] {
        r.add(a).expect("fresh names");
    }
    r
}

pub fn dim_var(module: usize, axis: Axis) -> VarId {
    VarId(3 * module + axis.index())
}

pub fn bound_var(n_modules: usize, axis: Axis) -> VarId {
    VarId(3 * n_modules + axis.index())
}

/// `(P/K)·t·a⁻¹` per module; `None` for heat removal.
pub fn temperature_exprs(mods: &[ModuleSpec]) -> Result<Vec<Option<Monomial>>, FloorplanError> {
    mods.iter()
        .enumerate()
        .map(|(i, m)| match m.kind {
            ModuleKind::HeatRemoval => Ok(None),
            ModuleKind::CircuitElement { power, conductivity } => {
                let exps = Axis::ALL
                    .map(|a| (dim_var(i, a), if a == m.orientation { 1.0 } else { -1.0 }));
                Ok(Some(Monomial::new(power / conductivity, exps)?))
            }
        })
        .collect()
}

/// `(lhs, axis)` per axis: the Max over chain sums bounded by the axis variable.
pub fn bounding_constraints(
    mods: &[ModuleSpec],
    arr: &ArrangementSpec,
) -> Result<Vec<(GenExpr, Axis)>, FloorplanError> {
    arr.validate(mods)?;
    let index: HashMap<&str, usize> = mods.iter().enumerate().map(|(i, m)| (m.id.as_str(), i)).collect();
    let mut out = Vec::new();
    for axis in Axis::ALL {
        let sums: Vec<GenExpr> = arr
            .chains(axis)
            .iter()
            .map(|chain| {
                Posynomial::from_terms(chain.iter().map(|id| Monomial::var(dim_var(index[id.as_str()], axis))))
                    .map(GenExpr::from)
            })
            .collect::<Result<_, _>>()?;
        out.push((GenExpr::max(sums)?, axis));
    }
    Ok(out)
}

fn objective(mods: &[ModuleSpec], alpha: f64) -> Result<Posynomial, FloorplanError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(FloorplanError::Alpha(alpha));
    }
    let n = mods.len();
    let mut terms = Vec::new();
    if alpha > 0.0 {
        terms.push(Monomial::new(alpha, Axis::ALL.map(|a| (bound_var(n, a), 1.0)))?);
    }
    if alpha < 1.0 {
        for t in temperature_exprs(mods)?.into_iter().flatten() {
            terms.push(t.scale(1.0 - alpha)?);
        }
    }
    if terms.is_empty() {
        return Err(FloorplanError::EmptyObjective);
    }
    Ok(Posynomial::from_terms(terms)?)
}

pub fn build_floorplan_ggp(
    mods: &[ModuleSpec],
    arr: &ArrangementSpec,
    alpha: f64,
) -> Result<GgpProblem, FloorplanError> {
    let n = mods.len();
    let mut p = GgpProblem::new(floorplan_vars(mods), objective(mods, alpha)?);
    for (i, m) in mods.iter().enumerate() {
        for a in Axis::ALL {
            p.add_ge(
                Monomial::var(dim_var(i, a)),
                Monomial::constant(m.min[a.index()])?,
                format!("{}min:{}", a.to_string().to_lowercase(), m.id),
            );
        }
    }
    p.add_le(Monomial::var(bound_var(n, Axis::Z)), Monomial::constant(arr.zmax)?, "zmax");
    for (lhs, axis) in bounding_constraints(mods, arr)? {
        p.add_le(lhs, Monomial::var(bound_var(n, axis)), format!("bound:{axis}"));
    }
    Ok(p)
}

/// Every module at its minima and the bounding box as small as the chains allow.
pub fn all_min_point(mods: &[ModuleSpec], arr: &ArrangementSpec) -> Vec<f64> {
    let n = mods.len();
    let index: HashMap<&str, usize> = mods.iter().enumerate().map(|(i, m)| (m.id.as_str(), i)).collect();
    let mut x = vec![0.0; 3 * n + 3];
    for (i, m) in mods.iter().enumerate() {
        for a in Axis::ALL {
            x[dim_var(i, a).index()] = m.min[a.index()];
        }
    }
    for a in Axis::ALL {
        x[bound_var(n, a).index()] = arr
            .chains(a)
            .iter()
            .map(|c| c.iter().map(|id| mods[index[id.as_str()]].min[a.index()]).sum::<f64>())
            .fold(0.0, f64::max);
    }
    x
}

/// Objective evaluated numerically at a full point.
pub fn objective_at(mods: &[ModuleSpec], alpha: f64, x: &[f64]) -> f64 {
    let n = mods.len();
    let vol: f64 = Axis::ALL.iter().map(|&a| x[bound_var(n, a).index()]).product();
    alpha * vol + (1.0 - alpha) * temperatures(mods, x).iter().sum::<f64>()
}

/// Module temperatures at a full point, zero for heat removal.
pub fn temperatures(mods: &[ModuleSpec], x: &[f64]) -> Vec<f64> {
    mods.iter()
        .enumerate()
        .map(|(i, m)| match m.kind {
            ModuleKind::HeatRemoval => 0.0,
            ModuleKind::CircuitElement { power, conductivity } => {
                let mut v = power / conductivity;
                for a in Axis::ALL {
                    let d = x[dim_var(i, a).index()];
                    v *= if a == m.orientation { d } else { 1.0 / d };
                }
                v
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct FloorplanSolution {
    pub dims: Vec<[f64; 3]>,
    pub bounds: [f64; 3],
    pub temperatures: Vec<f64>,
    pub objective: f64,
    pub raw: GgpSolution,
}

pub fn solve_floorplan(
    mods: &[ModuleSpec],
    arr: &ArrangementSpec,
    alpha: f64,
    cfg: &SolverConfig,
) -> Result<FloorplanSolution, FloorplanError> {
    let p = build_floorplan_ggp(mods, arr, alpha)?;
    let raw = solve_ggp(&p, cfg)?;
    let n = mods.len();
    let dims = (0..n).map(|i| Axis::ALL.map(|a| raw.x[dim_var(i, a).index()])).collect();
    let bounds = Axis::ALL.map(|a| raw.x[bound_var(n, a).index()]);
    Ok(FloorplanSolution {
        dims,
        bounds,
        temperatures: temperatures(mods, &raw.x),
        objective: raw.objective_value,
        raw,
    })
}

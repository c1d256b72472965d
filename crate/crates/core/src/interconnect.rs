// SPDX-License-Identifier: Apache-2.0

//! Interconnect sizing on RC trees of π segments under the Elmore delay model.

use std::collections::HashMap;

use serde::Deserialize;
use thiserror::Error;

use crate::expr::{GenExpr, ModelError, Monomial, Posynomial, VarId, VarRegistry};
use crate::problem::GgpProblem;
use crate::solver::{solve_ggp, GgpSolution, SolverConfig, SolverError, Status};

/// Slack at or below which a constraint is reported as binding.
pub const BINDING_SLACK: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },
    #[error("segment `{0}` is defined twice")]
    Duplicate(String),
    #[error("segment `{id}` has unknown parent `{parent}`")]
    Orphan { id: String, parent: String },
    #[error("cycle through segment `{0}`")]
    Cycle(String),
    #[error("the tree has no segments")]
    Empty,
    #[error("segment `{0}` is not a leaf")]
    NotLeaf(String),
    #[error("infeasible: vol_max = {vol_max} is below the minimum volume {min_volume}")]
    VolumeInfeasible { vol_max: f64, min_volume: f64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub id: String,
    pub parent: Option<usize>,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub c_load: f64,
    pub wmin: f64,
    pub wmax: f64,
    pub lmin: f64,
    pub lmax: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RcTree {
    segments: Vec<Segment>,
    children: Vec<Vec<usize>>,
    /// Segments listed parents first.
    order: Vec<usize>,
    /// Drive resistance of the source.
    pub r0: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct Row {
    id: String,
    parent: String,
    alpha: f64,
    beta: f64,
    gamma: f64,
    c_load: f64,
    wmin: f64,
    wmax: f64,
    lmin: f64,
    lmax: f64,
}

fn is_root_marker(s: &str) -> bool {
    s.is_empty() || s == "-" || s.eq_ignore_ascii_case("root")
}

impl RcTree {
    /// Segments may be listed in any order; `parent` names another segment or the root.
    pub fn new(
        rows: Vec<(String, Option<String>, [f64; 8])>,
        r0: Option<f64>,
    ) -> Result<Self, TreeError> {
        if rows.is_empty() {
            return Err(TreeError::Empty);
        }
        let mut index = HashMap::new();
        for (k, (id, _, _)) in rows.iter().enumerate() {
            if index.insert(id.clone(), k).is_some() {
                return Err(TreeError::Duplicate(id.clone()));
            }
        }
        let mut segments = Vec::with_capacity(rows.len());
        for (k, (id, parent, v)) in rows.into_iter().enumerate() {
            let row = k + 1;
            let [alpha, beta, gamma, c_load, wmin, wmax, lmin, lmax] = v;
            for (name, x) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("wmin", wmin), ("lmin", lmin)] {
                if !(x > 0.0 && x.is_finite()) {
                    return Err(TreeError::Row {
                        row,
                        msg: format!("{name} = {x} must be positive"),
                    });
                }
            }
            if !(c_load >= 0.0 && c_load.is_finite()) {
                return Err(TreeError::Row {
                    row,
                    msg: format!("c_load = {c_load} must be nonnegative"),
                });
            }
            if !(wmax >= wmin) || !(lmax >= lmin) {
                return Err(TreeError::Row {
                    row,
                    msg: "bounds must satisfy min <= max".into(),
                });
            }
            let parent = match parent {
                None => None,
                Some(p) => Some(*index.get(&p).ok_or_else(|| TreeError::Orphan {
                    id: id.clone(),
                    parent: p.clone(),
                })?),
            };
            segments.push(Segment {
                id,
                parent,
                alpha,
                beta,
                gamma,
                c_load,
                wmin,
                wmax,
                lmin,
                lmax,
            });
        }
        if let Some(r) = r0 {
            if !(r > 0.0 && r.is_finite()) {
                return Err(TreeError::Row {
                    row: 0,
                    msg: format!("r0 = {r} must be positive"),
                });
            }
        }
        let mut children = vec![Vec::new(); segments.len()];
        for (i, s) in segments.iter().enumerate() {
            if let Some(p) = s.parent {
                children[p].push(i);
            }
        }
        let mut order = Vec::with_capacity(segments.len());
        let mut stack: Vec<usize> = (0..segments.len()).filter(|&i| segments[i].parent.is_none()).rev().collect();
        while let Some(i) = stack.pop() {
            order.push(i);
            stack.extend(children[i].iter().rev());
        }
        if order.len() != segments.len() {
            let mut seen = vec![false; segments.len()];
            order.iter().for_each(|&i| seen[i] = true);
            let bad = (0..segments.len()).find(|&i| !seen[i]).unwrap();
            return Err(TreeError::Cycle(segments[bad].id.clone()));
        }
        Ok(RcTree {
            segments,
            children,
            order,
            r0,
        })
    }

    /// Reads `id,parent,alpha,beta,gamma,c_load,wmin,wmax,lmin,lmax`.
    pub fn from_csv(text: &str, r0: Option<f64>) -> Result<Self, TreeError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for r in rdr.deserialize() {
            let r: Row = r?;
            let parent = (!is_root_marker(&r.parent)).then_some(r.parent);
            rows.push((
                r.id,
                parent,
                [r.alpha, r.beta, r.gamma, r.c_load, r.wmin, r.wmax, r.lmin, r.lmax],
            ));
        }
        RcTree::new(rows, r0)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "parent", "alpha", "beta", "gamma", "c_load", "wmin", "wmax", "lmin", "lmax"])
            .expect("in-memory write");
        for s in &self.segments {
            let parent = s.parent.map_or("root".to_string(), |p| self.segments[p].id.clone());
            let mut rec = vec![s.id.clone(), parent];
            rec.extend(
                [s.alpha, s.beta, s.gamma, s.c_load, s.wmin, s.wmax, s.lmin, s.lmax]
                    .iter()
                    .map(|v| format!("{v:e}")),
            );
            w.write_record(rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment_mut(&mut self, i: usize) -> &mut Segment {
        &mut self.segments[i]
    }

    pub fn index(&self, id: &str) -> Option<usize> {
        self.segments.iter().position(|s| s.id == id)
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.children[i].is_empty()).collect()
    }

    /// Segments from the root down to `i`.
    pub fn root_path(&self, i: usize) -> Vec<usize> {
        let mut p = vec![i];
        let mut cur = i;
        while let Some(q) = self.segments[cur].parent {
            p.push(q);
            cur = q;
        }
        p.reverse();
        p
    }

    /// `i` and every segment below it.
    pub fn downstream(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(j) = stack.pop() {
            out.push(j);
            stack.extend(self.children[j].iter().rev());
        }
        out.sort_unstable();
        out
    }

    pub fn min_volume(&self) -> f64 {
        self.segments.iter().map(|s| s.lmin * s.wmin * s.wmin).sum()
    }
}

/// Variables `l_{id}`, `w_{id}` interleaved per segment.
pub fn tree_vars(t: &RcTree) -> VarRegistry {
    let mut r = VarRegistry::new();
    for s in t.segments() {
        r.add(format!("l_{}", s.id)).expect("ids are unique");
        r.add(format!("w_{}", s.id)).expect("ids are unique");
    }
    r
}

pub fn l_var(i: usize) -> VarId {
    VarId(2 * i)
}

pub fn w_var(i: usize) -> VarId {
    VarId(2 * i + 1)
}

#[derive(Clone, Debug)]
pub struct RcExprs {
    pub r: Vec<Monomial>,
    pub c: Vec<Posynomial>,
    pub c_tot: Vec<Posynomial>,
}

pub fn build_rc_exprs(t: &RcTree) -> Result<RcExprs, TreeError> {
    let mut r = Vec::new();
    let mut c = Vec::new();
    for (i, s) in t.segments().iter().enumerate() {
        let (l, w) = (l_var(i), w_var(i));
        r.push(Monomial::new(s.alpha, [(l, 1.0), (w, -1.0)])?);
        c.push(Posynomial::from_terms([
            Monomial::new(s.beta, [(l, 1.0), (w, 1.0)])?,
            Monomial::new(s.gamma, [(l, 1.0)])?,
        ])?);
    }
    let mut c_tot = Vec::new();
    for (i, s) in t.segments().iter().enumerate() {
        let mut p = c[i].clone();
        if s.c_load > 0.0 {
            p = p.add(&Posynomial::constant(s.c_load)?);
        }
        for &j in t.children(i) {
            p = p.add(&c[j]);
        }
        c_tot.push(p);
    }
    Ok(RcExprs { r, c, c_tot })
}

fn sum_posy<'a>(items: impl IntoIterator<Item = &'a Posynomial>) -> Posynomial {
    let terms: Vec<Monomial> = items.into_iter().flat_map(|p| p.terms().iter().cloned()).collect();
    Posynomial::from_terms(terms).expect("nonempty sum")
}

/// Elmore delay from the source to `leaf` as a posynomial in all `l`, `w`.
pub fn elmore_delay_expr(t: &RcTree, ex: &RcExprs, leaf: usize) -> Result<Posynomial, TreeError> {
    if !t.children(leaf).is_empty() {
        return Err(TreeError::NotLeaf(t.segments()[leaf].id.clone()));
    }
    let mut terms = Vec::new();
    for j in t.root_path(leaf) {
        let down = sum_posy(t.downstream(j).iter().map(|&k| &ex.c_tot[k]));
        terms.extend(down.mul_monomial(&ex.r[j]).terms().iter().cloned());
    }
    if let Some(r0) = t.r0 {
        terms.extend(sum_posy(&ex.c_tot).scale(r0)?.terms().iter().cloned());
    }
    Ok(Posynomial::from_terms(terms)?)
}

/// The same delay by direct traversal of concrete lengths and widths.
pub fn elmore_delay_numeric(t: &RcTree, l: &[f64], w: &[f64], leaf: usize) -> Result<f64, TreeError> {
    if !t.children(leaf).is_empty() {
        return Err(TreeError::NotLeaf(t.segments()[leaf].id.clone()));
    }
    let segs = t.segments();
    let cap: Vec<f64> = (0..t.len()).map(|i| segs[i].beta * l[i] * w[i] + segs[i].gamma * l[i]).collect();
    let c_tot: Vec<f64> = (0..t.len())
        .map(|i| segs[i].c_load + cap[i] + t.children(i).iter().map(|&j| cap[j]).sum::<f64>())
        .collect();
    // Downstream sums, accumulated children first.
    let mut below = c_tot.clone();
    for &i in t.order.iter().rev() {
        if let Some(p) = segs[i].parent {
            below[p] += below[i];
        }
    }
    let mut d = 0.0;
    let mut cur = Some(leaf);
    while let Some(j) = cur {
        d += segs[j].alpha * l[j] / w[j] * below[j];
        cur = segs[j].parent;
    }
    if let Some(r0) = t.r0 {
        d += r0 * c_tot.iter().sum::<f64>();
    }
    Ok(d)
}

pub fn build_interconnect_ggp(t: &RcTree, vol_max: f64) -> Result<GgpProblem, TreeError> {
    if !(vol_max > 0.0) {
        return Err(TreeError::VolumeInfeasible {
            vol_max,
            min_volume: t.min_volume(),
        });
    }
    if vol_max < t.min_volume() {
        return Err(TreeError::VolumeInfeasible {
            vol_max,
            min_volume: t.min_volume(),
        });
    }
    let ex = build_rc_exprs(t)?;
    let leaves: Vec<GenExpr> = t
        .leaves()
        .into_iter()
        .map(|i| elmore_delay_expr(t, &ex, i).map(GenExpr::from))
        .collect::<Result<_, _>>()?;
    let mut p = GgpProblem::new(tree_vars(t), GenExpr::max(leaves)?);
    for (i, s) in t.segments().iter().enumerate() {
        for (v, lo, hi, name) in [(l_var(i), s.lmin, s.lmax, "l"), (w_var(i), s.wmin, s.wmax, "w")] {
            let m = Monomial::var(v);
            if lo == hi {
                p.add_eq(m, Monomial::constant(lo)?, format!("{name}_fix:{}", s.id));
            } else {
                p.add_ge(m.clone(), Monomial::constant(lo)?, format!("{name}_min:{}", s.id));
                if hi.is_finite() {
                    p.add_le(m, Monomial::constant(hi)?, format!("{name}_max:{}", s.id));
                }
            }
        }
    }
    if vol_max.is_finite() {
        let vol = Posynomial::from_terms(
            (0..t.len())
                .map(|i| Monomial::new(1.0, [(l_var(i), 1.0), (w_var(i), 2.0)]))
                .collect::<Result<Vec<_>, _>>()?,
        )?;
        p.add_le(vol, Monomial::constant(vol_max)?, "volume");
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binding {
    pub label: String,
    pub slack: f64,
    pub binding: bool,
}

#[derive(Clone, Debug)]
pub struct InterconnectSolution {
    pub status: Status,
    pub l: Vec<f64>,
    pub w: Vec<f64>,
    pub leaf_delays: Vec<(String, f64)>,
    pub worst: f64,
    pub constraints: Vec<Binding>,
    pub raw: GgpSolution,
}

impl InterconnectSolution {
    pub fn binding(&self) -> impl Iterator<Item = &Binding> {
        self.constraints.iter().filter(|b| b.binding)
    }
}

pub fn solve_interconnect(
    t: &RcTree,
    vol_max: f64,
    cfg: &SolverConfig,
) -> Result<InterconnectSolution, TreeError> {
    let p = build_interconnect_ggp(t, vol_max)?;
    let raw = solve_ggp(&p, cfg)?;
    let l: Vec<f64> = (0..t.len()).map(|i| raw.x[2 * i]).collect();
    let w: Vec<f64> = (0..t.len()).map(|i| raw.x[2 * i + 1]).collect();
    let leaf_delays: Vec<(String, f64)> = t
        .leaves()
        .into_iter()
        .map(|i| Ok((t.segments()[i].id.clone(), elmore_delay_numeric(t, &l, &w, i)?)))
        .collect::<Result<_, TreeError>>()?;
    let worst = leaf_delays.iter().map(|d| d.1).fold(0.0, f64::max);
    let constraints = p
        .inequality_slacks(&raw.x)?
        .into_iter()
        .map(|(label, slack)| Binding {
            label,
            slack,
            binding: slack <= BINDING_SLACK,
        })
        .collect();
    Ok(InterconnectSolution {
        status: raw.status,
        l,
        w,
        leaf_delays,
        worst,
        constraints,
        raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(id: &str, parent: Option<&str>) -> (String, Option<String>, [f64; 8]) {
        (id.into(), parent.map(String::from), [1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 2.0])
    }

    fn branching() -> RcTree {
        RcTree::new(
            vec![
                seg("1", None),
                seg("2", Some("1")),
                seg("3", Some("2")),
                seg("4", Some("2")),
                seg("5", Some("1")),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn branching_sets() {
        let t = branching();
        let ids = |v: Vec<usize>| -> Vec<String> { v.iter().map(|&i| t.segments()[i].id.clone()).collect() };
        assert_eq!(ids(t.root_path(4)), ["1", "5"]);
        assert_eq!(ids(t.root_path(3)), ["1", "2", "4"]);
        assert_eq!(ids(t.leaves()), ["3", "4", "5"]);
        assert_eq!(ids(t.downstream(1)), ["2", "3", "4"]);
    }

    #[test]
    fn branching_total_capacitance() {
        let t = branching();
        let ex = build_rc_exprs(&t).unwrap();
        let want = Posynomial::constant(1.0).unwrap().add(&ex.c[0]).add(&ex.c[1]).add(&ex.c[4]);
        assert_eq!(ex.c_tot[0], want);
        let leaf = Posynomial::constant(1.0).unwrap().add(&ex.c[2]);
        assert_eq!(ex.c_tot[2], leaf);
        assert_eq!(ex.r[0].eval(&[1.0; 10]).unwrap(), 1.0);
    }

    #[test]
    fn single_and_chain() {
        let t = RcTree::new(vec![seg("a", None)], None).unwrap();
        assert_eq!(t.leaves(), [0]);
        assert_eq!(t.downstream(0), [0]);
        let t = RcTree::new(vec![seg("a", None), seg("b", Some("a"))], None).unwrap();
        assert_eq!(t.downstream(0), [0, 1]);
        assert!(matches!(
            elmore_delay_numeric(&t, &[1.0; 2], &[1.0; 2], 0),
            Err(TreeError::NotLeaf(_))
        ));
    }

    #[test]
    fn chain_delay_by_hand() {
        // R = 1 and C_tot = 1 on both segments: alpha = 1, c_load chosen so the totals are one.
        let rows = vec![
            ("a".to_string(), None, [1.0, 0.25, 0.25, 0.0, 1.0, 1.0, 1.0, 1.0]),
            ("b".to_string(), Some("a".to_string()), [1.0, 0.25, 0.25, 0.5, 1.0, 1.0, 1.0, 1.0]),
        ];
        let t = RcTree::new(rows, None).unwrap();
        let d = elmore_delay_numeric(&t, &[1.0; 2], &[1.0; 2], 1).unwrap();
        assert!((d - 3.0).abs() < 1e-15);
        let ex = build_rc_exprs(&t).unwrap();
        assert!((elmore_delay_expr(&t, &ex, 1).unwrap().eval(&[1.0; 4]).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            RcTree::new(vec![seg("a", Some("b"))], None),
            Err(TreeError::Orphan { .. })
        ));
        assert!(matches!(
            RcTree::new(vec![seg("a", Some("b")), seg("b", Some("a"))], None),
            Err(TreeError::Cycle(_))
        ));
        let mut bad = seg("a", None);
        bad.2[0] = 0.0;
        assert!(matches!(RcTree::new(vec![bad], None), Err(TreeError::Row { .. })));
        let t = branching();
        assert!(matches!(
            build_interconnect_ggp(&t, 1.0),
            Err(TreeError::VolumeInfeasible { .. })
        ));
        let p = build_interconnect_ggp(&t, 100.0).unwrap();
        assert_eq!(p.vars.len(), 10);
        assert!(matches!(&p.objective, GenExpr::Max(v) if v.len() == 3));
    }

    #[test]
    fn csv_round_trip() {
        let t = branching();
        assert_eq!(RcTree::from_csv(&t.to_csv(), None).unwrap(), t);
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Generalized geometric programs and their lowering to standard form.

use std::collections::BTreeSet;

use crate::expr::{GenExpr, ModelError, Monomial, Posynomial, VarId, VarRegistry};

/// `lhs <= rhs` with a monomial right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub lhs: GenExpr,
    pub rhs: Monomial,
    pub label: String,
}

/// `lhs == rhs` between monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Equality {
    pub lhs: Monomial,
    pub rhs: Monomial,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GgpProblem {
    pub vars: VarRegistry,
    pub objective: GenExpr,
    pub inequalities: Vec<Inequality>,
    pub equalities: Vec<Equality>,
}

impl GgpProblem {
    pub fn new(vars: VarRegistry, objective: impl Into<GenExpr>) -> Self {
        GgpProblem {
            vars,
            objective: objective.into(),
            inequalities: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn add_le(&mut self, lhs: impl Into<GenExpr>, rhs: Monomial, label: impl Into<String>) {
        self.inequalities.push(Inequality {
            lhs: lhs.into(),
            rhs,
            label: label.into(),
        });
    }

    /// Adds `lo <= m` for a monomial `m`.
    pub fn add_ge(&mut self, m: Monomial, lo: Monomial, label: impl Into<String>) {
        self.add_le(lo, m, label);
    }

    pub fn add_eq(&mut self, lhs: Monomial, rhs: Monomial, label: impl Into<String>) {
        self.equalities.push(Equality {
            lhs,
            rhs,
            label: label.into(),
        });
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut used = BTreeSet::new();
        let named = |node: &str, e: ModelError| ModelError::NotLowerable {
            node: node.to_string(),
            reason: e.to_string(),
        };
        self.objective.validate().map_err(|e| named("objective", e))?;
        self.objective.collect_vars(&mut used);
        for c in &self.inequalities {
            c.lhs.validate().map_err(|e| named(&c.label, e))?;
            c.lhs.collect_vars(&mut used);
            if !c.rhs.is_valid() {
                return Err(ModelError::Invalid(format!("rhs of `{}` is invalid", c.label)));
            }
            used.extend(c.rhs.vars());
        }
        for c in &self.equalities {
            if !c.lhs.is_valid() || !c.rhs.is_valid() {
                return Err(ModelError::Invalid(format!("equality `{}` is invalid", c.label)));
            }
            used.extend(c.lhs.vars());
            used.extend(c.rhs.vars());
        }
        if let Some(v) = used.iter().find(|v| !self.vars.contains(**v)) {
            return Err(ModelError::UnknownVariable(format!("#{}", v.0)));
        }
        Ok(())
    }

    /// Relative slack `1 - lhs(x)/rhs(x)` of every inequality (negative when violated).
    pub fn inequality_slacks(&self, x: &[f64]) -> Result<Vec<(String, f64)>, ModelError> {
        self.inequalities
            .iter()
            .map(|c| Ok((c.label.clone(), 1.0 - c.lhs.eval(x)? / c.rhs.eval(x)?)))
            .collect()
    }
}

/// Where a lowered constraint came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    /// Label of the source constraint, or `objective`.
    pub source: String,
    /// Path of the node inside the source expression.
    pub node: String,
}

/// Standard-form GP: minimize `objective` s.t. `ineq_k <= 1`, `eq_k == 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GpProblem {
    pub vars: VarRegistry,
    /// Number of leading variables that belong to the source problem.
    pub n_source: usize,
    pub objective: Posynomial,
    pub inequalities: Vec<Posynomial>,
    pub equalities: Vec<Monomial>,
    pub aux_vars: Vec<VarId>,
    pub ineq_provenance: Vec<Provenance>,
    pub eq_provenance: Vec<Provenance>,
}

impl GpProblem {
    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }
}

struct Lowering {
    vars: VarRegistry,
    aux: Vec<VarId>,
    ineq: Vec<Posynomial>,
    prov: Vec<Provenance>,
    next_aux: usize,
}

impl Lowering {
    fn fresh(&mut self) -> VarId {
        loop {
            let name = format!("_aux{}", self.next_aux);
            self.next_aux += 1;
            if let Ok(id) = self.vars.add(name) {
                self.aux.push(id);
                return id;
            }
        }
    }

    fn push(&mut self, p: Posynomial, source: &str, node: String) {
        self.ineq.push(p);
        self.prov.push(Provenance {
            source: source.to_string(),
            node,
        });
    }

    /// Posynomial upper model of `e`: `e <= bound` iff `lower(e) <= bound`
    /// together with the side constraints pushed along the way.
    fn lower(&mut self, e: &GenExpr, source: &str, path: &str) -> Result<Posynomial, ModelError> {
        Ok(match e {
            GenExpr::Posy(p) => p.clone(),
            GenExpr::Sum(ch) => {
                let mut acc: Option<Posynomial> = None;
                for (i, c) in ch.iter().enumerate() {
                    let p = self.lower(c, source, &format!("{path}/sum[{i}]"))?;
                    acc = Some(match acc {
                        Some(a) => a.add(&p),
                        None => p,
                    });
                }
                acc.ok_or_else(|| not_lowerable(path, "empty sum"))?
            }
            GenExpr::Prod(ch) => {
                let mut acc: Option<Posynomial> = None;
                for (i, c) in ch.iter().enumerate() {
                    let p = self.lower(c, source, &format!("{path}/prod[{i}]"))?;
                    acc = Some(match acc {
                        Some(a) => a.mul(&p),
                        None => p,
                    });
                }
                acc.ok_or_else(|| not_lowerable(path, "empty product"))?
            }
            GenExpr::Pow(c, p) => {
                let here = format!("{path}/pow");
                let inner = self.lower(c, source, &here)?;
                if let Some(m) = inner.as_monomial() {
                    m.pow(*p).into()
                } else if *p == 1.0 {
                    inner
                } else if *p > 1.0 {
                    let u = self.fresh();
                    self.push(inner.div_monomial(&Monomial::var(u)), source, here);
                    Monomial::var(u).pow(*p).into()
                } else {
                    return Err(not_lowerable(
                        &here,
                        &format!("power {p} of a non-monomial is not a generalized posynomial"),
                    ));
                }
            }
            GenExpr::Max(ch) => {
                if ch.is_empty() {
                    return Err(not_lowerable(path, "empty max"));
                }
                let t = self.fresh();
                let tm = Monomial::var(t);
                for (i, c) in ch.iter().enumerate() {
                    let here = format!("{path}/max[{i}]");
                    let p = self.lower(c, source, &here)?;
                    self.push(p.div_monomial(&tm), source, here);
                }
                tm.into()
            }
        })
    }

    /// `e <= rhs`. A maximum at the top splits into one constraint per branch.
    fn lower_le(
        &mut self,
        e: &GenExpr,
        rhs: &Monomial,
        source: &str,
        path: &str,
    ) -> Result<(), ModelError> {
        if let GenExpr::Max(ch) = e {
            for (i, c) in ch.iter().enumerate() {
                self.lower_le(c, rhs, source, &format!("{path}/max[{i}]"))?;
            }
            return Ok(());
        }
        let p = self.lower(e, source, path)?;
        self.push(p.div_monomial(rhs), source, path.to_string());
        Ok(())
    }
}

fn not_lowerable(node: &str, reason: &str) -> ModelError {
    ModelError::NotLowerable {
        node: node.to_string(),
        reason: reason.to_string(),
    }
}

/// Lower a generalized GP to standard form via epigraph variables.
///
/// `max(f_1..f_k)` nested inside an expression becomes a fresh variable `t`
/// with `f_i / t <= 1`; a maximum at the top of an inequality splits into
/// one constraint per branch. Non-monomial powers `p > 1` get a fresh
/// variable `u` with `f / u <= 1` and contribute `u^p`.
pub fn lower_to_gp(p: &GgpProblem) -> Result<GpProblem, ModelError> {
    p.validate()?;
    let mut l = Lowering {
        vars: p.vars.clone(),
        aux: Vec::new(),
        ineq: Vec::new(),
        prov: Vec::new(),
        next_aux: 0,
    };
    let objective = l.lower(&p.objective, "objective", "objective")?;
    for c in &p.inequalities {
        l.lower_le(&c.lhs, &c.rhs, &c.label, &c.label)?;
    }
    let mut equalities = Vec::new();
    let mut eq_provenance = Vec::new();
    for c in &p.equalities {
        equalities.push(c.lhs.div(&c.rhs));
        eq_provenance.push(Provenance {
            source: c.label.clone(),
            node: c.label.clone(),
        });
    }
    Ok(GpProblem {
        vars: l.vars,
        n_source: p.vars.len(),
        objective,
        inequalities: l.ineq,
        equalities,
        aux_vars: l.aux,
        ineq_provenance: l.prov,
        eq_provenance,
    })
}

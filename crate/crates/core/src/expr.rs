// SPDX-License-Identifier: Apache-2.0

//! Monomials, posynomials and generalized posynomials.
//!
//! All values are immutable once built. Posynomials are kept in a canonical
//! form: terms sorted by exponent vector, with equal exponent vectors merged
//! by adding coefficients. Exponents are rounded to 12 significant digits
//! before comparison so that the canonical form is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Errors raised while building or evaluating expressions and problems.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("coefficient must be positive and finite, got {0}")]
    NonPositiveCoefficient(f64),
    #[error("exponent of variable #{var} is not finite")]
    NonFiniteExponent { var: usize },
    #[error("a posynomial needs at least one term")]
    EmptyPosynomial,
    #[error("`{0}` needs at least one operand")]
    EmptyOperands(&'static str),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable #{0} is not bound by the evaluation point")]
    UnboundVariable(usize),
    #[error("variable #{var} must be positive, got {value}")]
    NonPositiveValue { var: usize, value: f64 },
    #[error("power {p} is not allowed here: {reason}")]
    InvalidPower { p: f64, reason: &'static str },
    #[error("cannot lower `{node}`: {reason}")]
    NotLowerable { node: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

/// Index of an optimization variable inside a [`VarRegistry`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Dense, name-unique table of variables. Indices run `0..len()`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VarRegistry {
    names: Vec<String>,
    lookup: HashMap<String, VarId>,
}

impl VarRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>) -> Result<VarId, ModelError> {
        let name = name.into();
        if self.lookup.contains_key(&name) {
            return Err(ModelError::DuplicateVariable(name));
        }
        let id = VarId(self.names.len());
        self.lookup.insert(name.clone(), id);
        self.names.push(name);
        Ok(id)
    }

    pub fn get(&self, name: &str) -> Option<VarId> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.names[id.0]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, id: VarId) -> bool {
        id.0 < self.names.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (VarId(i), n.as_str()))
    }
}

/// Round to 12 significant digits; integers pass through untouched.
pub(crate) fn round_sig12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { 0.0 } else { v };
    }
    if v == v.round() && v.abs() < 1e12 {
        return v;
    }
    let digits = 11 - v.abs().log10().floor() as i32;
    let r = if (0..=300).contains(&digits) {
        let scale = 10f64.powi(digits);
        (v * scale).round() / scale
    } else {
        v
    };
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn check_point(x: &[f64], var: VarId) -> Result<f64, ModelError> {
    let v = *x.get(var.0).ok_or(ModelError::UnboundVariable(var.0))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ModelError::NonPositiveValue { var: var.0, value: v })
    }
}

/// `c · ∏ x_j^{a_j}` with `c > 0`. Zero exponents are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    coeff: f64,
    exps: BTreeMap<VarId, f64>,
}

type ExpKey = Vec<(usize, u64)>;

impl Monomial {
    pub fn new(
        coeff: f64,
        exps: impl IntoIterator<Item = (VarId, f64)>,
    ) -> Result<Self, ModelError> {
        if !(coeff > 0.0 && coeff.is_finite()) {
            return Err(ModelError::NonPositiveCoefficient(coeff));
        }
        let mut map = BTreeMap::new();
        for (v, e) in exps {
            if !e.is_finite() {
                return Err(ModelError::NonFiniteExponent { var: v.0 });
            }
            *map.entry(v).or_insert(0.0) += e;
        }
        Ok(Self::from_parts(coeff, map))
    }

    fn from_parts(coeff: f64, exps: BTreeMap<VarId, f64>) -> Self {
        let exps = exps
            .into_iter()
            .map(|(v, e)| (v, round_sig12(e)))
            .filter(|&(_, e)| e != 0.0)
            .collect();
        let m = Monomial { coeff, exps };
        debug_assert!(m.coeff > 0.0, "monomial coefficient lost positivity");
        m
    }

    pub fn constant(c: f64) -> Result<Self, ModelError> {
        Self::new(c, [])
    }

    pub fn one() -> Self {
        Monomial {
            coeff: 1.0,
            exps: BTreeMap::new(),
        }
    }

    pub fn var(v: VarId) -> Self {
        Self::from_parts(1.0, BTreeMap::from([(v, 1.0)]))
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn exponents(&self) -> &BTreeMap<VarId, f64> {
        &self.exps
    }

    pub fn exponent(&self, v: VarId) -> f64 {
        self.exps.get(&v).copied().unwrap_or(0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            *exps.entry(v).or_insert(0.0) += e;
        }
        Self::from_parts(self.coeff * other.coeff, exps)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.pow(-1.0))
    }

    /// Monomials are closed under arbitrary real powers.
    pub fn pow(&self, p: f64) -> Monomial {
        let exps = self.exps.iter().map(|(&v, &e)| (v, e * p)).collect();
        Self::from_parts(self.coeff.powf(p), exps)
    }

    pub fn scale(&self, c: f64) -> Result<Monomial, ModelError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(ModelError::NonPositiveCoefficient(c));
        }
        Ok(Self::from_parts(self.coeff * c, self.exps.clone()))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, ModelError> {
        let mut acc = self.coeff;
        for (&v, &e) in &self.exps {
            acc *= check_point(x, v)?.powf(e);
        }
        Ok(acc)
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.exps.keys().copied()
    }

    fn key(&self) -> ExpKey {
        self.exps.iter().map(|(v, e)| (v.0, e.to_bits())).collect()
    }

    pub(crate) fn is_valid(&self) -> bool {
        self.coeff > 0.0 && self.coeff.is_finite() && self.exps.values().all(|e| e.is_finite())
    }
}

/// Sum of monomials with positive coefficients, in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct Posynomial {
    terms: Vec<Monomial>,
}

impl Posynomial {
    pub fn from_terms(terms: impl IntoIterator<Item = Monomial>) -> Result<Self, ModelError> {
        let terms: Vec<Monomial> = terms.into_iter().collect();
        if terms.is_empty() {
            return Err(ModelError::EmptyPosynomial);
        }
        Ok(Self::canonical(terms))
    }

    fn canonical(terms: Vec<Monomial>) -> Self {
        let mut merged: BTreeMap<ExpKey, Monomial> = BTreeMap::new();
        for t in terms {
            match merged.entry(t.key()) {
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    o.get_mut().coeff += t.coeff;
                }
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(t);
                }
            }
        }
        let p = Posynomial {
            terms: merged.into_values().collect(),
        };
        debug_assert!(p.terms.iter().all(|t| t.coeff > 0.0));
        p
    }

    pub fn constant(c: f64) -> Result<Self, ModelError> {
        Ok(Monomial::constant(c)?.into())
    }

    pub fn var(v: VarId) -> Self {
        Monomial::var(v).into()
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_monomial(&self) -> Option<&Monomial> {
        match self.terms.as_slice() {
            [m] => Some(m),
            _ => None,
        }
    }

    pub fn add(&self, other: &Posynomial) -> Posynomial {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::canonical(terms)
    }

    pub fn mul(&self, other: &Posynomial) -> Posynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        Self::canonical(terms)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Posynomial {
        Self::canonical(self.terms.iter().map(|t| t.mul(m)).collect())
    }

    pub fn div_monomial(&self, m: &Monomial) -> Posynomial {
        self.mul_monomial(&m.pow(-1.0))
    }

    pub fn scale(&self, c: f64) -> Result<Posynomial, ModelError> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.scale(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::canonical(terms))
    }

    /// Integer powers of multi-term posynomials expand by repeated
    /// multiplication; single-term posynomials accept any real power.
    pub fn pow(&self, p: f64) -> Result<Posynomial, ModelError> {
        if let Some(m) = self.as_monomial() {
            return Ok(m.pow(p).into());
        }
        if !p.is_finite() || p < 0.0 {
            return Err(ModelError::InvalidPower {
                p,
                reason: "negative powers of multi-term posynomials are not posynomials",
            });
        }
        if p != p.round() {
            return Err(ModelError::InvalidPower {
                p,
                reason: if p < 1.0 {
                    "fractional powers below one of multi-term posynomials are not generalized posynomials"
                } else {
                    "fractional powers of multi-term posynomials are generalized posynomials; use GenExpr::pow"
                },
            });
        }
        let mut acc: Posynomial = Monomial::one().into();
        for _ in 0..(p as u64) {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, ModelError> {
        let mut acc = 0.0;
        for t in &self.terms {
            acc += t.eval(x)?;
        }
        Ok(acc)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.iter().flat_map(|t| t.vars()).collect()
    }

    pub(crate) fn is_valid(&self) -> bool {
        !self.terms.is_empty() && self.terms.iter().all(Monomial::is_valid)
    }
}

impl From<Monomial> for Posynomial {
    fn from(m: Monomial) -> Self {
        Posynomial { terms: vec![m] }
    }
}

impl std::ops::Add for Posynomial {
    type Output = Posynomial;
    fn add(self, rhs: Posynomial) -> Posynomial {
        Posynomial::add(&self, &rhs)
    }
}

impl std::ops::Add<&Posynomial> for &Posynomial {
    type Output = Posynomial;
    fn add(self, rhs: &Posynomial) -> Posynomial {
        Posynomial::add(self, rhs)
    }
}

impl std::ops::Mul for Posynomial {
    type Output = Posynomial;
    fn mul(self, rhs: Posynomial) -> Posynomial {
        Posynomial::mul(&self, &rhs)
    }
}

impl std::ops::Mul<&Posynomial> for &Posynomial {
    type Output = Posynomial;
    fn mul(self, rhs: &Posynomial) -> Posynomial {
        Posynomial::mul(self, rhs)
    }
}

impl std::ops::Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        Monomial::mul(&self, &rhs)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        for (v, e) in &self.exps {
            if *e == 1.0 {
                write!(f, "·v{}", v.0)?;
            } else {
                write!(f, "·v{}^{}", v.0, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Posynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Generalized posynomial expression tree.
///
/// Built from posynomial leaves with sums, products, powers and maxima.
/// `Pow` of a non-monomial child requires `p >= 1`; `Max` requires at least
/// two children. The smart constructors enforce both; [`GenExpr::validate`]
/// rechecks trees built from the raw variants.
#[derive(Clone, Debug, PartialEq)]
pub enum GenExpr {
    Posy(Posynomial),
    Sum(Vec<GenExpr>),
    Prod(Vec<GenExpr>),
    Pow(Box<GenExpr>, f64),
    Max(Vec<GenExpr>),
}

impl From<Posynomial> for GenExpr {
    fn from(p: Posynomial) -> Self {
        GenExpr::Posy(p)
    }
}

impl From<Monomial> for GenExpr {
    fn from(m: Monomial) -> Self {
        GenExpr::Posy(m.into())
    }
}

impl GenExpr {
    pub fn sum(children: Vec<GenExpr>) -> Result<Self, ModelError> {
        match children.len() {
            0 => Err(ModelError::EmptyOperands("sum")),
            1 => Ok(children.into_iter().next().unwrap()),
            _ => Ok(GenExpr::Sum(children)),
        }
    }

    pub fn prod(children: Vec<GenExpr>) -> Result<Self, ModelError> {
        match children.len() {
            0 => Err(ModelError::EmptyOperands("prod")),
            1 => Ok(children.into_iter().next().unwrap()),
            _ => Ok(GenExpr::Prod(children)),
        }
    }

    /// A single-child maximum collapses to the child itself.
    pub fn max(children: Vec<GenExpr>) -> Result<Self, ModelError> {
        match children.len() {
            0 => Err(ModelError::EmptyOperands("max")),
            1 => Ok(children.into_iter().next().unwrap()),
            _ => Ok(GenExpr::Max(children)),
        }
    }

    pub fn pow(child: GenExpr, p: f64) -> Result<Self, ModelError> {
        check_pow(&child, p)?;
        Ok(GenExpr::Pow(Box::new(child), p))
    }

    /// The monomial this expression is structurally equal to, if any.
    pub fn as_monomial(&self) -> Option<Monomial> {
        match self {
            GenExpr::Posy(p) => p.as_monomial().cloned(),
            GenExpr::Prod(ch) => {
                let mut acc = Monomial::one();
                for c in ch {
                    acc = acc.mul(&c.as_monomial()?);
                }
                Some(acc)
            }
            GenExpr::Pow(c, p) => c.as_monomial().map(|m| m.pow(*p)),
            GenExpr::Sum(ch) | GenExpr::Max(ch) if ch.len() == 1 => ch[0].as_monomial(),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, ModelError> {
        Ok(match self {
            GenExpr::Posy(p) => p.eval(x)?,
            GenExpr::Sum(ch) => {
                let mut acc = 0.0;
                for c in ch {
                    acc += c.eval(x)?;
                }
                acc
            }
            GenExpr::Prod(ch) => {
                let mut acc = 1.0;
                for c in ch {
                    acc *= c.eval(x)?;
                }
                acc
            }
            GenExpr::Pow(c, p) => c.eval(x)?.powf(*p),
            GenExpr::Max(ch) => {
                let mut acc = f64::NEG_INFINITY;
                for c in ch {
                    acc = acc.max(c.eval(x)?);
                }
                acc
            }
        })
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            GenExpr::Posy(p) => out.extend(p.terms().iter().flat_map(|t| t.vars())),
            GenExpr::Sum(ch) | GenExpr::Prod(ch) | GenExpr::Max(ch) => {
                ch.iter().for_each(|c| c.collect_vars(out))
            }
            GenExpr::Pow(c, _) => c.collect_vars(out),
        }
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            GenExpr::Posy(p) => {
                if !p.is_valid() {
                    return Err(ModelError::Invalid("posynomial leaf is not valid".into()));
                }
            }
            GenExpr::Sum(ch) | GenExpr::Prod(ch) => {
                if ch.is_empty() {
                    return Err(ModelError::EmptyOperands("sum/prod"));
                }
                for c in ch {
                    c.validate()?;
                }
            }
            GenExpr::Max(ch) => {
                if ch.len() < 2 {
                    return Err(ModelError::Invalid("max needs at least two operands".into()));
                }
                for c in ch {
                    c.validate()?;
                }
            }
            GenExpr::Pow(c, p) => {
                check_pow(c, *p)?;
                c.validate()?;
            }
        }
        Ok(())
    }

    /// Number of `Max` nodes in the tree.
    pub fn max_nodes(&self) -> usize {
        match self {
            GenExpr::Posy(_) => 0,
            GenExpr::Sum(ch) | GenExpr::Prod(ch) => ch.iter().map(GenExpr::max_nodes).sum(),
            GenExpr::Max(ch) => 1 + ch.iter().map(GenExpr::max_nodes).sum::<usize>(),
            GenExpr::Pow(c, _) => c.max_nodes(),
        }
    }
}

fn check_pow(child: &GenExpr, p: f64) -> Result<(), ModelError> {
    if !p.is_finite() {
        return Err(ModelError::InvalidPower {
            p,
            reason: "power must be finite",
        });
    }
    if child.as_monomial().is_none() && p < 1.0 {
        return Err(ModelError::InvalidPower {
            p,
            reason: "non-monomial operands only accept powers >= 1",
        });
    }
    Ok(())
}

// SPDX-License-Identifier: Apache-2.0

//! JSON interchange format for generalized geometric programs.
//!
//! ```json
//! {
//!   "variables": ["x", "y"],
//!   "objective": [{"c": 1, "e": {"x": 1}}, {"c": 1, "e": {"y": 1}}],
//!   "constraints": [
//!     {"name": "amgm", "lhs": {"c": 1, "e": {"x": -1, "y": -1}}, "op": "<=", "rhs": 1}
//!   ]
//! }
//! ```
//!
//! Expressions are one of: a number (constant), a term `{"c", "e"}`, an
//! array of expressions (sum), `{"sum": [...]}`, `{"prod": [...]}`,
//! `{"max": [...]}` or `{"pow": expr, "p": real}`. The schema lives in
//! `docs/problem.schema.json`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::expr::{GenExpr, ModelError, Monomial, Posynomial, VarRegistry};
use crate::problem::GgpProblem;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("{path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ModelError,
    },
}

fn schema(path: &str, msg: impl Into<String>) -> JsonError {
    JsonError::Schema {
        path: path.to_string(),
        msg: msg.into(),
    }
}

fn model(path: &str) -> impl Fn(ModelError) -> JsonError + '_ {
    move |source| JsonError::Model {
        path: path.to_string(),
        source,
    }
}

pub fn parse_problem(text: &str) -> Result<GgpProblem, JsonError> {
    let v: Value = serde_json::from_str(text)?;
    problem_from_value(&v)
}

pub fn problem_from_value(v: &Value) -> Result<GgpProblem, JsonError> {
    let obj = v.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    let mut vars = VarRegistry::new();
    let names = obj
        .get("variables")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("$.variables", "expected an array of names"))?;
    for (i, n) in names.iter().enumerate() {
        let path = format!("$.variables[{i}]");
        let name = n.as_str().ok_or_else(|| schema(&path, "expected a string"))?;
        vars.add(name).map_err(model(&path))?;
    }
    let objective = expr(
        obj.get("objective")
            .ok_or_else(|| schema("$", "missing `objective`"))?,
        &vars,
        "$.objective",
    )?;
    let mut p = GgpProblem::new(vars, objective);
    let empty = Vec::new();
    let cons = match obj.get("constraints") {
        None => &empty,
        Some(c) => c
            .as_array()
            .ok_or_else(|| schema("$.constraints", "expected an array"))?,
    };
    for (i, c) in cons.iter().enumerate() {
        let path = format!("$.constraints[{i}]");
        let c = c.as_object().ok_or_else(|| schema(&path, "expected an object"))?;
        let label = c
            .get("name")
            .and_then(Value::as_str)
            .map(str::to_string)
            .unwrap_or_else(|| format!("c{i}"));
        let field = |k: &str| {
            c.get(k)
                .ok_or_else(|| schema(&path, format!("missing `{k}`")))
        };
        let lhs = expr(field("lhs")?, &p.vars, &format!("{path}.lhs"))?;
        let rhs = expr(field("rhs")?, &p.vars, &format!("{path}.rhs"))?;
        let op = c.get("op").and_then(Value::as_str).unwrap_or("<=");
        let mono = |e: &GenExpr, side: &str| {
            e.as_monomial().ok_or_else(|| JsonError::Model {
                path: format!("{path}.{side}"),
                source: ModelError::NotLowerable {
                    node: format!("{path}.{side}"),
                    reason: format!("`{op}` needs a monomial on this side"),
                },
            })
        };
        match op {
            "<=" => {
                let r = mono(&rhs, "rhs")?;
                p.add_le(lhs, r, label);
            }
            ">=" => {
                let l = mono(&lhs, "lhs")?;
                p.add_le(rhs, l, label);
            }
            "==" | "=" => {
                let l = mono(&lhs, "lhs")?;
                let r = mono(&rhs, "rhs")?;
                p.add_eq(l, r, label);
            }
            other => return Err(schema(&path, format!("unknown op `{other}`"))),
        }
    }
    p.validate().map_err(model("$"))?;
    Ok(p)
}

fn expr(v: &Value, vars: &VarRegistry, path: &str) -> Result<GenExpr, JsonError> {
    match v {
        Value::Number(n) => {
            let c = n.as_f64().unwrap_or(f64::NAN);
            Ok(Monomial::constant(c).map_err(model(path))?.into())
        }
        Value::Array(items) => {
            let ch = items
                .iter()
                .enumerate()
                .map(|(i, it)| expr(it, vars, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            sum_of(ch, path)
        }
        Value::Object(o) => {
            if o.contains_key("c") {
                return term(o, vars, path).map(GenExpr::from);
            }
            let list = |k: &str| -> Result<Vec<GenExpr>, JsonError> {
                let arr = o[k]
                    .as_array()
                    .ok_or_else(|| schema(path, format!("`{k}` expects an array")))?;
                arr.iter()
                    .enumerate()
                    .map(|(i, it)| expr(it, vars, &format!("{path}.{k}[{i}]")))
                    .collect()
            };
            if o.contains_key("sum") {
                sum_of(list("sum")?, path)
            } else if o.contains_key("prod") {
                GenExpr::prod(list("prod")?).map_err(model(path))
            } else if o.contains_key("max") {
                GenExpr::max(list("max")?).map_err(model(path))
            } else if let Some(inner) = o.get("pow") {
                let p = o
                    .get("p")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| schema(path, "`pow` needs a numeric `p`"))?;
                let child = expr(inner, vars, &format!("{path}.pow"))?;
                GenExpr::pow(child, p).map_err(model(path))
            } else {
                Err(schema(path, "unrecognized expression object"))
            }
        }
        _ => Err(schema(path, "expected a number, array or object")),
    }
}

/// Sums of plain posynomials stay a single posynomial leaf.
fn sum_of(ch: Vec<GenExpr>, path: &str) -> Result<GenExpr, JsonError> {
    let leaves: Option<Vec<&Posynomial>> = ch
        .iter()
        .map(|c| match c {
            GenExpr::Posy(p) => Some(p),
            _ => None,
        })
        .collect();
    match leaves {
        Some(ps) if !ps.is_empty() => {
            let mut acc = ps[0].clone();
            for p in &ps[1..] {
                acc = acc.add(p);
            }
            Ok(acc.into())
        }
        _ => GenExpr::sum(ch).map_err(model(path)),
    }
}

fn term(o: &Map<String, Value>, vars: &VarRegistry, path: &str) -> Result<Monomial, JsonError> {
    let c = o
        .get("c")
        .and_then(Value::as_f64)
        .ok_or_else(|| schema(path, "`c` must be a number"))?;
    let mut exps = Vec::new();
    if let Some(e) = o.get("e") {
        let e = e
            .as_object()
            .ok_or_else(|| schema(path, "`e` must map variable names to exponents"))?;
        for (name, val) in e {
            let id = vars
                .get(name)
                .ok_or_else(|| model(path)(ModelError::UnknownVariable(name.clone())))?;
            let a = val
                .as_f64()
                .ok_or_else(|| schema(path, format!("exponent of `{name}` must be a number")))?;
            exps.push((id, a));
        }
    }
    Monomial::new(c, exps).map_err(model(path))
}

fn term_value(m: &Monomial, vars: &VarRegistry) -> Value {
    let mut e = Map::new();
    for (v, a) in m.exponents() {
        e.insert(vars.name(*v).to_string(), json!(a));
    }
    json!({"c": m.coeff(), "e": e})
}

fn expr_value(e: &GenExpr, vars: &VarRegistry) -> Value {
    match e {
        GenExpr::Posy(p) => match p.as_monomial() {
            Some(m) => term_value(m, vars),
            None => Value::Array(p.terms().iter().map(|t| term_value(t, vars)).collect()),
        },
        GenExpr::Sum(ch) => json!({"sum": ch.iter().map(|c| expr_value(c, vars)).collect::<Vec<_>>()}),
        GenExpr::Prod(ch) => json!({"prod": ch.iter().map(|c| expr_value(c, vars)).collect::<Vec<_>>()}),
        GenExpr::Max(ch) => json!({"max": ch.iter().map(|c| expr_value(c, vars)).collect::<Vec<_>>()}),
        GenExpr::Pow(c, p) => json!({"pow": expr_value(c, vars), "p": p}),
    }
}

pub fn problem_to_value(p: &GgpProblem) -> Value {
    let mut cons = Vec::new();
    for c in &p.inequalities {
        cons.push(json!({
            "name": c.label,
            "lhs": expr_value(&c.lhs, &p.vars),
            "op": "<=",
            "rhs": term_value(&c.rhs, &p.vars),
        }));
    }
    for c in &p.equalities {
        cons.push(json!({
            "name": c.label,
            "lhs": term_value(&c.lhs, &p.vars),
            "op": "==",
            "rhs": term_value(&c.rhs, &p.vars),
        }));
    }
    json!({
        "variables": p.vars.iter().map(|(_, n)| n).collect::<Vec<_>>(),
        "objective": expr_value(&p.objective, &p.vars),
        "constraints": cons,
    })
}

pub fn problem_to_string(p: &GgpProblem) -> String {
    serde_json::to_string_pretty(&problem_to_value(p)).expect("problem serializes")
}

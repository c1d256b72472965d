// SPDX-License-Identifier: Apache-2.0

//! Shared oracles for integration and acceptance tests.

#![allow(dead_code)]

use gp3d_core::expr::{GenExpr, Monomial, Posynomial, VarId, VarRegistry};
use gp3d_core::problem::GgpProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn registry(n: usize) -> (VarRegistry, Vec<VarId>) {
    let mut r = VarRegistry::new();
    let ids = (0..n).map(|i| r.add(format!("x{i}")).unwrap()).collect();
    (r, ids)
}

pub fn mono(c: f64, e: &[(VarId, f64)]) -> Monomial {
    Monomial::new(c, e.iter().copied()).unwrap()
}

pub fn konst(c: f64) -> Monomial {
    Monomial::constant(c).unwrap()
}

/// Ten small GPs with closed-form optima: `(name, problem, optimum)`.
pub fn analytic_suite() -> Vec<(&'static str, GgpProblem, f64)> {
    let mut out = Vec::new();

    let (r, v) = registry(2);
    let mut p = GgpProblem::new(r, Posynomial::var(v[0]) + Posynomial::var(v[1]));
    p.add_le(mono(1.0, &[(v[0], -1.0), (v[1], -1.0)]), Monomial::one(), "xy>=1");
    out.push(("am-gm x+y s.t. xy>=1", p, 2.0));

    let (r, v) = registry(1);
    let mut p = GgpProblem::new(r, mono(1.0, &[(v[0], -1.0)]));
    p.add_le(Monomial::var(v[0]), konst(2.0), "x<=2");
    out.push(("1/x s.t. x<=2", p, 0.5));

    let (r, v) = registry(1);
    let mut p = GgpProblem::new(r, Monomial::var(v[0]));
    p.add_ge(Monomial::var(v[0]), konst(3.0), "x>=3");
    out.push(("x s.t. x>=3", p, 3.0));

    let (r, v) = registry(1);
    let obj = GenExpr::max(vec![Monomial::var(v[0]).into(), mono(2.0, &[(v[0], -1.0)]).into()]).unwrap();
    out.push(("max(x, 2/x)", GgpProblem::new(r, obj), 2f64.sqrt()));

    // x + 1/x has its minimum 2 at x = 1.
    let (r, v) = registry(1);
    let obj = Posynomial::var(v[0]) + Posynomial::from(mono(1.0, &[(v[0], -1.0)]));
    out.push(("x + 1/x", GgpProblem::new(r, obj), 2.0));

    // x^2 + 8/x: derivative 2x - 8/x^2 = 0 at x = 4^(1/3).
    let (r, v) = registry(1);
    let obj = Posynomial::from(mono(1.0, &[(v[0], 2.0)])) + Posynomial::from(mono(8.0, &[(v[0], -1.0)]));
    let xs = 4f64.powf(1.0 / 3.0);
    out.push(("x^2 + 8/x", GgpProblem::new(r, obj), xs * xs + 8.0 / xs));

    // Box volume: maximize xyz (minimize 1/(xyz)) with 2(xy + yz + xz) <= 6 gives a unit cube.
    let (r, v) = registry(3);
    let mut p = GgpProblem::new(r, mono(1.0, &[(v[0], -1.0), (v[1], -1.0), (v[2], -1.0)]));
    let area = Posynomial::from_terms([
        mono(2.0, &[(v[0], 1.0), (v[1], 1.0)]),
        mono(2.0, &[(v[1], 1.0), (v[2], 1.0)]),
        mono(2.0, &[(v[0], 1.0), (v[2], 1.0)]),
    ])
    .unwrap();
    p.add_le(area, konst(6.0), "area");
    out.push(("1/(xyz) s.t. surface <= 6", p, 1.0));

    // x + y with x y = 4 (monomial equality).
    let (r, v) = registry(2);
    let mut p = GgpProblem::new(r, Posynomial::var(v[0]) + Posynomial::var(v[1]));
    p.add_eq(mono(1.0, &[(v[0], 1.0), (v[1], 1.0)]), konst(4.0), "xy=4");
    out.push(("x+y s.t. xy=4", p, 4.0));

    // max(x, y) with x y >= 9: optimum 3.
    let (r, v) = registry(2);
    let obj = GenExpr::max(vec![Monomial::var(v[0]).into(), Monomial::var(v[1]).into()]).unwrap();
    let mut p = GgpProblem::new(r, obj);
    p.add_le(mono(9.0, &[(v[0], -1.0), (v[1], -1.0)]), Monomial::one(), "xy>=9");
    out.push(("max(x,y) s.t. xy>=9", p, 3.0));

    // (x + 1)^2 / x is 4 at x = 1; written as pow of a posynomial times 1/x.
    let (r, v) = registry(1);
    let sq = GenExpr::pow((Posynomial::var(v[0]) + Posynomial::constant(1.0).unwrap()).into(), 2.0).unwrap();
    let obj = GenExpr::prod(vec![sq, mono(1.0, &[(v[0], -1.0)]).into()]).unwrap();
    out.push(("(x+1)^2/x", GgpProblem::new(r, obj), 4.0));

    out
}

fn random_posy(rng: &mut ChaCha8Rng, v: &[VarId], max_terms: usize) -> Posynomial {
    let k = rng.gen_range(1..=max_terms);
    let terms: Vec<Monomial> = (0..k)
        .map(|_| {
            let mut e = Vec::new();
            for &id in v {
                if rng.gen_bool(0.7) {
                    e.push((id, (rng.gen_range(-2.0f64..2.0) * 4.0).round() / 4.0));
                }
            }
            mono(rng.gen_range(0.2..5.0), &e)
        })
        .collect();
    Posynomial::from_terms(terms).unwrap()
}

/// Posynomial scaled to take the value `u` at `x = 1`.
fn at_one(rng: &mut ChaCha8Rng, v: &[VarId], u: f64) -> Posynomial {
    let p = random_posy(rng, v, 3);
    let ones = vec![1.0; v.len()];
    let s = u / p.eval(&ones).unwrap();
    p.scale(s).unwrap()
}

pub const BOX_LO: f64 = 0.1;
pub const BOX_HI: f64 = 10.0;

/// Random GGP over at most three variables inside the box `[0.1, 10]^n`,
/// with at most two max nodes and `x = 1` strictly feasible.
pub fn random_small_ggp(seed: u64) -> GgpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let (r, v) = registry(n);
    let mut max_budget = 2;
    let objective: GenExpr = match rng.gen_range(0..4) {
        0 => random_posy(&mut rng, &v, 4).into(),
        1 => {
            max_budget -= 1;
            GenExpr::max(vec![
                random_posy(&mut rng, &v, 3).into(),
                random_posy(&mut rng, &v, 3).into(),
            ])
            .unwrap()
        }
        2 => {
            max_budget -= 1;
            let m = GenExpr::max(vec![
                random_posy(&mut rng, &v, 2).into(),
                random_posy(&mut rng, &v, 2).into(),
            ])
            .unwrap();
            GenExpr::sum(vec![m, random_posy(&mut rng, &v, 2).into()]).unwrap()
        }
        _ => {
            let p = rng.gen_range(1.0..2.5);
            let base = GenExpr::pow(random_posy(&mut rng, &v, 2).into(), p).unwrap();
            GenExpr::sum(vec![base, random_posy(&mut rng, &v, 2).into()]).unwrap()
        }
    };
    let mut p = GgpProblem::new(r, objective);
    for &id in &v {
        p.add_le(Monomial::var(id), konst(BOX_HI), format!("{}<=hi", id.0));
        p.add_ge(Monomial::var(id), konst(BOX_LO), format!("{}>=lo", id.0));
    }
    let ncons = rng.gen_range(1..=2);
    for c in 0..ncons {
        let lhs: GenExpr = if max_budget > 0 && rng.gen_bool(0.5) {
            max_budget -= 1;
            let u1 = rng.gen_range(0.2..0.9);
            let u2 = rng.gen_range(0.2..0.9);
            GenExpr::max(vec![at_one(&mut rng, &v, u1).into(), at_one(&mut rng, &v, u2).into()]).unwrap()
        } else {
            let u = rng.gen_range(0.2..0.9);
            at_one(&mut rng, &v, u).into()
        };
        p.add_le(lhs, Monomial::one(), format!("c{c}"));
    }
    p
}

fn feasible(p: &GgpProblem, x: &[f64]) -> bool {
    p.inequalities.iter().all(|c| {
        let l = c.lhs.eval(x).unwrap();
        let r = c.rhs.eval(x).unwrap();
        l <= r * (1.0 + 1e-10)
    })
}

/// Exact-penalty merit in log space: `log f + ρ·max(0, max_i log(lhs_i/rhs_i))`.
/// Both parts are convex in `y = log x`, so the merit is too.
fn merit(p: &GgpProblem, y: &[f64]) -> f64 {
    let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    let viol = p
        .inequalities
        .iter()
        .map(|c| (c.lhs.eval(&x).unwrap() / c.rhs.eval(&x).unwrap()).ln())
        .fold(0.0, f64::max);
    p.objective.eval(&x).unwrap().ln() + 1e4 * viol
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a convex function of one variable.
fn golden(f: &mut dyn FnMut(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Partial minimization over the trailing coordinates stays convex, so the
/// box minimum is found by nesting one golden search per coordinate.
fn nested(p: &GgpProblem, prefix: &mut Vec<f64>, lo: &[f64], hi: &[f64]) -> (f64, Vec<f64>) {
    let j = prefix.len();
    let n = lo.len();
    let mut best = (f64::INFINITY, Vec::new());
    let mut eval = |t: f64| {
        prefix.push(t);
        let (v, y) = if j + 1 == n {
            (merit(p, prefix), prefix.clone())
        } else {
            nested(p, prefix, lo, hi)
        };
        prefix.pop();
        if v < best.0 {
            best = (v, y);
        }
        v
    };
    golden(&mut eval, lo[j], hi[j], 55);
    best
}

fn lattice(lo: &[f64], hi: &[f64], k: usize) -> Vec<Vec<f64>> {
    let n = lo.len();
    let mut pts = vec![vec![]];
    for j in 0..n {
        let mut next = Vec::with_capacity(pts.len() * k);
        for p in &pts {
            for i in 0..k {
                let mut q = p.clone();
                q.push(lo[j] + (hi[j] - lo[j]) * i as f64 / (k - 1) as f64);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// Brute-force optimum over the box: the best feasible point of a
/// log-spaced lattice, refined by nested golden-section search of the
/// exact-penalty merit. Returns `(objective, x)` of the better feasible point.
pub fn grid_oracle(p: &GgpProblem) -> Option<(f64, Vec<f64>)> {
    let n = p.vars.len();
    let lo = vec![BOX_LO.ln(); n];
    let hi = vec![BOX_HI.ln(); n];
    let k = match n {
        1 => 2001,
        2 => 201,
        _ => 41,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        if feasible(p, &x) {
            let f = p.objective.eval(&x).unwrap();
            if best.as_ref().is_none_or(|b| f < b.0) {
                best = Some((f, x));
            }
        }
    };
    for y in lattice(&lo, &hi, k) {
        consider(y.iter().map(|v| v.exp()).collect());
    }
    let (_, y) = nested(p, &mut Vec::new(), &lo, &hi);
    consider(y.iter().map(|v| v.exp()).collect());
    best
}

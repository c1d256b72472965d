// SPDX-License-Identifier: Apache-2.0

//! Barrier interior-point solver for geometric programs in log form.
//!
//! A GP is transformed with `y = log x` into minimize `F_0(y)` subject to
//! `F_i(y) <= 0` and `A y = b`, with every `F` a log-sum-exp of affine
//! functions. The solver runs a phase-I search for a strictly feasible
//! point, follows the central path with equality-constrained Newton steps,
//! and certifies the result through recomputed KKT residuals.

mod barrier;
mod linalg;
mod logdomain;

use serde::Serialize;
use thiserror::Error;

use crate::expr::ModelError;
use crate::problem::{lower_to_gp, GgpProblem, GpProblem};

pub use logdomain::{to_log_domain, LogConvexProblem, LseBlock, LseEval};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("KKT certification requires an Optimal solution, got {0:?}")]
    NotOptimal(Status),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub barrier_mu: f64,
    pub t0: f64,
    /// Stop centering when half the squared Newton decrement drops below this.
    pub newton_tol: f64,
    /// Absolute bound on `m / t`.
    pub duality_gap_tol: f64,
    /// Newton steps allowed per centering.
    pub max_newton: usize,
    pub max_outer: usize,
    pub ls_alpha: f64,
    pub ls_beta: f64,
    /// Phase I returns points with every `F_i <= -feasibility_margin`.
    pub feasibility_margin: f64,
    /// Largest `max F_i` accepted in an Optimal certificate.
    pub primal_tol: f64,
    pub equality_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            barrier_mu: 10.0,
            t0: 1.0,
            newton_tol: 1e-10,
            duality_gap_tol: 1e-8,
            max_newton: 200,
            max_outer: 100,
            ls_alpha: 0.25,
            ls_beta: 0.5,
            feasibility_margin: 1e-9,
            primal_tol: 1e-8,
            equality_tol: 1e-9,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let positive = [
            ("t0", self.t0),
            ("newton_tol", self.newton_tol),
            ("duality_gap_tol", self.duality_gap_tol),
            ("feasibility_margin", self.feasibility_margin),
            ("primal_tol", self.primal_tol),
            ("equality_tol", self.equality_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolverError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.barrier_mu > 1.0 && self.barrier_mu.is_finite()) {
            return Err(SolverError::Config(format!(
                "barrier_mu must exceed 1, got {}",
                self.barrier_mu
            )));
        }
        if !(self.ls_alpha > 0.0 && self.ls_alpha < 0.5) {
            return Err(SolverError::Config(format!(
                "ls_alpha must lie in (0, 0.5), got {}",
                self.ls_alpha
            )));
        }
        if !(self.ls_beta > 0.0 && self.ls_beta < 1.0) {
            return Err(SolverError::Config(format!(
                "ls_beta must lie in (0, 1), got {}",
                self.ls_beta
            )));
        }
        if self.max_newton == 0 || self.max_outer == 0 {
            return Err(SolverError::Config("iteration limits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iteration_limit",
            Status::NumericalFailure => "numerical_failure",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KktResiduals {
    /// `max_i F_i(y)`; `-inf` without inequalities.
    pub primal_residual: f64,
    /// `‖A y − b‖∞` on the unreduced equality system.
    pub equality_residual: f64,
    /// `m / t` at the last centering.
    pub duality_gap: f64,
}

/// One outer (centering) iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OuterRecord {
    pub t: f64,
    pub gap: f64,
    pub newton_steps: usize,
    /// Log-domain objective after centering.
    pub objective: f64,
    /// Barrier merit before the first step and after every accepted step.
    pub merits: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub status: Status,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub objective_value: f64,
    pub kkt: KktResiduals,
    /// Newton steps, phase I included.
    pub iterations: usize,
    pub phase1_iterations: usize,
    pub t_final: f64,
    pub trace: Vec<OuterRecord>,
}

/// Outcome of the phase-I search.
#[derive(Clone, Debug, PartialEq)]
pub enum Phase1 {
    /// Every `F_i(y) <= -feasibility_margin`.
    Strict(Vec<f64>),
    /// The feasible set has (numerically) empty interior; `max F_i(y) <= primal_tol / 2`.
    Weak(Vec<f64>),
    /// The smallest achievable `max F_i` exceeds `primal_tol / 2`.
    Infeasible { y: Vec<f64>, s: f64 },
    Failed(Status),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phase1Result {
    pub outcome: Phase1,
    pub iterations: usize,
}

/// Finds a strictly feasible point by minimizing a slack `s` subject to
/// `F_i(y) <= s`, `s >= -1`, `A y = b` and a log-domain box around the start.
pub fn phase1(p: &LogConvexProblem, cfg: &SolverConfig) -> Phase1Result {
    let Some(eq) = linalg::reduce_equalities(&p.eq_a, &p.eq_b) else {
        return Phase1Result {
            outcome: Phase1::Infeasible {
                y: vec![0.0; p.n],
                s: f64::INFINITY,
            },
            iterations: 0,
        };
    };
    let y0: Vec<f64> = eq.y0.iter().copied().collect();
    let reduced = p.clone().with_equalities(eq.a, eq.b);
    phase1_reduced(&reduced, y0, cfg)
}

fn phase1_reduced(p: &LogConvexProblem, y0: Vec<f64>, cfg: &SolverConfig) -> Phase1Result {
    if p.max_violation(&y0) < -cfg.feasibility_margin {
        return Phase1Result {
            outcome: Phase1::Strict(y0),
            iterations: 0,
        };
    }
    // The slack problem is bounded only through a box `|y - y0| <= R` in the
    // log domain. `R` starts past the scale of the coefficients and grows when
    // an infeasibility verdict leans on the box.
    let scale = p
        .inequalities
        .iter()
        .flat_map(|b| b.offsets().iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    let mut radius = 10.0 + 2.0 * scale;
    let mut iterations = 0;
    for _ in 0..4 {
        let (outcome, steps, on_box) = phase1_boxed(p, &y0, radius, cfg);
        iterations += steps;
        match outcome {
            Phase1::Infeasible { .. } if on_box => radius *= 8.0,
            outcome => return Phase1Result { outcome, iterations },
        }
    }
    let (outcome, steps, _) = phase1_boxed(p, &y0, radius, cfg);
    Phase1Result {
        outcome,
        iterations: iterations + steps,
    }
}

fn phase1_boxed(
    p: &LogConvexProblem,
    y0: &[f64],
    radius: f64,
    cfg: &SolverConfig,
) -> (Phase1, usize, bool) {
    let n = p.n;
    let f0 = p.max_violation(y0);
    let mut unit = vec![0.0; n + 1];
    unit[n] = 1.0;
    let objective = LseBlock::from_dense_rows(&[(unit.clone(), 0.0)]);
    let mut ineq: Vec<LseBlock> = p.inequalities.iter().map(|b| b.with_column(n, -1.0)).collect();
    unit[n] = -1.0;
    ineq.push(LseBlock::from_dense_rows(&[(unit, -1.0)]));
    for j in 0..n {
        let mut row = vec![0.0; n + 1];
        row[j] = 1.0;
        ineq.push(LseBlock::from_dense_rows(&[(row.clone(), -y0[j] - radius)]));
        row[j] = -1.0;
        ineq.push(LseBlock::from_dense_rows(&[(row, y0[j] - radius)]));
    }
    let a = p.eq_a.clone().insert_column(n, 0.0);
    let aux = LogConvexProblem::new(n + 1, objective, ineq).with_equalities(a, p.eq_b.clone());
    let mut start = y0.to_vec();
    start.push((f0 + 1.0).max(0.0));
    let comfortable = |z: &[f64]| p.max_violation(&z[..n]) <= -0.5;
    let strict = |z: &[f64]| p.max_violation(&z[..n]) < -cfg.feasibility_margin;
    let opts = barrier::Options {
        gap_tol: cfg.duality_gap_tol.min(1e-2 * cfg.primal_tol),
        check_unbounded: false,
        stop_step: Some(&comfortable),
        stop_outer: Some(&strict),
    };
    let run = barrier::run(&aux, start, cfg, &opts);
    let mut y = run.y;
    y.truncate(n);
    let on_box = y.iter().zip(y0).any(|(a, b)| (a - b).abs() >= 0.99 * radius);
    let s = p.max_violation(&y);
    let outcome = match run.exit {
        barrier::Exit::IterationLimit => Phase1::Failed(Status::IterationLimit),
        barrier::Exit::NumericalFailure if s >= -cfg.feasibility_margin => {
            Phase1::Failed(Status::NumericalFailure)
        }
        _ if s < -cfg.feasibility_margin => Phase1::Strict(y),
        _ if s <= 0.5 * cfg.primal_tol => Phase1::Weak(y),
        _ => Phase1::Infeasible { y, s },
    };
    (outcome, run.newton_steps, on_box)
}

fn finish(
    p: &LogConvexProblem,
    status: Status,
    y: Vec<f64>,
    t: f64,
    iterations: usize,
    phase1_iterations: usize,
    trace: Vec<OuterRecord>,
) -> Solution {
    let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    let kkt = residuals(p, &y, t);
    Solution {
        status,
        x,
        objective_value: p.objective.value(&y).exp(),
        y,
        kkt,
        iterations,
        phase1_iterations,
        t_final: t,
        trace,
    }
}

fn residuals(p: &LogConvexProblem, y: &[f64], t: f64) -> KktResiduals {
    KktResiduals {
        primal_residual: p.max_violation(y),
        equality_residual: p.eq_residual(y),
        duality_gap: p.n_ineq() as f64 / t,
    }
}

impl KktResiduals {
    pub fn within(&self, cfg: &SolverConfig) -> bool {
        self.primal_residual <= cfg.primal_tol
            && self.equality_residual <= cfg.equality_tol
            && self.duality_gap <= cfg.duality_gap_tol
    }
}

/// Solves the log-domain problem; phase I runs when `y = 0` (or the
/// minimum-norm equality solution) is not strictly feasible.
pub fn solve(p: &LogConvexProblem, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    cfg.validate()?;
    let n = p.n;
    let Some(eq) = linalg::reduce_equalities(&p.eq_a, &p.eq_b) else {
        return Ok(finish(p, Status::Infeasible, vec![0.0; n], cfg.t0, 0, 0, vec![]));
    };
    let y0: Vec<f64> = eq.y0.iter().copied().collect();
    let reduced = p.clone().with_equalities(eq.a, eq.b);
    let ph = phase1_reduced(&reduced, y0, cfg);
    let (start, target) = match ph.outcome {
        Phase1::Strict(y) => (y, reduced),
        Phase1::Weak(y) => {
            // Empty interior: follow the central path of the set relaxed by
            // just under the primal tolerance.
            let delta = 0.9 * cfg.primal_tol;
            log::debug!("phase I found no interior point; relaxing inequalities by {delta:e}");
            let mut relaxed = reduced;
            relaxed.inequalities = relaxed.inequalities.iter().map(|b| b.shifted(-delta)).collect();
            (y, relaxed)
        }
        Phase1::Infeasible { y, .. } => {
            return Ok(finish(p, Status::Infeasible, y, cfg.t0, ph.iterations, ph.iterations, vec![]));
        }
        Phase1::Failed(status) => {
            return Ok(finish(p, status, vec![0.0; n], cfg.t0, ph.iterations, ph.iterations, vec![]));
        }
    };
    let opts = barrier::Options {
        gap_tol: cfg.duality_gap_tol,
        check_unbounded: true,
        stop_step: None,
        stop_outer: None,
    };
    let run = barrier::run(&target, start, cfg, &opts);
    let iterations = run.newton_steps + ph.iterations;
    let mut status = match run.exit {
        barrier::Exit::Converged | barrier::Exit::EarlyStop => Status::Optimal,
        barrier::Exit::Unbounded => Status::Unbounded,
        barrier::Exit::IterationLimit => Status::IterationLimit,
        barrier::Exit::NumericalFailure => Status::NumericalFailure,
    };
    let sol = finish(p, status, run.y, run.t, iterations, ph.iterations, run.trace);
    if status == Status::Optimal && !sol.kkt.within(cfg) {
        log::warn!("barrier converged but KKT residuals exceed tolerances: {:?}", sol.kkt);
        status = Status::NumericalFailure;
    }
    Ok(Solution { status, ..sol })
}

/// Recomputes the certificate of an Optimal solution from its `x`.
pub fn check_kkt(p: &LogConvexProblem, sol: &Solution) -> Result<KktResiduals, SolverError> {
    if sol.status != Status::Optimal {
        return Err(SolverError::NotOptimal(sol.status));
    }
    let y: Vec<f64> = sol.x.iter().map(|v| v.ln()).collect();
    Ok(residuals(p, &y, sol.t_final))
}

pub fn solve_gp(gp: &GpProblem, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    let p = to_log_domain(gp)?;
    solve(&p, cfg)
}

/// Solution of a generalized GP, mapped back to the source variables.
#[derive(Clone, Debug, PartialEq)]
pub struct GgpSolution {
    pub status: Status,
    /// Values of the source variables.
    pub x: Vec<f64>,
    /// Source objective evaluated at `x`.
    pub objective_value: f64,
    /// Full lowered point with every epigraph variable pulled down to its branch maximum.
    pub x_full: Vec<f64>,
    /// Raw solver output on the lowered problem.
    pub gp: Solution,
}

pub fn solve_ggp(p: &GgpProblem, cfg: &SolverConfig) -> Result<GgpSolution, SolverError> {
    let gp = lower_to_gp(p)?;
    let sol = solve_gp(&gp, cfg)?;
    let mut x_full = sol.x.clone();
    tighten_aux(&gp, &mut x_full);
    let x = x_full[..gp.n_source].to_vec();
    let objective_value = p.objective.eval(&x).unwrap_or(f64::NAN);
    Ok(GgpSolution {
        status: sol.status,
        x,
        objective_value,
        x_full,
        gp: sol,
    })
}

/// Sets each epigraph variable to the smallest value its defining
/// constraints allow. Those constraints carry the variable with a negative
/// exponent in every term; everywhere else it appears with positive powers,
/// so lowering it keeps the point feasible.
pub fn tighten_aux(gp: &GpProblem, x: &mut [f64]) {
    let defining: Vec<(usize, Vec<(usize, f64)>)> = gp
        .aux_vars
        .iter()
        .map(|&v| {
            let rows = gp
                .inequalities
                .iter()
                .enumerate()
                .filter_map(|(k, c)| {
                    let e = c.terms()[0].exponent(v);
                    (e < 0.0 && c.terms().iter().all(|t| t.exponent(v) == e)).then_some((k, -e))
                })
                .collect();
            (v.index(), rows)
        })
        .collect();
    for _ in 0..=defining.len() {
        let mut changed = false;
        for (v, rows) in defining.iter().rev() {
            let mut best: Option<f64> = None;
            for &(k, a) in rows {
                if let Ok(g) = gp.inequalities[k].eval(x) {
                    let target = x[*v] * g.powf(1.0 / a);
                    best = Some(best.map_or(target, |b: f64| b.max(target)));
                }
            }
            if let Some(b) = best {
                if b.is_finite() && b > 0.0 && (b - x[*v]).abs() > 1e-15 * x[*v] {
                    x[*v] = b;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

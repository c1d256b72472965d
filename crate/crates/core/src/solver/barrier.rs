// SPDX-License-Identifier: Apache-2.0

//! Path-following barrier method with equality-constrained Newton centering.

use nalgebra::{DMatrix, DVector};

use super::linalg::solve_kkt;
use super::logdomain::LogConvexProblem;
use super::{OuterRecord, SolverConfig};

/// Log-domain objective below which the problem is declared unbounded
/// (the posynomial objective has dropped under `1e-30`).
pub(crate) const UNBOUNDED_LOG_OBJECTIVE: f64 = -69.07755278982137;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Exit {
    Converged,
    EarlyStop,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

pub(crate) struct Run {
    pub y: Vec<f64>,
    pub t: f64,
    pub exit: Exit,
    pub newton_steps: usize,
    pub trace: Vec<OuterRecord>,
}

/// Early-stop test on the current point.
pub(crate) type Predicate<'a> = &'a dyn Fn(&[f64]) -> bool;

pub(crate) struct Options<'a> {
    pub gap_tol: f64,
    pub check_unbounded: bool,
    /// Checked after every accepted Newton step.
    pub stop_step: Option<Predicate<'a>>,
    /// Checked after every centering.
    pub stop_outer: Option<Predicate<'a>>,
}

struct Eval {
    phi: f64,
    grad: DVector<f64>,
    hess: DMatrix<f64>,
}

/// `t·F0(y) − Σ log(−F_i(y))`, `None` outside the strict interior.
fn merit(p: &LogConvexProblem, y: &[f64], t: f64) -> Option<f64> {
    let mut phi = t * p.objective.value(y);
    for b in &p.inequalities {
        let f = b.value(y);
        if !(f < 0.0) {
            return None;
        }
        phi -= (-f).ln();
    }
    phi.is_finite().then_some(phi)
}

fn merit_full(p: &LogConvexProblem, y: &[f64], t: f64) -> Option<Eval> {
    let n = p.n;
    let mut grad = DVector::zeros(n);
    let mut hess = DMatrix::zeros(n, n);
    let e0 = p.objective.eval(y);
    let mut phi = t * e0.value;
    scatter(&mut grad, &mut hess, p.objective.cols(), &e0.grad, &e0.hess, t, 0.0);
    for b in &p.inequalities {
        let e = b.eval(y);
        if !(e.value < 0.0) {
            return None;
        }
        phi -= (-e.value).ln();
        let w = -1.0 / e.value;
        scatter(&mut grad, &mut hess, b.cols(), &e.grad, &e.hess, w, w * w);
    }
    phi.is_finite().then_some(Eval { phi, grad, hess })
}

/// Adds `w·g` to the gradient and `w·H + w2·g gᵀ` to the Hessian.
fn scatter(
    grad: &mut DVector<f64>,
    hess: &mut DMatrix<f64>,
    cols: &[usize],
    g: &DVector<f64>,
    h: &DMatrix<f64>,
    w: f64,
    w2: f64,
) {
    for (i, &ci) in cols.iter().enumerate() {
        grad[ci] += w * g[i];
        for (j, &cj) in cols.iter().enumerate() {
            hess[(ci, cj)] += w * h[(i, j)] + w2 * g[i] * g[j];
        }
    }
}

enum Centering {
    Done,
    Stopped,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

fn center(
    p: &LogConvexProblem,
    y: &mut Vec<f64>,
    t: f64,
    cfg: &SolverConfig,
    opts: &Options,
    steps: &mut usize,
    merits: &mut Vec<f64>,
) -> Centering {
    let n = p.n;
    for _ in 0..cfg.max_newton {
        let Some(ev) = merit_full(p, y, t) else {
            return Centering::NumericalFailure;
        };
        if merits.is_empty() {
            merits.push(ev.phi);
        }
        let yv = DVector::from_column_slice(y);
        let r = &p.eq_b - &p.eq_a * &yv;
        let Some(step) = solve_kkt(&ev.hess, &ev.grad, &p.eq_a, &r) else {
            return Centering::NumericalFailure;
        };
        if step.perturbed {
            log::trace!("Newton system perturbed at t = {t:e}");
        }
        let slope = ev.grad.dot(&step.dy);
        let lambda2 = -slope;
        // Half the squared decrement estimates the merit suboptimality; below
        // the merit's own rounding level no step can make progress.
        let floor = cfg.newton_tol.max(1e-13 * ev.phi.abs());
        if !(lambda2 / 2.0 > floor) {
            return Centering::Done;
        }
        // Predicted decrease the merit can still resolve in floating point.
        let resolvable = 1e-9 * ev.phi.abs().max(1.0);
        let mut s = 1.0;
        let mut accepted = None;
        for _ in 0..200 {
            let trial: Vec<f64> = (0..n).map(|i| y[i] + s * step.dy[i]).collect();
            if let Some(phi) = merit(p, &trial, t) {
                if phi <= ev.phi + cfg.ls_alpha * s * slope {
                    accepted = Some((trial, phi));
                    break;
                }
            }
            s *= cfg.ls_beta;
        }
        let Some((trial, phi)) = accepted else {
            return if lambda2 / 2.0 <= resolvable {
                Centering::Done
            } else {
                Centering::NumericalFailure
            };
        };
        *y = trial;
        *steps += 1;
        merits.push(phi);
        // Accepted but unmeasurable progress at the roundoff floor: further steps only cycle.
        if ev.phi - phi <= 1e-14 * ev.phi.abs().max(1.0) && lambda2 / 2.0 <= resolvable {
            return Centering::Done;
        }
        if opts.check_unbounded && p.objective.value(y) < UNBOUNDED_LOG_OBJECTIVE {
            return Centering::Unbounded;
        }
        if opts.stop_step.is_some_and(|f| f(y)) {
            return Centering::Stopped;
        }
    }
    Centering::IterationLimit
}

/// Barrier path following from a strictly feasible `y0` with `A y0 = b`.
pub(crate) fn run(p: &LogConvexProblem, y0: Vec<f64>, cfg: &SolverConfig, opts: &Options) -> Run {
    let m = p.n_ineq() as f64;
    let mut y = y0;
    let mut t = cfg.t0;
    let mut steps = 0;
    let mut trace = Vec::new();
    loop {
        let before = steps;
        let mut merits = Vec::new();
        let c = center(p, &mut y, t, cfg, opts, &mut steps, &mut merits);
        let gap = m / t;
        let objective = p.objective.value(&y);
        log::debug!(
            "outer {:>3}  t = {t:.3e}  gap = {gap:.3e}  newton = {}  F0 = {objective:.12e}",
            trace.len() + 1,
            steps - before
        );
        trace.push(OuterRecord {
            t,
            gap,
            newton_steps: steps - before,
            objective,
            merits,
        });
        let exit = match c {
            Centering::Unbounded => Some(Exit::Unbounded),
            Centering::IterationLimit => Some(Exit::IterationLimit),
            Centering::NumericalFailure => Some(Exit::NumericalFailure),
            Centering::Stopped => Some(Exit::EarlyStop),
            Centering::Done => {
                if opts.stop_outer.is_some_and(|f| f(&y)) {
                    Some(Exit::EarlyStop)
                } else if gap < opts.gap_tol {
                    Some(Exit::Converged)
                } else if trace.len() >= cfg.max_outer {
                    Some(Exit::IterationLimit)
                } else {
                    None
                }
            }
        };
        if let Some(exit) = exit {
            return Run {
                y,
                t,
                exit,
                newton_steps: steps,
                trace,
            };
        }
        t *= cfg.barrier_mu;
    }
}

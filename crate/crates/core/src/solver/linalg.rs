// SPDX-License-Identifier: Apache-2.0

//! Dense factorizations for the Newton step.

use nalgebra::{DMatrix, DVector};

/// Result of one Newton KKT solve.
pub(crate) struct KktStep {
    pub dy: DVector<f64>,
    pub perturbed: bool,
}

/// Solves `[H Aᵀ; A 0] [dy; ν] = [-g; r]`.
///
/// `H` is symmetrically equilibrated first; if the factorization fails the
/// system is retried once with `H + ε·I`, `ε` scaled to the largest diagonal.
pub(crate) fn solve_kkt(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    a: &DMatrix<f64>,
    r: &DVector<f64>,
) -> Option<KktStep> {
    let n = h.nrows();
    let d = DVector::from_iterator(
        n,
        h.diagonal().iter().map(|&v| {
            if v > 1e-300 && v.is_finite() {
                1.0 / v.sqrt()
            } else {
                1.0
            }
        }),
    );
    let mut hs = h.clone();
    for j in 0..n {
        for i in 0..n {
            hs[(i, j)] *= d[i] * d[j];
        }
    }
    let gs = g.component_mul(&d);
    let mut as_ = a.clone();
    for j in 0..n {
        as_.column_mut(j).scale_mut(d[j]);
    }
    let eps = 1e-10 * hs.diagonal().amax().max(1.0);
    for perturbed in [false, true] {
        let mut hp = hs.clone();
        if perturbed {
            for i in 0..n {
                hp[(i, i)] += eps;
            }
        }
        if let Some(dys) = factor_and_solve(&hp, &gs, &as_, r) {
            if dys.iter().all(|v| v.is_finite()) {
                return Some(KktStep {
                    dy: dys.component_mul(&d),
                    perturbed,
                });
            }
        }
    }
    None
}

fn factor_and_solve(
    h: &DMatrix<f64>,
    g: &DVector<f64>,
    a: &DMatrix<f64>,
    r: &DVector<f64>,
) -> Option<DVector<f64>> {
    let n = h.nrows();
    let q = a.nrows();
    if q == 0 {
        let chol = h.clone().cholesky()?;
        return Some(chol.solve(&(-g)));
    }
    let mut k = DMatrix::zeros(n + q, n + q);
    k.view_mut((0, 0), (n, n)).copy_from(h);
    k.view_mut((n, 0), (q, n)).copy_from(a);
    k.view_mut((0, n), (n, q)).copy_from(&a.transpose());
    let mut rhs = DVector::zeros(n + q);
    rhs.rows_mut(0, n).copy_from(&(-g));
    rhs.rows_mut(n, q).copy_from(r);
    let lu = k.lu();
    let sol = lu.solve(&rhs)?;
    let resid = (&k_times(h, a, &sol) - &rhs).amax();
    let scale = rhs.amax().max(1e-300);
    if !(resid <= 1e-6 * scale.max(1.0)) {
        return None;
    }
    Some(sol.rows(0, n).into_owned())
}

fn k_times(h: &DMatrix<f64>, a: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    let n = h.nrows();
    let q = a.nrows();
    let x = v.rows(0, n);
    let nu = v.rows(n, q);
    let mut out = DVector::zeros(n + q);
    out.rows_mut(0, n).copy_from(&(h * x + a.tr_mul(&nu)));
    out.rows_mut(n, q).copy_from(&(a * x));
    out
}

/// Equality system reduced to full row rank.
pub(crate) struct ReducedEq {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    /// Minimum-norm solution of `A y = b`.
    pub y0: DVector<f64>,
}

/// Drops redundant rows of `A y = b` through an SVD; `None` if inconsistent.
pub(crate) fn reduce_equalities(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<ReducedEq> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return Some(ReducedEq {
            a: a.clone(),
            b: b.clone(),
            y0: DVector::zeros(n),
        });
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.max();
    let tol = 1e-10 * smax.max(1.0) * (a.nrows().max(n) as f64);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    let r = keep.len();
    let mut ra = DMatrix::zeros(r, n);
    let mut rb = DVector::zeros(r);
    let mut y0 = DVector::zeros(n);
    for (k, &i) in keep.iter().enumerate() {
        let s = svd.singular_values[i];
        let ui = u.column(i);
        let vi = vt.row(i);
        let ub = ui.dot(b);
        ra.row_mut(k).copy_from(&(vi * s));
        rb[k] = ub * s;
        y0.axpy(ub / s, &vi.transpose(), 1.0);
    }
    let resid = (a * &y0 - b).amax();
    if resid > 1e-9 * (1.0 + b.amax()) {
        return None;
    }
    Some(ReducedEq { a: ra, b: rb, y0 })
}

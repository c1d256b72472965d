// SPDX-License-Identifier: Apache-2.0

//! Log-domain form of a GP: with `y = log x`, each posynomial becomes
//! `log Σ_k exp(a_k·y + b_k)` and each monomial equality an affine row.

use nalgebra::{DMatrix, DVector};

use crate::expr::{ModelError, Monomial, Posynomial};
use crate::problem::GpProblem;

/// One log-sum-exp function over a sparse set of columns.
///
/// Rows are stored densely over `cols` only; `a` has one row per term.
#[derive(Clone, Debug, PartialEq)]
pub struct LseBlock {
    cols: Vec<usize>,
    a: DMatrix<f64>,
    b: DVector<f64>,
}

/// Value, gradient and Hessian of a block, all restricted to its columns.
#[derive(Clone, Debug)]
pub struct LseEval {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl LseBlock {
    /// Block from full-length dense rows `(a_k, b_k)`; zero columns are dropped.
    pub fn from_dense_rows(rows: &[(Vec<f64>, f64)]) -> Self {
        assert!(!rows.is_empty(), "an LSE block needs at least one row");
        let n = rows[0].0.len();
        let cols: Vec<usize> = (0..n)
            .filter(|&j| rows.iter().any(|(a, _)| a[j] != 0.0))
            .collect();
        let a = DMatrix::from_fn(rows.len(), cols.len(), |i, j| rows[i].0[cols[j]]);
        let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
        LseBlock { cols, a, b }
    }

    pub fn from_posynomial(p: &Posynomial) -> Result<Self, ModelError> {
        let mut cols: Vec<usize> = p.vars().into_iter().map(|v| v.index()).collect();
        cols.sort_unstable();
        let mut a = DMatrix::zeros(p.len(), cols.len());
        let mut b = DVector::zeros(p.len());
        for (i, t) in p.terms().iter().enumerate() {
            b[i] = log_coeff(t)?;
            for (v, e) in t.exponents() {
                let j = cols.binary_search(&v.index()).expect("column present");
                a[(i, j)] = *e;
            }
        }
        Ok(LseBlock { cols, a, b })
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn rows(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn offsets(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn n_terms(&self) -> usize {
        self.b.len()
    }

    /// Same block with every offset shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        LseBlock {
            cols: self.cols.clone(),
            a: self.a.clone(),
            b: self.b.add_scalar(delta),
        }
    }

    /// Same block with an extra column `col` carrying `coef` in every row.
    pub(crate) fn with_column(&self, col: usize, coef: f64) -> Self {
        let mut cols = self.cols.clone();
        assert!(cols.last().is_none_or(|&c| c < col));
        cols.push(col);
        let mut a = self.a.clone().insert_column(self.cols.len(), 0.0);
        a.column_mut(self.cols.len()).fill(coef);
        LseBlock {
            cols,
            a,
            b: self.b.clone(),
        }
    }

    fn exponents(&self, y: &[f64]) -> DVector<f64> {
        let mut z = self.b.clone();
        for (j, &c) in self.cols.iter().enumerate() {
            let yc = y[c];
            if yc != 0.0 {
                z.axpy(yc, &self.a.column(j), 1.0);
            }
        }
        z
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        let z = self.exponents(y);
        if z.len() == 1 {
            return z[0];
        }
        let m = z.max();
        m + z.iter().map(|&zk| (zk - m).exp()).sum::<f64>().ln()
    }

    /// Max-shifted log-sum-exp with softmax gradient and the weighted
    /// covariance of the rows as Hessian (PSD by construction).
    pub fn eval(&self, y: &[f64]) -> LseEval {
        let z = self.exponents(y);
        let k = self.cols.len();
        if z.len() == 1 {
            return LseEval {
                value: z[0],
                grad: self.a.row(0).transpose(),
                hess: DMatrix::zeros(k, k),
            };
        }
        let m = z.max();
        let mut w = z.map(|zk| (zk - m).exp());
        let s = w.sum();
        w /= s;
        let value = m + s.ln();
        let grad = self.a.tr_mul(&w);
        let mut centered = self.a.clone();
        for (i, mut row) in centered.row_iter_mut().enumerate() {
            let sw = w[i].sqrt();
            for j in 0..k {
                row[j] = (row[j] - grad[j]) * sw;
            }
        }
        let hess = centered.tr_mul(&centered);
        LseEval { value, grad, hess }
    }

    /// Gradient scattered into a full-length vector.
    pub fn dense_grad(&self, n: usize, e: &LseEval) -> DVector<f64> {
        let mut g = DVector::zeros(n);
        for (j, &c) in self.cols.iter().enumerate() {
            g[c] = e.grad[j];
        }
        g
    }

    /// Hessian scattered into a full `n × n` matrix.
    pub fn dense_hess(&self, n: usize, e: &LseEval) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(n, n);
        for (i, &ci) in self.cols.iter().enumerate() {
            for (j, &cj) in self.cols.iter().enumerate() {
                h[(ci, cj)] = e.hess[(i, j)];
            }
        }
        h
    }
}

fn log_coeff(m: &Monomial) -> Result<f64, ModelError> {
    let c = m.coeff();
    if c > 0.0 && c.is_finite() {
        Ok(c.ln())
    } else {
        Err(ModelError::NonPositiveCoefficient(c))
    }
}

/// minimize `F_0(y)` s.t. `F_i(y) <= 0`, `A y = b`, every `F` a log-sum-exp.
#[derive(Clone, Debug, PartialEq)]
pub struct LogConvexProblem {
    pub n: usize,
    pub objective: LseBlock,
    pub inequalities: Vec<LseBlock>,
    pub eq_a: DMatrix<f64>,
    pub eq_b: DVector<f64>,
}

impl LogConvexProblem {
    pub fn new(n: usize, objective: LseBlock, inequalities: Vec<LseBlock>) -> Self {
        LogConvexProblem {
            n,
            objective,
            inequalities,
            eq_a: DMatrix::zeros(0, n),
            eq_b: DVector::zeros(0),
        }
    }

    pub fn with_equalities(mut self, a: DMatrix<f64>, b: DVector<f64>) -> Self {
        assert_eq!(a.ncols(), self.n);
        assert_eq!(a.nrows(), b.len());
        self.eq_a = a;
        self.eq_b = b;
        self
    }

    pub fn n_ineq(&self) -> usize {
        self.inequalities.len()
    }

    pub fn n_eq(&self) -> usize {
        self.eq_b.len()
    }

    /// Largest constraint value, `-inf` without inequalities.
    pub fn max_violation(&self, y: &[f64]) -> f64 {
        self.inequalities
            .iter()
            .map(|b| b.value(y))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn eq_residual(&self, y: &[f64]) -> f64 {
        if self.eq_b.is_empty() {
            return 0.0;
        }
        let yv = DVector::from_column_slice(y);
        (&self.eq_a * yv - &self.eq_b).amax()
    }
}

/// Term-by-term log transform: `c·∏x^α` becomes the row `(α, log c)`.
pub fn to_log_domain(gp: &GpProblem) -> Result<LogConvexProblem, ModelError> {
    let n = gp.n_vars();
    let objective = LseBlock::from_posynomial(&gp.objective)?;
    let inequalities = gp
        .inequalities
        .iter()
        .map(LseBlock::from_posynomial)
        .collect::<Result<Vec<_>, _>>()?;
    let q = gp.equalities.len();
    let mut a = DMatrix::zeros(q, n);
    let mut b = DVector::zeros(q);
    for (i, g) in gp.equalities.iter().enumerate() {
        b[i] = -log_coeff(g)?;
        for (v, e) in g.exponents() {
            a[(i, v.index())] = *e;
        }
    }
    Ok(LogConvexProblem::new(n, objective, inequalities).with_equalities(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{VarId, VarRegistry};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gp_with(vars: usize, obj: Posynomial, ineq: Vec<Posynomial>, eq: Vec<Monomial>) -> GpProblem {
        let mut r = VarRegistry::new();
        for i in 0..vars {
            r.add(format!("x{i}")).unwrap();
        }
        GpProblem {
            vars: r,
            n_source: vars,
            objective: obj,
            inequalities: ineq,
            equalities: eq,
            aux_vars: vec![],
            ineq_provenance: vec![],
            eq_provenance: vec![],
        }
    }

    #[test]
    fn inverse_objective_row() {
        let obj = Monomial::new(1.0, [(VarId(0), -1.0)]).unwrap().into();
        let p = to_log_domain(&gp_with(1, obj, vec![], vec![])).unwrap();
        assert_eq!(p.objective.cols(), &[0]);
        assert_eq!(p.objective.rows()[(0, 0)], -1.0);
        assert_eq!(p.objective.offsets()[0], 0.0);
    }

    #[test]
    fn constraint_row_carries_log_coefficient() {
        let c = Monomial::new(2.0, [(VarId(0), 1.0), (VarId(1), -1.0)]).unwrap();
        let obj = Posynomial::var(VarId(0));
        let p = to_log_domain(&gp_with(2, obj, vec![c.into()], vec![])).unwrap();
        let blk = &p.inequalities[0];
        assert_eq!(blk.cols(), &[0, 1]);
        assert_eq!(blk.rows().row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, -1.0]);
        assert_eq!(blk.offsets()[0], 2f64.ln());
    }

    #[test]
    fn monomial_equality_is_affine() {
        let g = Monomial::new(5.0, [(VarId(0), 1.0)]).unwrap();
        let obj = Posynomial::var(VarId(0));
        let p = to_log_domain(&gp_with(1, obj, vec![], vec![g])).unwrap();
        assert_eq!(p.eq_a[(0, 0)], 1.0);
        assert_eq!(p.eq_b[0], -(5f64.ln()));
    }

    #[test]
    fn single_term_block_is_affine() {
        let blk = LseBlock::from_dense_rows(&[(vec![1.5, -2.0], 0.3)]);
        let e = blk.eval(&[0.7, 0.2]);
        assert!((e.value - (1.5 * 0.7 - 2.0 * 0.2 + 0.3)).abs() < 1e-15);
        assert!(e.hess.iter().all(|&h| h == 0.0));
    }

    #[test]
    fn symmetric_block_at_origin() {
        let blk = LseBlock::from_dense_rows(&[(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0)]);
        let e = blk.eval(&[0.0, 0.0]);
        assert!((e.value - 2f64.ln()).abs() < 1e-15);
        assert!((e.grad[0] - 0.5).abs() < 1e-15 && (e.grad[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn large_exponents_do_not_overflow() {
        let blk = LseBlock::from_dense_rows(&[(vec![1.0], 0.0), (vec![1.0], 1.0)]);
        let v = blk.value(&[1000.0]);
        assert!((v - (1001.0 + (1.0 + (-1f64).exp()).ln())).abs() < 1e-9);
    }

    fn random_block(rng: &mut ChaCha8Rng, n: usize) -> LseBlock {
        let terms = rng.gen_range(1..6);
        let rows: Vec<(Vec<f64>, f64)> = (0..terms)
            .map(|_| {
                (
                    (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        LseBlock::from_dense_rows(&rows)
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-6;
        for _ in 0..100 {
            let n = 4;
            let blk = random_block(&mut rng, n);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let e = blk.eval(&y);
            let g = blk.dense_grad(n, &e);
            for j in 0..n {
                let mut yp = y.clone();
                let mut ym = y.clone();
                yp[j] += h;
                ym[j] -= h;
                let fd = (blk.value(&yp) - blk.value(&ym)) / (2.0 * h);
                let err = (fd - g[j]).abs() / g[j].abs().max(1.0);
                assert!(err <= 1e-5, "component {j}: fd {fd} vs {}", g[j]);
            }
        }
    }

    #[test]
    fn hessian_is_symmetric_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let n = 5;
            let blk = random_block(&mut rng, n);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let e = blk.eval(&y);
            let h = blk.dense_hess(n, &e);
            assert!((&h - h.transpose()).amax() <= 1e-14);
            let min_eig = h.symmetric_eigenvalues().min();
            assert!(min_eig >= -1e-8, "min eigenvalue {min_eig}");
        }
    }
}

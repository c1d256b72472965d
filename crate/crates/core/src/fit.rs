// SPDX-License-Identifier: Apache-2.0

//! Monomial and posynomial fits to positive data in log space.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{ModelError, Monomial, Posynomial, VarId};

pub const COEFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("invalid dataset: {0}")]
    Data(String),
    #[error("design matrix is rank deficient; collinear columns: {}", .0.join(", "))]
    RankDeficient(Vec<String>),
    #[error("term count must be at least 1")]
    ZeroTerms,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitDataset {
    pub x: Vec<Vec<f64>>,
    pub f: Vec<f64>,
}

impl FitDataset {
    pub fn new(x: Vec<Vec<f64>>, f: Vec<f64>) -> Result<Self, FitError> {
        let d = FitDataset { x, f };
        d.validate()?;
        Ok(d)
    }

    pub fn n_vars(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    fn validate(&self) -> Result<(), FitError> {
        let n = self.n_vars();
        if self.x.len() != self.f.len() {
            return Err(FitError::Data("sample and value counts differ".into()));
        }
        if self.len() < n + 1 {
            return Err(FitError::Data(format!(
                "{} samples for {n} variables; need at least {}",
                self.len(),
                n + 1
            )));
        }
        for (s, (x, f)) in self.x.iter().zip(&self.f).enumerate() {
            if x.len() != n {
                return Err(FitError::Data(format!("sample {s} has {} coordinates, expected {n}", x.len())));
            }
            if !(x.iter().chain([f]).all(|v| *v > 0.0 && v.is_finite())) {
                return Err(FitError::Data(format!("sample {s} has a nonpositive value")));
            }
        }
        Ok(())
    }

    /// Columns `x1..xn,f`; header names other than the last are ignored.
    pub fn from_csv(text: &str) -> Result<Self, FitError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut x = Vec::new();
        let mut f = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|c| c.parse::<f64>().map_err(|e| FitError::Data(format!("`{c}`: {e}"))))
                .collect::<Result<_, _>>()?;
            let (last, rest) = vals.split_last().ok_or_else(|| FitError::Data("empty row".into()))?;
            x.push(rest.to_vec());
            f.push(*last);
        }
        FitDataset::new(x, f)
    }
}

/// A fitted model: terms `c_k · ∏ x_j^{a_kj}` over variables `x1..xn`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub coeffs: Vec<f64>,
    pub exponents: Vec<Vec<f64>>,
    /// RMS log-space error.
    pub residual: f64,
    pub converged: bool,
}

impl Fit {
    pub fn to_posynomial(&self) -> Result<Posynomial, ModelError> {
        Posynomial::from_terms(
            self.coeffs
                .iter()
                .zip(&self.exponents)
                .map(|(&c, a)| Monomial::new(c, a.iter().enumerate().map(|(j, &e)| (VarId(j), e))))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    pub fn to_monomial(&self) -> Option<Result<Monomial, ModelError>> {
        (self.coeffs.len() == 1).then(|| {
            Monomial::new(
                self.coeffs[0],
                self.exponents[0].iter().enumerate().map(|(j, &e)| (VarId(j), e)),
            )
        })
    }
}

fn logs(d: &FitDataset) -> (Vec<Vec<f64>>, Vec<f64>) {
    let y = d.x.iter().map(|x| x.iter().map(|v| v.ln()).collect()).collect();
    let lf = d.f.iter().map(|v| v.ln()).collect();
    (y, lf)
}

/// Per-sample log residuals of a model; shared by every fit so residuals compare exactly.
fn residuals(coeffs: &[f64], exps: &[Vec<f64>], y: &[Vec<f64>], lf: &[f64]) -> Vec<f64> {
    y.iter()
        .zip(lf)
        .map(|(ys, l)| {
            let v: f64 = coeffs
                .iter()
                .zip(exps)
                .map(|(c, a)| c * a.iter().zip(ys).map(|(e, yj)| e * yj).sum::<f64>().exp())
                .sum();
            v.ln() - l
        })
        .collect()
}

fn rms(r: &[f64]) -> f64 {
    (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt()
}

pub fn fit_monomial(d: &FitDataset) -> Result<Fit, FitError> {
    d.validate()?;
    let n = d.n_vars();
    let (y, lf) = logs(d);
    let m = d.len();
    let a = DMatrix::from_fn(m, n + 1, |s, j| if j == 0 { 1.0 } else { y[s][j - 1] });
    let b = DVector::from_vec(lf.clone());
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = 1e-10 * smax.max(1.0) * (m.max(n + 1) as f64);
    if let Some(k) = (0..n + 1).find(|&k| svd.singular_values[k] <= tol) {
        let v = svd.v_t.as_ref().expect("v_t requested").row(k).transpose();
        let vmax = v.amax();
        let names = (0..n + 1)
            .filter(|&j| v[j].abs() > 1e-6 * vmax)
            .map(|j| if j == 0 { "intercept".to_string() } else { format!("x{j}") })
            .collect();
        return Err(FitError::RankDeficient(names));
    }
    let theta = svd.solve(&b, tol).map_err(|e| FitError::Data(e.to_string()))?;
    let coeffs = vec![theta[0].exp()];
    let exponents = vec![(1..=n).map(|j| theta[j]).collect()];
    let residual = rms(&residuals(&coeffs, &exponents, &y, &lf));
    Ok(Fit {
        coeffs,
        exponents,
        residual,
        converged: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    pub starts: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Stop once the relative cost decrease of an accepted step falls below this.
    pub tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            starts: 8,
            max_iter: 500,
            seed: 0,
            tol: 1e-14,
        }
    }
}

/// Levenberg–Marquardt on `(log c_k, a_k)` from the given start.
fn levenberg(
    mut coeffs: Vec<f64>,
    mut exps: Vec<Vec<f64>>,
    y: &[Vec<f64>],
    lf: &[f64],
    cfg: &FitConfig,
) -> (Vec<f64>, Vec<Vec<f64>>, f64, bool) {
    let k = coeffs.len();
    let n = exps[0].len();
    let np = k * (n + 1);
    let m = y.len();
    let cost = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut r = residuals(&coeffs, &exps, y, lf);
    let mut c0 = cost(&r);
    let mut lambda = 1e-3;
    let floor = COEFF_FLOOR.ln();
    for _ in 0..cfg.max_iter {
        // Jacobian of log model w.r.t. (u_k, a_k): softmax weights times [1, y].
        let mut jac = DMatrix::zeros(m, np);
        for s in 0..m {
            let t: Vec<f64> = (0..k)
                .map(|q| coeffs[q].ln() + exps[q].iter().zip(&y[s]).map(|(e, yj)| e * yj).sum::<f64>())
                .collect();
            let tm = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = t.iter().map(|v| (v - tm).exp()).collect();
            let ws: f64 = w.iter().sum();
            for q in 0..k {
                let wq = w[q] / ws;
                jac[(s, q * (n + 1))] = wq;
                for j in 0..n {
                    jac[(s, q * (n + 1) + 1 + j)] = wq * y[s][j];
                }
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.tr_mul(&jac);
        let g = jac.tr_mul(&rv);
        if g.amax() < 1e-15 {
            return (coeffs, exps, c0, true);
        }
        let mut accepted = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for i in 0..np {
                a[(i, i)] += lambda * (jtj[(i, i)].max(1e-12));
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let mut nc = coeffs.clone();
            let mut ne = exps.clone();
            for q in 0..k {
                nc[q] = (coeffs[q].ln() + step[q * (n + 1)]).max(floor).exp();
                for j in 0..n {
                    ne[q][j] += step[q * (n + 1) + 1 + j];
                }
            }
            let nr = residuals(&nc, &ne, y, lf);
            let c1 = cost(&nr);
            if c1 < c0 {
                let rel = (c0 - c1) / c0.max(1e-300);
                coeffs = nc;
                exps = ne;
                r = nr;
                c0 = c1;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if rel < cfg.tol {
                    return (coeffs, exps, c0, true);
                }
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            // No damping level yields descent: a stationary point to working precision.
            return (coeffs, exps, c0, true);
        }
    }
    (coeffs, exps, c0, false)
}

/// Best of `cfg.starts` Levenberg–Marquardt runs. The residual never exceeds the
/// `K − 1` fit beyond the rounding error of evaluating the model.
pub fn fit_posynomial(d: &FitDataset, k: usize, cfg: &FitConfig) -> Result<Fit, FitError> {
    if k == 0 {
        return Err(FitError::ZeroTerms);
    }
    let base = fit_monomial(d)?;
    if k == 1 {
        return Ok(base);
    }
    let (y, lf) = logs(d);
    let n = d.n_vars();
    let mut prev = base;
    for kk in 2..=k {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (kk as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mean = lf.iter().sum::<f64>() / lf.len() as f64;
        let mut best: Option<(f64, Fit)> = None;
        for start in 0..cfg.starts.max(1) {
            let (c, e) = match start {
                // Split the largest term in half: the model, and hence its residual, is unchanged.
                0 => {
                    let q = (0..prev.coeffs.len())
                        .max_by(|&a, &b| prev.coeffs[a].total_cmp(&prev.coeffs[b]))
                        .unwrap();
                    let mut c = prev.coeffs.clone();
                    let mut e = prev.exponents.clone();
                    c[q] /= 2.0;
                    c.push(c[q]);
                    e.push(e[q].clone());
                    (c, e)
                }
                // Previous fit plus a small random term.
                s if s < cfg.starts / 2 => {
                    let mut c = prev.coeffs.clone();
                    let mut e = prev.exponents.clone();
                    c.push(mean.exp() * 0.1);
                    e.push((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect());
                    (c, e)
                }
                _ => {
                    let c = vec![mean.exp() / kk as f64; kk];
                    let e = (0..kk).map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
                    (c, e)
                }
            };
            let (c, e, cost, converged) = levenberg(c, e, &y, &lf, cfg);
            let residual = (cost / lf.len() as f64).sqrt();
            if best.as_ref().is_none_or(|(b, _)| residual < *b) {
                best = Some((
                    residual,
                    Fit {
                        coeffs: c,
                        exponents: e,
                        residual,
                        converged,
                    },
                ));
            }
        }
        let (_, mut fit) = best.expect("at least one start");
        fit.residual = rms(&residuals(&fit.coeffs, &fit.exponents, &y, &lf));
        if !fit.converged {
            log::warn!("posynomial fit with {kk} terms hit the iteration limit");
        }
        prev = fit;
    }
    Ok(prev)
}

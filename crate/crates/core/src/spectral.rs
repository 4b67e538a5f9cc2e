//! Dense and Lanczos eigensolvers for real symmetric operators.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GadgetError, Result};
use crate::sparse::CsrMatrix;

/// A real symmetric operator given by its action.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for c in 0..n {
            e[c] = 1.0;
            self.apply(&e, &mut col);
            m.column_mut(c).copy_from_slice(&col);
            e[c] = 0.0;
        }
        m
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        CsrMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }

    fn to_dense(&self) -> DMatrix<f64> {
        CsrMatrix::to_dense(self)
    }
}

impl LinearOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = (0..self.ncols()).map(|c| self[(r, c)] * x[c]).sum();
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Dense up to [`DENSE_LIMIT`], Lanczos above.
    #[default]
    Auto,
    Dense,
    Iterative,
}

pub const DENSE_LIMIT: usize = 8192;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Relative residual target `‖Av − λv‖ ≤ tol·‖A‖`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Largest Krylov basis before an explicit restart.
    pub krylov: usize,
    pub vectors: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: Method::Auto,
            tol: 1e-12,
            max_iter: 5000,
            seed: 7,
            krylov: 160,
            vectors: true,
        }
    }
}

impl SolverConfig {
    pub fn iterative() -> Self {
        SolverConfig {
            method: Method::Iterative,
            ..Self::default()
        }
    }

    pub fn dense() -> Self {
        SolverConfig {
            method: Method::Dense,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// `‖Av − λv‖₂` per returned pair; empty when vectors were not computed.
    pub residuals: Vec<f64>,
    pub method: Method,
    pub iterations: usize,
}

impl Spectrum {
    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn vector(&self, i: usize) -> Option<&[f64]> {
        self.eigenvectors.as_ref().map(|v| v[i].as_slice())
    }
}

/// Ascending eigenvalues and matching eigenvector columns.
pub fn symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (vals, vecs)
}

/// Ascending eigenvalues only.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(GadgetError::NotSymmetric(asym));
    }
    Ok(())
}

fn residual<A: LinearOperator + ?Sized>(a: &A, v: &[f64], lambda: f64) -> f64 {
    let mut y = vec![0.0; v.len()];
    a.apply(v, &mut y);
    y.iter()
        .zip(v)
        .map(|(y, x)| (y - lambda * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn eigensolve<A: LinearOperator + ?Sized>(
    a: &A,
    k: usize,
    cfg: &SolverConfig,
) -> Result<Spectrum> {
    let n = a.dim();
    if k == 0 || k > n {
        return Err(GadgetError::TooManyEigenpairs { k, dim: n });
    }
    let dense = match cfg.method {
        Method::Dense => true,
        Method::Iterative => false,
        Method::Auto => n <= DENSE_LIMIT,
    };
    if dense {
        solve_dense(a, k, cfg)
    } else {
        lanczos(a, k, cfg)
    }
}

fn solve_dense<A: LinearOperator + ?Sized>(
    a: &A,
    k: usize,
    cfg: &SolverConfig,
) -> Result<Spectrum> {
    let m = a.to_dense();
    check_symmetric(&m)?;
    if !cfg.vectors {
        let vals = symmetric_eigenvalues(m);
        return Ok(Spectrum {
            eigenvalues: vals[..k].to_vec(),
            eigenvectors: None,
            residuals: vec![],
            method: Method::Dense,
            iterations: 0,
        });
    }
    let (vals, vecs) = symmetric_eigen(m);
    let vectors: Vec<Vec<f64>> = (0..k)
        .map(|i| vecs.column(i).iter().copied().collect())
        .collect();
    let residuals = vectors
        .iter()
        .zip(&vals)
        .map(|(v, &l)| residual(a, v, l))
        .collect();
    Ok(Spectrum {
        eigenvalues: vals[..k].to_vec(),
        eigenvectors: Some(vectors),
        residuals,
        method: Method::Dense,
        iterations: 0,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], c: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += c * x);
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(w, b);
            axpy(w, -c, b);
        }
    }
}

/// Lowest `k` pairs, found one at a time with every earlier pair deflated.
fn lanczos<A: LinearOperator + ?Sized>(a: &A, k: usize, cfg: &SolverConfig) -> Result<Spectrum> {
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut values = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut total = 0;
    for _ in 0..k {
        let mut start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(&mut start, &locked);
        normalize(&mut start);
        let (theta, x, iters) = lanczos_lowest(a, start, &locked, cfg)?;
        total += iters;
        residuals.push(residual(a, &x, theta));
        values.push(theta);
        locked.push(x);
    }
    // deflation can return pairs slightly out of order when levels are close
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        eigenvectors: cfg
            .vectors
            .then(|| order.iter().map(|&i| locked[i].clone()).collect()),
        method: Method::Iterative,
        iterations: total,
    })
}

fn lanczos_lowest<A: LinearOperator + ?Sized>(
    a: &A,
    mut start: Vec<f64>,
    locked: &[Vec<f64>],
    cfg: &SolverConfig,
) -> Result<(f64, Vec<f64>, usize)> {
    let n = a.dim();
    let m_max = cfg.krylov.min(n - locked.len()).max(1);
    let mut iters = 0;
    let mut norm_est: f64 = 0.0;
    let mut last_res = f64::INFINITY;
    loop {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut w = vec![0.0; n];
        let mut best: Option<(f64, Vec<f64>)> = None;
        for j in 0..m_max {
            a.apply(&basis[j], &mut w);
            iters += 1;
            let aj = dot(&w, &basis[j]);
            alpha.push(aj);
            axpy(&mut w, -aj, &basis[j]);
            if j > 0 {
                axpy(&mut w, -beta[j - 1], &basis[j - 1]);
            }
            orthogonalize(&mut w, locked);
            orthogonalize(&mut w, &basis);
            let bj = normalize(&mut w);
            let m = j + 1;
            let exhausted = bj <= 1e-14 * norm_est.max(1.0) || m == m_max;
            if m % 8 == 0 || exhausted || iters >= cfg.max_iter {
                let t = DMatrix::from_fn(m, m, |r, c| {
                    if r == c {
                        alpha[r]
                    } else if r + 1 == c {
                        beta[r]
                    } else if c + 1 == r {
                        beta[c]
                    } else {
                        0.0
                    }
                });
                let (vals, vecs) = symmetric_eigen(t);
                norm_est = norm_est.max(vals[0].abs()).max(vals[m - 1].abs());
                let y = vecs.column(0);
                let est = bj * y[m - 1].abs();
                last_res = est;
                best = Some((vals[0], y.iter().copied().collect()));
                if est <= cfg.tol * norm_est.max(1.0) || exhausted || iters >= cfg.max_iter {
                    break;
                }
            }
            beta.push(bj);
            basis.push(w.clone());
        }
        let (theta, y) = best.expect("at least one Ritz pair");
        let mut x = vec![0.0; n];
        for (c, v) in y.iter().zip(&basis) {
            axpy(&mut x, *c, v);
        }
        orthogonalize(&mut x, locked);
        normalize(&mut x);
        let res = residual(a, &x, theta);
        if res <= cfg.tol * norm_est.max(1.0) * 10.0 {
            return Ok((theta, x, iters));
        }
        if iters >= cfg.max_iter {
            return Err(GadgetError::NoConvergence {
                iterations: iters,
                residual: res.min(last_res),
            });
        }
        start = x;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundInfo {
    pub e0: f64,
    pub degeneracy: usize,
    pub gap: f64,
}

pub const DEGENERACY_TOL: f64 = 1e-9;

pub fn ground_info(spec: &Spectrum, degeneracy_tol: f64) -> Result<GroundInfo> {
    let ev = &spec.eigenvalues;
    if ev.len() < 2 {
        return Err(GadgetError::GapUndefined(ev.len()));
    }
    let e0 = ev[0];
    let degeneracy = ev.iter().take_while(|&&e| e - e0 <= degeneracy_tol).count();
    match ev.get(degeneracy) {
        Some(&e1) => Ok(GroundInfo {
            e0,
            degeneracy,
            gap: e1 - e0,
        }),
        None => Err(GadgetError::GapUndefined(ev.len())),
    }
}

/// `−t(shift + shiftᵀ)` on a ring of `n` sites.
pub fn ring_hop(n: usize, t: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        m[(i, j)] -= t;
        m[(j, i)] -= t;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_minimum() {
        let s = eigensolve(&ring_hop(8, 0.375), 1, &SolverConfig::dense()).unwrap();
        assert!((s.lowest() + 0.75).abs() < 1e-14);
    }

    #[test]
    fn lanczos_matches_dense_with_degeneracy() {
        // two decoupled copies of a ring: every level at least doubly degenerate
        let r = ring_hop(40, 1.0);
        let mut m = DMatrix::zeros(80, 80);
        m.view_mut((0, 0), (40, 40)).copy_from(&r);
        m.view_mut((40, 40), (40, 40)).copy_from(&r);
        for i in 0..80 {
            m[(i, i)] += 0.01 * (i % 40) as f64;
        }
        let d = eigensolve(&m, 4, &SolverConfig::dense()).unwrap();
        let l = eigensolve(&m, 4, &SolverConfig::iterative()).unwrap();
        for (a, b) in d.eigenvalues.iter().zip(&l.eigenvalues) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        assert!(l.residuals.iter().all(|&r| r < 1e-9));
    }

    #[test]
    fn ground_info_errors() {
        let s = Spectrum {
            eigenvalues: vec![1.0],
            eigenvectors: None,
            residuals: vec![],
            method: Method::Dense,
            iterations: 0,
        };
        assert!(ground_info(&s, 1e-9).is_err());
        let s = Spectrum {
            eigenvalues: vec![0.0, 1e-12, 1e-12, 1e-12, 0.5],
            ..s
        };
        let g = ground_info(&s, 1e-9).unwrap();
        assert_eq!((g.degeneracy, g.gap), (4, 0.5));
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(eigensolve(&m, 1, &SolverConfig::dense()).is_err());
    }
}

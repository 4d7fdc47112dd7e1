//! Alternating least squares for exact-fit CP decompositions, with a guard
//! that separates rank from border rank.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generic::probe_seed;
use crate::scalar::C64;
use crate::tensor::{Decomposition, RankOneTerm, Tensor};

/// Largest allowed factor norm relative to `‖T‖₂^{1/d}`, with factor norms
/// equalized within each term.
pub const ALS_GUARD_FACTOR: f64 = 1e4;

/// Checkpoints of steadily growing weights and falling residual that count
/// as a diverging run.
const DIVERGENCE_CHECKPOINTS: usize = 4;

/// Plain alternating sweeps before the damped Gauss–Newton phase.
const ALS_WARMUP: usize = 30;

#[derive(Clone, Debug)]
pub struct AlsOptions {
    pub starts: usize,
    /// Relative residual `‖T − Σ‖/‖T‖` below which a fit is accepted.
    pub fit_tol: f64,
    pub max_iter: usize,
    /// `None` disables the factor-norm guard.
    pub guard: Option<f64>,
    pub seed: u64,
}

impl Default for AlsOptions {
    fn default() -> Self {
        Self { starts: 16, fit_tol: 1e-8, max_iter: 500, guard: Some(ALS_GUARD_FACTOR), seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlsStatus {
    Fit,
    /// Factor norms exceeded the guard, or grew without bound while the
    /// residual kept falling short of the tolerance.
    GuardTripped,
    FitNotReached,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlsRun {
    pub status: AlsStatus,
    pub residual: f64,
    /// Largest term weight divided by `‖T‖₂`.
    pub max_weight_ratio: f64,
    pub iterations: usize,
    /// Unit factors, positive weights.
    pub decomposition: Decomposition<C64>,
    /// Index of the start that produced this run.
    pub start: usize,
}

struct Problem<'a> {
    dims: &'a [usize],
    /// Mode-`k` unfoldings of `T/‖T‖`, transposed: rows index the other modes.
    unfoldings: Vec<DMatrix<C64>>,
    target: &'a [C64],
    scale: f64,
}

fn khatri_rao_except(dims: &[usize], factors: &[DMatrix<C64>], k: usize, r: usize) -> DMatrix<C64> {
    let others: Vec<usize> = (0..dims.len()).filter(|&j| j != k).collect();
    let rows: usize = others.iter().map(|&j| dims[j]).product();
    let mut m = DMatrix::from_element(rows, r, C64::new(1.0, 0.0));
    let mut idx = vec![0usize; others.len()];
    for row in 0..rows {
        for c in 0..r {
            let mut p = C64::new(1.0, 0.0);
            for (pos, &j) in others.iter().enumerate() {
                p *= factors[j][(idx[pos], c)];
            }
            m[(row, c)] = p;
        }
        for pos in (0..idx.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < dims[others[pos]] {
                break;
            }
            idx[pos] = 0;
        }
    }
    m
}

fn evaluate(dims: &[usize], factors: &[DMatrix<C64>], r: usize) -> Vec<C64> {
    let n: usize = dims.iter().product();
    let mut out = vec![C64::new(0.0, 0.0); n];
    let mut idx = vec![0usize; dims.len()];
    for v in out.iter_mut() {
        for c in 0..r {
            let mut p = C64::new(1.0, 0.0);
            for (j, &i) in idx.iter().enumerate() {
                p *= factors[j][(i, c)];
            }
            *v += p;
        }
        for k in (0..dims.len()).rev() {
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

/// Term weights with factor norms equalized; returns `∏_j ‖a_{c,j}‖` per term.
fn balance(factors: &mut [DMatrix<C64>], r: usize) -> Vec<f64> {
    let d = factors.len() as f64;
    (0..r)
        .map(|c| {
            let norms: Vec<f64> = factors.iter().map(|f| f.column(c).norm()).collect();
            let w: f64 = norms.iter().product();
            if w > 0.0 {
                let target = w.powf(1.0 / d);
                for (f, n) in factors.iter_mut().zip(&norms) {
                    let s = target / n;
                    f.column_mut(c).iter_mut().for_each(|z| *z *= s);
                }
            }
            w
        })
        .collect()
}

fn residual(p: &Problem, factors: &[DMatrix<C64>], r: usize) -> f64 {
    let fit = evaluate(p.dims, factors, r);
    fit.iter().zip(p.target).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Jacobian of the CP model at `factors`; columns ordered by (term, mode, index).
fn jacobian(dims: &[usize], factors: &[DMatrix<C64>], r: usize) -> DMatrix<C64> {
    let n: usize = dims.iter().product();
    let cols = r * dims.iter().sum::<usize>();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &m| {
        let o = *acc;
        *acc += m;
        Some(o)
    }).collect();
    let per_term = dims.iter().sum::<usize>();
    let mut j = DMatrix::from_element(n, cols, C64::new(0.0, 0.0));
    let mut idx = vec![0usize; dims.len()];
    for row in 0..n {
        for c in 0..r {
            for k in 0..dims.len() {
                let mut p = C64::new(1.0, 0.0);
                for (m, &i) in idx.iter().enumerate() {
                    if m != k {
                        p *= factors[m][(i, c)];
                    }
                }
                j[(row, c * per_term + offsets[k] + idx[k])] = p;
            }
        }
        for k in (0..dims.len()).rev() {
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    j
}

fn apply_step(dims: &[usize], factors: &[DMatrix<C64>], delta: &nalgebra::DVector<C64>, r: usize) -> Vec<DMatrix<C64>> {
    let per_term = dims.iter().sum::<usize>();
    let mut out = factors.to_vec();
    for c in 0..r {
        let mut o = c * per_term;
        for (k, &m) in dims.iter().enumerate() {
            for i in 0..m {
                out[k][(i, c)] += delta[o + i];
            }
            o += m;
        }
    }
    out
}

fn lm_step(p: &Problem, factors: &[DMatrix<C64>], r: usize, damping: f64) -> Option<Vec<DMatrix<C64>>> {
    let fit = evaluate(p.dims, factors, r);
    let f = nalgebra::DVector::from_iterator(fit.len(), fit.iter().zip(p.target).map(|(a, b)| b - a));
    let j = jacobian(p.dims, factors, r);
    let jh = j.adjoint();
    let mut g = &jh * &j;
    let scale = (0..g.nrows()).map(|i| g[(i, i)].re).fold(0.0, f64::max).max(1e-300);
    for i in 0..g.nrows() {
        g[(i, i)] += C64::new(damping * scale, 0.0);
    }
    let delta = g.cholesky()?.solve(&(&jh * f));
    Some(apply_step(p.dims, factors, &delta, r))
}

fn single_run(p: &Problem, r: usize, opts: &AlsOptions, start: usize) -> AlsRun {
    let d = p.dims.len();
    let mut rng = ChaCha8Rng::seed_from_u64(probe_seed(opts.seed, start, r));
    let mut factors: Vec<DMatrix<C64>> = p
        .dims
        .iter()
        .map(|&n| {
            DMatrix::from_fn(n, r, |_, _| {
                C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)) / (2.0 * n as f64).sqrt()
            })
        })
        .collect();
    let mut res = residual(p, &factors, r);
    let mut weights = balance(&mut factors, r);
    let mut status = AlsStatus::FitNotReached;
    let mut iterations = 0;
    let mut checkpoint = res;
    let mut history: Vec<(f64, f64)> = Vec::new();
    let mut damping = 1e-3;
    while iterations < opts.max_iter {
        iterations += 1;
        if iterations <= ALS_WARMUP {
            for k in 0..d {
                let m = khatri_rao_except(p.dims, &factors, k, r);
                let Ok(sol) = m.svd(true, true).solve(&p.unfoldings[k], 1e-14) else { break };
                factors[k] = sol.transpose();
            }
        } else {
            // damped Gauss–Newton: geometric progress along degenerate paths
            let mut accepted = false;
            while damping < 1e12 {
                if let Some(trial) = lm_step(p, &factors, r, damping) {
                    let trial_res = residual(p, &trial, r);
                    if trial_res < res {
                        factors = trial;
                        damping = (damping / 3.0).max(1e-15);
                        accepted = true;
                        break;
                    }
                }
                damping *= 4.0;
            }
            if !accepted {
                break;
            }
        }
        weights = balance(&mut factors, r);
        res = residual(p, &factors, r);
        let max_w = weights.iter().copied().fold(0.0, f64::max);
        if res < opts.fit_tol {
            status = AlsStatus::Fit;
            break;
        }
        if opts.guard.is_some_and(|g| max_w.powf(1.0 / d as f64) > g) {
            status = AlsStatus::GuardTripped;
            break;
        }
        if iterations % 50 == 0 {
            history.push((res, max_w));
            if res > checkpoint * (1.0 - 1e-3) {
                break;
            }
            checkpoint = res;
        }
    }
    if status == AlsStatus::FitNotReached && opts.guard.is_some() && diverging(&history) {
        status = AlsStatus::GuardTripped;
    }
    let max_w = weights.iter().copied().fold(0.0, f64::max);
    let terms = (0..r)
        .filter(|&c| weights[c] > 0.0)
        .map(|c| {
            let fs: Vec<Vec<C64>> = factors
                .iter()
                .map(|f| {
                    let col = f.column(c);
                    let n = col.norm();
                    col.iter().map(|z| z / n).collect()
                })
                .collect();
            RankOneTerm::new(C64::new(weights[c] * p.scale, 0.0), fs)
        })
        .collect();
    let shape = crate::tensor::Shape::new(p.dims.to_vec()).expect("valid dims");
    AlsRun {
        status,
        residual: res,
        max_weight_ratio: max_w,
        iterations,
        decomposition: Decomposition::new(shape, terms).expect("matching lengths"),
        start,
    }
}

fn diverging(history: &[(f64, f64)]) -> bool {
    history.len() > DIVERGENCE_CHECKPOINTS
        && history[history.len() - DIVERGENCE_CHECKPOINTS - 1..]
            .windows(2)
            .all(|w| w[1].0 < w[0].0 && w[1].1 > 1.005 * w[0].1)
}

/// Multi-start ALS at a fixed number of terms. Starts run in order and the
/// first accepted fit is returned; otherwise the run with the smallest residual.
pub fn als_fit(t: &Tensor, r: usize, opts: &AlsOptions) -> Result<AlsRun> {
    let scale = t.frobenius_norm();
    if scale == 0.0 {
        return Err(Error::ZeroTensor);
    }
    if r == 0 || opts.starts == 0 {
        return Err(Error::InvalidArgument("ALS needs r ≥ 1 and at least one start".into()));
    }
    let a = t.scale(&C64::new(1.0 / scale, 0.0));
    let unfoldings = (0..t.order())
        .map(|k| {
            let m = a.flatten(&[k]).expect("proper mode subset");
            DMatrix::from_row_slice(m.rows(), m.cols(), m.data()).transpose()
        })
        .collect();
    let p = Problem { dims: t.dims(), unfoldings, target: a.entries(), scale };
    let mut best: Option<AlsRun> = None;
    for s in 0..opts.starts {
        let run = single_run(&p, r, opts, s);
        if run.status == AlsStatus::Fit {
            return Ok(run);
        }
        if best.as_ref().map_or(true, |b| run.residual < b.residual) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one start"))
}

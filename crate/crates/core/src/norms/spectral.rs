use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{contract_except, inner, overlap, vec_norm};
use crate::error::{Error, Result};
use crate::generic::probe_seed;
use crate::scalar::C64;
use crate::symmetric::SYMMETRY_TOL;
use crate::tensor::{RankOneTerm, Tensor};

pub const DEFAULT_GRID_RESOLUTION: usize = 100;

#[derive(Clone, Debug)]
pub struct SpectralOptions {
    pub starts: usize,
    /// Relative change of the Rayleigh value that ends one run.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative distance to the best value within which a start counts as converged.
    pub agree_tol: f64,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { starts: 64, tol: 1e-12, max_iter: 2000, agree_tol: 1e-8, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    /// Attained by `maximizer`, hence a lower bound on `‖T‖∞`.
    pub value: f64,
    /// Unit factors; the weight is `⟨T, ⊗x_j⟩`, so `weight · ⊗x_j` is a best
    /// rank-one approximation when `value` is the norm.
    pub maximizer: RankOneTerm<C64>,
    pub starts: usize,
    pub starts_converged: usize,
    pub iterations: usize,
    /// At least half of the starts reached `value`.
    pub accepted: bool,
}

struct Run {
    value: f64,
    factors: Vec<Vec<C64>>,
    iterations: usize,
}

fn normalize(v: &mut [C64]) -> f64 {
    let n = vec_norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    n
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..n)
            .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        if normalize(&mut v) > 0.0 {
            return v;
        }
    }
}

/// Leading left singular vector of each single-mode flattening.
fn hosvd_start(t: &Tensor) -> Vec<Vec<C64>> {
    (0..t.order())
        .map(|k| {
            let (u, _, _) = t.flatten(&[k]).expect("proper mode subset").svd();
            (0..u.rows()).map(|i| *u.get(i, 0)).collect()
        })
        .collect()
}

/// Alternating power iteration from `x`.
fn hopm(entries: &[C64], dims: &[usize], mut x: Vec<Vec<C64>>, tol: f64, max_iter: usize) -> Run {
    let mut value = overlap(entries, dims, &x).norm();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut new = value;
        for k in 0..dims.len() {
            let mut v = contract_except(entries, dims, &x, k);
            let n = normalize(&mut v);
            if n == 0.0 {
                break;
            }
            x[k] = v;
            new = n;
        }
        let done = (new - value).abs() <= tol * new.max(f64::MIN_POSITIVE);
        value = new;
        if done {
            break;
        }
    }
    Run { value: overlap(entries, dims, &x).norm(), factors: x, iterations }
}

/// Power iteration on a single factor for `max |⟨S, x^{⊗d}⟩|`, with a shift
/// increased whenever a plain step would decrease the value.
fn symmetric_hopm(entries: &[C64], dims: &[usize], mut x: Vec<C64>, tol: f64, max_iter: usize) -> Run {
    let d = dims.len();
    let eval = |x: &Vec<C64>| overlap(entries, dims, &vec![x.clone(); d]);
    let mut f = eval(&x);
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let phase = C64::from_polar(1.0, f.arg() / d as f64);
        x.iter_mut().for_each(|z| *z *= phase);
        let value = f.norm();
        let v = contract_except(entries, dims, &vec![x.clone(); d], 0);
        let mut shift = 0.0;
        let (cand, fc) = loop {
            let mut c: Vec<C64> = v.iter().zip(&x).map(|(a, b)| a + b * shift).collect();
            normalize(&mut c);
            let fc = eval(&c);
            if fc.norm() >= value * (1.0 - 4.0 * f64::EPSILON) || shift > 1e8 * value.max(f64::MIN_POSITIVE) {
                break (c, fc);
            }
            shift = if shift == 0.0 { value } else { 2.0 * shift };
        };
        let improved = fc.norm() >= value;
        if improved {
            x = cand;
            f = fc;
        }
        if !improved || (fc.norm() - value).abs() <= tol * fc.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Run { value: f.norm(), factors: vec![x; d], iterations }
}

fn finish(entries: &[C64], dims: &[usize], runs: Vec<Run>, agree_tol: f64) -> SpectralResult {
    let starts = runs.len();
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let best = runs
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.value > runs[b].value { i } else { b });
    let value = runs[best].value;
    let starts_converged = runs.iter().filter(|r| r.value >= value * (1.0 - agree_tol)).count();
    let factors = runs.into_iter().nth(best).expect("at least one start").factors;
    let weight = overlap(entries, dims, &factors);
    SpectralResult {
        value: weight.norm(),
        maximizer: RankOneTerm::new(weight, factors),
        starts,
        starts_converged,
        iterations,
        accepted: 2 * starts_converged >= starts,
    }
}

fn exact_result(t: &Tensor, factors: Vec<Vec<C64>>) -> SpectralResult {
    let weight = overlap(t.entries(), t.dims(), &factors);
    SpectralResult {
        value: weight.norm(),
        maximizer: RankOneTerm::new(weight, factors),
        starts: 1,
        starts_converged: 1,
        iterations: 0,
        accepted: true,
    }
}

fn check_nonzero(t: &Tensor) -> Result<()> {
    if t.frobenius_norm() == 0.0 {
        Err(Error::ZeroTensor)
    } else {
        Ok(())
    }
}

/// Spectral norm `‖T‖∞ = max |⟨T, ⊗x_j⟩|` over unit vectors.
///
/// Vectors and matrices are handled exactly through the 2-norm and the SVD.
/// Higher orders use multi-start alternating power iteration; the first
/// start is the truncated HOSVD, the rest are complex Gaussian.
pub fn spectral_norm(t: &Tensor, opts: &SpectralOptions) -> Result<SpectralResult> {
    check_nonzero(t)?;
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    match t.order() {
        1 => {
            let mut x = t.entries().to_vec();
            normalize(&mut x);
            return Ok(exact_result(t, vec![x]));
        }
        2 => {
            let (u, _, vh) = t.flatten(&[0])?.svd();
            let x = (0..u.rows()).map(|i| *u.get(i, 0)).collect();
            let y = vh.row(0).to_vec();
            return Ok(exact_result(t, vec![x, y]));
        }
        _ => {}
    }
    let (entries, dims) = (t.entries(), t.dims());
    let runs: Vec<Run> = (0..opts.starts)
        .into_par_iter()
        .map(|s| {
            let x0 = if s == 0 {
                hosvd_start(t)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(probe_seed(opts.seed, s, 0));
                dims.iter().map(|&n| random_unit(&mut rng, n)).collect()
            };
            hopm(entries, dims, x0, opts.tol, opts.max_iter)
        })
        .collect();
    Ok(finish(entries, dims, runs, opts.agree_tol))
}

/// Spectral norm of a `2 × m × n` tensor as `max σ_max(x̄₁T₁ + x̄₂T₂)` over
/// `x = (cos θ, e^{iφ} sin θ)`: grid sweep, compass refinement, then an
/// alternating-power polish.
pub fn spectral_norm_2slice(t: &Tensor, resolution: usize) -> Result<SpectralResult> {
    if t.order() != 3 || t.dims()[0] != 2 {
        return Err(Error::InvalidShape(format!("expected a 2 × m × n tensor, got {}", t.shape())));
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    check_nonzero(t)?;
    let (m, n) = (t.dims()[1], t.dims()[2]);
    let t1 = DMatrix::from_row_slice(m, n, &t.entries()[..m * n]);
    let t2 = DMatrix::from_row_slice(m, n, &t.entries()[m * n..]);
    let x_of = |th: f64, ph: f64| [C64::new(th.cos(), 0.0), C64::from_polar(th.sin(), ph)];
    let pencil = |th: f64, ph: f64| {
        let [a, b] = x_of(th, ph);
        &t1 * a.conj() + &t2 * b.conj()
    };
    let mut evals = 0usize;
    let mut sigma = |th: f64, ph: f64| {
        evals += 1;
        pencil(th, ph).singular_values().max()
    };

    let (dth, dph) = (std::f64::consts::FRAC_PI_2 / resolution as f64, std::f64::consts::TAU / resolution as f64);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=resolution {
        for j in 0..resolution {
            let (th, ph) = (i as f64 * dth, j as f64 * dph);
            let s = sigma(th, ph);
            if s > best.0 {
                best = (s, th, ph);
            }
        }
    }
    let (mut sth, mut sph) = (dth, dph);
    while sth > 1e-12 || sph > 1e-12 {
        let (_, th, ph) = best;
        let mut moved = false;
        for (a, b) in [(sth, 0.0), (-sth, 0.0), (0.0, sph), (0.0, -sph)] {
            let s = sigma(th + a, ph + b);
            if s > best.0 {
                best = (s, th + a, ph + b);
                moved = true;
            }
        }
        if !moved {
            sth /= 2.0;
            sph /= 2.0;
        }
    }

    let (_, th, ph) = best;
    let svd = pencil(th, ph).svd(true, true);
    let top = svd.singular_values.imax();
    let u = svd.u.expect("U requested").column(top).iter().copied().collect();
    let v = svd.v_t.expect("Vᴴ requested").row(top).iter().copied().collect();
    let start = vec![x_of(th, ph).to_vec(), u, v];
    let run = hopm(t.entries(), t.dims(), start, 1e-14, 200);
    let mut result = finish(t.entries(), t.dims(), vec![run], 0.0);
    result.iterations += evals;
    Ok(result)
}

/// Spectral norm of a symmetric tensor, attained at some `x^{⊗d}`.
pub fn symmetric_spectral_norm(s: &Tensor, opts: &SpectralOptions) -> Result<SpectralResult> {
    check_nonzero(s)?;
    if !s.is_symmetric_tol(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric);
    }
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let (entries, dims) = (s.entries(), s.dims());
    let n = dims[0];
    let runs: Vec<Run> = (0..opts.starts)
        .into_par_iter()
        .map(|k| {
            let x0 = if k == 0 {
                hosvd_start(s).swap_remove(0)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(probe_seed(opts.seed, k, 1));
                random_unit(&mut rng, n)
            };
            symmetric_hopm(entries, dims, x0, opts.tol, opts.max_iter)
        })
        .collect();
    let result = finish(entries, dims, runs, opts.agree_tol);
    debug_assert!((inner(&result.maximizer.factors[0], &result.maximizer.factors[0]).re - 1.0).abs() < 1e-9);
    Ok(result)
}

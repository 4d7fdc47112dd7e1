//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensorank::combinatorics::{
    fractional_bound, greedy_dominating, perfect_code_rank, verify_3separated, verify_dominating, VertexSet,
};
use tensorank::generic::{generic_rank, max_rank_upper_bounds, r0_lower_bound, GenericRankOptions};
use tensorank::norms::{
    entanglement_measures, nuclear_norm, nuclear_norm_with, spectral_norm, verify_w3_nuclear_decomposition,
    w3_nuclear_decomposition, NuclearOptions, SpectralOptions,
};
use tensorank::pencil::{classify_222, max_rank_mn2, rank_mxnx2, Orbit222};
use tensorank::rank_bounds::{
    als_fit, als_rank_upper, determinant_lower_certificate, flattening_lower_bound, rank_report, AlsOptions, AlsStatus,
};
use tensorank::symmetric::{
    ah_generic_symmetric_rank, border_rank_residual, ghz_state, ghz_state_normalized, symmetric_dim,
    symmetric_terracini_rank, w_state, w_state_normalized, waring_w3kron_decomposition, wkron2, AH_EXCEPTIONS,
};
use tensorank::{ExactTensor, Shape, Tensor, C64};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn shape(d: &[usize]) -> Shape {
    Shape::new(d.to_vec()).unwrap()
}

fn r_gen(d: &[usize]) -> usize {
    generic_rank(&shape(d), &GenericRankOptions::default()).unwrap().r_gen
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn generic_rank_table() -> Outcome {
    let mut rows: Vec<(Vec<usize>, usize)> = Vec::new();
    for (n, v) in (2..=6).zip([2, 5, 7, 10, 14]) {
        rows.push((vec![n; 3], v));
    }
    for (n, v) in (2..=3).zip([4, 9]) {
        rows.push((vec![n; 4], v));
    }
    for (d, v) in (2..=8).zip([2, 2, 4, 6, 10, 16, 29]) {
        rows.push((vec![2; d], v));
    }
    let (mut total, mut slowest) = (Duration::ZERO, Duration::ZERO);
    for (d, expected) in rows {
        let (got, t) = timed(|| r_gen(&d));
        ensure!(got == expected, "{d:?}: got {got}, expected {expected}");
        ensure!(t < Duration::from_secs(60), "{d:?} took {t:?}");
        total += t;
        slowest = slowest.max(t);
    }
    ensure!(total < Duration::from_secs(600), "table took {total:?}");
    Ok(format!("14 shapes in {total:.2?}, slowest {slowest:.2?}"))
}

fn three_by_three_row() -> Outcome {
    let got: Vec<usize> = (1..=9).map(|p| r_gen(&[3, 3, p])).collect();
    ensure!(got == [3, 3, 5, 5, 5, 6, 7, 8, 9], "got {got:?}");
    Ok(format!("{got:?}"))
}

fn pencil_exactness() -> Outcome {
    let w: ExactTensor = w_state(3).unwrap();
    let ghz: ExactTensor = ghz_state(2, 3).unwrap();
    let (cw, cg) = (classify_222(&w).unwrap(), classify_222(&ghz).unwrap());
    ensure!(cw.rank == 3 && cw.orbit == Orbit222::WClass, "W: {cw:?}");
    ensure!(cg.rank == 2 && cg.orbit == Orbit222::Case2c, "GHZ: {cg:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 200 {
        let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let t = common::random_exact(&mut rng, &[m, n, 2], 2);
        if t.is_zero() {
            continue;
        }
        let pencil = rank_mxnx2(&t).unwrap().rank;
        let flat = flattening_lower_bound(&t).value;
        let cap = max_rank_mn2(m, n).unwrap();
        let als = als_rank_upper(&t.to_c64(), cap, &AlsOptions::default()).unwrap().map(|c| c.value);
        ensure!(flat <= pencil, "{m}x{n}x2: flattening {flat} > pencil {pencil}");
        ensure!(als == Some(pencil), "{m}x{n}x2: ALS {als:?}, pencil {pencil}");
        checked += 1;
    }
    let spots = (max_rank_mn2(2, 2).unwrap(), max_rank_mn2(3, 3).unwrap());
    ensure!(spots == (3, 4), "max ranks {spots:?}");
    Ok("W 3, GHZ 2, 200 random pencils agree with ALS".into())
}

fn norm_values() -> Outcome {
    let limit = Duration::from_secs(5);
    let w = w_state_normalized(3).unwrap();
    let (s, ts) = timed(|| spectral_norm(&w, &SpectralOptions::default()).unwrap().value);
    ensure!((s - 2.0 / 3.0).abs() < 1e-8, "W spectral {s}");
    let (nw, tn) = timed(|| nuclear_norm_with(&w, &NuclearOptions::default()).unwrap());
    ensure!((nw.primal_value - 1.5).abs() < 1e-4, "W nuclear {}", nw.primal_value);
    ensure!(nw.gap < 1e-4, "W duality gap {:e}", nw.gap);
    ensure!((s * nw.primal_value - 1.0).abs() < 1e-4, "norm product {}", s * nw.primal_value);
    let ghz: Tensor = ghz_state(2, 3).unwrap();
    let (ng, tg) = timed(|| nuclear_norm_with(&ghz, &NuclearOptions::default()).unwrap().primal_value);
    ensure!((ng - 2.0).abs() < 1e-6, "GHZ nuclear {ng}");
    let (eta, te) = timed(|| entanglement_measures(&ghz_state_normalized(2, 3).unwrap(), None).unwrap().eta);
    ensure!((eta - 1.0).abs() < 1e-6, "GHZ eta {eta}");
    for (name, t) in [("W spectral", ts), ("W nuclear", tn), ("GHZ nuclear", tg), ("GHZ eta", te)] {
        ensure!(t < limit, "{name} took {t:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let (m, n) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let t = Tensor::from_fn(shape(&[m, n]), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let sv = t.flatten(&[0]).unwrap().singular_values();
        let (top, sum) = (sv.iter().cloned().fold(0.0, f64::max), sv.iter().sum::<f64>());
        let s = spectral_norm(&t, &SpectralOptions::default()).unwrap().value;
        let nuc = nuclear_norm(&t, 8, 1e-9).unwrap().primal_value;
        ensure!((s - top).abs() <= 1e-9 * top && (nuc - sum).abs() <= 1e-9 * sum, "{m}x{n} matrix disagrees with its SVD");
    }
    let slowest = [ts, tn, tg, te].into_iter().max().unwrap();
    Ok(format!("W {s:.10} / {:.6} (gap {:.1e}), GHZ {ng:.8}, eta {eta:.8}, slowest {slowest:.2?}", nw.primal_value, nw.gap))
}

fn w3_nuclear_decomposition_check() -> Outcome {
    let dec = w3_nuclear_decomposition();
    let err = dec.evaluate().max_abs_diff(&w_state_normalized(3).unwrap()).unwrap();
    let energy: f64 = dec.terms().iter().map(|t| t.weight.norm()).sum();
    ensure!(err < 1e-12, "reconstruction error {err:e}");
    ensure!((energy - 1.5).abs() < 1e-12, "energy {energy}");
    ensure!(verify_w3_nuclear_decomposition(), "unit factors or reconstruction rejected");
    Ok(format!("error {err:.1e}, energy {energy}"))
}

fn wkron2_rank() -> Outcome {
    let t: ExactTensor = wkron2();
    let flat = flattening_lower_bound(&t);
    ensure!(flat.value == 4, "flattening {}", flat.value);
    let det = determinant_lower_certificate(&t, 0).unwrap().ok_or("no determinant certificate")?;
    det.verify(&t).map_err(|e| e.to_string())?;
    ensure!(det.value == 7, "determinant bound {}", det.value);
    let waring = waring_w3kron_decomposition();
    ensure!(waring.len() == 7 && waring.evaluate() == t, "Waring decomposition does not evaluate to the tensor");
    let report = rank_report(&t).unwrap();
    report.verify(&t).map_err(|e| e.to_string())?;
    ensure!(report.exact == Some(7), "report {}..{}", report.lower, report.upper);
    Ok("flattening 4, determinant 7, Waring 7, report exact 7".into())
}

fn alexander_hirschowitz() -> Outcome {
    let mut cases = 0;
    let mut exceptions = 0;
    for n in 2..=40usize {
        for d in 2..=600u32 {
            let dim = symmetric_dim(d, n);
            if dim > 500 {
                break;
            }
            let ah = ah_generic_symmetric_rank(d, n).unwrap().value;
            let seed = (d as u64) << 32 | n as u64;
            let full = symmetric_terracini_rank(d, n, ah, seed).unwrap();
            let below = symmetric_terracini_rank(d, n, ah - 1, seed).unwrap();
            ensure!(full as u128 == dim, "(d={d}, n={n}): rank {full} at r={ah}, dimension {dim}");
            ensure!((below as u128) < dim, "(d={d}, n={n}): already full at r={}", ah - 1);
            cases += 1;
            exceptions += usize::from(AH_EXCEPTIONS.contains(&(d, n)));
        }
    }
    ensure!(exceptions == AH_EXCEPTIONS.len(), "only {exceptions} exceptions in range");
    Ok(format!("{cases} (d, n) pairs, {exceptions} exceptions"))
}

fn covering_sets() -> Outcome {
    let s = shape(&[3, 3, 3]);
    let a = VertexSet::from_coords(s.clone(), &[&[1, 1, 1], &[2, 2, 2], &[3, 3, 3], &[1, 1, 2], &[2, 2, 3], &[3, 3, 1]])
        .unwrap();
    let b = VertexSet::from_coords(s, &[&[1, 1, 1], &[2, 2, 2], &[3, 3, 3]]).unwrap();
    ensure!(a.len() == 6 && verify_dominating(&a).unwrap(), "A is not dominating");
    ensure!(b.len() == 3 && verify_3separated(&b), "B is not 3-separated");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let order = rng.gen_range(2..=5);
        let dims: Vec<usize> = (0..order).map(|_| rng.gen_range(2..=5)).collect();
        let s = shape(&dims);
        let dom = greedy_dominating(&s).unwrap();
        ensure!(verify_dominating(&dom).unwrap(), "{dims:?}: greedy set does not dominate");
        ensure!(fractional_bound(&s) <= num_rational::Ratio::from_integer(dom.len() as u128), "{dims:?}: below N/M");
    }
    ensure!(perfect_code_rank(2, 7) == Some(16), "perfect_code_rank(2,7) = {:?}", perfect_code_rank(2, 7));
    Ok("A and B verify, 20 greedy sets verify, perfect code rank 16".into())
}

fn border_rank() -> Outcome {
    let w: Tensor = w_state(3).unwrap();
    let guarded = als_fit(&w, 2, &AlsOptions::default()).unwrap();
    ensure!(guarded.status == AlsStatus::GuardTripped, "guarded ALS at r=2: {:?}", guarded.status);
    let res: Vec<f64> = [0.1, 0.01, 0.001].iter().map(|&t| border_rank_residual(3, t).unwrap()).collect();
    for pair in res.windows(2) {
        let ratio = pair[0] / pair[1];
        ensure!((8.0..=12.0).contains(&ratio), "residual ratio {ratio} per decade");
    }
    let exact: ExactTensor = w_state(3).unwrap();
    let pencil = rank_mxnx2(&exact).unwrap().rank;
    ensure!(pencil == 3, "pencil rank {pencil}");
    Ok(format!("guard tripped, residuals {:.2e}, {:.2e}, {:.2e}, pencil rank 3", res[0], res[1], res[2]))
}

fn bound_chain() -> Outcome {
    let corpus: [&[usize]; 30] = [
        &[2, 2],
        &[3, 4],
        &[2, 2, 2],
        &[2, 2, 3],
        &[2, 3, 3],
        &[3, 3, 3],
        &[2, 3, 4],
        &[3, 3, 4],
        &[3, 4, 4],
        &[4, 4, 4],
        &[2, 4, 5],
        &[3, 5, 5],
        &[4, 4, 5],
        &[5, 5, 5],
        &[2, 2, 6],
        &[3, 3, 7],
        &[2, 5, 6],
        &[4, 5, 6],
        &[2, 2, 2, 2],
        &[2, 2, 2, 3],
        &[2, 2, 3, 3],
        &[2, 3, 3, 3],
        &[3, 3, 3, 3],
        &[2, 2, 2, 4],
        &[2, 2, 2, 2, 2],
        &[2, 2, 2, 2, 3],
        &[2, 2, 3, 3, 3],
        &[2, 2, 2, 2, 2, 2],
        &[3, 3, 3, 3, 2],
        &[2, 2, 2, 2, 2, 2, 2],
    ];
    for d in corpus {
        let s = shape(d);
        let (r0, g) = (r0_lower_bound(&s), r_gen(d));
        let gamma = greedy_dominating(&s).unwrap().len();
        let cap = max_rank_upper_bounds(&s).best;
        ensure!(r0 <= g && g <= gamma && g <= cap, "{d:?}: r0 {r0}, r_gen {g}, greedy {gamma}, max-rank bound {cap}");
    }
    Ok("30 shapes".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("generic-rank table", generic_rank_table),
        ("3x3xp generic ranks", three_by_three_row),
        ("pencil exactness", pencil_exactness),
        ("spectral and nuclear norms", norm_values),
        ("W3 nuclear decomposition", w3_nuclear_decomposition_check),
        ("rank of W3 (x) W3", wkron2_rank),
        ("symmetric generic ranks", alexander_hirschowitz),
        ("dominating and separated sets", covering_sets),
        ("border rank of W3", border_rank),
        ("bound chain", bound_chain),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (outcome, t) = timed(|| catch_unwind(AssertUnwindSafe(check)));
        let outcome = outcome.unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{t:.2?}]", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why} [{t:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

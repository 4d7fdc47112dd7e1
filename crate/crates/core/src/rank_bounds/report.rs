use serde::Serialize;

use super::als::{als_fit, AlsOptions, AlsStatus};
use super::certificate::{bounds_of, combine_parts, Bound, CertificateKind, DirectSumPart, PartSummary, Payload, RankCertificate};
use super::determinant::determinant_lower_certificate;
use super::flattening::{flattening_lower_bound, mode_ranks};
use super::known::{construction_certificate, lookup, named_state_certificate};
use super::kruskal::kruskal_certificate;
use super::{extract, matrix_rank_factors, squeeze, support_components};
use crate::error::{Error, Result};
use crate::generic::max_rank_upper_bounds;
use crate::pencil::rank_mxnx2;
use crate::scalar::{ExactField, GaussianRational, Scalar, C64};
use crate::tensor::{Decomposition, ExactTensor, RankOneTerm, Tensor};

/// Denominator bound when trying to read an ALS fit as an exact decomposition.
const RATIONALIZE_MAX_DEN: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct RankReportOptions {
    pub als: AlsOptions,
    /// Skip numeric fitting and report exact evidence only.
    pub exact_only: bool,
    /// Largest number of terms ALS tries.
    pub cap: Option<usize>,
    /// Seed for the determinant probes.
    pub seed: u64,
    /// ALS is skipped at `r` when `N·(r·Σn)²` exceeds this.
    pub als_budget: f64,
}

impl Default for RankReportOptions {
    fn default() -> Self {
        Self { als: AlsOptions::default(), exact_only: false, cap: None, seed: 0, als_budget: 2e7 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnownRank {
    pub name: String,
    pub lower: usize,
    pub upper: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankReport {
    pub lower: usize,
    pub upper: usize,
    pub exact: Option<usize>,
    /// Table value for a recognised named tensor; never enters `lower`/`upper`.
    pub known: Option<KnownRank>,
    pub certificates: Vec<RankCertificate>,
}

impl RankReport {
    /// Re-verifies every certificate against `t` and re-derives the bounds.
    pub fn verify(&self, t: &ExactTensor) -> Result<()> {
        for c in &self.certificates {
            c.verify(t)?;
        }
        let (lower, upper) = bounds_of(&self.certificates);
        if lower != self.lower || upper != Some(self.upper) || self.exact != (lower == self.upper).then_some(lower) {
            return Err(Error::VerificationFailed(format!(
                "certificates give {lower}..{upper:?}, report says {}..{}",
                self.lower, self.upper
            )));
        }
        Ok(())
    }
}

fn exact_decomposition_certificate(dec: Decomposition<GaussianRational>) -> RankCertificate {
    RankCertificate { kind: CertificateKind::DecompositionUpper, value: dec.len(), payload: Payload::ExactDecomposition(dec) }
}

/// Each factor scaled so its largest entry is 1, then every number replaced by
/// a nearby rational; `Some` only when the result reproduces `t` exactly.
fn rationalize(dec: &Decomposition<C64>, t: &ExactTensor) -> Option<Decomposition<GaussianRational>> {
    let terms = dec
        .terms()
        .iter()
        .map(|term| {
            let mut w = term.weight;
            let factors = term
                .factors
                .iter()
                .map(|f| {
                    let pivot = *f.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("nonempty factor");
                    w *= pivot;
                    f.iter().map(|x| GaussianRational::rationalize(x / pivot, RATIONALIZE_MAX_DEN)).collect()
                })
                .collect();
            RankOneTerm::new(GaussianRational::rationalize(w, RATIONALIZE_MAX_DEN), factors)
        })
        .collect();
    let exact = Decomposition::new(dec.shape().clone(), terms).ok()?;
    (exact.evaluate() == *t).then_some(exact)
}

fn numeric_certificate(dec: Decomposition<C64>, opts: &AlsOptions) -> RankCertificate {
    RankCertificate {
        kind: CertificateKind::DecompositionUpper,
        value: dec.len(),
        payload: Payload::NumericDecomposition { decomposition: dec, fit_tol: opts.fit_tol, guard: opts.guard },
    }
}

/// Smallest `r ≤ r_cap`, from the numeric flattening bound upward, at which
/// guarded ALS fits `t`.
pub fn als_rank_upper(t: &Tensor, r_cap: usize, opts: &AlsOptions) -> Result<Option<RankCertificate>> {
    if t.frobenius_norm() == 0.0 {
        return Err(Error::ZeroTensor);
    }
    let start = if t.order() < 2 {
        1
    } else {
        (0..t.order()).map(|k| t.flatten(&[k]).map(|m| m.numeric_rank(1e-9))).collect::<Result<Vec<_>>>()?.into_iter().max().unwrap_or(1)
    };
    for r in start.max(1)..=r_cap {
        let run = als_fit(t, r, opts)?;
        if run.status == AlsStatus::Fit {
            return Ok(Some(numeric_certificate(run.decomposition, opts)));
        }
    }
    Ok(None)
}

fn fiber_decomposition(t: &ExactTensor) -> Decomposition<GaussianRational> {
    let d = t.order();
    let big = (0..d).max_by_key(|&k| (t.dims()[k], usize::MAX - k)).expect("at least one mode");
    let rest: Vec<usize> = (0..d).filter(|&k| k != big).collect();
    let sub_dims: Vec<usize> = rest.iter().map(|&k| t.dims()[k]).collect();
    let mut terms = Vec::new();
    let mut idx = vec![0; d];
    for outer in crate::tensor::IndexIter::new(&sub_dims) {
        for (&k, &i) in rest.iter().zip(&outer) {
            idx[k] = i;
        }
        let fiber: Vec<GaussianRational> = (0..t.dims()[big])
            .map(|i| {
                idx[big] = i;
                t.get(&idx).clone()
            })
            .collect();
        if fiber.iter().all(|x| x.is_zero()) {
            continue;
        }
        let factors = (0..d)
            .map(|k| {
                if k == big {
                    fiber.clone()
                } else {
                    crate::tensor::basis_vector(t.dims()[k], idx[k])
                }
            })
            .collect();
        terms.push(RankOneTerm::new(GaussianRational::one(), factors));
    }
    Decomposition::new(t.shape().clone(), terms).expect("consistent lengths")
}

/// [`rank_report_with`] at default options.
pub fn rank_report(t: &ExactTensor) -> Result<RankReport> {
    rank_report_with(t, &RankReportOptions::default())
}

/// Collects rank evidence for `t` and merges it into certified bounds.
pub fn rank_report_with(t: &ExactTensor, opts: &RankReportOptions) -> Result<RankReport> {
    let s = squeeze(t);
    let mut certs = vec![flattening_lower_bound(&s)];
    if s.is_zero() {
        certs.push(exact_decomposition_certificate(Decomposition::new(s.shape().clone(), Vec::new())?));
        return finish(&s, certs);
    }
    match s.order() {
        1 => {
            let term = RankOneTerm::new(GaussianRational::one(), vec![s.entries().to_vec()]);
            certs.push(exact_decomposition_certificate(Decomposition::new(s.shape().clone(), vec![term])?));
            return finish(&s, certs);
        }
        2 => {
            let m = s.flatten(&[0])?;
            let terms = matrix_rank_factors(&m)
                .into_iter()
                .map(|(c, r)| RankOneTerm::new(GaussianRational::one(), vec![c, r]))
                .collect();
            certs.push(exact_decomposition_certificate(Decomposition::new(s.shape().clone(), terms)?));
            return finish(&s, certs);
        }
        _ => {}
    }

    let comps = support_components(&s);
    if comps.len() >= 2 {
        let mut parts = Vec::with_capacity(comps.len());
        let mut summaries = Vec::with_capacity(comps.len());
        for indices in comps {
            let block = extract(&s, &indices)?;
            let sub = rank_report_with(&block, opts)?;
            summaries.push(PartSummary {
                shape: block.shape().clone(),
                lower: sub.lower,
                upper: Some(sub.upper),
                flattening: mode_ranks(&block),
            });
            let certificates = sub.certificates.into_iter().filter(|c| c.bound() != Bound::Informational).collect();
            parts.push(DirectSumPart { indices, certificates });
        }
        for bound in [Bound::Lower, Bound::Upper] {
            if let Some(value) = combine_parts(&summaries, bound) {
                let payload = Payload::DirectSum { bound, parts: parts.clone() };
                certs.push(RankCertificate { kind: CertificateKind::DirectSum, value, payload });
            }
        }
    }

    if s.order() == 3 && s.dims().contains(&2) {
        let p = rank_mxnx2(&s)?;
        certs.push(RankCertificate {
            kind: CertificateKind::PencilExact,
            value: p.rank,
            payload: Payload::Pencil { certificate: p.certificate },
        });
    }

    let (lower, upper) = bounds_of(&certs);
    if upper != Some(lower) {
        if let Some(c) = determinant_lower_certificate(&s, opts.seed)? {
            if c.value > lower {
                certs.push(c);
            }
        }
        if let Some(c) = construction_certificate(&s) {
            certs.push(c);
        }
        let caps = max_rank_upper_bounds(s.shape());
        let cap = caps.bounds.iter().find(|b| b.value == caps.best).expect("best is one of the bounds");
        certs.push(RankCertificate {
            kind: CertificateKind::TableKnown,
            value: cap.value,
            payload: Payload::MaxRankCap { label: cap.label.to_string() },
        });
        let fibers = fiber_decomposition(&s);
        if fibers.len() < caps.best {
            certs.push(exact_decomposition_certificate(fibers));
        }
    }

    let (lower, upper) = bounds_of(&certs);
    let upper = upper.expect("a decomposition or cap is always present");
    if !opts.exact_only && lower < upper {
        let numeric = s.to_c64();
        let n = s.entries().len() as f64;
        let width: usize = s.dims().iter().sum();
        let last = opts.cap.map_or(upper - 1, |c| c.min(upper - 1));
        for r in lower.max(1)..=last {
            let params = (r * width) as f64;
            if n * params * params > opts.als_budget {
                break;
            }
            let run = als_fit(&numeric, r, &opts.als)?;
            if run.status != AlsStatus::Fit {
                continue;
            }
            match rationalize(&run.decomposition, &s) {
                Some(exact) => {
                    if exact.len() <= super::KRUSKAL_MAX_VECTORS {
                        if let Ok(Some(k)) = kruskal_certificate(&exact) {
                            certs.push(k);
                        }
                    }
                    certs.push(exact_decomposition_certificate(exact));
                }
                None => certs.push(numeric_certificate(run.decomposition, &opts.als)),
            }
            break;
        }
    }

    if let Some(c) = named_state_certificate(&s) {
        certs.push(c);
    }
    finish(&s, certs)
}

fn finish(s: &ExactTensor, certificates: Vec<RankCertificate>) -> Result<RankReport> {
    let (lower, upper) = bounds_of(&certificates);
    let upper = upper.ok_or_else(|| Error::VerificationFailed("no upper bound certificate".into()))?;
    if lower > upper {
        return Err(Error::Contradiction(format!("certified lower bound {lower} exceeds upper bound {upper}")));
    }
    let known = lookup(s).map(|e| KnownRank { name: e.name, lower: e.lower, upper: e.upper });
    if let Some(k) = &known {
        if k.lower > upper || k.upper < lower {
            return Err(Error::Contradiction(format!(
                "{} has table rank {}..{}, computed bounds are {lower}..{upper}",
                k.name, k.lower, k.upper
            )));
        }
    }
    Ok(RankReport { lower, upper, exact: (lower == upper).then_some(lower), known, certificates })
}

use serde::Serialize;

use super::determinant::DeterminantWitness;
use super::strassen::{strassen_condition_with, SummandEvidence};
use super::{extract, flattening, known, kruskal, squeeze};
use crate::error::{Error, Result};
use crate::generic::max_rank_upper_bounds;
use crate::pencil::{rank_mxnx2, PencilCertificate};
use crate::scalar::{ExactField, GaussianRational, C64};
use crate::tensor::{Decomposition, ExactTensor, IndexIter, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    FlatteningLower,
    PencilExact,
    DecompositionUpper,
    KruskalExact,
    DeterminantLower,
    TableKnown,
    /// Bound assembled from certificates of the blocks of a block-diagonal support.
    DirectSum,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::FlatteningLower => "flattening-lower",
            Self::PencilExact => "pencil-exact",
            Self::DecompositionUpper => "decomposition-upper",
            Self::KruskalExact => "kruskal-exact",
            Self::DeterminantLower => "determinant-lower",
            Self::TableKnown => "table-known",
            Self::DirectSum => "direct-sum",
        }
    }
}

/// Which side of the rank a certificate bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    Lower,
    Upper,
    Exact,
    /// Recorded value that does not enter the computed bounds.
    Informational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Flattening {
        left_modes: Vec<usize>,
    },
    Pencil {
        certificate: PencilCertificate,
    },
    ExactDecomposition(Decomposition<GaussianRational>),
    NumericDecomposition {
        decomposition: Decomposition<C64>,
        /// Relative residual the decomposition must reach.
        fit_tol: f64,
        /// Factor-norm bound relative to `‖T‖₂^{1/d}`.
        guard: Option<f64>,
    },
    Kruskal {
        decomposition: Decomposition<GaussianRational>,
        blocks: Vec<Vec<usize>>,
        kruskal_ranks: [usize; 3],
    },
    Determinant(DeterminantWitness),
    MaxRankCap {
        label: String,
    },
    NamedState {
        name: String,
        lower: usize,
        upper: usize,
    },
    DirectSum {
        bound: Bound,
        parts: Vec<DirectSumPart>,
    },
}

/// One block of a block-diagonal support with evidence about its rank.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectSumPart {
    /// Sorted indices of the block in every mode.
    pub indices: Vec<Vec<usize>>,
    pub certificates: Vec<RankCertificate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankCertificate {
    pub kind: CertificateKind,
    pub value: usize,
    pub payload: Payload,
}

impl RankCertificate {
    pub fn bound(&self) -> Bound {
        match (&self.kind, &self.payload) {
            (CertificateKind::FlatteningLower | CertificateKind::DeterminantLower, _) => Bound::Lower,
            (CertificateKind::PencilExact | CertificateKind::KruskalExact, _) => Bound::Exact,
            (CertificateKind::DecompositionUpper, _) => Bound::Upper,
            (CertificateKind::TableKnown, Payload::MaxRankCap { .. }) => Bound::Upper,
            (CertificateKind::TableKnown, _) => Bound::Informational,
            (CertificateKind::DirectSum, Payload::DirectSum { bound, .. }) => *bound,
            (CertificateKind::DirectSum, _) => Bound::Informational,
        }
    }

    /// Re-derives the certified value from the entries of `t`.
    pub fn verify(&self, t: &ExactTensor) -> Result<()> {
        let t = squeeze(t);
        let fail = |msg: String| Err(Error::VerificationFailed(format!("{}: {msg}", self.kind.as_str())));
        match (&self.kind, &self.payload) {
            (CertificateKind::FlatteningLower, Payload::Flattening { left_modes }) => {
                let r = if left_modes.is_empty() {
                    usize::from(!t.is_zero())
                } else {
                    t.flatten(left_modes)?.rank()
                };
                if r != self.value {
                    return fail(format!("flattening rank is {r}, certificate says {}", self.value));
                }
            }
            (CertificateKind::PencilExact, Payload::Pencil { certificate }) => {
                let p = rank_mxnx2(&t)?;
                if p.rank != self.value || p.certificate != *certificate {
                    return fail(format!("pencil rank is {} ({})", p.rank, p.certificate.as_str()));
                }
            }
            (CertificateKind::DecompositionUpper, Payload::ExactDecomposition(dec)) => {
                check_term_count(dec.len(), self.value, &fail)?;
                if dec.shape() != t.shape() || dec.evaluate() != t {
                    return fail("decomposition does not evaluate to the tensor".into());
                }
            }
            (CertificateKind::DecompositionUpper, Payload::NumericDecomposition { decomposition, fit_tol, guard }) => {
                check_term_count(decomposition.len(), self.value, &fail)?;
                if decomposition.shape() != t.shape() {
                    return fail("shape mismatch".into());
                }
                let target = t.to_c64();
                let scale = target.frobenius_norm();
                let res = decomposition.evaluate().sub(&target)?.frobenius_norm();
                if res > fit_tol * scale {
                    return fail(format!("relative residual {:.3e} above {fit_tol:.1e}", res / scale));
                }
                if let Some(g) = guard {
                    let d = t.order() as f64;
                    let largest = max_factor_norm(decomposition);
                    if largest > g * scale.powf(1.0 / d) {
                        return fail(format!("factor norm {largest:.3e} exceeds the guard"));
                    }
                }
            }
            (CertificateKind::KruskalExact, Payload::Kruskal { decomposition, blocks, kruskal_ranks }) => {
                check_term_count(decomposition.len(), self.value, &fail)?;
                if decomposition.shape() != t.shape() || decomposition.evaluate() != t {
                    return fail("decomposition does not evaluate to the tensor".into());
                }
                let ranks = kruskal::grouped_kruskal_ranks(decomposition, blocks)?;
                if ranks != *kruskal_ranks {
                    return fail(format!("Kruskal ranks are {ranks:?}"));
                }
                if ranks.iter().sum::<usize>() < 2 * self.value + 2 {
                    return fail(format!("Kruskal ranks {ranks:?} do not reach 2r + 2"));
                }
            }
            (CertificateKind::DeterminantLower, Payload::Determinant(w)) => {
                let v = w.verify(&t)?;
                if v != self.value {
                    return fail(format!("witness gives {v}, certificate says {}", self.value));
                }
            }
            (CertificateKind::TableKnown, Payload::MaxRankCap { label }) => {
                let caps = max_rank_upper_bounds(t.shape());
                if !caps.bounds.iter().any(|b| b.label == label && b.value == self.value) {
                    return fail(format!("no bound {label} = {} for shape {}", self.value, t.shape()));
                }
            }
            (CertificateKind::TableKnown, Payload::NamedState { name, lower, upper }) => {
                let entry = known::lookup(&t).ok_or_else(|| {
                    Error::VerificationFailed(format!("table-known: tensor is not a multiple of {name}"))
                })?;
                if entry.name != *name || (entry.lower, entry.upper) != (*lower, *upper) || self.value != *lower {
                    return fail(format!("table entry for {} is {}..{}", entry.name, entry.lower, entry.upper));
                }
            }
            (CertificateKind::DirectSum, Payload::DirectSum { bound, parts }) => {
                let v = direct_sum_value(&t, parts, *bound)?;
                if v != self.value {
                    return fail(format!("parts give {v}, certificate says {}", self.value));
                }
            }
            _ => return fail("payload does not match the certificate kind".into()),
        }
        Ok(())
    }
}

fn check_term_count(terms: usize, value: usize, fail: &dyn Fn(String) -> Result<()>) -> Result<()> {
    if terms != value {
        return fail(format!("{terms} terms, certificate says {value}"));
    }
    Ok(())
}

/// Largest `(|w| ∏_j ‖a_j‖)^{1/d}` over the terms.
pub(crate) fn max_factor_norm(dec: &Decomposition<C64>) -> f64 {
    let d = dec.shape().order() as f64;
    dec.terms()
        .iter()
        .map(|t| {
            let w = t.factors.iter().fold(t.weight.norm(), |acc, f| {
                acc * f.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
            });
            w.powf(1.0 / d)
        })
        .fold(0.0, f64::max)
}

/// Lower and upper bound implied by a certificate list.
pub(crate) fn bounds_of(certs: &[RankCertificate]) -> (usize, Option<usize>) {
    let mut lower = 0;
    let mut upper: Option<usize> = None;
    for c in certs {
        match c.bound() {
            Bound::Lower => lower = lower.max(c.value),
            Bound::Upper => upper = Some(upper.map_or(c.value, |u| u.min(c.value))),
            Bound::Exact => {
                lower = lower.max(c.value);
                upper = Some(upper.map_or(c.value, |u| u.min(c.value)));
            }
            Bound::Informational => {}
        }
    }
    (lower, upper)
}

/// What is known about one block when combining bounds.
pub(crate) struct PartSummary {
    pub shape: Shape,
    pub lower: usize,
    pub upper: Option<usize>,
    /// Single-mode flattening ranks.
    pub flattening: Vec<usize>,
}

/// Combines block bounds: uppers always add; lowers add across a split
/// only when a direct-sum additivity condition applies, else the maximum.
pub(crate) fn combine_parts(parts: &[PartSummary], bound: Bound) -> Option<usize> {
    match bound {
        Bound::Upper => parts.iter().map(|p| p.upper).sum(),
        Bound::Lower => {
            let first = parts.first()?;
            let mut acc = PartSummary {
                shape: first.shape.clone(),
                lower: first.lower,
                upper: first.upper,
                flattening: first.flattening.clone(),
            };
            for p in &parts[1..] {
                let ea = SummandEvidence { upper: acc.upper, max_flattening: acc.flattening.iter().copied().max() };
                let ep = SummandEvidence { upper: p.upper, max_flattening: p.flattening.iter().copied().max() };
                acc.lower = if strassen_condition_with(&acc.shape, &p.shape, &ea, &ep) {
                    acc.lower + p.lower
                } else {
                    acc.lower.max(p.lower)
                };
                let dims = acc.shape.dims().iter().zip(p.shape.dims()).map(|(a, b)| a + b).collect();
                acc.shape = Shape::new(dims).expect("positive dims");
                acc.upper = acc.upper.zip(p.upper).map(|(a, b)| a + b);
                acc.flattening = acc.flattening.iter().zip(&p.flattening).map(|(a, b)| a + b).collect();
            }
            Some(acc.lower)
        }
        Bound::Exact | Bound::Informational => None,
    }
}

fn direct_sum_value(t: &ExactTensor, parts: &[DirectSumPart], bound: Bound) -> Result<usize> {
    let bad = |msg: &str| Error::VerificationFailed(format!("direct-sum: {msg}"));
    let d = t.order();
    if parts.len() < 2 || parts.iter().any(|p| p.indices.len() != d) {
        return Err(bad("needs at least two blocks spanning every mode"));
    }
    for k in 0..d {
        let mut seen = vec![false; t.dims()[k]];
        for p in parts {
            for &i in &p.indices[k] {
                if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                    return Err(bad("block indices overlap or are out of range"));
                }
            }
        }
    }
    for (idx, v) in IndexIter::new(t.dims()).zip(t.entries()) {
        if !v.is_zero() && !parts.iter().any(|p| idx.iter().zip(&p.indices).all(|(i, set)| set.contains(i))) {
            return Err(bad("nonzero entry outside every block"));
        }
    }
    let mut summaries = Vec::with_capacity(parts.len());
    for p in parts {
        let block = extract(t, &p.indices)?;
        for c in &p.certificates {
            c.verify(&block)?;
        }
        let (lower, upper) = bounds_of(&p.certificates);
        summaries.push(PartSummary {
            shape: block.shape().clone(),
            lower,
            upper,
            flattening: flattening::mode_ranks(&block),
        });
    }
    combine_parts(&summaries, bound).ok_or_else(|| bad("a block has no upper bound"))
}

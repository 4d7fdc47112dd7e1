//! Named tensors with known rank, and explicit decompositions of them.
//!
//! Matching is exact up to a nonzero scalar multiple.

use super::certificate::{CertificateKind, Payload, RankCertificate};
use super::squeeze;
use crate::scalar::{ExactField, GaussianRational, Scalar, C64};
use crate::symmetric::{ghz_state, w_state, waring_w3kron_decomposition, wkron2};
use crate::tensor::{Decomposition, ExactTensor, RankOneTerm, Shape, Tensor};

/// Bracket on the rank of `W₃^{⊗3}` (9 modes of size 2).
pub const W3_CUBE_RANK_BRACKET: (usize, usize) = (16, 20);

#[derive(Clone, Debug, PartialEq)]
pub struct KnownEntry {
    pub name: String,
    pub lower: usize,
    pub upper: usize,
    /// The input equals `scale` times the named tensor.
    pub scale: GaussianRational,
}

fn candidates(shape: &Shape) -> Vec<(String, usize, usize, ExactTensor)> {
    let dims = shape.dims();
    let d = dims.len();
    let mut out = Vec::new();
    if d < 2 || dims.iter().any(|&n| n != dims[0]) {
        return out;
    }
    let n = dims[0];
    if n >= 2 {
        out.push((format!("ghz:{n}:{d}"), n, n, ghz_state(n, d).expect("n, d ≥ 2")));
    }
    if n == 2 && d >= 3 {
        out.push((format!("w:{d}"), d, d, w_state(d).expect("d ≥ 2")));
    }
    let w3 = || w_state::<GaussianRational>(3).expect("d = 3");
    match (n, d) {
        (4, 3) => out.push(("w3-kron-w3".into(), 7, 7, wkron2())),
        (2, 6) => out.push(("w3-tensor-square".into(), 8, 8, w3().tensor_product(&w3()))),
        (2, 9) => {
            let (lo, hi) = W3_CUBE_RANK_BRACKET;
            out.push(("w3-tensor-cube".into(), lo, hi, w3().tensor_product(&w3()).tensor_product(&w3())));
        }
        _ => {}
    }
    out
}

/// `c` with `t = c · s`, if any.
fn proportion(t: &ExactTensor, s: &ExactTensor) -> Option<GaussianRational> {
    if t.shape() != s.shape() {
        return None;
    }
    let k = s.entries().iter().position(|x| !x.is_zero())?;
    if t.entries()[k].is_zero() {
        return None;
    }
    let c = &t.entries()[k] / &s.entries()[k];
    t.entries().iter().zip(s.entries()).all(|(a, b)| *a == &c * b).then_some(c)
}

/// Named tensor that `t` (singleton modes removed) is a multiple of.
pub fn lookup(t: &ExactTensor) -> Option<KnownEntry> {
    let t = squeeze(t);
    candidates(t.shape()).into_iter().find_map(|(name, lower, upper, s)| {
        proportion(&t, &s).map(|scale| KnownEntry { name, lower, upper, scale })
    })
}

/// Table certificate for a named tensor; informational only.
pub fn named_state_certificate(t: &ExactTensor) -> Option<RankCertificate> {
    lookup(t).map(|e| RankCertificate {
        kind: CertificateKind::TableKnown,
        value: e.lower,
        payload: Payload::NamedState { name: e.name, lower: e.lower, upper: e.upper },
    })
}

/// Eight terms summing to `W₃ ⊗ W₃` (6 modes), from
/// `W⊗W = (W+Z)⊗(W+Z) − (W+½Z)⊗Z − Z⊗(W+½Z)` with `Z = e₂^{⊗3}` and
/// `W + cZ = a(e₁+αe₂)^{⊗3} − a(e₁−αe₂)^{⊗3}`, `α = √c`, `a = 1/(2√c)`.
pub fn w3_tensor_square_decomposition() -> Decomposition<C64> {
    let re = |x: f64| C64::new(x, 0.0);
    let two_terms = |c: f64| {
        let (alpha, a) = (c.sqrt(), 1.0 / (2.0 * c.sqrt()));
        vec![(re(a), vec![re(1.0), re(alpha)]), (re(-a), vec![re(1.0), re(-alpha)])]
    };
    let z = vec![(re(1.0), vec![re(0.0), re(1.0)])];
    let product = |left: &[(C64, Vec<C64>)], right: &[(C64, Vec<C64>)], sign: f64| {
        let mut terms = Vec::new();
        for (wl, fl) in left {
            for (wr, fr) in right {
                let factors = [vec![fl.clone(); 3], vec![fr.clone(); 3]].concat();
                terms.push(RankOneTerm::new(wl * wr * sign, factors));
            }
        }
        terms
    };
    let mut terms = product(&two_terms(1.0), &two_terms(1.0), 1.0);
    terms.extend(product(&two_terms(0.5), &z, -1.0));
    terms.extend(product(&z, &two_terms(0.5), -1.0));
    Decomposition::new(Shape::new(vec![2; 6]).expect("valid"), terms).expect("consistent lengths")
}

/// Explicit decomposition certificate for a multiple of a tensor with a
/// stored construction: `W₃ ⊗_K W₃` (7 exact terms) or `W₃ ⊗ W₃` (8 numeric terms).
pub fn construction_certificate(t: &ExactTensor) -> Option<RankCertificate> {
    let t = squeeze(t);
    let entry = lookup(&t)?;
    let c = entry.scale;
    let payload = match entry.name.as_str() {
        "w3-kron-w3" => {
            let d = waring_w3kron_decomposition();
            let terms = d.terms().iter().map(|x| RankOneTerm::new(&x.weight * &c, x.factors.clone())).collect();
            Payload::ExactDecomposition(Decomposition::new(d.shape().clone(), terms).ok()?)
        }
        "w3-tensor-square" => {
            let d = w3_tensor_square_decomposition();
            let cc = c.to_c64();
            let terms = d.terms().iter().map(|x| RankOneTerm::new(x.weight * cc, x.factors.clone())).collect();
            Payload::NumericDecomposition {
                decomposition: Decomposition::new(d.shape().clone(), terms).ok()?,
                fit_tol: 1e-12,
                guard: None,
            }
        }
        _ => return None,
    };
    let value = match &payload {
        Payload::ExactDecomposition(d) => d.len(),
        Payload::NumericDecomposition { decomposition, .. } => decomposition.len(),
        _ => unreachable!("constructed above"),
    };
    Some(RankCertificate { kind: CertificateKind::DecompositionUpper, value, payload })
}

/// `W₃^{⊗2}` as a numeric tensor.
pub fn w3_tensor_square() -> Tensor {
    let w = w_state::<C64>(3).expect("d = 3");
    w.tensor_product(&w)
}

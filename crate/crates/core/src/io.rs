//! JSON interchange for tensors, polynomials, decompositions and rank
//! certificates.
//!
//! A tensor file is `{"shape": [n1, …, nd], "entries": [...]}` with entries in
//! row-major order (mode 0 slowest). Each entry is `[re, im]` or an exact
//! quadruple `[re_num, re_den, im_num, im_den]`. Integers that do not fit in
//! 64 bits are written as decimal strings. Objects are emitted with sorted
//! keys, so equal values serialize to identical bytes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::pencil::PencilCertificate;
use crate::rank_bounds::{
    Bound, CertificateKind, DeterminantWitness, DirectSumPart, KnownRank, Payload, RankCertificate, RankReport,
};
use crate::scalar::{rationalize_f64, GaussianRational, C64};
use crate::symmetric::{ExponentIndex, HomogeneousPolynomial};
use crate::tensor::{Decomposition, DenseTensor, ExactTensor, RankOneTerm, Shape, Tensor};

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

/// A parsed tensor file: exact when every entry is an integer pair or a
/// rational quadruple, numeric otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum TensorInput {
    Exact(ExactTensor),
    Numeric(Tensor),
}

impl TensorInput {
    pub fn shape(&self) -> &Shape {
        match self {
            Self::Exact(t) => t.shape(),
            Self::Numeric(t) => t.shape(),
        }
    }

    pub fn to_c64(&self) -> Tensor {
        match self {
            Self::Exact(t) => t.to_c64(),
            Self::Numeric(t) => t.clone(),
        }
    }

    /// Exact entries; floating entries are replaced by their best rational
    /// approximation with denominator at most `max_den`.
    pub fn to_exact(&self, max_den: u64) -> ExactTensor {
        match self {
            Self::Exact(t) => t.clone(),
            Self::Numeric(t) => t.rationalize(max_den),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact(_))
    }
}

fn int_value(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn parse_int(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn parse_ratio(num: &Value, den: &Value) -> Result<BigRational> {
    let (n, d) = (parse_int(num), parse_int(den));
    match (n, d) {
        (Some(n), Some(d)) if !d.is_zero() => Ok(BigRational::new(n, d)),
        (Some(_), Some(_)) => Err(malformed("zero denominator")),
        _ => Err(malformed(format!("expected integers, got {num} and {den}"))),
    }
}

fn parse_float(v: &Value) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    };
    x.filter(|x| x.is_finite()).ok_or_else(|| malformed(format!("expected a finite number, got {v}")))
}

/// One scalar as written in the interchange format.
enum Entry {
    Exact(GaussianRational),
    Float(C64),
}

fn parse_entry(v: &Value) -> Result<Entry> {
    let parts = v.as_array().ok_or_else(|| malformed(format!("entry {v} is not an array")))?;
    match parts.len() {
        2 => match (parse_int(&parts[0]), parse_int(&parts[1])) {
            (Some(re), Some(im)) => Ok(Entry::Exact(GaussianRational::new(re.into(), im.into()))),
            _ => Ok(Entry::Float(C64::new(parse_float(&parts[0])?, parse_float(&parts[1])?))),
        },
        4 => Ok(Entry::Exact(GaussianRational::new(
            parse_ratio(&parts[0], &parts[1])?,
            parse_ratio(&parts[2], &parts[3])?,
        ))),
        n => Err(malformed(format!("entry has {n} components, expected 2 or 4"))),
    }
}

fn float_of(e: &Entry) -> C64 {
    match e {
        Entry::Exact(z) => crate::scalar::Scalar::to_c64(z),
        Entry::Float(z) => *z,
    }
}

fn parse_entries(v: &Value, what: &str) -> Result<Vec<Entry>> {
    v.as_array().ok_or_else(|| malformed(format!("{what} is not an array")))?.iter().map(parse_entry).collect()
}

fn exact_scalar(v: &Value) -> Result<GaussianRational> {
    match parse_entry(v)? {
        Entry::Exact(z) => Ok(z),
        Entry::Float(_) => Err(malformed(format!("expected an exact entry, got {v}"))),
    }
}

fn float_scalar(v: &Value) -> Result<C64> {
    parse_entry(v).map(|e| float_of(&e))
}

/// `[re, im]` for integral values, the quadruple otherwise.
pub fn exact_scalar_json(z: &GaussianRational) -> Value {
    if z.is_integral() {
        json!([int_value(z.re.numer()), int_value(z.im.numer())])
    } else {
        json!([int_value(z.re.numer()), int_value(z.re.denom()), int_value(z.im.numer()), int_value(z.im.denom())])
    }
}

pub fn c64_json(z: &C64) -> Value {
    json!([z.re, z.im])
}

/// Scalars with a JSON form.
pub trait JsonScalar: Sized {
    fn to_json(&self) -> Value;
    /// Writes a whole list; exact lists use one entry form throughout.
    fn list_json(xs: &[Self]) -> Value {
        Value::Array(xs.iter().map(Self::to_json).collect())
    }
}

impl JsonScalar for C64 {
    fn to_json(&self) -> Value {
        c64_json(self)
    }
}

impl JsonScalar for GaussianRational {
    fn to_json(&self) -> Value {
        exact_scalar_json(self)
    }

    fn list_json(xs: &[Self]) -> Value {
        let quad = |z: &GaussianRational| {
            json!([int_value(z.re.numer()), int_value(z.re.denom()), int_value(z.im.numer()), int_value(z.im.denom())])
        };
        if xs.iter().all(GaussianRational::is_integral) {
            Value::Array(xs.iter().map(exact_scalar_json).collect())
        } else {
            Value::Array(xs.iter().map(quad).collect())
        }
    }
}

pub fn tensor_json<S: JsonScalar + crate::scalar::Scalar>(t: &DenseTensor<S>) -> Value {
    json!({ "shape": t.dims(), "entries": S::list_json(t.entries()) })
}

fn parse_shape(v: Option<&Value>) -> Result<Shape> {
    let dims = v
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing \"shape\" array"))?
        .iter()
        .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| malformed(format!("shape entry {x} is not a count"))))
        .collect::<Result<Vec<_>>>()?;
    Shape::new(dims).map_err(|e| malformed(e.to_string()))
}

pub fn tensor_from_value(v: &Value) -> Result<TensorInput> {
    let obj = v.as_object().ok_or_else(|| malformed("tensor file is not a JSON object"))?;
    let shape = parse_shape(obj.get("shape"))?;
    let entries = parse_entries(obj.get("entries").ok_or_else(|| malformed("missing \"entries\""))?, "entries")?;
    if entries.len() != shape.n_entries() {
        return Err(malformed(format!("{} entries for shape {:?}", entries.len(), shape.dims())));
    }
    if entries.iter().all(|e| matches!(e, Entry::Exact(_))) {
        let xs = entries
            .into_iter()
            .map(|e| match e {
                Entry::Exact(z) => z,
                Entry::Float(_) => unreachable!("checked above"),
            })
            .collect();
        Ok(TensorInput::Exact(DenseTensor::from_entries(shape, xs)?))
    } else {
        Ok(TensorInput::Numeric(DenseTensor::from_entries(shape, entries.iter().map(float_of).collect())?))
    }
}

pub fn parse_tensor(text: &str) -> Result<TensorInput> {
    let v: Value = serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    tensor_from_value(&v)
}

/// Polynomial file `{"d": 3, "n": 2, "coeffs": {"2,1": [s, 0]}}`: keys are
/// comma-joined exponent vectors, values are the tensor entries `f_j`.
pub fn parse_polynomial(text: &str) -> Result<HomogeneousPolynomial<GaussianRational>> {
    let v: Value = serde_json::from_str(text).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
    let count = |key: &str| {
        v.get(key).and_then(Value::as_u64).ok_or_else(|| malformed(format!("missing or invalid \"{key}\"")))
    };
    let (d, n) = (count("d")?, count("n")?);
    let d = u32::try_from(d).map_err(|_| malformed("degree too large"))?;
    let mut p = HomogeneousPolynomial::new(d, n as usize).map_err(|e| malformed(e.to_string()))?;
    let coeffs = v.get("coeffs").and_then(Value::as_object).ok_or_else(|| malformed("missing \"coeffs\" object"))?;
    for (key, value) in coeffs {
        let exps = key
            .split(',')
            .map(|s| s.trim().parse::<u32>().map_err(|_| malformed(format!("bad exponent key \"{key}\""))))
            .collect::<Result<Vec<_>>>()?;
        let f = match parse_entry(value)? {
            Entry::Exact(z) => z,
            Entry::Float(z) => GaussianRational::new(rationalize_f64(z.re, 1 << 30), rationalize_f64(z.im, 1 << 30)),
        };
        p.set(ExponentIndex(exps), f).map_err(|e| malformed(e.to_string()))?;
    }
    Ok(p)
}

pub fn polynomial_json(p: &HomogeneousPolynomial<GaussianRational>) -> Value {
    let coeffs: Map<String, Value> = p.coeffs().iter().map(|(j, f)| (j.to_string(), exact_scalar_json(f))).collect();
    json!({ "d": p.degree(), "n": p.n_vars(), "coeffs": coeffs })
}

pub fn decomposition_json<S: JsonScalar + crate::scalar::Scalar>(d: &Decomposition<S>) -> Value {
    let terms: Vec<Value> = d
        .terms()
        .iter()
        .map(|t| {
            let factors: Vec<Value> = t.factors.iter().map(|f| S::list_json(f)).collect();
            json!({ "weight": t.weight.to_json(), "factors": factors })
        })
        .collect();
    json!({ "shape": d.shape().dims(), "terms": terms })
}

fn parse_terms<S: crate::scalar::Scalar>(
    v: &Value,
    scalar: impl Fn(&Value) -> Result<S>,
) -> Result<Decomposition<S>> {
    let shape = parse_shape(v.get("shape"))?;
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing \"terms\""))?
        .iter()
        .map(|t| {
            let weight = scalar(t.get("weight").ok_or_else(|| malformed("term without weight"))?)?;
            let factors = t
                .get("factors")
                .and_then(Value::as_array)
                .ok_or_else(|| malformed("term without factors"))?
                .iter()
                .map(|f| {
                    f.as_array().ok_or_else(|| malformed("factor is not an array"))?.iter().map(&scalar).collect()
                })
                .collect::<Result<Vec<Vec<S>>>>()?;
            Ok(RankOneTerm::new(weight, factors))
        })
        .collect::<Result<Vec<_>>>()?;
    Decomposition::new(shape, terms).map_err(|e| malformed(e.to_string()))
}

pub fn exact_decomposition_from_value(v: &Value) -> Result<Decomposition<GaussianRational>> {
    parse_terms(v, exact_scalar)
}

pub fn numeric_decomposition_from_value(v: &Value) -> Result<Decomposition<C64>> {
    parse_terms(v, float_scalar)
}

fn bound_str(b: Bound) -> &'static str {
    match b {
        Bound::Lower => "lower",
        Bound::Upper => "upper",
        Bound::Exact => "exact",
        Bound::Informational => "informational",
    }
}

fn parse_bound(s: &str) -> Result<Bound> {
    Ok(match s {
        "lower" => Bound::Lower,
        "upper" => Bound::Upper,
        "exact" => Bound::Exact,
        "informational" => Bound::Informational,
        _ => return Err(malformed(format!("unknown bound \"{s}\""))),
    })
}

fn kind_of(s: &str) -> Result<CertificateKind> {
    use CertificateKind::*;
    [FlatteningLower, PencilExact, DecompositionUpper, KruskalExact, DeterminantLower, TableKnown, DirectSum]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| malformed(format!("unknown certificate kind \"{s}\"")))
}

pub fn certificate_json(c: &RankCertificate) -> Value {
    let mut m = Map::new();
    m.insert("kind".into(), json!(c.kind.as_str()));
    m.insert("bound".into(), json!(bound_str(c.bound())));
    m.insert("value".into(), json!(c.value));
    let payload = match &c.payload {
        Payload::Flattening { left_modes } => json!({ "type": "flattening", "left_modes": left_modes }),
        Payload::Pencil { certificate } => json!({ "type": "pencil", "pencil": certificate.as_str() }),
        Payload::ExactDecomposition(d) => json!({ "type": "exact-decomposition", "decomposition": decomposition_json(d) }),
        Payload::NumericDecomposition { decomposition, fit_tol, guard } => json!({
            "type": "numeric-decomposition",
            "decomposition": decomposition_json(decomposition),
            "fit_tol": fit_tol,
            "guard": guard,
        }),
        Payload::Kruskal { decomposition, blocks, kruskal_ranks } => json!({
            "type": "kruskal",
            "decomposition": decomposition_json(decomposition),
            "blocks": blocks,
            "kruskal_ranks": kruskal_ranks,
        }),
        Payload::Determinant(w) => json!({
            "type": "determinant",
            "blocks": w.blocks,
            "slice_block": w.slice_block,
            "pivot": w.pivot,
            "determinant": exact_scalar_json(&w.determinant),
            "probes": w.probes.iter().map(|p| GaussianRational::list_json(p)).collect::<Vec<_>>(),
        }),
        Payload::MaxRankCap { label } => json!({ "type": "max-rank-cap", "label": label }),
        Payload::NamedState { name, lower, upper } => {
            json!({ "type": "named-state", "name": name, "lower": lower, "upper": upper })
        }
        Payload::DirectSum { bound, parts } => json!({
            "type": "direct-sum",
            "bound": bound_str(*bound),
            "parts": parts.iter().map(|p| json!({
                "indices": p.indices,
                "certificates": p.certificates.iter().map(certificate_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
    };
    m.insert("payload".into(), payload);
    Value::Object(m)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| malformed(format!("missing \"{key}\"")))
}

fn usize_field(v: &Value, key: &str) -> Result<usize> {
    field(v, key)?.as_u64().map(|x| x as usize).ok_or_else(|| malformed(format!("\"{key}\" is not a count")))
}

fn str_field<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?.as_str().ok_or_else(|| malformed(format!("\"{key}\" is not a string")))
}

fn usize_list(v: &Value) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| malformed("expected an array of counts"))?
        .iter()
        .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| malformed(format!("{x} is not a count"))))
        .collect()
}

fn usize_lists(v: &Value) -> Result<Vec<Vec<usize>>> {
    v.as_array().ok_or_else(|| malformed("expected an array of arrays"))?.iter().map(usize_list).collect()
}

pub fn certificate_from_value(v: &Value) -> Result<RankCertificate> {
    let kind = kind_of(str_field(v, "kind")?)?;
    let value = usize_field(v, "value")?;
    let p = field(v, "payload")?;
    let payload = match str_field(p, "type")? {
        "flattening" => Payload::Flattening { left_modes: usize_list(field(p, "left_modes")?)? },
        "pencil" => Payload::Pencil {
            certificate: match str_field(p, "pencil")? {
                "regular" => PencilCertificate::Regular,
                "singular" => PencilCertificate::Singular,
                "degenerate" => PencilCertificate::Degenerate,
                s => return Err(malformed(format!("unknown pencil certificate \"{s}\""))),
            },
        },
        "exact-decomposition" => Payload::ExactDecomposition(exact_decomposition_from_value(field(p, "decomposition")?)?),
        "numeric-decomposition" => Payload::NumericDecomposition {
            decomposition: numeric_decomposition_from_value(field(p, "decomposition")?)?,
            fit_tol: parse_float(field(p, "fit_tol")?)?,
            guard: match field(p, "guard")? {
                Value::Null => None,
                g => Some(parse_float(g)?),
            },
        },
        "kruskal" => {
            let ranks = usize_list(field(p, "kruskal_ranks")?)?;
            Payload::Kruskal {
                decomposition: exact_decomposition_from_value(field(p, "decomposition")?)?,
                blocks: usize_lists(field(p, "blocks")?)?,
                kruskal_ranks: ranks.try_into().map_err(|_| malformed("need three Kruskal ranks"))?,
            }
        }
        "determinant" => Payload::Determinant(DeterminantWitness {
            blocks: usize_lists(field(p, "blocks")?)?,
            slice_block: usize_field(p, "slice_block")?,
            pivot: usize_field(p, "pivot")?,
            determinant: exact_scalar(field(p, "determinant")?)?,
            probes: field(p, "probes")?
                .as_array()
                .ok_or_else(|| malformed("\"probes\" is not an array"))?
                .iter()
                .map(|probe| {
                    probe.as_array().ok_or_else(|| malformed("probe is not an array"))?.iter().map(exact_scalar).collect()
                })
                .collect::<Result<Vec<_>>>()?,
        }),
        "max-rank-cap" => Payload::MaxRankCap { label: str_field(p, "label")?.to_string() },
        "named-state" => Payload::NamedState {
            name: str_field(p, "name")?.to_string(),
            lower: usize_field(p, "lower")?,
            upper: usize_field(p, "upper")?,
        },
        "direct-sum" => Payload::DirectSum {
            bound: parse_bound(str_field(p, "bound")?)?,
            parts: field(p, "parts")?
                .as_array()
                .ok_or_else(|| malformed("\"parts\" is not an array"))?
                .iter()
                .map(|part| {
                    Ok(DirectSumPart {
                        indices: usize_lists(field(part, "indices")?)?,
                        certificates: field(part, "certificates")?
                            .as_array()
                            .ok_or_else(|| malformed("\"certificates\" is not an array"))?
                            .iter()
                            .map(certificate_from_value)
                            .collect::<Result<Vec<_>>>()?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        },
        s => return Err(malformed(format!("unknown payload type \"{s}\""))),
    };
    Ok(RankCertificate { kind, value, payload })
}

pub fn report_json(r: &RankReport) -> Value {
    json!({
        "lower": r.lower,
        "upper": r.upper,
        "exact": r.exact,
        "known": r.known.as_ref().map(|k| json!({ "name": k.name, "lower": k.lower, "upper": k.upper })),
        "certificates": r.certificates.iter().map(certificate_json).collect::<Vec<_>>(),
    })
}

pub fn report_from_value(v: &Value) -> Result<RankReport> {
    let known = match field(v, "known")? {
        Value::Null => None,
        k => Some(KnownRank {
            name: str_field(k, "name")?.to_string(),
            lower: usize_field(k, "lower")?,
            upper: usize_field(k, "upper")?,
        }),
    };
    Ok(RankReport {
        lower: usize_field(v, "lower")?,
        upper: usize_field(v, "upper")?,
        exact: match field(v, "exact")? {
            Value::Null => None,
            _ => Some(usize_field(v, "exact")?),
        },
        known,
        certificates: field(v, "certificates")?
            .as_array()
            .ok_or_else(|| malformed("\"certificates\" is not an array"))?
            .iter()
            .map(certificate_from_value)
            .collect::<Result<Vec<_>>>()?,
    })
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("Value always serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank_bounds::rank_report;
    use crate::symmetric::{poly_to_tensor, w_state, wkron2};

    #[test]
    fn exact_tensor_round_trip() {
        let mut t = wkron2::<GaussianRational>();
        t.set(&[0, 0, 0], GaussianRational::new(BigRational::new(1.into(), 3.into()), BigRational::from_integer((-2).into())));
        let v = tensor_json(&t);
        assert_eq!(v["entries"][0], json!([1, 3, -2, 1]));
        assert_eq!(tensor_from_value(&v).unwrap(), TensorInput::Exact(t));
    }

    #[test]
    fn integer_pairs_are_exact_and_floats_are_numeric() {
        let exact = parse_tensor(r#"{"shape":[2],"entries":[[1,0],[0,-3]]}"#).unwrap();
        assert_eq!(exact, TensorInput::Exact(ExactTensor::from_fn(Shape::new(vec![2]).unwrap(), |i| {
            if i[0] == 0 { GaussianRational::from_ints(1, 0) } else { GaussianRational::from_ints(0, -3) }
        })));
        let num = parse_tensor(r#"{"shape":[2],"entries":[[0.5,0],[1,0]]}"#).unwrap();
        assert!(!num.is_exact());
        assert_eq!(num.to_exact(10).entries()[0], GaussianRational::ratio(1, 2));
        let big = parse_tensor(r#"{"shape":[1],"entries":[["123456789012345678901234567890",1,0,1]]}"#).unwrap();
        assert!(big.is_exact());
    }

    #[test]
    fn malformed_files_are_rejected() {
        for text in [
            "not json",
            r#"{"entries":[]}"#,
            r#"{"shape":[2,0],"entries":[]}"#,
            r#"{"shape":[2],"entries":[[1,0]]}"#,
            r#"{"shape":[1],"entries":[[1,0,0]]}"#,
            r#"{"shape":[1],"entries":[[1,0,0,1]]}"#,
            r#"{"shape":[1],"entries":[["x",0]]}"#,
        ] {
            assert!(matches!(parse_tensor(text), Err(Error::Malformed(_))), "{text}");
        }
    }

    #[test]
    fn polynomial_file_stores_tensor_entries() {
        let p = parse_polynomial(r#"{"d":3,"n":2,"coeffs":{"2,1":[1,0]}}"#).unwrap();
        assert_eq!(poly_to_tensor(&p), w_state::<GaussianRational>(3).unwrap());
        let again = parse_polynomial(&polynomial_json(&p).to_string()).unwrap();
        assert_eq!(again, p);
        assert!(parse_polynomial(r#"{"d":3,"n":2,"coeffs":{"2,2":[1,0]}}"#).is_err());
    }

    #[test]
    fn report_round_trip_reverifies() {
        let k = wkron2::<GaussianRational>();
        let r = rank_report(&k).unwrap();
        let v = report_json(&r);
        let text = to_pretty(&v);
        let back = report_from_value(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, r);
        back.verify(&k).unwrap();
    }

    #[test]
    fn numeric_decomposition_round_trip_is_bit_exact() {
        let d = crate::rank_bounds::known::w3_tensor_square_decomposition();
        let back = numeric_decomposition_from_value(&serde_json::from_str(&decomposition_json(&d).to_string()).unwrap());
        assert_eq!(back.unwrap(), d);
    }
}

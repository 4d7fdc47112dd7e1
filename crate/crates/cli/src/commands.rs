use std::io::{Read, Write};

use serde_json::{json, Value};
use tensorank::combinatorics::{
    exact_domination_number, fractional_bound, greedy_3separated, greedy_dominating, perfect_code_rank,
    verify_3separated, verify_dominating, MAX_EXACT_VERTICES,
};
use tensorank::generic::{
    generic_rank, known_generic_rank, max_rank_upper_bounds, r0_lower_bound, GenericRankOptions, PrimeField,
};
use tensorank::generic::tables::{comparison_table_tsv, known_tables, qunit_table_tsv, table_33p_tsv};
use tensorank::io::{
    decomposition_json, exact_scalar_json, parse_polynomial, parse_tensor, report_json, tensor_json, TensorInput,
};
use tensorank::norms::{
    entanglement_measures, nuclear_norm_with, nuclear_rank_estimate, spectral_norm, NuclearOptions,
    SpectralOptions, NORMALIZATION_TOL,
};
use tensorank::pencil::{classify_222, rank_mxnx2};
use tensorank::rank_bounds::{rank_report_with, RankReportOptions};
use tensorank::symmetric::{ghz_state, poly_to_tensor, w_state, wkron2};
use tensorank::{Decomposition, DenseTensor, ExactTensor, GaussianRational, Scalar, Shape};

use crate::output::Output;
use crate::{
    CliError, DomsetArgs, GenrankArgs, InputArgs, MakeArgs, NormsArgs, PencilArgs, RankArgs, Table, TablesArgs,
};

type Result<T> = std::result::Result<T, CliError>;

pub struct Context<'a> {
    pub seed: u64,
    pub input: &'a mut dyn Read,
    pub err: &'a mut dyn Write,
}

impl Context<'_> {
    fn warn(&mut self, msg: &str) {
        let _ = writeln!(self.err, "warning: {msg}");
    }

    fn read_text(&mut self, path: Option<&std::path::Path>) -> Result<String> {
        match path {
            Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
                .map_err(|source| CliError::Read { path: p.display().to_string(), source }),
            _ => {
                let mut s = String::new();
                self.input
                    .read_to_string(&mut s)
                    .map_err(|source| CliError::Read { path: "standard input".into(), source })?;
                Ok(s)
            }
        }
    }

    fn read_tensor(&mut self, args: &InputArgs) -> Result<TensorInput> {
        let text = self.read_text(args.input.as_deref())?;
        Ok(parse_tensor(&text)?)
    }

    /// Exact entries, rationalizing floating input with a warning.
    fn read_exact(&mut self, args: &InputArgs) -> Result<ExactTensor> {
        let t = self.read_tensor(args)?;
        if !t.is_exact() {
            self.warn(&format!("floating entries read as rationals with denominator at most {}", args.max_den));
        }
        Ok(t.to_exact(args.max_den))
    }
}

fn parse_counts(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split([',', ':'])
        .map(|x| x.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("invalid {what} \"{s}\""))))
        .collect()
}

fn parse_shape(s: &str) -> Result<Shape> {
    Shape::new(parse_counts(s, "shape")?).map_err(|e| CliError::Usage(e.to_string()))
}

fn pair(s: &str, what: &str) -> Result<(usize, usize)> {
    match parse_counts(s, what)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(CliError::Usage(format!("{what} needs two numbers, got \"{s}\""))),
    }
}

fn tensor_tsv<S: Scalar>(t: &DenseTensor<S>, show: impl Fn(&S) -> (String, String)) -> String {
    let mut s = String::from("index\tre\tim\n");
    for (k, x) in t.entries().iter().enumerate() {
        let label: Vec<String> = t.shape().multi_index(k).iter().map(|i| (i + 1).to_string()).collect();
        let (re, im) = show(x);
        s.push_str(&format!("{}\t{re}\t{im}\n", label.join(",")));
    }
    s
}

fn exact_tensor_output(t: &ExactTensor) -> Output {
    let show = |z: &GaussianRational| (z.re.to_string(), z.im.to_string());
    Output { value: tensor_json(t), tsv: Some(tensor_tsv(t, show)) }
}

pub fn make(ctx: &mut Context, a: &MakeArgs) -> Result<Output> {
    let (name, arg) = a.state.split_once(':').unwrap_or((a.state.as_str(), ""));
    let t: ExactTensor = match (name, arg) {
        ("w", d) => w_state(parse_counts(d, "order")?.first().copied().unwrap_or(0))?,
        ("ghz", nd) => {
            let (n, d) = pair(nd, "ghz size and order")?;
            ghz_state(n, d)?
        }
        ("identity", kd) => {
            let (k, d) = pair(kd, "identity size and order")?;
            DenseTensor::identity_tensor(k, d)?
        }
        ("wkron2", "") => wkron2(),
        ("w3-square", "") => {
            let w = w_state::<GaussianRational>(3)?;
            w.tensor_product(&w)
        }
        ("poly", path) if !path.is_empty() => {
            let text = ctx.read_text(Some(std::path::Path::new(path)))?;
            poly_to_tensor(&parse_polynomial(&text)?)
        }
        _ => return Err(CliError::Usage(format!("unknown state \"{}\"", a.state))),
    };
    if a.normalize {
        let n = t.to_c64().normalized()?;
        let show = |z: &tensorank::C64| (z.re.to_string(), z.im.to_string());
        let tsv = tensor_tsv(&n, show);
        return Ok(Output { value: tensor_json(&n), tsv: Some(tsv) });
    }
    Ok(exact_tensor_output(&t))
}

pub fn rank(ctx: &mut Context, a: &RankArgs) -> Result<Output> {
    let t = ctx.read_exact(&a.input)?;
    let mut opts = RankReportOptions { exact_only: a.exact, cap: a.cap, seed: ctx.seed, ..Default::default() };
    opts.als.seed = ctx.seed;
    let report = rank_report_with(&t, &opts)?;
    let mut v = report_json(&report);
    v["shape"] = json!(t.dims());
    Ok(Output::json(v))
}

pub fn genrank(ctx: &mut Context, a: &GenrankArgs) -> Result<Output> {
    let shape = parse_shape(&a.shape)?;
    let mut opts = GenericRankOptions { trials: a.trials, seed: ctx.seed, ..Default::default() };
    if let Some(p) = a.prime {
        opts.field = PrimeField::new(p).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let r = generic_rank(&shape, &opts)?;
    let mut v = serde_json::to_value(&r).expect("plain data");
    v["known"] = known_generic_rank(&shape).map_or(Value::Null, |(value, source)| json!({ "value": value, "source": source }));
    v["max_rank_upper"] = json!(max_rank_upper_bounds(&shape).best);
    Ok(Output::json(v))
}

pub fn pencil(ctx: &mut Context, a: &PencilArgs) -> Result<Output> {
    let t = ctx.read_exact(&a.input)?;
    let p = rank_mxnx2(&t)?;
    let s = &p.structure;
    let polys: Vec<Value> = s
        .invariant_polynomials
        .iter()
        .map(|q| Value::Array(q.coeffs().iter().map(exact_scalar_json).collect()))
        .collect();
    let mut v = json!({
        "rank": p.rank,
        "certificate": p.certificate.as_str(),
        "structure": {
            "column_minimal_indices": s.column_minimal_indices,
            "row_minimal_indices": s.row_minimal_indices,
            "regular_core_dim": s.regular_core_dim,
            "normal_rank": s.normal_rank,
            "invariant_polynomials": polys,
            "multiple_root_count": s.multiple_root_count(),
        },
    });
    if t.dims() == [2, 2, 2] {
        v["class"] = serde_json::to_value(classify_222(&t)?.orbit).expect("plain data");
    }
    Ok(Output::json(v))
}

pub fn norms(ctx: &mut Context, a: &NormsArgs) -> Result<Output> {
    let all = !(a.spectral || a.nuclear || a.eta);
    let input = ctx.read_tensor(&a.input)?.to_c64();
    let input_norm = input.frobenius_norm();
    let t = if (input_norm - 1.0).abs() > NORMALIZATION_TOL {
        let t = input.normalized()?;
        ctx.warn(&format!("input has Frobenius norm {input_norm}; values refer to the normalized tensor"));
        t
    } else {
        input
    };
    let mut v = json!({ "input_norm": input_norm, "shape": t.dims() });
    if all || a.spectral {
        let mut opts = SpectralOptions { seed: ctx.seed, ..Default::default() };
        if let Some(s) = a.starts {
            opts.starts = s;
        }
        let s = spectral_norm(&t, &opts)?;
        let maximizer = Decomposition::new(t.shape().clone(), vec![s.maximizer.clone()])?;
        v["spectral"] = json!({
            "value": s.value,
            "maximizer": decomposition_json(&maximizer),
            "starts": s.starts,
            "starts_converged": s.starts_converged,
            "accepted": s.accepted,
        });
    }
    if all || a.nuclear {
        let mut opts = NuclearOptions { seed: ctx.seed, max_terms: a.max_terms, ..Default::default() };
        if let Some(tol) = a.tol {
            opts.tol = tol;
        }
        let r = nuclear_norm_with(&t, &opts)?;
        v["nuclear"] = json!({
            "value": r.primal_value,
            "dual_value": r.dual_value,
            "gap": r.gap,
            "verified": r.verified,
            "fit_error": r.fit_error,
            "decomposition": decomposition_json(&r.decomposition),
            "dual_witness": tensor_json(&r.dual_witness),
            "nuclear_rank_estimate": nuclear_rank_estimate(&r.decomposition).count,
        });
    }
    if all || a.eta {
        let m = entanglement_measures(&t, None)?;
        v["eta"] = json!({ "value": m.eta, "upper": m.eta_upper });
    }
    Ok(Output::json(v))
}

pub fn domset(_ctx: &mut Context, a: &DomsetArgs) -> Result<Output> {
    let shape = parse_shape(&a.shape)?;
    let dom = greedy_dominating(&shape)?;
    let sep = greedy_3separated(&shape)?;
    let frac = fractional_bound(&shape);
    let r0 = r0_lower_bound(&shape);
    let known = known_generic_rank(&shape).map(|(v, _)| v);
    let dims = shape.dims();
    let perfect = if dims.iter().all(|&n| n == dims[0]) {
        perfect_code_rank(dims[0] as u64, dims.len() as u64)
    } else {
        None
    };
    let exact = if shape.n_entries() <= MAX_EXACT_VERTICES { Some(exact_domination_number(&shape)?) } else { None };
    let chain_holds = known.map_or(r0 <= dom.len(), |g| r0 <= g && g <= dom.len());
    let v = json!({
        "shape": dims,
        "dominating": { "points": dom, "size": dom.len(), "verified": verify_dominating(&dom)? },
        "separated": { "points": sep, "size": sep.len(), "verified": verify_3separated(&sep) },
        "fractional_bound": [frac.numer().to_string(), frac.denom().to_string()],
        "exact_domination_number": exact,
        "perfect_code_rank": perfect.map(|r| r.to_string()),
        "chain": { "r0": r0, "r_gen_known": known, "gamma_greedy": dom.len(), "holds": chain_holds },
    });
    Ok(Output::json(v))
}

pub fn tables(_ctx: &mut Context, a: &TablesArgs) -> Result<Output> {
    let all = serde_json::to_value(known_tables()).expect("plain data");
    let (value, tsv) = match a.table {
        Table::All => (
            all,
            format!(
                "# qunit\n{}\n# comparison\n{}\n# 33p\n{}",
                qunit_table_tsv(),
                comparison_table_tsv(),
                table_33p_tsv()
            ),
        ),
        Table::Qunit => (all["qunit_generic_ranks"].clone(), qunit_table_tsv()),
        Table::Comparison => (all["qunit_comparison"].clone(), comparison_table_tsv()),
        Table::ThreeThreeP => (
            json!({ "generic_rank_33p": all["generic_rank_33p"], "max_rank_33p": all["max_rank_33p"] }),
            table_33p_tsv(),
        ),
    };
    Ok(Output { value, tsv: Some(tsv) })
}

use std::fs;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ratcheck_core::capacity::d_tau_consistency;
use ratcheck_core::contour::{
    contour_length, hankel_bound, iota_capacity_check, min_modulus, symmetrization_check, BoundInputs, ContourError,
    IotaOptions, MIN_DENSITY,
};
use ratcheck_core::dfinite::{bell_chen_pipeline, PipelineInput, PipelineOptions};
use ratcheck_core::hankel::{default_window, expand_exact, kronecker_test, reconstruct_rational, HankelError};
use ratcheck_core::input::{CloudSpec, ContourSpec, FunctionSpec, SeriesSpec};
use ratcheck_core::restriction::{criterion_test, CriterionReport};
use ratcheck_core::{CapacityEstimate64, Error, C64};

use crate::report::{to_json, write_csv, ErrorInfo, Outcome, Report, RunConfig, Table};
use crate::{
    CapacityArgs, Command, ContourBoundArgs, CriterionArgs, DfiniteArgs, IotaArgs, Io, KroneckerArgs, ReconstructArgs,
    SymcheckArgs,
};

/// Degrees tried by `reconstruct` when no `--degree` is given.
const MAX_AUTO_DEGREE: usize = 8;
const DEFAULT_ORDER: usize = 24;

pub(crate) fn dispatch(cmd: Command) -> i32 {
    match cmd {
        Command::Kronecker(a) => execute("kronecker", &a.io.clone(), |s| kronecker_resolve(&a, s), kronecker),
        Command::Reconstruct(a) => execute("reconstruct", &a.io.clone(), |s| reconstruct_resolve(&a, s), reconstruct),
        Command::Criterion(a) => execute("criterion", &a.io.clone(), |s| criterion_resolve(&a, s), criterion),
        Command::Capacity(a) => execute("capacity", &a.io.clone(), |_: &CloudSpec| capacity_resolve(&a), capacity),
        Command::ContourBound(a) => execute("contour-bound", &a.io.clone(), |s| bound_resolve(&a, s), contour_bound),
        Command::IotaCheck(a) => execute("iota-check", &a.io.clone(), |_: &ContourSpec| iota_resolve(&a), iota),
        Command::Dfinite(a) => execute("dfinite", &a.io.clone(), |s| dfinite_resolve(&a, s), dfinite),
        Command::Symcheck(a) => execute("symcheck", &a.io.clone(), |_: &SymSpec| symcheck_resolve(&a), symcheck),
    }
}

fn usage(sub: &str, msg: &str) -> i32 {
    eprintln!("error: {msg}\n\nRun `ratcheck {sub} --help` for the input schema and options.");
    2
}

fn load_input(raw: &str) -> Result<(Value, String), String> {
    let t = raw.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        let v = serde_json::from_str(t).map_err(|e| format!("inline input is not valid JSON: {e}"))?;
        return Ok((v, "inline".into()));
    }
    let text = fs::read_to_string(raw).map_err(|e| format!("cannot read input file {raw}: {e}"))?;
    let v = serde_json::from_str(&text).map_err(|e| format!("{raw} is not valid JSON: {e}"))?;
    Ok((v, raw.to_string()))
}

/// Loads and checks the input, resolves knobs, runs the analysis and writes the report.
fn execute<S, K>(
    sub: &str,
    io: &Io,
    resolve: impl FnOnce(&S) -> Result<K, String>,
    body: impl FnOnce(&S, &K) -> Outcome,
) -> i32
where
    S: DeserializeOwned,
    K: Serialize,
{
    let (value, source) = match load_input(&io.input) {
        Ok(x) => x,
        Err(msg) => return usage(sub, &msg),
    };
    let spec: S = match serde_json::from_value(value.clone()) {
        Ok(s) => s,
        Err(e) => return usage(sub, &format!("input does not match the {sub} schema: {e}")),
    };
    let knobs = match resolve(&spec) {
        Ok(k) => k,
        Err(msg) => return usage(sub, &msg),
    };
    let config = RunConfig {
        subcommand: sub.to_string(),
        input_source: source,
        input: value,
        output: io.output.as_ref().map(|p| p.display().to_string()),
        knobs: serde_json::to_value(&knobs).expect("knobs serialize"),
    };
    let outcome = body(&spec, &knobs);
    let code = outcome.exit_code();
    let report = Report {
        config,
        result: outcome.result,
        error: outcome.error.as_ref().map(ErrorInfo::from_error),
    };
    let text = to_json(&report);
    match &io.output {
        None => print!("{text}"),
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
            if let Some(table) = &outcome.table {
                let csv_path = path.with_extension("csv");
                if let Err(e) = write_csv(&csv_path, table) {
                    eprintln!("error: cannot write {}: {e}", csv_path.display());
                    return 2;
                }
            }
        }
    }
    if let Some(e) = &outcome.error {
        eprintln!("{sub}: {e}");
    }
    code
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("result serializes")
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return Outcome::from(Error::from(err)),
        }
    };
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn univariate_only(spec: &SeriesSpec) -> Result<(), String> {
    check(!spec.is_bivariate(), || "expected a univariate series".into())
}

/// Coefficients available in a univariate table, if the input is one.
fn table_len(spec: &SeriesSpec) -> Option<usize> {
    match spec {
        SeriesSpec::Table { coeffs: Some(c), .. } => Some(c.len()),
        _ => None,
    }
}

/// Truncation order of a bivariate table input, if the input is one.
fn table_order(spec: &SeriesSpec) -> Result<Option<usize>, String> {
    match spec {
        SeriesSpec::Table { .. } => spec.bivariate(0).map(|t| Some(t.truncation_order())).map_err(|e| e.to_string()),
        _ => Ok(None),
    }
}

// ---------- kronecker ----------

#[derive(Serialize)]
struct KroneckerKnobs {
    m_lo: usize,
    m_hi: usize,
    degree: Option<usize>,
    order: usize,
}

fn kronecker_resolve(a: &KroneckerArgs, spec: &SeriesSpec) -> Result<KroneckerKnobs, String> {
    univariate_only(spec)?;
    let m_hi = a.m_hi.unwrap_or(default_window(a.degree).1);
    check(a.m_lo <= m_hi, || format!("--m-lo {} exceeds --m-hi {m_hi}", a.m_lo))?;
    let order = 2 * m_hi;
    if let Some(len) = table_len(spec) {
        check(len > order, || format!("window up to n = {m_hi} needs {} coefficients, table has {len}", order + 1))?;
    }
    Ok(KroneckerKnobs { m_lo: a.m_lo, m_hi, degree: a.degree, order })
}

fn kronecker(spec: &SeriesSpec, k: &KroneckerKnobs) -> Outcome {
    let series = attempt!(spec.univariate(k.order));
    let rep = attempt!(kronecker_test(&series, k.m_lo, k.m_hi));
    let rows = rep
        .dets
        .iter()
        .enumerate()
        .map(|(i, d)| vec![(k.m_lo + i).to_string(), d.to_string()])
        .collect();
    Outcome::ok(to_value(&rep), Table { header: vec!["n", "det"], rows })
}

// ---------- reconstruct ----------

#[derive(Serialize)]
struct ReconstructKnobs {
    degrees: Vec<usize>,
    order: usize,
}

fn reconstruct_resolve(a: &ReconstructArgs, spec: &SeriesSpec) -> Result<ReconstructKnobs, String> {
    univariate_only(spec)?;
    let order = match (a.big_n, table_len(spec)) {
        (Some(n), Some(len)) => {
            check(n < len, || format!("--N {n} exceeds the table ({len} coefficients)"))?;
            n
        }
        (Some(n), None) => n,
        (None, Some(len)) => {
            check(len > 0, || "empty table".into())?;
            len - 1
        }
        (None, None) => DEFAULT_ORDER,
    };
    let degrees: Vec<usize> = match a.degree {
        Some(d) => {
            check(2 * d < order, || format!("degree {d} needs order >= {}, got {order}", 2 * d + 1))?;
            vec![d]
        }
        None => {
            check(order >= 1, || "at least two coefficients are needed".into())?;
            (0..=MAX_AUTO_DEGREE.min((order - 1) / 2)).collect()
        }
    };
    Ok(ReconstructKnobs { degrees, order })
}

fn reconstruct(spec: &SeriesSpec, k: &ReconstructKnobs) -> Outcome {
    let series = attempt!(spec.univariate(k.order));
    let series = attempt!(series.truncated(k.order));
    let target: Vec<_> = series
        .coeffs()
        .iter()
        .map(|c| num_rational::BigRational::from_integer(c.clone()))
        .collect();
    for &d in &k.degrees {
        let r = match reconstruct_rational(&series, d) {
            Ok(r) => r,
            Err(HankelError::NoRationalFit(_)) => continue,
            Err(e) => return Outcome::from(Error::from(e)),
        };
        let expanded = expand_exact(&r, k.order);
        if expanded != target {
            continue;
        }
        let (p, q) = (r.numerator().coeffs(), r.denominator().coeffs());
        let rows = (0..p.len().max(q.len()))
            .map(|i| {
                let at = |v: &[num_bigint::BigInt]| v.get(i).map_or_else(|| "0".into(), |c| c.to_string());
                vec![i.to_string(), at(p), at(q)]
            })
            .collect();
        let result = json!({ "degree": d, "rational": to_value(&r), "matches_through": k.order });
        return Outcome::ok(result, Table { header: vec!["k", "numerator", "denominator"], rows });
    }
    let top = *k.degrees.last().expect("nonempty degree list");
    Outcome::from(Error::from(HankelError::NoRationalFit(top)))
}

// ---------- criterion ----------

#[derive(Serialize)]
struct CriterionKnobs {
    n: usize,
    order: usize,
    m_lo: usize,
    m_hi: usize,
}

fn criterion_knobs(
    spec: &SeriesSpec,
    n: usize,
    big_n: Option<usize>,
    m_lo: usize,
    m_hi: usize,
) -> Result<CriterionKnobs, String> {
    check(spec.is_bivariate(), || "expected a bivariate series".into())?;
    check(n >= 1, || "--n must be at least 1".into())?;
    check(m_lo <= m_hi, || format!("--m-lo {m_lo} exceeds --m-hi {m_hi}"))?;
    let order = match (big_n, table_order(spec)?) {
        (Some(b), Some(t)) => {
            check(b <= t, || format!("--N {b} exceeds the table order {t}"))?;
            b
        }
        (None, Some(t)) => t,
        (Some(b), None) => b,
        (None, None) => DEFAULT_ORDER.max(2 * m_hi),
    };
    check(order >= 2 * m_hi, || format!("H_{m_hi} needs N >= {}, got {order}", 2 * m_hi))?;
    Ok(CriterionKnobs { n, order, m_lo, m_hi })
}

fn criterion_table(rep: &CriterionReport) -> Table {
    let rows = rep
        .results
        .iter()
        .map(|r| {
            vec![
                r.m.to_string(),
                r.vanishes.to_string(),
                r.poly.degree().map_or_else(String::new, |d| d.to_string()),
                r.witness.as_ref().map_or_else(String::new, |w| w.degree.to_string()),
                r.witness.as_ref().map_or_else(String::new, |w| w.coeff.to_string()),
                r.sup_bound.to_string(),
            ]
        })
        .collect();
    Table {
        header: vec!["m", "vanishes", "degree", "witness_degree", "witness_coeff", "sup_bound"],
        rows,
    }
}

fn criterion_resolve(a: &CriterionArgs, spec: &SeriesSpec) -> Result<CriterionKnobs, String> {
    criterion_knobs(spec, a.n, a.big_n, a.m_lo, a.m_hi)
}

fn criterion(spec: &SeriesSpec, k: &CriterionKnobs) -> Outcome {
    let f = attempt!(spec.bivariate(k.order));
    let rep = attempt!(criterion_test(&f, k.n, k.m_lo, k.m_hi));
    Outcome::ok(to_value(&rep), criterion_table(&rep))
}

// ---------- capacity ----------

#[derive(Serialize)]
struct CapacityKnobs {
    n_max: usize,
    seed: u64,
    density: f64,
}

fn capacity_resolve(a: &CapacityArgs) -> Result<CapacityKnobs, String> {
    check(a.n_max >= 4, || format!("--n-max must be at least 4, got {}", a.n_max))?;
    check(a.density.is_finite() && a.density > 0.0, || "--density must be positive".into())?;
    Ok(CapacityKnobs { n_max: a.n_max, seed: a.seed, density: a.density })
}

fn estimate_table(e: &CapacityEstimate64) -> Table {
    let rows = e
        .n_values
        .iter()
        .zip(&e.d_seq)
        .zip(&e.tau_upper_seq)
        .map(|((n, d), t)| vec![n.to_string(), d.to_string(), t.to_string()])
        .collect();
    Table { header: vec!["n", "d_n", "tau_upper"], rows }
}

fn capacity(spec: &CloudSpec, k: &CapacityKnobs) -> Outcome {
    let cloud = attempt!(spec.build(k.density));
    let rep = attempt!(d_tau_consistency(&cloud, k.n_max, k.seed));
    let result = json!({ "label": cloud.label(), "cloud_size": cloud.len(), "report": to_value(&rep) });
    Outcome::ok(result, estimate_table(&rep.estimate))
}

// ---------- iota-check ----------

#[derive(Serialize)]
struct IotaKnobs {
    n_max: usize,
    seed: u64,
    density: f64,
    margin: f64,
}

fn iota_knobs(n_max: usize, seed: u64, density: f64, margin: f64) -> Result<IotaKnobs, String> {
    check(n_max >= 2, || format!("--n-max must be at least 2, got {n_max}"))?;
    check(density.is_finite() && density >= MIN_DENSITY, || format!("--density must be at least {MIN_DENSITY}"))?;
    check(margin > 0.0 && margin < 1.0, || "--margin must lie in (0, 1)".into())?;
    Ok(IotaKnobs { n_max, seed, density, margin })
}

fn iota_resolve(a: &IotaArgs) -> Result<IotaKnobs, String> {
    iota_knobs(a.n_max, a.seed, a.density, a.margin)
}

fn iota(spec: &ContourSpec, k: &IotaKnobs) -> Outcome {
    let gamma = attempt!(spec.build());
    let opts = IotaOptions { margin: k.margin, density: k.density };
    let rep = attempt!(iota_capacity_check(&gamma, k.n_max, k.seed, opts));
    Outcome::ok(to_value(&rep), estimate_table(&rep.estimate))
}

// ---------- contour-bound ----------

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundSpec {
    contour: ContourSpec,
    #[serde(rename = "M")]
    m_sup: f64,
    #[serde(default)]
    rho: Option<f64>,
}

#[derive(Serialize)]
struct BoundKnobs {
    m_max: usize,
    rho: Option<f64>,
    iota: Option<IotaKnobs>,
}

fn bound_resolve(a: &ContourBoundArgs, spec: &BoundSpec) -> Result<BoundKnobs, String> {
    check(a.m_hi >= 1, || "--m-hi must be at least 1".into())?;
    check(spec.m_sup.is_finite() && spec.m_sup >= 0.0, || "M must be finite and nonnegative".into())?;
    let iota = match spec.rho {
        Some(r) => {
            check(r > 0.0 && r < 1.0, || "rho must lie in (0, 1)".into())?;
            None
        }
        None => Some(iota_knobs(a.n_max, a.seed, a.density, a.margin)?),
    };
    Ok(BoundKnobs { m_max: a.m_hi, rho: spec.rho, iota })
}

fn contour_bound(spec: &BoundSpec, k: &BoundKnobs) -> Outcome {
    let gamma = attempt!(spec.contour.build());
    let (l, eta) = (contour_length(&gamma), min_modulus(&gamma));
    // A capacity certificate at n bounds d_k for k >= n, i.e. for sizes m >= n - 1.
    let (rho, m_start, certificate) = match (spec.rho, &k.iota) {
        (Some(r), _) => (r, 1, Value::Null),
        (None, Some(ik)) => {
            let opts = IotaOptions { margin: ik.margin, density: ik.density };
            let rep = attempt!(iota_capacity_check(&gamma, ik.n_max, ik.seed, opts));
            let cert = json!({ "certified_n": rep.certified_n, "certified_d": rep.certified_d, "cloud_size": rep.cloud_size });
            (rep.rho, rep.certified_n.saturating_sub(1).max(1), cert)
        }
        (None, None) => unreachable!("resolve supplies iota knobs when rho is absent"),
    };
    let mut bounds = Vec::with_capacity(k.m_max);
    for m in 1..=k.m_max {
        let b = attempt!(hankel_bound(&BoundInputs { l, m_sup: spec.m_sup, eta, rho, m }));
        bounds.push((m, b));
    }
    let m0 = bounds.iter().find(|(m, b)| *m >= m_start && *b < 1.0).map(|(m, _)| *m);
    let result = json!({
        "length": l,
        "eta": eta,
        "M": spec.m_sup,
        "rho": rho,
        "certificate": certificate,
        "m_start": m_start,
        "bounds": bounds.iter().map(|(m, b)| json!({ "m": m, "bound": b })).collect::<Vec<_>>(),
        "m0": m0,
    });
    let table = Table {
        header: vec!["m", "bound"],
        rows: bounds.iter().map(|(m, b)| vec![m.to_string(), b.to_string()]).collect(),
    };
    Outcome {
        result: Some(result),
        error: m0.is_none().then_some(Error::from(ContourError::NoM0 { m_max: k.m_max })),
        table: Some(table),
        negative: false,
    }
}

// ---------- dfinite ----------

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
enum DfiniteKnobs {
    Univariate { order: usize },
    System(CriterionKnobs),
    Table(CriterionKnobs),
}

fn dfinite_resolve(a: &DfiniteArgs, spec: &SeriesSpec) -> Result<DfiniteKnobs, String> {
    match spec {
        SeriesSpec::Dfinite(d) if d.variables.len() == 1 => Ok(DfiniteKnobs::Univariate { order: a.big_n }),
        SeriesSpec::Dfinite(_) => Ok(DfiniteKnobs::System(criterion_knobs(spec, a.n, Some(a.big_n), a.m_lo, a.m_hi)?)),
        _ if spec.is_bivariate() => {
            let big_n = table_order(spec)?.map_or(a.big_n, |t| t.min(a.big_n));
            Ok(DfiniteKnobs::Table(criterion_knobs(spec, a.n, Some(big_n), a.m_lo, a.m_hi)?))
        }
        _ => Err("expected a D-finite system or a bivariate series".into()),
    }
}

fn dfinite(spec: &SeriesSpec, k: &DfiniteKnobs) -> Outcome {
    let (input, ck, demo) = match (spec, k) {
        (SeriesSpec::Dfinite(d), DfiniteKnobs::Univariate { order }) => {
            let sys = attempt!(d.build());
            let s = attempt!(sys.generate_univariate(*order));
            let rows = s.coeffs.iter().enumerate().map(|(i, c)| vec![i.to_string(), c.to_string()]).collect();
            return Outcome::ok(to_value(&s), Table { header: vec!["k", "a_k"], rows });
        }
        (SeriesSpec::Dfinite(d), DfiniteKnobs::System(ck)) => (PipelineInput::System(attempt!(d.build())), ck, true),
        (_, DfiniteKnobs::Table(ck)) => (PipelineInput::Table(attempt!(spec.bivariate(ck.order))), ck, false),
        _ => unreachable!("knobs are resolved from the same spec"),
    };
    let opts = PipelineOptions { n: ck.n, order: ck.order, m_lo: ck.m_lo, m_hi: ck.m_hi, continuation_demo: demo };
    let rep = attempt!(bell_chen_pipeline(&input, opts));
    Outcome::ok(to_value(&rep), criterion_table(&rep.criterion))
}

// ---------- symcheck ----------

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymSpec {
    g: FunctionSpec,
    contour: ContourSpec,
}

#[derive(Serialize)]
struct SymKnobs {
    m_lo: usize,
    m_hi: usize,
    tol: f64,
}

fn symcheck_resolve(a: &SymcheckArgs) -> Result<SymKnobs, String> {
    check(1 <= a.m_lo && a.m_lo <= a.m_hi && a.m_hi <= 2, || "need 1 <= --m-lo <= --m-hi <= 2".into())?;
    check(a.tol.is_finite() && a.tol > 0.0, || "--tol must be positive".into())?;
    Ok(SymKnobs { m_lo: a.m_lo, m_hi: a.m_hi, tol: a.tol })
}

fn symcheck(spec: &SymSpec, k: &SymKnobs) -> Outcome {
    let gamma = attempt!(spec.contour.build());
    let g = attempt!(spec.g.build());
    let f = |z: C64| g.eval(z);
    let mut reports = Vec::new();
    for m in k.m_lo..=k.m_hi {
        reports.push(attempt!(symmetrization_check(&f, &gamma, m)));
    }
    let passed = reports.iter().all(|r| r.residual < k.tol);
    let rows = reports
        .iter()
        .map(|r| {
            [r.m as f64, r.direct[0], r.direct[1], r.integral[0], r.integral[1], r.residual]
                .iter()
                .enumerate()
                .map(|(i, x)| if i == 0 { r.m.to_string() } else { x.to_string() })
                .collect()
        })
        .collect();
    Outcome {
        result: Some(json!({ "reports": to_value(&reports), "passed": passed })),
        error: None,
        table: Some(Table {
            header: vec!["m", "direct_re", "direct_im", "integral_re", "integral_im", "residual"],
            rows,
        }),
        negative: !passed,
    }
}

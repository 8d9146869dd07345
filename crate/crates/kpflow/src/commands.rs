//! Subcommand implementations. Each returns a report and, when a check
//! failed, the error that decides the exit code.

use std::path::{Path, PathBuf};

use kpflow_core::kp::{
    check_lax_shape, conservation_violations, dressing, hamiltonian, hamiltonian_series, kp1_residual, kp_solve, lax_residual,
    log_deriv_residual, shape_holds, zs_residual, KpSolution,
};
use kpflow_core::laurent::divergence_witness;
use kpflow_core::mulase::residual;
use kpflow_core::{factorize, recompose, Error, Fourier, Poly, PsiOp, TSeries, ZSeries};
use serde_json::{json, Map, Value};

use crate::config::{BasicParams, Check, Cli, Command, EulerParams, RingKind, SolveParams, TableFormat};
use crate::json::{encode_series, weight, Codec, JsonRing};
use crate::report::{assemble, failed_checks, sha256_hex, stable, CheckRecord, CliError};

/// Output of a command: text for stdout or `--out`, plus the failure if any.
#[derive(Debug)]
pub struct Run {
    pub output: String,
    pub out: Option<PathBuf>,
    pub failure: Option<CliError>,
}

macro_rules! with_ring {
    ($kind:expr, $f:ident ( $($arg:expr),* )) => {
        match $kind {
            RingKind::Fourier => $f::<Fourier>($($arg),*),
            RingKind::Poly => $f::<Poly>($($arg),*),
            RingKind::FourierZ => $f::<ZSeries<Fourier>>($($arg),*),
        }
    };
}

pub fn execute(cli: &Cli) -> Result<Run, CliError> {
    match &cli.command {
        Command::Solve(a) => {
            let params = SolveParams::from_args(a)?;
            let (input, sha) = read_json(&a.input)?;
            finish(solve_report(&params, &input, &sha)?, a.out.clone())
        }
        Command::Factorize(a) => {
            let params = BasicParams::new(a.ring.ring, a.ring.zmax, a.depth)?;
            let (input, sha) = read_json(&a.input)?;
            finish(factorize_report(&params, &input, &sha)?, a.out.clone())
        }
        Command::Dressing(a) => {
            let params = BasicParams::new(a.ring.ring, a.ring.zmax, a.depth)?;
            let (input, sha) = read_json(&a.input)?;
            finish(dressing_report(&params, &input, &sha)?, a.out.clone())
        }
        Command::DemoEuler(a) => {
            let params = EulerParams::new(&a.n_list, a.m_max)?;
            let report = euler_report(&params);
            let mut run = finish(report.clone(), a.out.clone())?;
            if a.format == TableFormat::Csv {
                run.output = euler_csv(&report);
            }
            Ok(run)
        }
        Command::Verify(a) => {
            let bytes = std::fs::read(&a.input).map_err(|e| CliError::io(&a.input.display().to_string(), &e))?;
            let stored: Value = serde_json::from_slice(&bytes).map_err(|e| CliError::new(2, "parse_error", e.to_string(), Value::Null))?;
            finish(verify_report(&stored, &sha256_hex(&bytes))?, a.out.clone())
        }
    }
}

fn finish(report: Value, out: Option<PathBuf>) -> Result<Run, CliError> {
    let failure = if report["status"] == "pass" {
        None
    } else if let Some(e) = report.get("error").filter(|e| !e.is_null()) {
        Some(CliError::new(1, e["code"].as_str().unwrap_or("check_failed"), e["message"].as_str().unwrap_or("").into(), e["detail"].clone()))
    } else {
        let failed = failed_checks(&report);
        Some(CliError::new(1, "check_failed", format!("{} check(s) failed", failed.len()), json!({ "failed": failed })))
    };
    let output = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    Ok(Run { output, out, failure })
}

fn read_json(path: &Path) -> Result<(Value, String), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(&path.display().to_string(), &e))?;
    let v = serde_json::from_slice(&bytes).map_err(|e| CliError::new(2, "parse_error", format!("{}: {e}", path.display()), Value::Null))?;
    Ok((v, sha256_hex(&bytes)))
}

fn input_block(input: &Value, sha: &str) -> Value {
    json!({ "sha256": sha, "data": input })
}

fn parse<T>(r: Result<T, Error>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from_core(2, &e))
}

fn decode_datum<R: JsonRing>(input: &Value, z_max: Option<u32>) -> Result<PsiOp<R>, CliError> {
    let mut l0 = parse(PsiOp::<R>::decode(input))?;
    if let Some(z) = z_max {
        l0 = l0.map_coeffs(|c| c.clone().with_z_max(z));
    }
    parse(check_lax_shape(&l0))?;
    Ok(l0)
}

fn decode_group_element<R: JsonRing>(input: &Value, z_max: Option<u32>) -> Result<TSeries<R>, CliError> {
    let u = parse(TSeries::<R>::decode(input))?;
    Ok(match z_max {
        Some(z) => u.map_slices(|op| op.map_coeffs(|c| c.clone().with_z_max(z))),
        None => u,
    })
}

fn series_record<R: JsonRing>(name: String, family: &'static str, r: &TSeries<R>) -> CheckRecord {
    CheckRecord::new(name, family, r.nonzero_slots(), r.encode(), weight(r))
}

/// Verdict of `a == b` with the difference as residual.
fn equality_record<R: JsonRing>(name: &str, family: &'static str, a: &TSeries<R>, b: &TSeries<R>) -> CheckRecord {
    if a == b {
        CheckRecord::new(name.into(), family, 0, Value::Null, 0)
    } else {
        let d = a.sub(b);
        CheckRecord::new(name.into(), family, d.nonzero_slots().max(1), d.encode(), weight(&d))
    }
}

fn conventions() -> Value {
    json!({
        "lax": "dL/dt_k - [(L^k)_+, L], valuations <= vMax - k",
        "zs": "d(L^i)_+/dt_j - d(L^j)_+/dt_i + [(L^i)_+, (L^j)_+], componentwise",
        "logderiv": "plus: dY/dt_k Y^-1 - (L^k)_+; minus: dS/dt_k S^-1 + (L^k)_-",
        "conservation": "H_k = Trace(L^{k+1}) / k must have no monomials of positive valuation",
        "kp1": "(3/4) u_t2t2 - d(u_t3 - (1/4) u_xxx - 3 u_x u), u = res L, valuations <= vMax - 4; constants fixed by reducing zs(L, 2, 3)",
        "shape": "S L0 S^-1 = Y L0 Y^-1 slotwise and L - d of order <= -1",
        "dressing": "S0 = 1 + sum s_-n d^-n with L0 S0 = S0 d, down to depth",
    })
}

pub fn solve_report(params: &SolveParams, input: &Value, sha: &str) -> Result<Value, CliError> {
    with_ring!(params.ring, solve_typed(params, input, sha))
}

fn solve_typed<R: JsonRing>(params: &SolveParams, input: &Value, sha: &str) -> Result<Value, CliError> {
    let l0 = decode_datum::<R>(input, params.z_max)?;
    let sol = kp_solve(&l0, params.k_max, params.v_max, params.depth).map_err(|e| CliError::computation(&e))?;
    let checks = solve_checks(&sol, &params.checks)?;
    let result = json!({ "L": sol.l.encode(), "S": sol.factors.s.encode(), "Y": sol.factors.y.encode() });
    let mut extra = Map::new();
    extra.insert("conventions".into(), conventions());
    Ok(assemble("solve", input_block(input, sha), params.to_json(), result, &checks, extra))
}

/// Runs the requested checks on a solution; used both after solving and on stored reports.
pub fn solve_checks<R: JsonRing>(sol: &KpSolution<R>, checks: &[Check]) -> Result<Vec<CheckRecord>, CliError> {
    let fail = |e: Error| CliError::computation(&e);
    let mut out = Vec::new();
    for check in checks {
        match check {
            Check::Lax => {
                for k in 1..=sol.k_max {
                    out.push(series_record(format!("lax_{k}"), "lax", &lax_residual(&sol.l, k)));
                }
            }
            Check::Zs => {
                for i in 1..=sol.k_max {
                    for j in (i + 1)..=sol.k_max {
                        out.push(series_record(format!("zs_{i}_{j}"), "zs", &zs_residual(&sol.l, i, j)));
                    }
                }
            }
            Check::Logderiv => {
                for k in 1..=sol.k_max {
                    let (plus, minus) = log_deriv_residual(&sol.factors, &sol.l, k).map_err(fail)?;
                    out.push(series_record(format!("logderiv_plus_{k}"), "logderiv", &plus));
                    out.push(series_record(format!("logderiv_minus_{k}"), "logderiv", &minus));
                }
            }
            Check::Conservation => {
                for k in 1..=sol.k_max {
                    let h = hamiltonian_series(&sol.l, k).map_err(fail)?;
                    let bad = conservation_violations(&h);
                    let mut varying = h.clone();
                    varying.terms.retain(|t, _| !t.is_one());
                    let value = hamiltonian(&sol.l0, k).map_err(fail)?;
                    out.push(
                        CheckRecord::new(format!("conservation_{k}"), "conservation", bad.len(), encode_series(&varying, Codec::encode), bad.len())
                            .with_detail(json!({ "H_at_t0": value.encode() })),
                    );
                }
            }
            Check::Kp1 => {
                let r = kp1_residual(&sol.l, sol.k_max).map_err(fail)?;
                out.push(CheckRecord::new("kp1".into(), "kp1", r.terms.len(), encode_series(&r, Codec::encode), r.terms.len()));
            }
            Check::Shape => {
                let via_s = sol.l_via_s().map_err(fail)?;
                out.push(equality_record("conjugation", "shape", &via_s, &sol.l));
                let ok = shape_holds(&sol.l);
                out.push(CheckRecord::new("lax_shape".into(), "shape", usize::from(!ok), Value::Null, 0));
            }
            Check::Dressing => out.push(dressing_record(&sol.l0, sol.depth)?.0),
            Check::All => unreachable!("expanded during validation"),
        }
    }
    Ok(out)
}

/// The dressing check and, on success, the operator `S0`.
fn dressing_record<R: JsonRing>(l0: &PsiOp<R>, depth: i64) -> Result<(CheckRecord, Option<PsiOp<R>>), CliError> {
    match dressing(l0, depth) {
        Ok(s0) => {
            let lhs = l0.compose_to(&s0, depth);
            let rhs = s0.compose_to(&PsiOp::d_pow(1), depth);
            let diff = lhs.sub(&rhs);
            let diff = match diff.reliable_depth() {
                Some(d) => diff.truncate(d),
                None => diff,
            };
            let slots = if lhs.eq_reliable(&rhs) { 0 } else { diff.len().max(1) };
            Ok((CheckRecord::new("dressing".into(), "dressing", slots, diff.encode(), diff.len()), Some(s0)))
        }
        Err(e @ Error::DressingObstruction { .. }) => {
            let err = CliError::from_core(1, &e);
            let record = CheckRecord::new("dressing".into(), "dressing", 1, Value::Null, 0)
                .with_detail(json!({ "code": err.code, "message": err.message, "detail": err.detail }));
            Ok((record, None))
        }
        Err(e) => Err(CliError::computation(&e)),
    }
}

pub fn factorize_report(params: &BasicParams, input: &Value, sha: &str) -> Result<Value, CliError> {
    with_ring!(params.ring, factorize_typed(params, input, sha))
}

fn factorize_typed<R: JsonRing>(params: &BasicParams, input: &Value, sha: &str) -> Result<Value, CliError> {
    let u = decode_group_element::<R>(input, params.z_max)?;
    let f = factorize(&u, params.depth).map_err(|e| CliError::computation(&e))?;
    let back = recompose(&f).map_err(|e| CliError::computation(&e))?;
    let again = factorize(&back, params.depth).map_err(|e| CliError::computation(&e))?;
    let checks = vec![
        series_record("residual".into(), "factorize", &residual(&f, &u)),
        equality_record("recompose", "factorize", &back, &u),
        equality_record("refactorize_s", "factorize", &again.s, &f.s),
        equality_record("refactorize_y", "factorize", &again.y, &f.y),
        CheckRecord::new("factor_shapes".into(), "factorize", usize::from(!f.is_valid()), Value::Null, 0),
    ];
    let result = json!({ "S": f.s.encode(), "Y": f.y.encode() });
    Ok(assemble("factorize", input_block(input, sha), params.to_json(), result, &checks, Map::new()))
}

pub fn dressing_report(params: &BasicParams, input: &Value, sha: &str) -> Result<Value, CliError> {
    with_ring!(params.ring, dressing_typed(params, input, sha))
}

fn dressing_typed<R: JsonRing>(params: &BasicParams, input: &Value, sha: &str) -> Result<Value, CliError> {
    let l0 = decode_datum::<R>(input, params.z_max)?;
    let (record, s0) = dressing_record(&l0, params.depth)?;
    let mut extra = Map::new();
    if !record.detail.is_null() {
        extra.insert("error".into(), record.detail.clone());
    }
    let result = json!({ "S0": s0.map(|s| s.encode()) });
    Ok(assemble("dressing", input_block(input, sha), params.to_json(), result, &[record], extra))
}

pub fn euler_report(params: &EulerParams) -> Value {
    let w = divergence_witness(&params.n_list, params.m_max);
    let mut rows = Vec::new();
    for p in &w.products {
        for (deg, c) in &p.window {
            let m = (-deg) as u64;
            let check = w.checks.iter().find(|k| k.m == m && k.n == p.n);
            rows.push(json!({
                "n": p.n,
                "m": m,
                "coefficient": c.encode(),
                "scaled": check.map(|k| k.scaled.encode()),
                "bound": check.map(|k| k.lower.encode()),
                "holds": check.map(|k| k.holds),
                "lowest_degree": p.lowest_degree,
            }));
        }
    }
    let failing = w.checks.iter().filter(|c| !c.holds).count();
    let checks = vec![
        CheckRecord::new("sandwich".into(), "euler", failing, Value::Null, 0),
        CheckRecord::new("order_unbounded".into(), "euler", usize::from(!w.order_unbounded), Value::Null, 0),
        CheckRecord::new("pointwise_convergent".into(), "euler", usize::from(!w.pointwise_convergent), Value::Null, 0),
    ];
    let result = json!({ "rows": rows, "verdict": w.verdict });
    assemble("demo-euler", Value::Null, params.to_json(), result, &checks, Map::new())
}

fn euler_csv(report: &Value) -> String {
    let cell = |v: &Value| match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let mut out = String::from("n,m,coefficient,scaled,bound,holds,lowest_degree\n");
    for r in report["result"]["rows"].as_array().into_iter().flatten() {
        let cols = ["n", "m", "coefficient", "scaled", "bound", "holds", "lowest_degree"].map(|k| cell(&r[k]));
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

/// Re-runs the stored command and, for solves, re-checks the stored `L`, `S`, `Y`.
pub fn verify_report(stored: &Value, stored_sha: &str) -> Result<Value, CliError> {
    let bad = |m: &str| CliError::new(2, "parse_error", format!("not a kpflow report: {m}"), Value::Null);
    let command = stored["command"].as_str().ok_or_else(|| bad("command"))?;
    let params = &stored["parameters"];
    let input = &stored["input"]["data"];
    let sha = stored["input"]["sha256"].as_str().unwrap_or("");
    let (rerun, recheck) = match command {
        "solve" => {
            let p = SolveParams::from_json(params)?;
            let recheck = with_ring!(p.ring, recheck_solve(&p, stored))?;
            (solve_report(&p, input, sha), Some(recheck))
        }
        "factorize" => (factorize_report(&BasicParams::from_json(params)?, input, sha), None),
        "dressing" => (dressing_report(&BasicParams::from_json(params)?, input, sha), None),
        "demo-euler" => (Ok(euler_report(&EulerParams::from_json(params)?)), None),
        other => return Err(bad(other)),
    };
    let rerun = rerun?;
    let reproduced = stable(&rerun) == stable(stored);
    let mut checks = vec![CheckRecord::new("reproduced".into(), "verify", usize::from(!reproduced), Value::Null, 0)];
    if let Some(mismatches) = &recheck {
        checks.push(CheckRecord::new("stored_objects".into(), "verify", mismatches.len(), json!(mismatches), mismatches.len()));
    }
    let failed = failed_checks(stored);
    checks.push(CheckRecord::new("stored_verdicts".into(), "verify", failed.len(), json!(failed), failed.len()));
    let input = json!({ "sha256": stored_sha, "command": command });
    Ok(assemble("verify", input, json!({}), Value::Null, &checks, Map::new()))
}

/// Names of stored checks whose record differs from a re-check of the stored objects.
fn recheck_solve<R: JsonRing>(params: &SolveParams, stored: &Value) -> Result<Vec<String>, CliError> {
    let l0 = decode_datum::<R>(&stored["input"]["data"], params.z_max)?;
    let result = &stored["result"];
    let l = parse(TSeries::<R>::decode(&result["L"]))?;
    let s = parse(TSeries::<R>::decode(&result["S"]))?;
    let y = parse(TSeries::<R>::decode(&result["Y"]))?;
    let factors = kpflow_core::FactorPair { s, y };
    let u = recompose(&factors).map_err(|e| CliError::computation(&e))?;
    let sol = KpSolution { l0, k_max: params.k_max, v_max: params.v_max, depth: params.depth, u, factors, l };
    let fresh = solve_checks(&sol, &params.checks)?;
    let stored_checks = stored["checks"].as_array().cloned().unwrap_or_default();
    let mut mismatches = Vec::new();
    if stored_checks.len() != fresh.len() {
        mismatches.push("check list".to_string());
    }
    for (f, s) in fresh.iter().zip(&stored_checks) {
        if f.to_json() != *s {
            mismatches.push(f.name.clone());
        }
    }
    Ok(mismatches)
}

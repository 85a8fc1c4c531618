//! Input parsing and structured output: the spec loader (inline JSON or file
//! path), the flat run summary, and CSV table builders. All number formatting
//! goes through f64's shortest round-trip display, so identical runs produce
//! byte-identical artifacts.

use std::fmt::Write as _;
use std::fs;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::oracle::{LogDerivRow, OracleSolution};
use crate::potential::PotentialSpec;
use crate::solver::{MatchingResiduals, SolveResult, Verdict};

/// Load a potential spec from a CLI argument: inline JSON if it opens with a
/// brace, otherwise a path to a JSON file.
pub fn load_spec(arg: &str) -> Result<PotentialSpec, EngineError> {
    let spec = load_spec_raw(arg)?;
    spec.validate()?;
    Ok(spec)
}

/// Parse a spec without admissibility validation. The invariant battery wants
/// inadmissible parameters to surface as a named failed check, not as a load
/// error, so it takes the raw parse.
pub fn load_spec_raw(arg: &str) -> Result<PotentialSpec, EngineError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| EngineError::Io(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| EngineError::Parse(format!("potential spec: {e}")))
}

/// Parse `--orders N,M`; a single value sets both chains to the same depth.
pub fn parse_orders(s: &str) -> Result<(usize, usize), EngineError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || EngineError::Parse(format!("orders must be N or N,M, got {s:?}"));
    match parts.as_slice() {
        [one] => {
            let n = one.parse().map_err(|_| bad())?;
            Ok((n, n))
        }
        [n, m] => Ok((n.parse().map_err(|_| bad())?, m.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

/// Parse `--a-grid v1,v2,...`; sweeps need at least two points.
pub fn parse_a_grid(s: &str) -> Result<Vec<f64>, EngineError> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|e| EngineError::Parse(format!("a-grid: {e}")))?;
    if vals.len() < 2 {
        return Err(EngineError::InvalidSpec(
            "a-grid needs at least two points".into(),
        ));
    }
    if vals.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(EngineError::InvalidSpec(
            "a-grid values must be positive and finite".into(),
        ));
    }
    Ok(vals)
}

/// Flat run summary with a stable field set and order. `P_eps`/`P_tau` are
/// the strong-core limit weight integrals (the operative convergence report);
/// the `_exact` pair are the tabulated integrals for the spec as given.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "P_eps")]
    pub p_eps: f64,
    #[serde(rename = "P_tau")]
    pub p_tau: f64,
    #[serde(rename = "P_eps_exact")]
    pub p_eps_exact: f64,
    #[serde(rename = "P_tau_exact")]
    pub p_tau_exact: f64,
    #[serde(rename = "C_plus")]
    pub c_plus: f64,
    #[serde(rename = "S_plus")]
    pub s_plus: f64,
    pub delta_l: f64,
    pub verdict: Verdict,
    pub matching_residuals: MatchingResiduals,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_logderiv_dev: Option<f64>,
    pub k: f64,
    pub l: u32,
    pub orders: [usize; 2],
    pub t_min: f64,
    pub t_max: f64,
}

pub fn summarize(res: &SolveResult, oracle_logderiv_dev: Option<f64>) -> Summary {
    Summary {
        big_r: res.big_r,
        p_eps: res.p_eps_asym,
        p_tau: res.p_tau_asym,
        p_eps_exact: res.p_eps_exact,
        p_tau_exact: res.p_tau_exact,
        c_plus: res.c_plus,
        s_plus: res.s_plus,
        delta_l: res.delta_l,
        verdict: res.verdict,
        matching_residuals: res.residuals,
        oracle_logderiv_dev,
        k: res.ch.k,
        l: res.ch.l,
        orders: [res.orders.0, res.orders.1],
        t_min: res.t_lo,
        t_max: res.t_max,
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialization is infallible here");
    s.push('\n');
    s
}

/// Machine-readable error document for the error stream.
pub fn error_json(e: &EngineError) -> String {
    let doc = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    let mut s = serde_json::to_string(&doc).expect("error document serializes");
    s.push('\n');
    s
}

fn push_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Exponent form for quantities that legitimately span hundreds of decades
/// (the integrator's pre-renormalization magnitudes); still an exact
/// round-trip, but keeps the fields readable.
fn num_e(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Reference-basis dump: one row per grid node, both regions.
pub fn basis_csv(res: &SolveResult) -> String {
    let mut out = String::from("t,region,K2,D1,D2,eta,omega,Delta\n");
    for (label, tb) in [("inner", &res.eps), ("outer", &res.tau)] {
        for i in 0..tb.len() {
            push_row(
                &mut out,
                &[
                    num(tb.t[i]),
                    label.to_string(),
                    num(tb.k2[i]),
                    num(tb.d1[i]),
                    num(tb.d2[i]),
                    num(tb.eta[i]),
                    num(tb.omega[i]),
                    num(tb.delta[i]),
                ],
            );
        }
    }
    out
}

/// Assembled wave dump: `u` and `u′` at every node of both regions.
pub fn solution_csv(res: &SolveResult) -> String {
    let mut out = String::from("t,region,u,u_prime\n");
    for i in 0..res.eps.len() {
        push_row(
            &mut out,
            &[
                num(res.eps.t[i]),
                "inner".to_string(),
                num(res.inner_wave(i)),
                num(res.inner_wave_deriv(i)),
            ],
        );
    }
    for i in 0..res.tau.len() {
        push_row(
            &mut out,
            &[
                num(res.tau.t[i]),
                "outer".to_string(),
                num(res.outer_wave(i)),
                num(res.outer_wave_deriv(i)),
            ],
        );
    }
    out
}

/// Direct-integrator sample dump.
pub fn oracle_csv(sol: &OracleSolution) -> String {
    let mut out = String::from("t,u_scaled,uprime_scaled,scale_exp2\n");
    for s in &sol.samples {
        push_row(
            &mut out,
            &[num(s.t), num_e(s.u), num_e(s.up), s.scale_exp2.to_string()],
        );
    }
    out
}

/// Checkpoint comparison dump.
pub fn comparison_csv(rows: &[LogDerivRow]) -> String {
    let mut out = String::from("t,engine_logderiv,oracle_logderiv,abs_diff,skipped\n");
    for r in rows {
        push_row(
            &mut out,
            &[
                num(r.t),
                num(r.engine),
                num(r.oracle),
                num(r.diff),
                r.skipped.to_string(),
            ],
        );
    }
    out
}

/// One sweep row; numeric fields are absent when the row failed, and the
/// failure message rides in the trailing column.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "R")]
    pub big_r: Option<f64>,
    #[serde(rename = "R_asym")]
    pub r_asym: Option<f64>,
    #[serde(rename = "P_eps")]
    pub p_eps: Option<f64>,
    #[serde(rename = "P_tau")]
    pub p_tau: Option<f64>,
    pub zero_order_dev: Option<f64>,
    pub delta_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let mut out = String::from("A,R,R_asym,P_eps,P_tau,zero_order_dev,delta_l,error\n");
    for r in rows {
        let err = r.error.clone().unwrap_or_default();
        // Commas in messages would shift columns; flatten them.
        let err = err.replace(',', ";");
        push_row(
            &mut out,
            &[
                num(r.a),
                opt(r.big_r),
                opt(r.r_asym),
                opt(r.p_eps),
                opt(r.p_tau),
                opt(r.zero_order_dev),
                opt(r.delta_l),
                err,
            ],
        );
    }
    out
}

/// Single-row CSV for any flat Serialize struct (asym reports and the like):
/// header from the JSON keys, values in declaration order.
pub fn flat_csv<T: Serialize>(v: &T) -> String {
    let doc = serde_json::to_value(v).expect("flat struct serializes");
    let obj = doc.as_object().expect("flat struct maps to an object");
    let mut header = String::new();
    let mut row = String::new();
    for (i, (key, val)) in obj.iter().enumerate() {
        if i > 0 {
            header.push(',');
            row.push(',');
        }
        header.push_str(key);
        match val {
            serde_json::Value::String(s) => row.push_str(s),
            other => {
                let _ = write!(row, "{other}");
            }
        }
    }
    format!("{header}\n{row}\n")
}

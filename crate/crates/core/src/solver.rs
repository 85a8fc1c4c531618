//! End-to-end solve pipeline: matching radius, region grids and reference
//! tables, both correction chains, join constants, far-field phase shift, and
//! the convergence verdict. Also the diagnostics built on top of a solve:
//! Wronskian constancy of the reference pairs, factorial envelopes of the
//! iterate stacks, checkpointed log-derivative comparison against the direct
//! integrator, and normalized waveform deviation.

use serde::{Deserialize, Serialize};

use crate::asymptotic;
use crate::bessel;
use crate::channel::Channel;
use crate::error::EngineError;
use crate::oracle::{self, LogDerivRow, OracleSolution};
use crate::potential::{master_radius, PotentialSpec};
use crate::volterra::{iterate_inner, iterate_outer, match_constants, InnerChain, OuterChain};
use crate::wkb::{
    eps_grid, far_field_edge, local_terms, overflow_floor, tau_grid, Region, RegionTables,
};

/// Main inner-grid node count (geometric in `t`); at this density the second
/// inner iterate at the join sits within 5e-4 of its grid-refined limit.
const EPS_MAIN_NODES: usize = 2800;
/// Nodes in each join wedge; the residual potential spikes integrably there
/// and the trapezoid weights need geometric refinement to keep up.
const WEDGE_NODES: usize = 600;
/// Phase-integral magnitude beyond which `e^{±ω̄}` leaves f64 range; the inner
/// Wronskian scan only uses nodes inside this window.
const OMEGA_GUARD: f64 = 300.0;
/// Additive slack on the factorial envelopes: the envelope integrals are
/// grid-trapezoid values, so allow quadrature-level rounding, nothing more.
const ENVELOPE_SLACK: f64 = 1e-6;

/// Knobs for a solve. Orders are the truncation depths of the two chains.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    pub n_order: usize,
    pub m_order: usize,
    /// Deepest inner coordinate to tabulate (raised automatically if the core
    /// would overflow the derivative tables above it).
    pub t_min: f64,
    /// Outer edge override; `None` finds where the wavenumber turns free.
    pub t_max: Option<f64>,
    /// Step tolerance for the direct integrator in comparisons.
    pub rtol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            n_order: 4,
            m_order: 4,
            t_min: 1e-4,
            t_max: None,
            rtol: 1e-10,
        }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<(), EngineError> {
        if !(self.t_min > 0.0 && self.t_min < 1.0 && self.t_min.is_finite()) {
            return Err(EngineError::InvalidSpec(format!(
                "t_min must lie in (0, 1), got {}",
                self.t_min
            )));
        }
        if let Some(tm) = self.t_max {
            if !(tm > 1.0 && tm.is_finite()) {
                return Err(EngineError::InvalidSpec(format!(
                    "t_max must exceed 1, got {tm}"
                )));
            }
        }
        if !(self.rtol > 0.0 && self.rtol < 1e-2) {
            return Err(EngineError::InvalidSpec(format!(
                "rtol must lie in (0, 1e-2), got {}",
                self.rtol
            )));
        }
        Ok(())
    }
}

/// Whether the outer correction series is certified to converge in the
/// strong-core limit. The deciding quantity is the limit-form outer weight
/// integral: past 10 the factorial envelope no longer shrinks within any
/// practical truncation depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    ConvergenceNotEstablished,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::ConvergenceNotEstablished => "convergence_not_established",
        }
    }

    pub fn is_converged(self) -> bool {
        matches!(self, Verdict::Converged)
    }
}

/// Verdict rule: the outer limit weight integral must be finite and at most
/// 10 — roughly where a factorial envelope `Pᵐ/m!` stops shrinking within
/// practical truncation depths.
pub fn verdict_for(p_tau_asym: f64) -> Verdict {
    if p_tau_asym.is_finite() && p_tau_asym <= 10.0 {
        Verdict::Converged
    } else {
        Verdict::ConvergenceNotEstablished
    }
}

/// Relative mismatch of value and slope where the two region waves meet.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MatchingResiduals {
    pub value: f64,
    pub deriv: f64,
}

/// Everything a solve produces. The chains are kept so diagnostics can
/// re-truncate at lower orders without re-integrating.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub spec: PotentialSpec,
    pub ch: Channel,
    pub big_r: f64,
    pub t_lo: f64,
    pub t_max: f64,
    pub eps: RegionTables,
    pub tau: RegionTables,
    pub inner: InnerChain,
    pub outer: OuterChain,
    /// Truncation orders actually used: (inner, outer).
    pub orders: (usize, usize),
    /// Join constants per inner truncation order `0..=orders.0`.
    pub c_history: Vec<f64>,
    pub s_history: Vec<f64>,
    pub c_plus: f64,
    pub s_plus: f64,
    pub p_eps_exact: f64,
    pub p_tau_exact: f64,
    pub p_eps_asym: f64,
    pub p_tau_asym: f64,
    pub r_asym: f64,
    pub delta_l: f64,
    pub residuals: MatchingResiduals,
    pub verdict: Verdict,
}

impl SolveResult {
    /// Inner wave `η e^{ω̄} Σq` at node `i` of the inner grid (truncated at
    /// `order`). `ω̄ ≤ 0` here, so deep nodes underflow harmlessly to zero.
    pub fn inner_wave_at(&self, order: usize, i: usize) -> f64 {
        self.eps.eta[i] * self.eps.omega[i].exp() * self.inner.sum(order, i)
    }

    pub fn inner_wave(&self, i: usize) -> f64 {
        self.inner_wave_at(self.orders.0, i)
    }

    pub fn inner_wave_deriv_at(&self, order: usize, i: usize) -> f64 {
        let env = self.eps.eta[i] * self.eps.omega[i].exp();
        let rate = -0.25 * self.eps.d1[i] + self.eps.rk[i];
        env * (rate * self.inner.sum(order, i) + self.inner.sum_deriv(order, i))
    }

    pub fn inner_wave_deriv(&self, i: usize) -> f64 {
        self.inner_wave_deriv_at(self.orders.0, i)
    }

    /// Inner log-derivative `u′/u = −¼D¹ + R|K| + Σq′/Σq`; the envelope never
    /// has zeros, so this is finite everywhere on the inner grid.
    pub fn inner_logderiv_at(&self, order: usize, i: usize) -> f64 {
        -0.25 * self.eps.d1[i] + self.eps.rk[i]
            + self.inner.sum_deriv(order, i) / self.inner.sum(order, i)
    }

    pub fn outer_wave(&self, i: usize) -> f64 {
        self.outer.sum(self.orders.1, i)
    }

    pub fn outer_wave_deriv(&self, i: usize) -> f64 {
        self.outer.sum_deriv(self.orders.1, i)
    }

    pub fn outer_logderiv(&self, i: usize) -> f64 {
        self.outer_wave_deriv(i) / self.outer_wave(i)
    }
}

/// Run the full pipeline.
pub fn solve(
    spec: &PotentialSpec,
    ch: &Channel,
    cfg: &SolveConfig,
) -> Result<SolveResult, EngineError> {
    spec.validate()?;
    cfg.validate()?;
    let big_r = master_radius(spec, ch)?;
    let t_lo = match overflow_floor(spec, big_r) {
        Some(floor) => cfg.t_min.max(floor),
        None => cfg.t_min,
    };
    let t_max = match cfg.t_max {
        Some(tm) => tm,
        None => far_field_edge(spec, ch, big_r)?,
    };
    if t_max <= 1.0 + 1e-9 {
        return Err(EngineError::InvalidSpec(format!(
            "outer edge t_max = {t_max} leaves no outer region"
        )));
    }

    let eps = RegionTables::build(
        spec,
        ch,
        big_r,
        eps_grid(t_lo, EPS_MAIN_NODES, WEDGE_NODES),
        Region::Eps,
    )?;
    let tau = RegionTables::build(
        spec,
        ch,
        big_r,
        tau_grid(spec, ch, big_r, t_max, WEDGE_NODES),
        Region::Tau,
    )?;

    let inner = iterate_inner(&eps, cfg.n_order);
    let d1_in = *eps.d1.last().unwrap();
    let d1_out = tau.d1[0];
    let mut c_history = Vec::with_capacity(cfg.n_order + 1);
    let mut s_history = Vec::with_capacity(cfg.n_order + 1);
    for n in 0..=cfg.n_order {
        let (c, s) = match_constants(&inner, n, d1_in, d1_out);
        c_history.push(c);
        s_history.push(s);
    }
    let c_plus = *c_history.last().unwrap();
    let s_plus = *s_history.last().unwrap();
    let outer = iterate_outer(&tau, c_plus, s_plus, cfg.m_order);

    let p_eps_exact = eps.p_total();
    let p_tau_exact = tau.p_total();
    let p_eps_asym = asymptotic::p_eps_limit(spec, ch, big_r);
    let p_tau_asym = asymptotic::p_tau_limit(spec, ch, big_r, t_max);
    let r_asym = asymptotic::radius_limit(spec)?.r_asym;

    let mut res = SolveResult {
        spec: *spec,
        ch: *ch,
        big_r,
        t_lo,
        t_max,
        eps,
        tau,
        inner,
        outer,
        orders: (cfg.n_order, cfg.m_order),
        c_history,
        s_history,
        c_plus,
        s_plus,
        p_eps_exact,
        p_tau_exact,
        p_eps_asym,
        p_tau_asym,
        r_asym,
        delta_l: f64::NAN,
        residuals: MatchingResiduals {
            value: f64::NAN,
            deriv: f64::NAN,
        },
        verdict: verdict_for(p_tau_asym),
    };

    let last_in = res.eps.len() - 1;
    let vi = res.inner_wave(last_in);
    let vo = res.outer_wave(0);
    let di = res.inner_wave_deriv(last_in);
    let do_ = res.outer_wave_deriv(0);
    res.residuals = MatchingResiduals {
        value: (vi - vo).abs() / vi.abs().max(vo.abs()),
        deriv: (di - do_).abs() / di.abs().max(do_.abs()),
    };

    let last = res.tau.len() - 1;
    let kr = ch.k * big_r;
    let x = kr * t_max;
    res.delta_l = bessel::phase_shift(ch.l, x, res.outer_wave(last), res.outer_wave_deriv(last) / kr);

    Ok(res)
}

/// Largest relative drift of the inner reference-pair Wronskian
/// `W(η e^{ω̄}, η e^{−ω̄}) = −2kR`, over nodes where both envelopes are
/// representable.
pub fn wronskian_inner_max_dev(res: &SolveResult) -> f64 {
    let target = -2.0 * res.ch.k * res.big_r;
    let mut worst = 0.0f64;
    for i in 0..res.eps.len() {
        let om = res.eps.omega[i];
        if om.abs() > OMEGA_GUARD {
            continue;
        }
        let eta = res.eps.eta[i];
        let rate = -0.25 * res.eps.d1[i];
        let a = eta * om.exp();
        let ap = a * (rate + res.eps.rk[i]);
        let b = eta * (-om).exp();
        let bp = b * (rate - res.eps.rk[i]);
        let w = a * bp - b * ap;
        worst = worst.max((w / target - 1.0).abs());
    }
    worst
}

/// Largest relative drift of the outer Wronskian between the matched wave
/// `(C⁺, S⁺)` and the independent reference `(0, 1)`; its exact value is
/// `kR·C⁺`.
pub fn wronskian_outer_max_dev(res: &SolveResult) -> f64 {
    let target = res.ch.k * res.big_r * res.c_plus;
    let mut worst = 0.0f64;
    for i in 0..res.tau.len() {
        let (sn, cs) = res.tau.omega[i].sin_cos();
        let eta = res.tau.eta[i];
        let rate = -0.25 * res.tau.d1[i];
        let amp1 = res.c_plus * cs + res.s_plus * sn;
        let w1 = eta * amp1;
        let w1p = eta * (rate * amp1 + res.tau.rk[i] * (-res.c_plus * sn + res.s_plus * cs));
        let w2 = eta * sn;
        let w2p = eta * (rate * sn + res.tau.rk[i] * cs);
        let w = w1 * w2p - w2 * w1p;
        worst = worst.max((w / target - 1.0).abs());
    }
    worst
}

/// Worst excess of each iterate stack over its factorial envelope:
/// `|qₙ(t)| ≤ Pⁿ/n!` with `P` the cumulative weight integral from the grid
/// start, and `|wₘ(t)| ≤ √(kR)(|C⁺|+|S⁺|)·Pᵐ/m!`. Negative numbers mean
/// margin; anything above the quadrature slack is a violation.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeReport {
    pub worst_inner: f64,
    pub worst_outer: f64,
    pub ok: bool,
}

pub fn factorial_envelope(res: &SolveResult) -> EnvelopeReport {
    let mut worst_inner = f64::NEG_INFINITY;
    for (n, qn) in res.inner.q.iter().enumerate() {
        let inv_fact = (1..=n).fold(1.0, |acc, i| acc / i as f64);
        for i in 0..res.eps.len() {
            let bound = res.eps.p_cum[i].powi(n as i32) * inv_fact;
            worst_inner = worst_inner.max(qn[i].abs() - bound);
        }
    }
    let amp = (res.ch.k * res.big_r).sqrt() * (res.c_plus.abs() + res.s_plus.abs());
    let mut worst_outer = f64::NEG_INFINITY;
    for (m, wm) in res.outer.w.iter().enumerate() {
        let inv_fact = (1..=m).fold(1.0, |acc, i| acc / i as f64);
        for i in 0..res.tau.len() {
            let bound = amp * res.tau.p_cum[i].powi(m as i32) * inv_fact;
            worst_outer = worst_outer.max(wm[i].abs() - bound);
        }
    }
    EnvelopeReport {
        worst_inner,
        worst_outer,
        ok: worst_inner <= ENVELOPE_SLACK && worst_outer <= ENVELOPE_SLACK,
    }
}

/// Grid indices of the comparison checkpoints, ten per region.
#[derive(Debug, Clone)]
pub struct Checkpoints {
    pub eps_idx: Vec<usize>,
    pub tau_idx: Vec<usize>,
}

impl Checkpoints {
    pub fn ts(&self, res: &SolveResult) -> Vec<f64> {
        let mut out: Vec<f64> = self.eps_idx.iter().map(|&i| res.eps.t[i]).collect();
        out.extend(self.tau_idx.iter().map(|&i| res.tau.t[i]));
        out
    }
}

fn nearest_idx(ts: &[f64], x: f64) -> usize {
    let p = ts.partition_point(|&v| v < x);
    if p == 0 {
        return 0;
    }
    if p >= ts.len() {
        return ts.len() - 1;
    }
    if (ts[p] - x).abs() < (x - ts[p - 1]).abs() {
        p
    } else {
        p - 1
    }
}

fn push_unique(v: &mut Vec<usize>, mut idx: usize, len: usize) {
    while v.contains(&idx) && idx + 1 < len {
        idx += 1;
    }
    v.push(idx);
}

/// Checkpoint layout: ten inner points spread from just above the integrator
/// start to `t = 0.97`, ten outer points spread over the middle of the outer
/// range. Outer points sitting near a node of the engine wave (where the
/// log-derivative comparison loses meaning) are nudged outward by a fixed
/// 1.3% of the range until the wave carries at least 7% of its envelope —
/// a deterministic rule, so repeated runs pick identical points.
pub fn default_checkpoints(res: &SolveResult, t_start: f64) -> Checkpoints {
    let mut eps_idx = Vec::with_capacity(10);
    // Shallow cores start the integrator close to the join; keep at least a
    // sliver of inner range in that case.
    let lo = (t_start * 1.02).min(0.965);
    let span = 0.97 - lo;
    for i in 0..10 {
        let f = 0.03 + 0.97 * i as f64 / 9.0;
        push_unique(&mut eps_idx, nearest_idx(&res.eps.t, lo + span * f), res.eps.len());
    }
    let env_frac = 0.07;
    let amp = res.c_plus.hypot(res.s_plus);
    let mut tau_idx = Vec::with_capacity(10);
    let range = res.t_max - 1.0;
    for i in 0..10 {
        let mut c = 1.0 + range * (0.15 + 0.80 * i as f64 / 9.0);
        let mut idx = nearest_idx(&res.tau.t, c);
        for _ in 0..30 {
            if res.outer_wave(idx).abs() >= env_frac * res.tau.eta[idx] * amp {
                break;
            }
            c += 0.013 * range;
            if c >= res.t_max {
                break;
            }
            idx = nearest_idx(&res.tau.t, c);
        }
        push_unique(&mut tau_idx, idx, res.tau.len());
    }
    Checkpoints { eps_idx, tau_idx }
}

fn engine_rows(
    res: &SolveResult,
    cps: &Checkpoints,
    n: usize,
    outer: &OuterChain,
    m: usize,
) -> Vec<(f64, f64)> {
    let mut rows: Vec<(f64, f64)> = cps
        .eps_idx
        .iter()
        .map(|&i| (res.eps.t[i], res.inner_logderiv_at(n, i)))
        .collect();
    rows.extend(
        cps.tau_idx
            .iter()
            .map(|&i| (res.tau.t[i], outer.sum_deriv(m, i) / outer.sum(m, i))),
    );
    rows
}

/// A solve compared against the direct integrator at the checkpoints.
#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub checkpoints: Checkpoints,
    pub solution: OracleSolution,
    pub rows: Vec<LogDerivRow>,
    /// Max |engine − direct| log-derivative over non-skipped checkpoints.
    pub max_dev: f64,
    /// Phase shift extracted from the direct wave at the outer edge.
    pub delta_oracle: f64,
}

pub fn compare_with_oracle(res: &SolveResult, rtol: f64) -> Result<OracleComparison, EngineError> {
    let t_start = oracle::default_start(&res.spec, &res.ch, res.big_r)?;
    let cps = default_checkpoints(res, t_start);
    let mut knots = cps.ts(res);
    knots.push(1.0);
    knots.push(res.t_max);
    let solution = oracle::integrate_radial(
        &res.spec, &res.ch, res.big_r, t_start, res.t_max, rtol, &knots,
    )?;
    let engine = engine_rows(res, &cps, res.orders.0, &res.outer, res.orders.1);
    let (rows, max_dev) = oracle::compare_log_derivative(&solution, &engine);
    let edge = solution.sample_at(res.t_max).ok_or_else(|| {
        EngineError::StiffnessFailure("direct integration never reached the outer edge".into())
    })?;
    let kr = res.ch.k * res.big_r;
    let delta_oracle = bessel::phase_shift(res.ch.l, kr * res.t_max, edge.u, edge.up / kr);
    Ok(OracleComparison {
        checkpoints: cps,
        solution,
        rows,
        max_dev,
        delta_oracle,
    })
}

/// Max checkpoint log-derivative deviation at each requested order pair,
/// re-truncating the stored inner chain and re-running only the outer chain
/// (constants change with the inner order). Shares one direct integration.
pub fn order_sweep_devs(
    res: &SolveResult,
    cmp: &OracleComparison,
    orders: &[(usize, usize)],
) -> Vec<f64> {
    orders
        .iter()
        .map(|&(n, m)| {
            let c = res.c_history[n];
            let s = res.s_history[n];
            let outer = iterate_outer(&res.tau, c, s, m);
            let engine = engine_rows(res, &cmp.checkpoints, n, &outer, m);
            let (_, max_dev) = oracle::compare_log_derivative(&cmp.solution, &engine);
            max_dev
        })
        .collect()
}

/// Sup over checkpoints of the difference between the engine and direct
/// waveforms, both normalized to unit far-field amplitude
/// `√(u² + (u′/kR)²)` at the outer edge. Scale- and normalization-free, so
/// it isolates shape (mostly phase) error.
pub fn shape_deviation_at_orders(
    res: &SolveResult,
    cmp: &OracleComparison,
    n: usize,
    m: usize,
) -> f64 {
    let c = res.c_history[n];
    let s = res.s_history[n];
    let outer = iterate_outer(&res.tau, c, s, m);
    let kr = res.ch.k * res.big_r;
    let last = res.tau.len() - 1;
    let amp_e = outer.sum(m, last).hypot(outer.sum_deriv(m, last) / kr);
    let edge = match cmp.solution.sample_at(res.t_max) {
        Some(e) => e,
        None => return f64::NAN,
    };
    let amp_o = edge.u.hypot(edge.up / kr);
    let e_t = edge.scale_exp2;
    let mut worst = 0.0f64;
    let mut visit = |t: f64, u_e: f64| {
        if let Some(smp) = cmp.solution.sample_at(t) {
            let u_o = smp.u * 2f64.powi((smp.scale_exp2 - e_t) as i32) / amp_o;
            worst = worst.max((u_e / amp_e - u_o).abs());
        }
    };
    for &i in &cmp.checkpoints.eps_idx {
        visit(res.eps.t[i], res.inner_wave_at(n, i));
    }
    for &i in &cmp.checkpoints.tau_idx {
        visit(res.tau.t[i], outer.sum(m, i));
    }
    worst
}

pub fn shape_deviation(res: &SolveResult, cmp: &OracleComparison) -> f64 {
    shape_deviation_at_orders(res, cmp, res.orders.0, res.orders.1)
}

/// Strong-core limit report for a spec: limit radius vs the actual matching
/// radius, limit weight integrals, limit join constants, and whether the
/// four-cycle closed form agrees with direct recursion at this spec's phase
/// scale.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymReport {
    pub big_r: f64,
    pub r_asym: f64,
    pub radius_residual: f64,
    pub radius_rel_dev: f64,
    pub t_max: f64,
    pub p_eps_asym: f64,
    pub p_tau_asym: f64,
    pub c0_limit: f64,
    pub s0_limit: f64,
    pub four_cycle_consistent: bool,
    pub verdict: Verdict,
}

pub fn asym_report(
    spec: &PotentialSpec,
    ch: &Channel,
    t_max_override: Option<f64>,
) -> Result<AsymReport, EngineError> {
    spec.validate()?;
    let big_r = master_radius(spec, ch)?;
    let rl = asymptotic::radius_limit(spec)?;
    let t_max = match t_max_override {
        Some(tm) if tm > 1.0 && tm.is_finite() => tm,
        Some(tm) => {
            return Err(EngineError::InvalidSpec(format!(
                "t_max must exceed 1, got {tm}"
            )))
        }
        None => far_field_edge(spec, ch, big_r)?,
    };
    let p_eps_asym = asymptotic::p_eps_limit(spec, ch, big_r);
    let p_tau_asym = asymptotic::p_tau_limit(spec, ch, big_r, t_max);
    let (c0_raw, s0_raw) = asymptotic::limit_constants(ch, p_eps_asym);
    // Consistency is scale-invariant (the recursion is linear), so check with
    // unit-normalized constants at this spec's own phase scale.
    let scale = c0_raw.hypot(s0_raw);
    let (c0, s0) = (c0_raw / scale, s0_raw / scale);
    let x_hi = (0.5 * p_tau_asym).clamp(0.01, 0.3);
    let (xs, cst, sst) = asymptotic::cycle_direct(x_hi, 513, 6, c0, s0);
    let mut consistent = true;
    for m in 0..=6 {
        for (i, &x) in xs.iter().enumerate().step_by(64) {
            let (cc, sc) = asymptotic::cycle_closed(m, x, c0, s0);
            if (cst[m][i] - cc).abs() > 1e-8 || (sst[m][i] - sc).abs() > 1e-8 {
                consistent = false;
            }
        }
    }
    Ok(AsymReport {
        big_r,
        r_asym: rl.r_asym,
        radius_residual: rl.residual,
        radius_rel_dev: (rl.r_asym / big_r - 1.0).abs(),
        t_max,
        p_eps_asym,
        p_tau_asym,
        c0_limit: c0_raw,
        s0_limit: s0_raw,
        four_cycle_consistent: consistent,
        verdict: verdict_for(p_tau_asym),
    })
}

/// One named invariant check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub note: String,
}

fn check(name: &'static str, pass: bool, note: String) -> CheckOutcome {
    CheckOutcome { name, pass, note }
}

/// Run the invariant battery against one spec/channel. The battery is
/// engine-internal (no direct integration), so it is fast and bit-stable.
pub fn run_checks(spec: &PotentialSpec, ch: &Channel, cfg: &SolveConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    if let Err(e) = spec.validate() {
        out.push(check("spec_admissible", false, e.to_string()));
        return out;
    }
    out.push(check("spec_admissible", true, "parameters in range".into()));

    // The envelope checks want a few orders of headroom.
    let cfg = SolveConfig {
        n_order: cfg.n_order.max(5),
        m_order: cfg.m_order.max(5),
        ..*cfg
    };
    let res = match solve(spec, ch, &cfg) {
        Ok(r) => r,
        Err(e) => {
            out.push(check("solve_pipeline", false, e.to_string()));
            return out;
        }
    };
    out.push(check(
        "solve_pipeline",
        true,
        format!("R = {:.6}, t_max = {:.4}", res.big_r, res.t_max),
    ));

    let inv8r2 = 0.125 / (res.big_r * res.big_r);
    let pin_in = (res.eps.k2.last().unwrap() / inv8r2 - 1.0).abs();
    let pin_out = (res.tau.k2[0] / inv8r2 - 1.0).abs();
    out.push(check(
        "join_wavenumber_pin",
        pin_in < 1e-10 && pin_out < 1e-10,
        format!("|8R²K²(1) − 1| = {:.2e} / {:.2e}", pin_in, pin_out),
    ));

    let upr = spec.u(res.big_r) * spec.log_slope(res.big_r);
    let target = 16.0 * (2.0 * ch.lam2() - spec.g2 * res.big_r.powi(3) * upr);
    let jump = res.tau.d1[0] - res.eps.d1.last().unwrap();
    let jump_dev = (jump / target - 1.0).abs();
    out.push(check(
        "join_slope_jump",
        jump_dev < 1e-9,
        format!("relative deviation {:.2e}", jump_dev),
    ));

    let wi = wronskian_inner_max_dev(&res);
    out.push(check(
        "inner_wronskian_constant",
        wi < 1e-6,
        format!("max drift {:.2e}", wi),
    ));
    let wo = wronskian_outer_max_dev(&res);
    out.push(check(
        "outer_wronskian_constant",
        wo < 1e-6,
        format!("max drift {:.2e}", wo),
    ));

    let env = factorial_envelope(&res);
    out.push(check(
        "factorial_envelope_inner",
        env.worst_inner <= ENVELOPE_SLACK,
        format!("worst excess {:.2e}", env.worst_inner),
    ));
    out.push(check(
        "factorial_envelope_outer",
        env.worst_outer <= ENVELOPE_SLACK,
        format!("worst excess {:.2e}", env.worst_outer),
    ));

    out.push(check(
        "join_continuity",
        res.residuals.value < 1e-10,
        format!("relative residual {:.2e}", res.residuals.value),
    ));
    out.push(check(
        "join_smoothness",
        res.residuals.deriv < 1e-10,
        format!("relative residual {:.2e}", res.residuals.deriv),
    ));

    let mut cauchy = true;
    for n in 2..res.c_history.len() {
        let cur = (res.c_history[n] - res.c_history[n - 1]).abs();
        let prev = (res.c_history[n - 1] - res.c_history[n - 2]).abs();
        if cur >= prev {
            cauchy = false;
        }
    }
    out.push(check(
        "constants_cauchy",
        cauchy,
        format!("C increments {:?}", {
            let d: Vec<f64> = res
                .c_history
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .collect();
            d
        }),
    ));

    out.push(check(
        "phase_finite",
        res.delta_l.is_finite(),
        format!("delta_l = {:.6}", res.delta_l),
    ));

    // Reference residual at a mid-grid spot check: the tabulated Δ must equal
    // the mismatch between the exact coefficient and the reference dynamics.
    let mid = res.eps.len() / 2;
    let t_mid = res.eps.t[mid];
    let lt = local_terms(spec, ch, res.big_r, t_mid, Region::Eps);
    let tab_dev = (lt.k2 / res.eps.k2[mid] - 1.0).abs();
    out.push(check(
        "tables_reproducible",
        tab_dev == 0.0,
        format!("rebuild deviation {:.2e}", tab_dev),
    ));

    out
}

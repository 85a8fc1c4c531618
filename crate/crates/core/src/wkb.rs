//! Two-region smooth-WKB reference waves.
//!
//! In the scaled coordinate `t = r/R` the exact radial equation is
//! `u″ + Q(t) u = 0` with `Q(t) = k²R² − g²R²U(Rt) − l(l+1)/t²`. Each region
//! replaces `l(l+1)` by its own centrifugal strength and flips the overall
//! sign so the squared local wavenumber
//!
//! `K²_γ(t) = s_γ · (−k² + g²U(Rt) + λ_γ²/(R²t²))`,  `s_ε = +1`, `s_τ = −1`,
//!
//! stays positive throughout its region and equals `1/(8R²)` at the join from
//! both sides — the device that removes the turning-point singularity. The
//! reference waves are `η e^{±ω̄}` (inner) and `η(C cos ω̄ + S sin ω̄)` (outer)
//! with `η = (k²/K²)^{1/4}` and `ω̄(t) = R∫₁ᵗ |K|`; what they miss is the
//! residual potential `Δ(t)` tabulated here and fed to the Volterra iteration.

use crate::channel::Channel;
use crate::error::EngineError;
use crate::potential::PotentialSpec;
use crate::quad::cumtrapz;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Inner region `t < 1`: exponential reference, centrifugal `(l+1/2)²`.
    Eps,
    /// Outer region `t > 1`: oscillatory reference, centrifugal `l(l+1)`.
    Tau,
}

impl Region {
    fn sign(self) -> f64 {
        match self {
            Region::Eps => 1.0,
            Region::Tau => -1.0,
        }
    }

    fn lam2(self, ch: &Channel) -> f64 {
        match self {
            Region::Eps => ch.lam_eps2(),
            Region::Tau => ch.lam_tau2(),
        }
    }
}

/// `K²` and its first two `t`-derivatives at one point.
#[derive(Debug, Clone, Copy)]
pub struct LocalTerms {
    pub k2: f64,
    pub dk2: f64,
    pub d2k2: f64,
}

impl LocalTerms {
    /// Logarithmic derivatives `D¹ = K²′/K²`, `D² = K²″/K²`.
    pub fn d1(&self) -> f64 {
        self.dk2 / self.k2
    }

    pub fn d2(&self) -> f64 {
        self.d2k2 / self.k2
    }
}

/// Evaluate `K²`, `K²′`, `K²″` for one region. The centrifugal term sits
/// inside the region sign factor along with the energy and potential terms;
/// `U′ = U·L` and `U″ = U·(L² + L′)` keep everything in log-slope form.
pub fn local_terms(spec: &PotentialSpec, ch: &Channel, big_r: f64, t: f64, region: Region) -> LocalTerms {
    let s = region.sign();
    let lam2 = region.lam2(ch);
    let r = big_r * t;
    let g2u = (spec.g2.ln() + spec.ln_u(r)).exp();
    let ll = spec.log_slope(r);
    let lp = spec.log_slope_deriv(r);
    let cen = lam2 / (big_r * big_r * t * t);
    LocalTerms {
        k2: s * (-ch.k * ch.k + g2u + cen),
        dk2: s * (g2u * big_r * ll - 2.0 * cen / t),
        d2k2: s * (g2u * big_r * big_r * (ll * ll + lp) + 6.0 * cen / (t * t)),
    }
}

/// Residual potential: what the reference dynamics misses relative to the
/// exact equation, `Δ_γ = (5/16)(D¹)² − (1/4)D² + (λ_γ² − l(l+1))/t²`.
/// The last term vanishes in the outer region and is `1/(4t²)` inside.
pub fn delta_res(terms: &LocalTerms, ch: &Channel, t: f64, region: Region) -> f64 {
    let d1 = terms.d1();
    let d2 = terms.d2();
    let cen_gap = (region.lam2(ch) - ch.ll1()) / (t * t);
    0.3125 * d1 * d1 - 0.25 * d2 + cen_gap
}

/// Exact-equation coefficient `Q(t)` in the scaled coordinate (for the direct
/// integrator): `k²R² − g²R²U(Rt) − l(l+1)/t²`.
pub fn q_exact(spec: &PotentialSpec, ch: &Channel, big_r: f64, t: f64) -> f64 {
    let g2r2u = spec.ln_g2r2u(big_r, t).exp();
    ch.k * ch.k * big_r * big_r - g2r2u - ch.ll1() / (t * t)
}

/// Per-node reference data on one region's grid.
#[derive(Debug, Clone)]
pub struct RegionTables {
    pub region: Region,
    pub big_r: f64,
    pub t: Vec<f64>,
    pub k2: Vec<f64>,
    /// `R·|K|`, the phase rate in `t`.
    pub rk: Vec<f64>,
    /// Amplitude factor `(k²/K²)^{1/4}`.
    pub eta: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    /// Residual potential `Δ`.
    pub delta: Vec<f64>,
    /// Iteration weight `p = Δ/(R|K|)`, signed.
    pub p: Vec<f64>,
    /// Cumulative `∫|p|` from the grid start — the convergence integral.
    pub p_cum: Vec<f64>,
    /// Phase integral `ω̄(t) = R∫₁ᵗ|K|`: ≤ 0 inner, ≥ 0 outer, 0 at the join.
    pub omega: Vec<f64>,
}

impl RegionTables {
    pub fn build(
        spec: &PotentialSpec,
        ch: &Channel,
        big_r: f64,
        grid: Vec<f64>,
        region: Region,
    ) -> Result<Self, EngineError> {
        let n = grid.len();
        let mut k2 = Vec::with_capacity(n);
        let mut rk = Vec::with_capacity(n);
        let mut eta = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        let mut delta = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        for &t in &grid {
            let lt = local_terms(spec, ch, big_r, t, region);
            if !(lt.k2 > 0.0) {
                return Err(EngineError::BracketFailure(format!(
                    "reference wavenumber lost positivity at t = {t} (K² = {})",
                    lt.k2
                )));
            }
            let dres = delta_res(&lt, ch, t, region);
            k2.push(lt.k2);
            rk.push(big_r * lt.k2.sqrt());
            eta.push((ch.k * ch.k / lt.k2).powf(0.25));
            d1.push(lt.d1());
            d2.push(lt.d2());
            delta.push(dres);
            p.push(dres / (big_r * lt.k2.sqrt()));
        }
        let p_abs: Vec<f64> = p.iter().map(|x| x.abs()).collect();
        let p_cum = cumtrapz(&grid, &p_abs);
        let s = cumtrapz(&grid, &rk);
        let omega = match region {
            // Inner grid ends exactly at t = 1: anchor the phase there.
            Region::Eps => {
                let last = *s.last().unwrap();
                s.iter().map(|v| v - last).collect()
            }
            Region::Tau => s,
        };
        Ok(RegionTables {
            region,
            big_r,
            t: grid,
            k2,
            rk,
            eta,
            d1,
            d2,
            delta,
            p,
            p_cum,
            omega,
        })
    }

    /// Total `∫|p|` over the tabulated range.
    pub fn p_total(&self) -> f64 {
        *self.p_cum.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Deepest inner coordinate that keeps `g²R²U(Rt)` below `e^{640}` so the
/// second-derivative tables (which carry an extra `L²` factor) stay inside
/// f64 range. `None` when even `t = 1e-14` is safe.
pub fn overflow_floor(spec: &PotentialSpec, big_r: f64) -> Option<f64> {
    const LN_CAP: f64 = 640.0;
    let h = |t: f64| spec.ln_g2r2u(big_r, t) - LN_CAP;
    if h(1e-14) <= 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (1e-14, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Outer edge of the tabulated range: the first `t ≥ 1.05` where the local
/// wavenumber agrees with the free one to 0.1%, found by a coarse 1.3× scan
/// and bisection. Beyond this point the wave is free to the same accuracy.
pub fn far_field_edge(spec: &PotentialSpec, ch: &Channel, big_r: f64) -> Result<f64, EngineError> {
    const TOL: f64 = 1e-3;
    let m = |t: f64| {
        let lt = local_terms(spec, ch, big_r, t, Region::Tau);
        (lt.k2 / (ch.k * ch.k) - 1.0).abs()
    };
    if m(1.05) <= TOL {
        return Ok(1.05);
    }
    let mut lo = 1.05;
    let mut hi = 1.05;
    loop {
        hi *= 1.3;
        if m(hi) <= TOL {
            break;
        }
        lo = hi;
        if hi > 1e5 {
            return Err(EngineError::BracketFailure(
                "potential tail never fades to the free wavenumber below t = 1e5".into(),
            ));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if m(mid) <= TOL {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (ll, lh) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (ll + (lh - ll) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn merge_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        if let Some(&last) = out.last() {
            if x - last <= 1e-12 * x.abs().max(1.0) {
                continue;
            }
        }
        out.push(x);
    }
    out
}

/// Inner grid on `[t_lo, 1]`: geometric in `t` (the core varies on a log
/// scale) plus a geometric wedge hugging the join, where the residual
/// potential has an integrable spike.
pub fn eps_grid(t_lo: f64, n_main: usize, n_wedge: usize) -> Vec<f64> {
    let mut nodes = geomspace(t_lo, 1.0, n_main);
    for g in geomspace(1e-9, 0.1, n_wedge) {
        let t = 1.0 - g;
        if t > t_lo {
            nodes.push(t);
        }
    }
    let mut out = merge_sorted(nodes);
    // Endpoints must be exact: the join algebra reads the last node as t = 1.
    *out.last_mut().unwrap() = 1.0;
    out[0] = t_lo;
    out
}

/// Outer grid on `[1, t_max]`: node count set by the accumulated phase
/// (≈ 0.03 rad per step, clamped to [800, 6000]) plus the same kind of wedge
/// on the outgoing side of the join.
pub fn tau_grid(
    spec: &PotentialSpec,
    ch: &Channel,
    big_r: f64,
    t_max: f64,
    n_wedge: usize,
) -> Vec<f64> {
    let coarse = linspace(1.0, t_max, 2001);
    let rates: Vec<f64> = coarse
        .iter()
        .map(|&t| big_r * local_terms(spec, ch, big_r, t, Region::Tau).k2.max(0.0).sqrt())
        .collect();
    let phase = *cumtrapz(&coarse, &rates).last().unwrap();
    let n_main = ((phase / 0.03).ceil() as usize + 1).clamp(800, 6000);
    let mut nodes = linspace(1.0, t_max, n_main);
    for g in geomspace(1e-9, 0.1 * (t_max - 1.0), n_wedge) {
        let t = 1.0 + g;
        if t < t_max {
            nodes.push(t);
        }
    }
    let mut out = merge_sorted(nodes);
    out[0] = 1.0;
    *out.last_mut().unwrap() = t_max;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{master_radius, Family};
    use crate::quad::adaptive_gauss;

    fn benchmark() -> (PotentialSpec, Channel, f64) {
        let spec = PotentialSpec::new(Family::PowCorePowTail, 6.0, 4.0, 1.0, 1.0, 1.0).unwrap();
        let ch = Channel::new(1.0, 0).unwrap();
        let big_r = master_radius(&spec, &ch).unwrap();
        (spec, ch, big_r)
    }

    #[test]
    fn join_wavenumber_is_eighth_inverse_r2() {
        let specs = [
            PotentialSpec::new(Family::PowCorePowTail, 6.0, 4.0, 1.0, 1.0, 1.0).unwrap(),
            PotentialSpec::new(Family::ExpCoreExpTail, 2.0, 1.0, 1.0, 1.0, 1.0).unwrap(),
            PotentialSpec::new(Family::PowCoreExpTail, 8.0, 1.5, 0.8, 1.2, 2.0).unwrap(),
            PotentialSpec::new(Family::ExpCorePowTail, 1.3, 4.5, 1.1, 0.7, 0.5).unwrap(),
        ];
        for spec in specs {
            for l in [0u32, 1, 2] {
                let ch = Channel::new(1.3, l).unwrap();
                let big_r = master_radius(&spec, &ch).unwrap();
                for region in [Region::Eps, Region::Tau] {
                    let k2 = local_terms(&spec, &ch, big_r, 1.0, region).k2;
                    let target = 0.125 / (big_r * big_r);
                    assert!(
                        (k2 / target - 1.0).abs() < 1e-10,
                        "join identity broken: {k2} vs {target} (l={l})"
                    );
                }
            }
        }
    }

    #[test]
    fn join_slope_jump_identity() {
        // D¹ jumps across the join by 16[2λ² − g²R³U′(R)], each side being
        // ∓8[2λ_γ² − g²R³U′(R)] / 1 — all centrifugal bookkeeping collapses
        // because K²(1) is the same 1/(8R²) on both sides.
        let (spec, ch, big_r) = benchmark();
        let e = local_terms(&spec, &ch, big_r, 1.0, Region::Eps);
        let t = local_terms(&spec, &ch, big_r, 1.0, Region::Tau);
        let upr = spec.u(big_r) * spec.log_slope(big_r);
        let g2r3up = spec.g2 * big_r.powi(3) * upr;
        let jump = t.d1() - e.d1();
        let target = 16.0 * (2.0 * ch.lam2() - g2r3up);
        assert!((jump / target - 1.0).abs() < 1e-10, "jump {jump} vs {target}");
        let eps_target = -8.0 * (2.0 * ch.lam_eps2() - g2r3up);
        assert!((e.d1() / eps_target - 1.0).abs() < 1e-10);
        let tau_target = 8.0 * (2.0 * ch.lam_tau2() - g2r3up);
        assert!((t.d1() / tau_target - 1.0).abs() < 1e-10);
    }

    #[test]
    fn benchmark_join_slopes() {
        let (spec, ch, big_r) = benchmark();
        let e = local_terms(&spec, &ch, big_r, 1.0, Region::Eps);
        let t = local_terms(&spec, &ch, big_r, 1.0, Region::Tau);
        assert!((e.d1() + 69.320_30).abs() < 1e-3, "inner D1 {}", e.d1());
        assert!((t.d1() - 65.320_30).abs() < 1e-3, "outer D1 {}", t.d1());
    }

    #[test]
    fn wavenumber_monotone_within_regions() {
        let (spec, ch, big_r) = benchmark();
        let eps = RegionTables::build(&spec, &ch, big_r, eps_grid(1e-4, 400, 80), Region::Eps).unwrap();
        for w in eps.k2.windows(2) {
            assert!(w[1] < w[0], "inner K² must decrease toward the join");
        }
        let tmax = far_field_edge(&spec, &ch, big_r).unwrap();
        let tau = RegionTables::build(
            &spec,
            &ch,
            big_r,
            tau_grid(&spec, &ch, big_r, tmax, 80),
            Region::Tau,
        )
        .unwrap();
        for w in tau.k2.windows(2) {
            assert!(w[1] > w[0], "outer K² must grow toward the free value");
        }
    }

    #[test]
    fn derivative_tables_match_finite_differences() {
        let (spec, ch, big_r) = benchmark();
        for (region, ts) in [(Region::Eps, [0.2, 0.6, 0.95]), (Region::Tau, [1.1, 1.8, 3.0])] {
            for t in ts {
                let h = 1e-5;
                let f = |x: f64| local_terms(&spec, &ch, big_r, x, region).k2;
                let lt = local_terms(&spec, &ch, big_r, t, region);
                let fd1 = (f(t + h) - f(t - h)) / (2.0 * h);
                let fd2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
                assert!((fd1 - lt.dk2).abs() < 1e-5 * (1.0 + lt.dk2.abs()), "dK² at {t}");
                assert!((fd2 - lt.d2k2).abs() < 2e-3 * (1.0 + lt.d2k2.abs()), "d²K² at {t}");
            }
        }
    }

    #[test]
    fn reference_wave_satisfies_shifted_equation() {
        // η e^{ω̄} must solve w″ + (Q − Δ)w = 0; five-point stencil with the
        // phase advanced by local quadrature between stencil points.
        let (spec, ch, big_r) = benchmark();
        for (region, t0) in [(Region::Eps, 0.5), (Region::Tau, 1.7)] {
            let h = 5e-4;
            let rate = |x: f64| big_r * local_terms(&spec, &ch, big_r, x, region).k2.sqrt();
            let w = |x: f64| {
                let lt = local_terms(&spec, &ch, big_r, x, region);
                let eta = (ch.k * ch.k / lt.k2).powf(0.25);
                let ph = adaptive_gauss(rate, t0, x, 1e-13);
                match region {
                    Region::Eps => eta * ph.exp(),
                    Region::Tau => eta * ph.cos(),
                }
            };
            let stencil: Vec<f64> = (-2i32..=2).map(|j| w(t0 + j as f64 * h)).collect();
            let wpp = (-stencil[0] + 16.0 * stencil[1] - 30.0 * stencil[2] + 16.0 * stencil[3]
                - stencil[4])
                / (12.0 * h * h);
            let lt = local_terms(&spec, &ch, big_r, t0, region);
            let coeff = q_exact(&spec, &ch, big_r, t0) - delta_res(&lt, &ch, t0, region);
            let resid = wpp + coeff * stencil[2];
            let scale = coeff.abs() * stencil[2].abs().max(1e-12) + wpp.abs();
            assert!(
                (resid / scale).abs() < 1e-5,
                "reference equation residual {resid} at t={t0} ({region:?})"
            );
        }
    }

    #[test]
    fn grids_pin_the_join_exactly() {
        let g = eps_grid(1e-4, 200, 50);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert_eq!(g[0], 1e-4);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let (spec, ch, big_r) = benchmark();
        let tmax = far_field_edge(&spec, &ch, big_r).unwrap();
        let g = tau_grid(&spec, &ch, big_r, tmax, 50);
        assert_eq!(g[0], 1.0);
        assert_eq!(*g.last().unwrap(), tmax);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn overflow_floor_only_binds_for_hard_cores() {
        let (spec, _, big_r) = benchmark();
        // Shallow benchmark core never reaches e^640.
        assert!(overflow_floor(&spec, big_r).is_none());
        let hard = PotentialSpec::new(Family::PowCorePowTail, 1e4, 4.0, 1.0, 1.0, 1.0).unwrap();
        let ch = Channel::new(1.0, 0).unwrap();
        let big_r = master_radius(&hard, &ch).unwrap();
        let floor = overflow_floor(&hard, big_r).unwrap();
        assert!(floor > 1e-4 && floor < 1.0);
        let at = hard.ln_g2r2u(big_r, floor);
        assert!((at - 640.0).abs() < 1e-6, "floor solves the cap equation, got {at}");
    }
}

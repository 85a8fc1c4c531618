//! Volterra iteration on top of the reference waves.
//!
//! Inner region (ratio form): the regular wave is `η e^{ω̄} Σ qₙ` with
//! `q₀ = 1` and
//!
//! `qₙ(t) = −½ ∫₀ᵗ p(t′) {1 − e^{2[ω̄(t′)−ω̄(t)]}} qₙ₋₁(t′) dt′`,
//!
//! where `p = Δ/(R|K|)` and the exponent is ≤ 0, so each pass is a bounded
//! smoothing and the orders shrink factorially.
//!
//! Outer region: additive corrections to `w₀ = η(C cos ω̄ + S sin ω̄)`,
//!
//! `wₘ(t) = ∫₁ᵗ p(t′) sin[ω̄(t′)−ω̄(t)] √(K(t′)/K(t)) wₘ₋₁(t′) dt′`.
//!
//! Matching at the join: continuity plus slope continuity of the assembled
//! inner wave against `w₀` alone fixes `(C, S)` — the higher outer orders all
//! vanish with value and slope at the join, so the constants depend only on
//! the inner truncation order.

use crate::quad::prefix_trap_weight;
use crate::wkb::RegionTables;

/// Panel moments of `e^{−μ(1−y)}` against `{1, y}` on `y ∈ [0, 1]`:
/// `φ₀ = (1 − e^{−μ})/μ`, `φ₁ = (1 − φ₀)/μ`. Deep in the core the decay per
/// grid panel is enormous (`μ = 2 R|K| h` can exceed 1e3), so a plain
/// trapezoid would replace the exponential boundary layer with a full panel
/// weight; these moments integrate the layer exactly for linear data.
fn panel_moments(mu: f64) -> (f64, f64) {
    if mu < 1e-4 {
        // Series keeps full precision where the closed form cancels.
        let phi0 = 1.0 - mu * (0.5 - mu * (1.0 / 6.0 - mu / 24.0));
        let phi1 = 0.5 - mu * (1.0 / 6.0 - mu * (1.0 / 24.0 - mu / 120.0));
        (phi0, phi1)
    } else {
        let phi0 = -(-mu).exp_m1() / mu;
        (phi0, (1.0 - phi0) / mu)
    }
}

/// Inner-region iterate stack: `q[n][i]` and its `t`-derivative `qp[n][i]`.
#[derive(Debug, Clone)]
pub struct InnerChain {
    pub q: Vec<Vec<f64>>,
    pub qp: Vec<Vec<f64>>,
}

impl InnerChain {
    /// Partial sum `Σ_{n≤order} qₙ` at node `i`.
    pub fn sum(&self, order: usize, i: usize) -> f64 {
        self.q.iter().take(order + 1).map(|qn| qn[i]).sum()
    }

    pub fn sum_deriv(&self, order: usize, i: usize) -> f64 {
        self.qp.iter().take(order + 1).map(|qn| qn[i]).sum()
    }
}

/// Run the inner recursion to `n_max` inclusive.
///
/// The plain part of the kernel accumulates by running trapezoid; the decayed
/// part `∫ p q e^{2[ω̄(t′)−ω̄(t)]}` obeys `F(t) = F(t₋) e^{−μ} + panel`, with
/// each panel done by exponential fitting so the stiff layer near `t′ = t`
/// keeps its true weight `≈ p q / (2R|K|)` even when it is far thinner than
/// the grid spacing.
pub fn iterate_inner(tb: &RegionTables, n_max: usize) -> InnerChain {
    let n = tb.len();
    let mut q = vec![vec![0.0; n]; n_max + 1];
    let mut qp = vec![vec![0.0; n]; n_max + 1];
    q[0] = vec![1.0; n];
    for ord in 1..=n_max {
        let (prev_rest, cur) = q.split_at_mut(ord);
        let prev = &prev_rest[ord - 1];
        let cur = &mut cur[0];
        let curp = &mut qp[ord];
        let mut plain = 0.0;
        let mut decayed = 0.0;
        for i in 0..n {
            if i > 0 {
                let h = tb.t[i] - tb.t[i - 1];
                let g0 = tb.p[i - 1] * prev[i - 1];
                let g1 = tb.p[i] * prev[i];
                plain += 0.5 * h * (g0 + g1);
                let mu = 2.0 * (tb.omega[i] - tb.omega[i - 1]);
                let (phi0, phi1) = panel_moments(mu);
                let carry = if mu > 745.0 { 0.0 } else { (-mu).exp() };
                decayed = decayed * carry + h * (g0 * (phi0 - phi1) + g1 * phi1);
            }
            cur[i] = -0.5 * (plain - decayed);
            curp[i] = -tb.rk[i] * decayed;
        }
    }
    InnerChain { q, qp }
}

/// Outer-region iterate stack: `w[m][i]` and derivative `wp[m][i]`.
#[derive(Debug, Clone)]
pub struct OuterChain {
    pub w: Vec<Vec<f64>>,
    pub wp: Vec<Vec<f64>>,
}

impl OuterChain {
    /// Assembled outer wave `Σ_{m≤order} wₘ` at node `i`.
    pub fn sum(&self, order: usize, i: usize) -> f64 {
        self.w.iter().take(order + 1).map(|wm| wm[i]).sum()
    }

    pub fn sum_deriv(&self, order: usize, i: usize) -> f64 {
        self.wp.iter().take(order + 1).map(|wm| wm[i]).sum()
    }
}

/// Run the outer recursion to `m_max` inclusive for given join constants.
pub fn iterate_outer(tb: &RegionTables, c_plus: f64, s_plus: f64, m_max: usize) -> OuterChain {
    let n = tb.len();
    let mut w = vec![vec![0.0; n]; m_max + 1];
    let mut wp = vec![vec![0.0; n]; m_max + 1];
    // Quarter-power wavenumber ratios enter the kernel as exp(¼ ln K²ⱼ − ¼ ln K²ᵢ).
    let qlnk: Vec<f64> = tb.k2.iter().map(|x| 0.25 * x.ln()).collect();
    for i in 0..n {
        let (sn, cs) = tb.omega[i].sin_cos();
        let amp = c_plus * cs + s_plus * sn;
        let amp_d = -c_plus * sn + s_plus * cs;
        w[0][i] = tb.eta[i] * amp;
        wp[0][i] = tb.eta[i] * (-0.25 * tb.d1[i] * amp + tb.rk[i] * amp_d);
    }
    for ord in 1..=m_max {
        let (prev_rest, cur) = w.split_at_mut(ord);
        let prev = &prev_rest[ord - 1];
        let cur = &mut cur[0];
        let curp = &mut wp[ord];
        for i in 0..n {
            let mut acc = 0.0;
            let mut acc_c = 0.0;
            let wi = tb.omega[i];
            for j in 0..=i {
                let wgt = prefix_trap_weight(&tb.t, i, j);
                if wgt == 0.0 {
                    continue;
                }
                let (sn, cs) = (tb.omega[j] - wi).sin_cos();
                let base = wgt * tb.p[j] * (qlnk[j] - qlnk[i]).exp() * prev[j];
                acc += base * sn;
                acc_c += base * cs;
            }
            cur[i] = acc;
            curp[i] = -tb.rk[i] * acc_c - 0.25 * tb.d1[i] * acc;
        }
    }
    OuterChain { w, wp }
}

/// Join constants from the inner partial sums at `t = 1` (the last inner
/// node). Continuity gives `C`; slope continuity gives
/// `S = Σq + 2^{3/2} Σq′ + 2^{−1/2} (D¹_out − D¹_in) Σq`, using the exact
/// join value `R·K(1) = 2^{−3/2}`.
pub fn match_constants(
    inner: &InnerChain,
    order: usize,
    d1_in: f64,
    d1_out: f64,
) -> (f64, f64) {
    let last = inner.q[0].len() - 1;
    let s_val = inner.sum(order, last);
    let s_der = inner.sum_deriv(order, last);
    let c_plus = s_val;
    let s_plus = s_val
        + 2.0f64.powf(1.5) * s_der
        + 2.0f64.powf(-0.5) * (d1_out - d1_in) * s_val;
    (c_plus, s_plus)
}

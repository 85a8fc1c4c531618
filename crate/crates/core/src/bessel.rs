//! Riccati–Bessel functions and phase-shift extraction.
//!
//! `S_l(x) = x·j_l(x)` and `C_l(x) = −x·y_l(x)` tend to `sin(x − lπ/2)` and
//! `cos(x − lπ/2)`, so writing the far wave as `cos δ·S_l + sin δ·C_l` makes
//! `δ` the scattering phase shift. Upward recurrence is stable for the small
//! `l` this engine handles (the test sweeps to l = 5).

/// `(S_l, S_l', C_l, C_l')` at argument `x > 0`.
pub fn riccati_bessel(l: u32, x: f64) -> (f64, f64, f64, f64) {
    let (sx, cx) = x.sin_cos();
    // l = 0 seeds: S₀ = sin, C₀ = cos.
    let (mut s_prev, mut c_prev) = (sx, cx);
    if l == 0 {
        return (sx, cx, cx, -sx);
    }
    // l = 1 via the closed forms S₁ = sin/x − cos, C₁ = cos/x + sin.
    let (mut s, mut c) = (sx / x - cx, cx / x + sx);
    for ell in 1..l {
        let f = (2 * ell + 1) as f64 / x;
        let s_next = f * s - s_prev;
        let c_next = f * c - c_prev;
        s_prev = s;
        c_prev = c;
        s = s_next;
        c = c_next;
    }
    // Derivative identity F_l' = F_{l-1} − (l/x)·F_l for both kinds.
    let lf = l as f64 / x;
    (s, s_prev - lf * s, c, c_prev - lf * c)
}

/// Phase shift from the wave and its derivative at one far-field point.
/// `u` and `du_dx = du/d(kr)` fix the log-derivative. Only tan δ is
/// observable (the S-matrix element is e^{2iδ}), so the value is reduced to
/// the standard branch `[0, π)` — this also removes the overall sign of `u`.
pub fn phase_shift(l: u32, x: f64, u: f64, du_dx: f64) -> f64 {
    let (s, sp, c, cp) = riccati_bessel(l, x);
    // tan δ = (S' − Λ S)/(Λ C − C') with Λ = u'/u; multiplied through by u to
    // stay finite at wave nodes.
    let d = f64::atan2(sp * u - s * du_dx, c * du_dx - cp * u);
    let d = d.rem_euclid(std::f64::consts::PI);
    if d >= std::f64::consts::PI {
        0.0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_trig_closed_forms() {
        for &x in &[0.3, 1.0, 2.7, 10.0] {
            let (s0, s0p, c0, c0p) = riccati_bessel(0, x);
            assert!((s0 - x.sin()).abs() < 1e-14);
            assert!((c0 - x.cos()).abs() < 1e-14);
            assert!((s0p - x.cos()).abs() < 1e-14);
            assert!((c0p + x.sin()).abs() < 1e-14);
            let (s1, s1p, c1, c1p) = riccati_bessel(1, x);
            assert!((s1 - (x.sin() / x - x.cos())).abs() < 1e-13);
            assert!((c1 - (x.cos() / x + x.sin())).abs() < 1e-13);
            let h = 1e-6;
            let fd_s = (riccati_bessel(1, x + h).0 - riccati_bessel(1, x - h).0) / (2.0 * h);
            let fd_c = (riccati_bessel(1, x + h).2 - riccati_bessel(1, x - h).2) / (2.0 * h);
            assert!((s1p - fd_s).abs() < 1e-8);
            assert!((c1p - fd_c).abs() < 1e-8);
        }
    }

    #[test]
    fn wronskian_is_unity() {
        // S C' − C S' = −1 for every l and x (free-equation Wronskian).
        for l in 0..6 {
            for &x in &[0.5, 1.7, 6.0, 20.0] {
                let (s, sp, c, cp) = riccati_bessel(l, x);
                assert!(
                    (s * cp - c * sp + 1.0).abs() < 1e-10,
                    "Wronskian off at l={l}, x={x}"
                );
            }
        }
    }

    proptest::proptest! {
        /// Phase extraction lands on the [0, π) branch and agrees with the
        /// planted value mod π for arbitrary channels and field points.
        #[test]
        fn planted_phase_recovered_mod_pi(
            l in 0u32..6,
            x in 8.0f64..40.0,
            delta0 in -3.0f64..3.0,
        ) {
            let pi = std::f64::consts::PI;
            let (s, sp, c, cp) = riccati_bessel(l, x);
            let u = delta0.cos() * s + delta0.sin() * c;
            let up = delta0.cos() * sp + delta0.sin() * cp;
            let d = phase_shift(l, x, u, up);
            proptest::prop_assert!((0.0..pi).contains(&d), "off branch: {d}");
            let mut diff = (d - delta0) % pi;
            if diff > 0.5 * pi {
                diff -= pi;
            }
            if diff < -0.5 * pi {
                diff += pi;
            }
            proptest::prop_assert!(diff.abs() < 1e-8, "planted {delta0}, got {d}");
        }
    }

    #[test]
    fn recovers_a_planted_phase() {
        // Build u = cos δ₀·S_l + sin δ₀·C_l and ask for δ back (mod π).
        let pi = std::f64::consts::PI;
        for l in 0..4 {
            for &delta0 in &[-1.2f64, -0.3, 0.4, 1.0, 2.8] {
                let x = 17.3;
                let (s, sp, c, cp) = riccati_bessel(l, x);
                let u = delta0.cos() * s + delta0.sin() * c;
                let up = delta0.cos() * sp + delta0.sin() * cp;
                let d = phase_shift(l, x, u, up);
                assert!((0.0..pi).contains(&d), "phase off branch: {d}");
                let mut diff = (d - delta0) % pi;
                if diff > 0.5 * pi {
                    diff -= pi;
                }
                if diff < -0.5 * pi {
                    diff += pi;
                }
                assert!(diff.abs() < 1e-10, "phase not recovered: {d} vs {delta0} at l={l}");
            }
        }
    }
}

//! Potential families: a strongly singular repulsive core times a decaying
//! tail, `U(r) = core(r) · tail(r)`, with
//!
//! * exp core  `exp(a·r1/r)`           — strength `a`, scale `r1`
//! * pow core  `(1 + r1/r)^a`          — requires `a > 4`
//! * exp tail  `exp(−b·r/r2)`          — rate `b`, scale `r2`
//! * pow tail  `(r2/(r2 + r))^b`       — requires `b > 3`
//!
//! All evaluation goes through `ln U` and its radial log-slope so the core
//! blow-up near the origin never overflows before callers decide how deep to
//! look. `g2` is the squared coupling strength multiplying `U`.

use serde::{Deserialize, Serialize};

use crate::channel::Channel;
use crate::error::EngineError;

/// The four core/tail combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ExpCoreExpTail,
    PowCoreExpTail,
    ExpCorePowTail,
    PowCorePowTail,
}

impl Family {
    pub fn core_is_pow(self) -> bool {
        matches!(self, Family::PowCoreExpTail | Family::PowCorePowTail)
    }

    pub fn tail_is_pow(self) -> bool {
        matches!(self, Family::ExpCorePowTail | Family::PowCorePowTail)
    }

    /// Stable lowercase name, matching the serialized form.
    pub fn name(self) -> &'static str {
        match self {
            Family::ExpCoreExpTail => "exp_core_exp_tail",
            Family::PowCoreExpTail => "pow_core_exp_tail",
            Family::ExpCorePowTail => "exp_core_pow_tail",
            Family::PowCorePowTail => "pow_core_pow_tail",
        }
    }
}

fn one() -> f64 {
    1.0
}

/// A concrete potential: family plus parameters. `a` is the core strength
/// (the supersingular sweep parameter), `b` the tail strength, `r1`/`r2` the
/// core/tail length scales.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: Family,
    #[serde(alias = "alpha", alias = "core_strength")]
    pub a: f64,
    #[serde(alias = "beta", alias = "tail_strength")]
    pub b: f64,
    #[serde(alias = "rho1", alias = "core_scale", default = "one")]
    pub r1: f64,
    #[serde(alias = "rho2", alias = "tail_scale", default = "one")]
    pub r2: f64,
    #[serde(alias = "coupling", default = "one")]
    pub g2: f64,
}

impl PotentialSpec {
    pub fn new(family: Family, a: f64, b: f64, r1: f64, r2: f64, g2: f64) -> Result<Self, EngineError> {
        let s = PotentialSpec { family, a, b, r1, r2, g2 };
        s.validate()?;
        Ok(s)
    }

    /// Admissibility: positive finite parameters; pow cores need `a > 4` and
    /// pow tails `b > 3` so the centrifugal-like core exponent dominates the
    /// origin and the tail still decays faster than the matching algebra needs.
    pub fn validate(&self) -> Result<(), EngineError> {
        let fields = [
            ("a", self.a),
            ("b", self.b),
            ("r1", self.r1),
            ("r2", self.r2),
            ("g2", self.g2),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= 0.0 {
                return Err(EngineError::InvalidSpec(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.family.core_is_pow() && self.a <= 4.0 {
            return Err(EngineError::InvalidSpec(format!(
                "power core needs strength a > 4, got {}",
                self.a
            )));
        }
        if self.family.tail_is_pow() && self.b <= 3.0 {
            return Err(EngineError::InvalidSpec(format!(
                "power tail needs strength b > 3, got {}",
                self.b
            )));
        }
        Ok(())
    }

    /// `ln U(r)`, finite for every `r > 0` even where `U` itself overflows.
    pub fn ln_u(&self, r: f64) -> f64 {
        let core = if self.family.core_is_pow() {
            self.a * (self.r1 / r).ln_1p()
        } else {
            self.a * self.r1 / r
        };
        let tail = if self.family.tail_is_pow() {
            -self.b * (r / self.r2).ln_1p()
        } else {
            -self.b * r / self.r2
        };
        core + tail
    }

    /// `U(r)`; overflows to `inf` for deep radii — use [`Self::ln_u`] there.
    pub fn u(&self, r: f64) -> f64 {
        self.ln_u(r).exp()
    }

    /// Radial log-slope `L(r) = d ln U / dr` (negative: `U` is decreasing).
    pub fn log_slope(&self, r: f64) -> f64 {
        let core = if self.family.core_is_pow() {
            -self.a * self.r1 / (r * (r + self.r1))
        } else {
            -self.a * self.r1 / (r * r)
        };
        let tail = if self.family.tail_is_pow() {
            -self.b / (self.r2 + r)
        } else {
            -self.b / self.r2
        };
        core + tail
    }

    /// `L'(r)`, the derivative of the log-slope.
    pub fn log_slope_deriv(&self, r: f64) -> f64 {
        let core = if self.family.core_is_pow() {
            let d = r * (r + self.r1);
            self.a * self.r1 * (2.0 * r + self.r1) / (d * d)
        } else {
            2.0 * self.a * self.r1 / (r * r * r)
        };
        let tail = if self.family.tail_is_pow() {
            self.b / ((self.r2 + r) * (self.r2 + r))
        } else {
            0.0
        };
        core + tail
    }

    /// `ln(g² R² U(R t))`, the log of the potential term of the radial
    /// equation in the scaled coordinate.
    pub fn ln_g2r2u(&self, big_r: f64, t: f64) -> f64 {
        self.g2.ln() + 2.0 * big_r.ln() + self.ln_u(big_r * t)
    }
}

/// Positive root of `k²R² − g²R²U(R) − λ² = 0`, the radius where the local
/// wave turns from exponential to oscillatory. Solved in the log domain so
/// the core blow-up at small `R` cannot overflow; the bracket is grown by
/// doubling/halving from `R = 1` and then bisected to full precision.
pub fn master_radius(spec: &PotentialSpec, ch: &Channel) -> Result<f64, EngineError> {
    let lam2 = ch.lam2();
    let k2 = ch.k * ch.k;
    // Sign of k²R² − λ² − g²R²U(R): negative once kR is below the centrifugal
    // floor, otherwise compared in logs.
    let sgn = |r: f64| -> f64 {
        let lhs = k2 * r * r - lam2;
        if lhs <= 0.0 {
            return -1.0;
        }
        let diff = lhs.ln() - (spec.g2.ln() + 2.0 * r.ln() + spec.ln_u(r));
        if diff == 0.0 {
            0.0
        } else {
            diff.signum()
        }
    };

    let mut lo = 1.0;
    let mut hi = 1.0;
    if sgn(1.0) > 0.0 {
        while sgn(lo) > 0.0 {
            lo *= 0.5;
            if lo < 1e-12 {
                return Err(EngineError::BracketFailure(
                    "no sign change below R = 1 while bracketing the matching radius".into(),
                ));
            }
        }
    } else {
        while sgn(hi) <= 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(EngineError::BracketFailure(
                    "k²R² never overtakes the potential term up to R = 1e12".into(),
                ));
            }
        }
        lo = 0.5 * hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sgn(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn benchmark() -> PotentialSpec {
        PotentialSpec::new(Family::PowCorePowTail, 6.0, 4.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn rejects_shallow_power_core() {
        let r = PotentialSpec::new(Family::PowCorePowTail, 3.0, 4.0, 1.0, 1.0, 1.0);
        assert!(matches!(r, Err(EngineError::InvalidSpec(_))));
        let r = PotentialSpec::new(Family::ExpCorePowTail, 1.0, 3.0, 1.0, 1.0, 1.0);
        assert!(matches!(r, Err(EngineError::InvalidSpec(_))));
        let r = PotentialSpec::new(Family::ExpCoreExpTail, -1.0, 1.0, 1.0, 1.0, 1.0);
        assert!(matches!(r, Err(EngineError::InvalidSpec(_))));
    }

    #[test]
    fn closed_forms_at_unit_radius() {
        // (1+1/r)^6 (1/(1+r))^4 at r = 1: U = 64/16 = 4, and the log-slope
        // pieces are -6/2 - 4/2 = -5 with derivative 6*3/4 + 4/4 = 5.5.
        let s = benchmark();
        assert!((s.u(1.0) - 4.0).abs() < 1e-12);
        assert!((s.log_slope(1.0) + 5.0).abs() < 1e-12);
        assert!((s.log_slope_deriv(1.0) - 5.5).abs() < 1e-12);
        // U' = U·L and U'' = U·(L² + L')
        let up = s.u(1.0) * s.log_slope(1.0);
        let upp = s.u(1.0) * (s.log_slope(1.0).powi(2) + s.log_slope_deriv(1.0));
        assert!((up + 20.0).abs() < 1e-12);
        assert!((upp - 122.0).abs() < 1e-12);
    }

    #[test]
    fn log_slope_matches_finite_differences() {
        let specs = [
            benchmark(),
            PotentialSpec::new(Family::ExpCoreExpTail, 2.5, 1.3, 0.7, 1.8, 2.0).unwrap(),
            PotentialSpec::new(Family::PowCoreExpTail, 7.0, 0.9, 1.2, 0.6, 1.0).unwrap(),
            PotentialSpec::new(Family::ExpCorePowTail, 1.7, 5.0, 0.8, 1.1, 3.0).unwrap(),
        ];
        for s in specs {
            for &r in &[0.05, 0.3, 1.0, 2.7, 9.0] {
                let h = 1e-6 * r;
                let fd = (s.ln_u(r + h) - s.ln_u(r - h)) / (2.0 * h);
                assert!(
                    (fd - s.log_slope(r)).abs() < 1e-5 * (1.0 + s.log_slope(r).abs()),
                    "log-slope mismatch at r={r}"
                );
                let fd2 = (s.log_slope(r + h) - s.log_slope(r - h)) / (2.0 * h);
                assert!(
                    (fd2 - s.log_slope_deriv(r)).abs() < 1e-4 * (1.0 + s.log_slope_deriv(r).abs()),
                    "log-slope derivative mismatch at r={r}"
                );
            }
        }
    }

    #[test]
    fn matching_radius_benchmark_value() {
        let s = benchmark();
        let ch = Channel::new(1.0, 0).unwrap();
        let r = master_radius(&s, &ch).unwrap();
        assert!(
            (r - 1.344_410_656_490_327_8).abs() < 1e-12,
            "matching radius drifted: {r}"
        );
    }

    #[test]
    fn matching_radius_zeroes_the_master_equation() {
        let s = benchmark();
        for l in [0u32, 1, 2] {
            let ch = Channel::new(1.0, l).unwrap();
            let r = master_radius(&s, &ch).unwrap();
            let res = ch.k * ch.k * r * r - s.g2 * r * r * s.u(r) - ch.lam2();
            assert!(res.abs() < 1e-10 * (ch.k * ch.k * r * r), "residual {res} at l={l}");
        }
    }

    #[test]
    fn spec_json_aliases_accepted() {
        let s: PotentialSpec = serde_json::from_str(
            r#"{"family":"exp_core_exp_tail","alpha":2.0,"beta":1.5,"rho1":0.9,"rho2":1.1}"#,
        )
        .unwrap();
        assert_eq!(s.family, Family::ExpCoreExpTail);
        assert!((s.a - 2.0).abs() < 1e-15 && (s.g2 - 1.0).abs() < 1e-15);
    }

    proptest::proptest! {
        /// Any admissible spec is strictly decreasing in r (repulsive core,
        /// decaying tail) and its closed-form log-slopes agree with finite
        /// differences of ln U.
        #[test]
        fn log_slope_consistent_for_admissible_specs(
            fam_ix in 0usize..4,
            a_exp in 0.5f64..8.0,
            a_pow in 4.5f64..12.0,
            b_exp in 0.5f64..4.0,
            b_pow in 3.5f64..9.0,
            r1 in 0.5f64..2.0,
            r2 in 0.5f64..2.0,
            g2 in 0.5f64..4.0,
            r in 0.05f64..15.0,
        ) {
            let family = [
                Family::ExpCoreExpTail,
                Family::PowCoreExpTail,
                Family::ExpCorePowTail,
                Family::PowCorePowTail,
            ][fam_ix];
            let a = if family.core_is_pow() { a_pow } else { a_exp };
            let b = if family.tail_is_pow() { b_pow } else { b_exp };
            let s = PotentialSpec::new(family, a, b, r1, r2, g2).unwrap();
            let slope = s.log_slope(r);
            proptest::prop_assert!(slope < 0.0, "potential not decreasing at r={r}");
            let h = 1e-6 * r;
            let fd = (s.ln_u(r + h) - s.ln_u(r - h)) / (2.0 * h);
            proptest::prop_assert!(
                (fd - slope).abs() < 1e-5 * (1.0 + slope.abs()),
                "log-slope {slope} vs finite difference {fd} at r={r}"
            );
            let fd2 = (s.log_slope(r + h) - s.log_slope(r - h)) / (2.0 * h);
            let d2 = s.log_slope_deriv(r);
            proptest::prop_assert!(
                (fd2 - d2).abs() < 1e-4 * (1.0 + d2.abs()),
                "log-slope derivative {d2} vs finite difference {fd2} at r={r}"
            );
        }

        /// The matching radius really zeroes k²R² − G²R²U(R) − λ² across
        /// random admissible specs and channels.
        #[test]
        fn matching_radius_solves_master_equation(
            fam_ix in 0usize..4,
            a_exp in 0.5f64..8.0,
            a_pow in 4.5f64..12.0,
            b_exp in 0.5f64..4.0,
            b_pow in 3.5f64..9.0,
            g2 in 0.5f64..4.0,
            k in 0.5f64..3.0,
            l in 0u32..3,
        ) {
            let family = [
                Family::ExpCoreExpTail,
                Family::PowCoreExpTail,
                Family::ExpCorePowTail,
                Family::PowCorePowTail,
            ][fam_ix];
            let a = if family.core_is_pow() { a_pow } else { a_exp };
            let b = if family.tail_is_pow() { b_pow } else { b_exp };
            let s = PotentialSpec::new(family, a, b, 1.0, 1.0, g2).unwrap();
            let ch = Channel::new(k, l).unwrap();
            let r = master_radius(&s, &ch).unwrap();
            proptest::prop_assert!(r.is_finite() && r > 0.0);
            let res = k * k * r * r - g2 * r * r * s.u(r) - ch.lam2();
            let scale = (k * k * r * r).max(ch.lam2());
            proptest::prop_assert!(
                res.abs() < 1e-9 * scale,
                "master-equation residual {res} at R={r}"
            );
        }
    }
}

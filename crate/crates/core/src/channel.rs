//! Scattering channel: wavenumber `k` and angular momentum `l`, plus the
//! centrifugal triad that lets each region carry its own centrifugal
//! strength while their average enters the matching-radius equation.

use serde::{Deserialize, Serialize};

use crate::error::EngineError;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Channel {
    pub k: f64,
    pub l: u32,
}

impl Channel {
    pub fn new(k: f64, l: u32) -> Result<Self, EngineError> {
        if !k.is_finite() || k <= 0.0 {
            return Err(EngineError::InvalidSpec(format!(
                "wavenumber k must be positive and finite, got {k}"
            )));
        }
        Ok(Channel { k, l })
    }

    /// Inner-region centrifugal strength `(l + 1/2)²` — the Langer value that
    /// keeps the exponential reference regular at the origin.
    pub fn lam_eps2(&self) -> f64 {
        let lh = self.l as f64 + 0.5;
        lh * lh
    }

    /// Outer-region centrifugal strength `l(l+1)` — the exact value, so the
    /// oscillatory reference carries the true far-field phase.
    pub fn lam_tau2(&self) -> f64 {
        let l = self.l as f64;
        l * (l + 1.0)
    }

    /// Average of the two; this is the `λ²` of the matching-radius equation.
    /// The split guarantees `λ_ε² − λ² = λ² − λ_τ² = 1/8` for every `l`, which
    /// is what pins the local wavenumber at the join to `1/(8R²)`.
    pub fn lam2(&self) -> f64 {
        0.5 * (self.lam_eps2() + self.lam_tau2())
    }

    /// True centrifugal coefficient `l(l+1)` of the radial equation.
    pub fn ll1(&self) -> f64 {
        self.lam_tau2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triad_gaps_are_an_eighth() {
        for l in 0..6 {
            let ch = Channel::new(2.0, l).unwrap();
            assert!((ch.lam_eps2() - ch.lam2() - 0.125).abs() < 1e-15);
            assert!((ch.lam2() - ch.lam_tau2() - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_nonpositive_wavenumber() {
        assert!(Channel::new(0.0, 0).is_err());
        assert!(Channel::new(f64::NAN, 1).is_err());
    }
}

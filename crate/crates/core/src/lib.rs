//! Scattering wave functions for strongly singular central potentials.
//!
//! The engine builds the regular radial wave function in two regions joined at
//! a matching radius `R` (the root of `k²R² − G²R²U(R) − λ² = 0`): an inner
//! region where the reference solution is a growing exponential of the local
//! phase integral, and an outer region where it oscillates. Each reference is
//! a smooth-WKB wave with a region-specific centrifugal strength chosen so the
//! local wavenumber stays finite and positive through the join. What the
//! reference misses is folded into a residual potential and recovered by
//! iterating a Volterra integral equation; the iterates shrink factorially, so
//! a handful of orders give the wave function and the phase shift.
//!
//! An independent direct integration of the radial equation ([`oracle`]) serves
//! as ground truth, and [`asymptotic`] covers the strong-core limit where the
//! potential core grows without bound.

pub mod asymptotic;
pub mod bessel;
pub mod channel;
pub mod error;
pub mod io;
pub mod oracle;
pub mod potential;
pub mod quad;
pub mod solver;
pub mod volterra;
pub mod wkb;

pub use channel::Channel;
pub use error::EngineError;
pub use potential::{Family, PotentialSpec};
pub use solver::{SolveConfig, SolveResult, Verdict};

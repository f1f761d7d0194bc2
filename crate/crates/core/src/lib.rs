//! Numerical laboratory for the generalized surface quasi-geostrophic family
//! `ω_t + u·∇ω = 0`, `u = ∇^⊥(−Δ)^{−1+α}ω`, `0 ≤ α ≤ 1/2`.
//!
//! * [`spectral`]: periodic grid, FFTs, Fourier multipliers and norms.
//! * [`littlewood_paley`]: dyadic partition, blocks, Besov norms, Bony calculus.
//! * [`kernel`]: planar singular integrals with a smooth kernel split and
//!   uniform-in-β bound checks.
//! * [`solver`]: dealiased pseudo-spectral RK4 integration with snapshots.
//! * [`experiments`]: α-continuity rate studies and inequality verifiers.

pub mod bump;
pub mod error;
pub mod experiments;
pub mod kernel;
pub mod littlewood_paley;
pub mod quadrature;
pub mod report;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};

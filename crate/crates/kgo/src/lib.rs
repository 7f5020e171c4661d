//! One-dimensional Klein-Gordon oscillator with an energy-dependent potential.
//!
//! The oscillator coupling is modified by `p -> p + i(1+γE)x`, which makes the
//! eigenvalue problem nonlinear in the energy: the spectrum is fixed by a quartic
//! quantization condition and the probability density picks up an energy weight
//! `E - ∂V/∂E` so the norm stays conserved. This crate solves the spectrum,
//! builds the modified densities in coordinate and momentum space, computes
//! Fisher information and Shannon entropy, and checks the Stam, Cramér-Rao,
//! Fisher-product, and Bialynicki-Birula–Mycielski (BBM) uncertainty relations.
//!
//! Modules:
//! - [`spectrum`]: quartic roots, physical-root selection, energy curves.
//! - [`states`]: normalized eigenstates and modified densities in both spaces.
//! - [`quadrature`]: adaptive Gauss-Kronrod integration plus a Gauss-Hermite rule.
//! - [`measures`]: moments, Fisher (direct and closed-form), Shannon, inequality reports.
//! - [`cli`]: the `kgo` command-line surface (spectrum / table / density / check / selftest).

pub mod cli;
pub mod measures;
pub mod published;
pub mod quadrature;
pub mod spectrum;
pub mod states;

pub use measures::{InequalityRecord, MeasureReport};
pub use quadrature::{IntegralResult, QuadratureSpec};
pub use spectrum::{Branch, EnergyLevel, ModelConfig};
pub use states::{DensityCurve, Space, WaveState};

//! Weak-value amplification in an imbalanced Mach-Zehnder interferometer,
//! told two ways and checked against each other.
//!
//! A single photon (or weak coherent state) entering a nearly balanced
//! interferometer is occasionally detected at the almost-dark output port.
//! Conditioned on such a detection, a gentle photon-number measurement in
//! one arm reads out far more photons than the arm ever holds on average —
//! the weak value. This crate implements both descriptions of that effect
//! and quantifies where they agree:
//!
//! * [`quantum`] — closed-form weak values and the post-selected intensity
//!   shift `D_I = 1/2 + 1/(2 delta)`;
//! * [`fock_oracle`] — a truncated two-mode Fock-space engine that computes
//!   the same quantities with no first-order truncation, validating the
//!   formulas;
//! * [`stochastic`] — a classical-field model with Gaussian amplitude
//!   fluctuations standing in for vacuum fluctuations; Bayesian
//!   post-selection on a dark-port click reproduces the quantum shift when
//!   the fluctuations are small against the imbalance (`sigma = 1/2`
//!   recovers it exactly at leading order), and diverges outside that
//!   regime;
//! * [`montecarlo`] — reproducible trial-level simulation with rejection
//!   and likelihood-weighted estimators;
//! * [`experiments`] — scenario drivers regenerating the comparison figures
//!   and the validity-ratio table as CSV/JSON datasets.

pub mod error;
pub mod experiments;
pub mod fock_oracle;
pub mod montecarlo;
pub mod quadrature;
pub mod quantum;
pub mod stochastic;

pub use error::{Error, Result};

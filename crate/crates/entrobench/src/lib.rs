//! Entropy-density benchmarking of noisy layered quantum circuits.
//!
//! The crate simulates hardware-efficient brickwork circuits under local
//! depolarising noise with dense density matrices, estimates the resulting
//! purity / Renyi-2 entropy with two statistical protocols (randomized Pauli
//! measurements and Bell-measurement swap tests), fits a global-depolarising
//! heuristic to measured purity curves, and converts the fitted rates into
//! circuit-size thresholds beyond which a classical solver provably wins.
//!
//! Module map:
//! - [`sim`]: density matrices, gates, depolarising channels, readout-noisy
//!   sampling.
//! - [`ansatz`]: brickwork circuit construction and noisy layer-by-layer
//!   evolution.
//! - [`shadows`]: randomized-measurement purity estimation, sampling bounds,
//!   exhaustive-scan and resampling variants.
//! - [`swaptest`]: Bell-measurement purity estimation and its Hoeffding
//!   bound.
//! - [`heuristic`]: the closed-form purity model and least-squares fitting.
//! - [`advantage`]: certified-classical circuit-size thresholds.
//! - [`calibration`]: calibration-table ingestion and fidelity-to-rate
//!   conversion.

pub mod advantage;
pub mod ansatz;
pub mod calibration;
pub mod error;
pub mod heuristic;
pub mod seeding;
pub mod shadows;
pub mod sim;
pub mod swaptest;

pub use error::{Error, Result};
pub use sim::{BitString, DensityMatrix, Gate, NoiseModel, ReadoutError};

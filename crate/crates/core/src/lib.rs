//! Simulation of two-dimensional discrete-time quantum walks.
//!
//! Three walk schemes are supported: the four-state Grover walk, the
//! two-state alternate walk (coin, step along x, coin, step along y) and the
//! coin-free two-state Pauli walk which translates along x in the σ₃
//! eigenbasis and along y in the σ₁ eigenbasis. Walks can be evolved as pure
//! states or as density operators subject to coin-space noise channels
//! (bit-flip, permutation state-flips, depolarizing). Quantum correlations are
//! quantified with the measurement-induced disturbance (MID) between the coin
//! and the lattice, and between the two lattice axes.
//!
//! Module map:
//!
//! * [`space`] and [`state`]: Hilbert-space bookkeeping, state containers,
//!   marginals and partial traces.
//! * [`walk`]: coins, shifts, initial states and step kernels.
//! * [`noise`]: Kraus channels and noisy density evolution.
//! * [`correlations`]: entropy, mutual information and MID.
//! * [`symmetry`]: flip-absorption symmetries and their breakdown for the
//!   four-state walk.
//! * [`experiment`]: experiment configuration, figure presets, CSV and SVG
//!   output.

pub mod correlations;
pub mod error;
pub mod experiment;
pub(crate) mod linalg;
pub mod noise;
pub mod space;
pub mod state;
pub mod symmetry;
pub mod walk;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use space::{flat_index, HilbertSpec, Subsystem};
pub use state::{Bipartition, DensityOperator, Distribution, PureState, SubsystemState};
pub use walk::{CoinOperator, InitialCoinState, SchemeKind, WalkScheme};

/// Dense complex matrix type used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

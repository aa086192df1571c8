//! Simulator for relaxed-spin networks driven by the V2 model.
//!
//! A relaxed spin is a pair (σ, X) of a discrete spin σ ∈ {−1, 1} and a
//! continuous component X ∈ [−1, 1), folded here into one angle
//! θ = σ + X on a circle of circumference 4. The network evolves by
//! gradient ascent of the relaxed cut function
//!
//!   C_V2(σ, X) = C(σ) + ¼ Σ_{m,n} A_{m,n} σ_m σ_n |X_m − X_n|,
//!
//! with equations of motion dX_m/dt = σ_m Σ_n A_{m,n} σ_n sgn(X_m − X_n).
//! C_V2 is invariant under uniform rotation θ_m → θ_m + r, so one terminal
//! state read out under different rotations yields a whole chain of spin
//! configurations. The `circuits` half of the crate exploits this to run
//! several Boolean evaluations (AND/OR gates, N-bit ripple-carry adders)
//! inside a single relaxation.

pub mod adder;
pub mod cluster;
pub mod dynamics;
pub mod encoding;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod network;
pub mod objective;
pub mod oracle;
pub mod phase;
pub mod symmetry;

pub use cluster::detect_clusters;
pub use dynamics::{evolve, rate, sample_initial, step, IntegratorConfig, TerminalState};
pub use error::{Error, Result};
pub use network::{Role, SpinNetwork};
pub use objective::{cut_correction, discrete_cut, ising_energy, relaxed_cut};
pub use phase::{PhasePoint, Spin};
pub use symmetry::{chain_readout, critical_rotations, rotate, verify_cut_invariance, ChainReadout};

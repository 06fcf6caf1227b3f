//! # qchain
//!
//! Numerics for quantum Rényi divergences and their chain rules.
//!
//! The crate computes the classical, measured, sandwiched, geometric, and
//! max Rényi divergences at small dimension, builds the reverse test that
//! achieves the geometric divergence, estimates channel divergences
//! (plain, stabilized, amortized, and small-n regularized) as certified
//! lower bounds with explicit witnesses, and verifies divergence chain
//! rules over randomized instance campaigns.
//!
//! Everything is reported in bits (logarithms base 2). All randomness is
//! driven by explicit 64-bit seeds through counter-derived substreams, so
//! every result is reproducible, including under parallel execution.

pub mod channel_div;
pub mod divergence;
pub mod numkernel;
pub mod quantum;
pub mod verify;

//! Turbo-coded side-information source coding and sliced reconciliation for
//! continuous-variable quantum key distribution.
//!
//! The pieces, bottom up:
//!
//! - [`trellis`]: the 16-state duo-binary RSC constituent code (23, 35).
//! - [`puncture`]: binary entropy, the BER-to-rate policy and parity masks.
//! - [`interleave`]: the parity-aware interleaver between the two encoders.
//! - [`siso`]: Log-MAP decoding and the iterative turbo loop.
//! - [`sw_codec`]: parity-only Slepian-Wolf encoding and decoding.
//! - [`cascade`]: interactive Cascade reconciliation with disclosure counting.
//! - [`slicing`]: Gaussian-to-slices quantization and Bob's slice estimates.
//! - [`ledger`]: per-slice strategy choice and net-yield accounting.
//! - [`harness`]: data generation, benchmarks and the reconcile driver behind the CLI.

pub mod cascade;
pub mod error;
pub mod harness;
pub mod interleave;
pub mod ledger;
pub mod puncture;
pub mod rng;
pub mod siso;
pub mod slicing;
pub mod sw_codec;
pub mod trellis;

pub use error::{Error, Result};

/// A single bit stored as 0 or 1.
pub type Bit = u8;

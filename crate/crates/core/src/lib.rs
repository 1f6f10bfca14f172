//! Quantum homomorphic evaluation on one-time-padded states.
//!
//! The crate simulates the full stack needed to run a search blindly on a
//! remote quantum server:
//!
//! * [`statevector`]: a dense few-qubit simulator with sampled, scripted and
//!   branch-enumerating measurement.
//! * [`pauli_crypto`]: the quantum one-time pad (QOTP) and the classical pad
//!   used to ship keys.
//! * [`key_update`]: classical decryption-key tracking for every gate of the
//!   universal set, plus the GF(2) matrix form of a Clifford circuit's key map.
//! * [`gadgets`]: the interactive T / T† gadget.
//! * [`circuits`]: circuit IR, text parser, Toffoli decomposition, the 2-qubit
//!   Grover builder and the homomorphic compiler.
//! * [`evaluation`]: a single-owner homomorphic runner used by the invariant
//!   checks.
//! * [`protocols`]: the multi-party flows (key-center blind search and the
//!   compact Clifford evaluation with a key searcher), with transcripts.
//! * [`selftest`]: the invariant suites exposed by the CLI.

pub mod bits;
pub mod circuits;
pub mod error;
pub mod evaluation;
pub mod gadgets;
pub mod gf2;
pub mod key_update;
pub mod pauli_crypto;
pub mod protocols;
pub mod selftest;
pub mod statevector;

pub use bits::BitString;
pub use error::{QheError, Result};
